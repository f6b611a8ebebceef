# src/geometry/bounds.py
import logging
import math
from typing import Sequence

import numpy as np
import pandas as pd

from ..semigroup.theta import kernel_at_identity, log_theta1d
from ..spectral.fields import SpectralField
from ..spectral.norms import sample_norms, vector_norm_estimate
from ..spectral.quadrature import quadrature_for
from ..spectral.weights import WeightModel
from ..utils.report import ExperimentReport
from .differences import difference_operator
from .distance import distance_from_identity
from .gradient import gradient_components

logger = logging.getLogger(__name__)

# Сетки подбора констант (A, C)
A_FACTORS = np.logspace(0.02, 1.2, 16)
C_MESH = np.logspace(-2, 4, 121)
CANONICAL_A_FACTOR = 2.0
POINCARE_TOLERANCE = 1e-8
ENDPOINT_QUADRATURE_TOLERANCE = 1e-3


def log_kernel_on_sample(w: WeightModel, t: float, points: np.ndarray, log_mu_e: float) -> np.ndarray:
    """
    log mu_t(x) = log mu_t(e) + sum_{i<=d} [log theta(x_i, a_i t) - log theta(0, a_i t)]
    для точек усечённого тора, вложенного в бесконечномерный
    """
    s = w.weights * t
    shifted = log_theta1d(points, s[None, :])
    at_zero = log_theta1d(np.zeros_like(s), s)
    return log_mu_e + np.sum(shifted - at_zero[None, :], axis=1)


def verify_gaussian_bound(w: WeightModel, lam: float, t_grid: Sequence[float],
                          points: np.ndarray) -> ExperimentReport:
    """
    Подбор (A, C) в log mu_t(x) <= A / t^lam - d(e, x)^2 / (C t) по сетке констант

    Для каждого A = A_0 * factor (A_0 = sup_t t^lam log mu_t(e)) наименьшее допустимое
    C(A) = max d^2 / (t (A t^-lam - log mu_t(x))) округляется вверх до узла C_MESH.
    Каноническая пара берётся при A = 2 A_0.

    Args:
        w: Диагональная весовая модель
        lam: Показатель lambda из (0, 1)
        t_grid: Сетка t
        points: Выборка точек формы (m, d)

    Returns:
        ExperimentReport: Подобранные константы и граница допустимых пар
    """
    if not 0 < lam < 1:
        raise ValueError(f"lambda должна лежать в (0, 1), получено: {lam}")
    if not w.is_diagonal:
        raise ValueError("Гауссова оценка проверяется для диагональных весов")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    t_grid = np.asarray(t_grid, dtype=float)
    distances = distance_from_identity(points, w)
    distances = np.atleast_1d(distances)

    identity = np.array([kernel_at_identity(float(t), w).log_mu for t in t_grid])
    a0 = float(np.max(t_grid ** lam * identity))
    log_kernels = np.stack([log_kernel_on_sample(w, float(t), points, identity[k]) for k, t in enumerate(t_grid)])

    report = ExperimentReport(name="gaussian-bound", tag="gaussian-bound")
    rows = []
    positive = distances > 0
    for factor in A_FACTORS:
        a = a0 * factor
        margin = a * t_grid[:, None] ** (-lam) - log_kernels
        required = np.zeros_like(margin)
        with np.errstate(divide="ignore"):
            required[:, positive] = distances[None, positive] ** 2 / (t_grid[:, None] * margin[:, positive])
        worst = np.unravel_index(int(np.argmax(required)), required.shape)
        c_needed = float(required[worst])
        admissible = C_MESH[C_MESH >= c_needed]
        c_value = float(admissible[0]) if admissible.size else math.inf
        rows.append({"A_factor": float(factor), "A": a, "C_required": c_needed, "C": c_value,
                     "worst_t": float(t_grid[worst[0]]), "worst_point": int(worst[1])})
    frontier = pd.DataFrame(rows)
    report.tables["gaussian_frontier"] = frontier

    finite = frontier[np.isfinite(frontier["C"])]
    if finite.empty:
        last = rows[-1]
        report.fail("нет допустимой пары (A, C) в сетке",
                    {"t": last["worst_t"], "x": points[last["worst_point"]].tolist()})
    else:
        canonical = finite.loc[(finite["A_factor"] - CANONICAL_A_FACTOR).abs().idxmin()]
        report.constants = {"A0": a0, "A": float(canonical["A"]), "C": float(canonical["C"]),
                            "C_required": float(canonical["C_required"])}
        a, c = float(canonical["A"]), float(canonical["C"])
        bound = a * t_grid[:, None] ** (-lam) - distances[None, :] ** 2 / (c * t_grid[:, None])
        slack = bound - log_kernels
        worst = np.unravel_index(int(np.argmin(slack)), slack.shape)
        report.record(float(slack[worst]), {"t": float(t_grid[worst[0]]), "x": points[worst[1]].tolist()}, 1e-12)
    report.notes.append("константы подобраны по сетке; теоретические значения не утверждаются")
    logger.info(f"Гауссова оценка {w.spec}, lambda={lam}: A0={a0:.4g}, константы {report.constants}")
    return report


def poincare_check(f: SpectralField, w: WeightModel, shifts: np.ndarray, p: float) -> ExperimentReport:
    """
    ||Delta_y f||_p <= d(e, y) ||Gamma(f, f)^{1/2}||_p для выборки сдвигов

    Args:
        f: Вещественное поле
        w: Весовая модель
        shifts: Сдвиги формы (m, d)
        p: Показатель, 1 <= p <= inf

    Returns:
        ExperimentReport: Наихудший запас и свидетель y
    """
    if not f.is_real():
        raise ValueError("Неравенство Пуанкаре проверяется для вещественных полей")
    report = ExperimentReport(name="poincare", tag="poincare")
    rule = quadrature_for(f.lattice)
    gradient = vector_norm_estimate(gradient_components(f, w), p, rule).value
    endpoint = p in (1.0, math.inf)
    shifts = np.atleast_2d(np.asarray(shifts, dtype=float))
    distances = np.atleast_1d(distance_from_identity(shifts, w))
    for y, dist in zip(shifts, distances):
        value = sample_norms(difference_operator(f, y, 1), [p], rule)[p]
        tolerance = POINCARE_TOLERANCE + (ENDPOINT_QUADRATURE_TOLERANCE * dist * gradient if endpoint else 0.0)
        report.record(dist * gradient - value, {"y": y.tolist()}, tolerance)
    report.constants["gradient_norm"] = gradient
    return report
