# src/semigroup/checks.py
import logging
import math
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..spectral.dictionary import Trial
from ..spectral.fields import SpectralField
from ..spectral.lattice import FrequencyLattice
from ..spectral.norms import lp_norm, sample_norms
from ..spectral.quadrature import QuadratureRule, quadrature_for
from ..spectral.symbols import eigenvalues
from ..spectral.weights import WeightModel
from ..utils.numeric import p_star
from ..utils.report import ExperimentReport
from .heat import fractional_power, heat_apply, heat_time_derivative, smallest_eigenvalue
from .theta import (
    DEFAULT_MATRIX_BANDWIDTH,
    THETA_CROSSOVER,
    kernel_at_identity,
    log_kernel_density,
    log_theta1d,
    matrix_kernel_sum,
)

logger = logging.getLogger(__name__)

ANALYTICITY_TOLERANCE = 1e-8
# Для p в {1, inf} сеточная квадратура даёт относительную погрешность порядка h^2
ENDPOINT_QUADRATURE_TOLERANCE = 1e-3
KERNEL_BAND_TOLERANCE = 1e-8
KERNEL_VALUE_TOLERANCE = 1e-10
DUAL_THETA_TOLERANCE = 1e-12
DUAL_THETA_POINTS = 64


def _as_list(ps: Union[float, Sequence[float]]) -> List[float]:
    return [float(ps)] if np.isscalar(ps) else [float(p) for p in ps]


def m0(t: float, w: WeightModel) -> float:
    """M_0(t) = log mu_t(e) полной модели (для матричных весов - прямая сумма)"""
    if w.is_diagonal:
        return kernel_at_identity(t, w).log_mu
    return log_kernel_density(np.zeros(w.dimension), t, w)


def check_analyticity(w: WeightModel, ps: Union[float, Sequence[float]], trials: Sequence[Trial],
                      t_grid: Sequence[float], orders: Sequence[int] = (1, 2)) -> ExperimentReport:
    """
    Проверка t^n ||L^n H_t f||_p <= (p*)^n ||f||_p + 1e-8

    Args:
        w: Весовая модель
        ps: Показатель(и), 1 < p < inf
        trials: Пробные поля
        t_grid: Сетка t
        orders: Порядки n

    Returns:
        ExperimentReport: Наихудший запас и свидетель (поле, t, n, p)
    """
    ps = _as_list(ps)
    for p in ps:
        if not 1 < p < math.inf:
            raise ValueError(f"Аналитичность проверяется при 1 < p < inf, получено: {p}")
    report = ExperimentReport(name="analyticity", tag="analyticity")
    rows = []
    for trial in trials:
        base = sample_norms(trial.field, ps)
        best: Dict[tuple, tuple] = {}
        for t in t_grid:
            for n in orders:
                derivative = heat_time_derivative(trial.field, float(t), n, w)
                norms = sample_norms(derivative, ps)
                for p in ps:
                    if base[p] == 0.0:
                        continue
                    value = t ** n * norms[p]
                    bound = p_star(p) ** n * base[p]
                    report.record(bound - value, {"trial": trial.name, "t": float(t), "n": n, "p": p},
                                  ANALYTICITY_TOLERANCE)
                    ratio = value / base[p]
                    if ratio > best.get((p, n), (-1.0, 0.0))[0]:
                        best[(p, n)] = (ratio, float(t))
        for (p, n), (ratio, t_arg) in best.items():
            rows.append({"trial": trial.name, "p": p, "n": n, "best_ratio": ratio,
                         "argmax_t": t_arg, "bound": p_star(p) ** n})
    report.tables["analyticity"] = pd.DataFrame(rows)
    logger.info(f"Аналитичность: {len(trials)} полей, запас {report.worst_slack:.3e}, passed={report.passed}")
    return report


def _kernel_derivative_norm(lattice: FrequencyLattice, w: WeightModel, t: float, order: int,
                            rule: Optional[QuadratureRule]) -> Optional[float]:
    """t^n ||d^n/dt^n mu_t||_1 ядра полосы; None, если полоса не разрешает ядро при этом t"""
    lam = eigenvalues(lattice.frequencies, w)
    boundary = np.zeros(lattice.shape, dtype=bool)
    for axis in range(lattice.d):
        index = [slice(None)] * lattice.d
        index[axis] = [0, -1]
        boundary[tuple(index)] = True
    residue = float(np.max((lam[boundary] * t) ** order * np.exp(-t * lam[boundary])))
    if residue > KERNEL_BAND_TOLERANCE:
        return None
    kernel = SpectralField(lattice, (-lam) ** order * np.exp(-t * lam))
    return t ** order * lp_norm(kernel, 1.0, rule)


def check_L1_Linf_differentiability(w: WeightModel, lattice: FrequencyLattice, trials: Sequence[Trial],
                                    t_grid: Sequence[float], orders: Sequence[int] = (1, 2)) -> ExperimentReport:
    """
    t ||d_t H_t||_{p->p} <= 2e max{M_0(t/2), 2} для p в {1, inf}, второй порядок
    против 4e (max{M_0(t/2), 2})^2. Нижняя оценка - отношения на пробных полях,
    значение ядра полосы t ||d_t mu_t||_1 сообщается, когда полоса разрешает ядро.

    Args:
        w: Весовая модель
        lattice: Решётка пробных полей
        trials: Пробные поля
        t_grid: Сетка t
        orders: Порядки (1 и/или 2)

    Returns:
        ExperimentReport: Таблица t, M0, нижних оценок, значений ядра и границ
    """
    report = ExperimentReport(name="l1-linf-differentiability", tag="l1-linf-differentiability")
    rule = quadrature_for(lattice)
    bases = [(trial, sample_norms(trial.field, [1.0, math.inf], rule)) for trial in trials]
    rows = []
    for t in t_grid:
        t = float(t)
        m0_half = m0(t / 2.0, w)
        level = max(m0_half, 2.0)
        for order in orders:
            bound = (2.0 * math.e * level) ** order
            lower = {1.0: 0.0, math.inf: 0.0}
            for trial, base in bases:
                derivative = heat_time_derivative(trial.field, t, order, w)
                norms = sample_norms(derivative, [1.0, math.inf], rule)
                for p in (1.0, math.inf):
                    if base[p] > 0:
                        lower[p] = max(lower[p], t ** order * norms[p] / base[p])
            kernel_value = _kernel_derivative_norm(lattice, w, t, order, rule)
            for p in (1.0, math.inf):
                report.record(bound - lower[p], {"t": t, "order": order, "p": p, "kind": "trial-ratio"})
            if kernel_value is not None:
                report.record(bound - kernel_value, {"t": t, "order": order, "kind": "band-kernel"})
            rows.append({
                "t": t, "order": order, "M0_half": m0_half, "bound": bound,
                "lower_p1": lower[1.0], "lower_pinf": lower[math.inf],
                "kernel_value": kernel_value if kernel_value is not None else math.nan,
            })
    report.tables["l1_linf_differentiability"] = pd.DataFrame(rows)
    logger.info(f"Дифференцируемость L1/Linf: запас {report.worst_slack:.3e}, passed={report.passed}")
    return report


def check_ultracontractivity(w: WeightModel, ps: Sequence[float], trials: Sequence[Trial],
                             t_grid: Sequence[float], tolerance: float = 1e-8) -> ExperimentReport:
    """||H_t f||_inf <= e^{M_0(t)/p} ||f||_p при 1 <= p < inf"""
    ps = _as_list(ps)
    if any(not 1 <= p < math.inf for p in ps):
        raise ValueError(f"Ультраконтрактивность проверяется при 1 <= p < inf, получено: {ps}")
    report = ExperimentReport(name="ultracontractivity", tag="ultracontractivity")
    levels = {float(t): m0(float(t), w) for t in t_grid}
    for trial in trials:
        base = sample_norms(trial.field, ps)
        for t, level in levels.items():
            sup = lp_norm(heat_apply(trial.field, t, w), math.inf)
            for p in ps:
                bound = math.exp(level / p) * base[p]
                report.record(bound - sup, {"trial": trial.name, "t": t, "p": p}, tolerance * max(1.0, base[p]))
    return report


def check_contraction(w: WeightModel, ps: Sequence[float], trials: Sequence[Trial],
                      t_grid: Sequence[float]) -> ExperimentReport:
    """||H_t f||_p <= ||f||_p для p из ps"""
    ps = _as_list(ps)
    report = ExperimentReport(name="contraction", tag="contraction")
    for trial in trials:
        base = sample_norms(trial.field, ps)
        for t in t_grid:
            norms = sample_norms(heat_apply(trial.field, float(t), w), ps)
            for p in ps:
                tol = ENDPOINT_QUADRATURE_TOLERANCE if p in (1.0, math.inf) else 1e-10
                report.record(base[p] - norms[p], {"trial": trial.name, "t": float(t), "p": p}, tol * base[p])
    return report


def check_fractional_bound(w: WeightModel, p: float, delta: float,
                           trials: Sequence[Trial]) -> ExperimentReport:
    """||L^{-delta} f||_p <= (p*/(2 lambda_1))^delta ||f||_p на полях без среднего"""
    if not 1 < p < math.inf or delta <= 0:
        raise ValueError(f"Требуется 1 < p < inf и delta > 0, получено: p={p}, delta={delta}")
    report = ExperimentReport(name="fractional-bound", tag="negative-power-bound")
    for trial in trials:
        lam1 = smallest_eigenvalue(trial.field.lattice, w)
        constant = (p_star(p) / (2.0 * lam1)) ** delta
        value = lp_norm(fractional_power(trial.field, -delta, w), p)
        report.record(constant * lp_norm(trial.field, p) - value, {"trial": trial.name}, 1e-10)
        report.constants["constant"] = constant
    return report


def finite_difference_order(f: SpectralField, t: float, w: WeightModel,
                            deltas: Sequence[float] = (1e-2, 1e-3)) -> float:
    """
    Наблюдаемый порядок центральной разности (H_{t+D} f - H_{t-D} f) / 2D
    относительно спектральной производной

    Args:
        f: Поле
        t: Время, t > max(deltas)
        w: Весовая модель
        deltas: Два шага D

    Returns:
        float: log(e_1/e_2) / log(D_1/D_2)
    """
    if len(deltas) != 2 or t <= max(deltas):
        raise ValueError(f"Нужны два шага меньше t={t}, получено: {deltas}")
    exact = heat_time_derivative(f, t, 1, w)
    errors = []
    for delta in deltas:
        central = (heat_apply(f, t + delta, w) - heat_apply(f, t - delta, w)) * (1.0 / (2.0 * delta))
        errors.append(central.max_difference(exact))
    if errors[1] == 0.0:
        return math.inf
    return math.log(errors[0] / errors[1]) / math.log(deltas[0] / deltas[1])


def check_kernel_value(w: WeightModel, t: float, bandwidth: int = DEFAULT_MATRIX_BANDWIDTH,
                       s: float = THETA_CROSSOVER) -> ExperimentReport:
    """
    mu_t(e) на T^d: произведение theta-множителей против прямой решёточной суммы
    и согласие двух представлений theta при s (по умолчанию в точке переключения pi)

    Args:
        w: Весовая модель (значение берётся на торе размерности w.dimension)
        t: Время, t > 0
        bandwidth: Полоса прямой суммы
        s: Параметр сравнения представлений theta

    Returns:
        ExperimentReport: Значение, независимая сумма и расхождения
    """
    value = math.exp(log_kernel_density(np.zeros(w.dimension), t, w, bandwidth))
    direct = matrix_kernel_sum(np.zeros(w.dimension), t, WeightModel.from_matrix(w.gram), bandwidth)
    x = np.linspace(-math.pi, math.pi, DUAL_THETA_POINTS)
    dual_gap = float(np.max(np.abs(log_theta1d(x, s, "spectral") - log_theta1d(x, s, "images"))))

    report = ExperimentReport(name="kernel-value", tag="heat-kernel")
    difference = abs(value - direct)
    report.record(KERNEL_VALUE_TOLERANCE * max(1.0, direct) - difference, {"t": t, "check": "direct-sum"})
    report.record(DUAL_THETA_TOLERANCE - dual_gap, {"s": s, "check": "theta-representations"})
    report.constants = {"t": t, "mu_t_e": value, "direct_sum": direct, "difference": difference,
                        "dual_gap": dual_gap}
    if w.is_diagonal:
        report.constants["mu_t_e_full_model"] = math.exp(m0(t, w))
    logger.info(f"mu_{t:g}(e) = {value:.10f} (прямая сумма {direct:.10f}), расхождение theta {dual_gap:.2e}")
    return report
