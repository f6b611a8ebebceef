# src/poisson/regularity.py
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..geometry.gradient import direction_derivative
from ..geometry.sampler import TranslationSampler
from ..lipschitz.seminorms import (
    DEFAULT_SAMPLER,
    SeminormReport,
    canonical_difference_order,
    canonical_lambda_order,
    dist_seminorm,
    lambda_seminorm,
    lambda_seminorm_fractional,
)
from ..riesz.transforms import RieszVector, riesz_first, riesz_second
from ..spectral.fields import SpectralField
from ..spectral.norms import lp_norm
from ..spectral.quadrature import quadrature_for
from ..spectral.weights import WeightModel
from ..utils.numeric import riesz_constant
from ..utils.report import ExperimentReport, to_serializable
from .solver import apply_generator, index_pairs, second_derivative, solve_poisson, tail_operator

logger = logging.getLogger(__name__)

BOUND_TOLERANCE = 1e-8
IDENTITY_TOLERANCE = 1e-10
VALID_SCALES = ["Lp", "Lambda", "L"]


@dataclass
class RegularityReport(ExperimentReport):
    """Отчёт о регулярности решения u = L^{-1} f: входные данные, полунормы, хвостовые кривые"""

    inputs: Dict[str, Any] = field(default_factory=dict)
    tail_curve: List[float] = field(default_factory=list)
    bound_curve: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        result = super().to_dict()
        result.update(to_serializable({
            "inputs": self.inputs,
            "tail_curve": self.tail_curve,
            "bound_curve": self.bound_curve,
        }))
        return result


def sobolev_report(u: SpectralField, p: float, w: WeightModel,
                   pairs: Optional[Sequence[Tuple[int, int]]] = None) -> ExperimentReport:
    """
    Нормы ||X_i u||_p, ||X_i X_j u||_p и оценка ||X_i X_j u||_p = ||R_i R_j f||_p <= 2(p*-1) ||f||_p

    Args:
        u: Решение (среднее исключается)
        p: Показатель, 1 < p < inf
        w: Весовая модель
        pairs: Пары (i, j); по умолчанию index_pairs(d)

    Returns:
        ExperimentReport: Таблица норм и наихудший запас оценки
    """
    if not 1 < p < math.inf:
        raise ValueError(f"Соболевская оценка проверяется при 1 < p < inf, получено: {p}")
    u = u.without_mean()
    f = apply_generator(u, w)
    rule = quadrature_for(u.lattice)
    base = lp_norm(f, p, rule)
    bound = riesz_constant(p) * base
    report = ExperimentReport(name="sobolev", tag="poisson-sobolev")
    rows = []
    for i in range(1, w.dimension + 1):
        rows.append({"operator": f"X{i}", "norm": lp_norm(direction_derivative(u, i, w), p, rule), "bound": math.nan})
    for i, j in (pairs if pairs is not None else index_pairs(w.dimension)):
        value = lp_norm(second_derivative(u, i, j, w), p, rule)
        report.record(bound - value, {"i": i, "j": j}, BOUND_TOLERANCE)
        rows.append({"operator": f"X{i}X{j}", "norm": value, "bound": bound})

    identity = apply_generator(u, w) + tail_operator(u, 1, w)
    residual = float(np.max(np.abs(identity.coefficients)))
    if residual > IDENTITY_TOLERANCE * max(1.0, float(np.max(np.abs(f.coefficients)))):
        report.fail(f"sum X_i^2 u + L u = {residual:.3e} вне допуска")
    report.tables["sobolev"] = pd.DataFrame(rows)
    report.constants.update({"p": p, "f_norm": base, "riesz_constant": riesz_constant(p),
                             "identity_residual": residual})
    return report


def _scale_value(field_: SpectralField, scale: str, p: float, w: WeightModel, theta: Optional[float],
                 sampler: TranslationSampler) -> float:
    if scale == "Lp":
        return lp_norm(field_, p)
    if scale == "Lambda":
        return lambda_seminorm(field_, theta, canonical_lambda_order(theta), p, w).value
    return dist_seminorm(field_, theta, canonical_difference_order(theta), p, w, sampler).value


def tail_convergence(u: SpectralField, p: float, w: WeightModel, scale: str = "Lp",
                     theta: Optional[float] = None,
                     sampler: TranslationSampler = DEFAULT_SAMPLER) -> RegularityReport:
    """
    Хвостовая кривая s_m = ||sum_{i=m}^d X_i^2 u|| в выбранной шкале, m = 1..d,
    и кривая оценки 2(p*-1) ||R_{md} f||_p

    Args:
        u: Решение
        p: Показатель
        w: Весовая модель
        scale: Lp, Lambda (Lambda_theta канонического порядка) или L (L_theta)
        theta: Показатель гладкости для шкал Lambda и L
        sampler: Выборка сдвигов для шкалы L

    Returns:
        RegularityReport: Кривые, запасы оценки и монотонность (проверяется при p = 2)
    """
    if scale not in VALID_SCALES:
        raise ValueError(f"Некорректная шкала: {scale}. Допустимые значения: {', '.join(VALID_SCALES)}")
    if scale != "Lp" and (theta is None or theta <= 0):
        raise ValueError(f"Шкала {scale} требует theta > 0, получено: {theta}")
    if not p >= 1:
        raise ValueError(f"Показатель p должен быть >= 1, получено: {p}")
    u = u.without_mean()
    f = apply_generator(u, w)
    d = w.dimension
    report = RegularityReport(name=f"tail[{scale}]", tag="poisson-tail",
                              inputs={"p": p, "scale": scale, "theta": theta, "weights": w.spec})
    with_bound = scale == "Lp" and 1 < p < math.inf
    rule = quadrature_for(u.lattice)
    rows = []
    for m in range(1, d + 1):
        tail = tail_operator(u, m, w)
        value = _scale_value(tail, scale, p, w, theta, sampler)
        report.tail_curve.append(value)
        row = {"m": m, "tail": value}
        if with_bound:
            bound = riesz_constant(p) * RieszVector(w, m, d).norm(f, p, rule).value
            report.bound_curve.append(bound)
            report.record(bound - value, {"m": m}, BOUND_TOLERANCE)
            row["bound"] = bound
        rows.append(row)
    report.tail_curve.append(0.0)
    rows.append({"m": d + 1, "tail": 0.0, **({"bound": 0.0} if with_bound else {})})

    # монотонность по m в таблице для любого p; проверяется только при p = 2,
    # где мультипликатор хвоста поточечно убывает по m
    for m in range(1, d + 1):
        a, b = report.tail_curve[m - 1], report.tail_curve[m]
        tolerance = BOUND_TOLERANCE * max(a, 1.0)
        rows[m - 1]["monotone"] = bool(a - b >= -tolerance)
        if p == 2:
            report.record(a - b, {"m": m, "check": "monotone"}, tolerance)
    rows[d]["monotone"] = True
    monotone = all(row["monotone"] for row in rows)
    report.constants["monotone"] = monotone
    if not monotone and p != 2:
        report.notes.append(f"Хвостовая кривая при p={p:g} не монотонна по m (не проверяется)")
    report.tables["tail_curve"] = pd.DataFrame(rows)
    logger.info(f"Хвост в шкале {scale}, p={p}: s_1={report.tail_curve[0]:.6g}, "
                f"{'пройдено' if report.passed else 'нарушено'}")
    return report


def _seminorm_row(label: str, result: SeminormReport, reference: Optional[float] = None) -> Dict[str, Any]:
    return {"quantity": label, "theta": result.theta, "order": result.order, "value": result.value,
            "argmax": result.argmax, "reference": reference if reference is not None else math.nan,
            "flag": result.flag}


def lipschitz_regularity_report(f: SpectralField, theta: float, p: float, w: WeightModel,
                                lam: Optional[float] = None,
                                pairs: Optional[Sequence[Tuple[int, int]]] = None,
                                seed: int = 0,
                                sampler: TranslationSampler = DEFAULT_SAMPLER) -> RegularityReport:
    """
    Липшицева регулярность решения u = L^{-1} f

    При 1 < p < inf: Lambda_{theta+2,n+1}(u) = Lambda_{theta,n}(f),
    Lambda_{theta+1}(X_i u) = Lambda_{theta,n'-1/2}(R_i f), Lambda_theta(X_i X_j u) = Lambda_theta(R_i R_j f)
    <= 2(p*-1) Lambda_theta(f); при заданной lambda дополнительно L_beta(u), L_beta(X_i u),
    L_beta(X_i X_j u) для beta = (1-lambda) theta - 2 lambda в отношении к L_theta(f).

    При p в {1, inf} (нужна lambda из (0, theta/2), 0 < theta < 1): Lambda_{theta+2,3}(u),
    Lambda_{theta+1-3lambda,2}(X_i u), Lambda_{theta-2lambda,1}(X_i X_j u) против Lambda_{theta,2}(f).

    Args:
        f: Правая часть с нулевым средним
        theta: Показатель гладкости f
        p: Показатель
        w: Весовая модель
        lam: Показатель класса CK_lambda
        pairs: Пары (i, j); по умолчанию index_pairs(d, seed)
        seed: Зерно выборки пар при d > 4
        sampler: Выборка сдвигов для шкалы L

    Returns:
        RegularityReport: Таблица полунорм и запасы оценок
    """
    if theta <= 0:
        raise ValueError(f"theta должна быть > 0, получено: {theta}")
    endpoint = p == 1 or math.isinf(p)
    if endpoint:
        if not 0 < theta < 1:
            raise ValueError(f"При p={p} требуется 0 < theta < 1, получено: {theta}")
        if lam is None or not 0 < lam < theta / 2.0:
            raise ValueError(f"При p={p} требуется 0 < lambda < theta/2, получено: {lam}")
    elif not p > 1:
        raise ValueError(f"Показатель p должен быть >= 1, получено: {p}")

    u = solve_poisson(f, w)
    d = w.dimension
    pairs = list(pairs) if pairs is not None else index_pairs(d, seed)
    directions = sorted({i for pair in pairs for i in pair})
    report = RegularityReport(name="lipschitz-regularity", tag="poisson-lipschitz",
                              inputs={"theta": theta, "p": p, "lambda": lam, "weights": w.spec,
                                      "pairs": [list(pair) for pair in pairs]})
    rows = []
    if endpoint:
        _endpoint_path(report, rows, f, u, theta, p, lam, w, pairs, directions)
    else:
        _interior_path(report, rows, f, u, theta, p, w, pairs, directions)
        if lam is not None:
            _distance_corollary(report, f, u, theta, p, lam, w, pairs, directions, sampler)
    report.tables["regularity"] = pd.DataFrame(rows)
    logger.info(f"Регулярность u = L^-1 f (theta={theta}, p={p}): {'пройдено' if report.passed else 'нарушено'}")
    return report


def _interior_path(report: RegularityReport, rows: List[Dict[str, Any]], f: SpectralField, u: SpectralField,
                   theta: float, p: float, w: WeightModel, pairs, directions):
    n = canonical_lambda_order(theta)
    n_first = canonical_lambda_order(theta + 1.0)
    base = lambda_seminorm(f, theta, n, p, w)
    rows.append(_seminorm_row("f", base))

    top = lambda_seminorm(u, theta + 2.0, n + 1, p, w)
    rows.append(_seminorm_row("u", top, base.value))
    report.record(-abs(top.value - base.value), {"quantity": "u", "identity": "Lambda_{theta+2,n+1}(u)"},
                  IDENTITY_TOLERANCE * max(base.value, 1.0))

    for i in directions:
        value = lambda_seminorm(direction_derivative(u, i, w), theta + 1.0, n_first, p, w)
        reference = lambda_seminorm_fractional(riesz_first(f, i, w), theta, n_first - 0.5, p, w)
        rows.append(_seminorm_row(f"X{i}u", value, reference.value))
        report.record(-abs(value.value - reference.value), {"quantity": f"X{i}u"},
                      IDENTITY_TOLERANCE * max(reference.value, 1.0))

    bound = riesz_constant(p) * base.value
    for i, j in pairs:
        value = lambda_seminorm(second_derivative(u, i, j, w), theta, n, p, w)
        reference = lambda_seminorm(riesz_second(f, i, j, w), theta, n, p, w)
        rows.append(_seminorm_row(f"X{i}X{j}u", value, reference.value))
        report.record(bound - value.value, {"quantity": f"X{i}X{j}u", "bound": bound}, BOUND_TOLERANCE)
    report.constants.update({"n": n, "Lambda_f": base.value, "riesz_bound": bound})


def _endpoint_path(report: RegularityReport, rows: List[Dict[str, Any]], f: SpectralField, u: SpectralField,
                   theta: float, p: float, lam: float, w: WeightModel, pairs, directions):
    base = lambda_seminorm(f, theta, 2, p, w)
    rows.append(_seminorm_row("f", base))
    quantities = [("u", lambda_seminorm(u, theta + 2.0, 3, p, w))]
    for i in directions:
        quantities.append((f"X{i}u", lambda_seminorm(direction_derivative(u, i, w), theta + 1.0 - 3.0 * lam, 2, p, w)))
    for i, j in pairs:
        quantities.append((f"X{i}X{j}u", lambda_seminorm(second_derivative(u, i, j, w), theta - 2.0 * lam, 1, p, w)))

    worst = 0.0
    for label, result in quantities:
        rows.append(_seminorm_row(label, result, base.value))
        if not math.isfinite(result.value):
            report.fail(f"{label}: полунорма не конечна", {"quantity": label})
        if base.value > 0:
            worst = max(worst, result.value / base.value)
    report.constants.update({"Lambda_f": base.value, "max_ratio_to_f": worst, "lambda": lam})
    report.notes.append("константы оценок при p в {1, inf} не заданы; отношения к Lambda_{theta,2}(f) выводятся")


def _distance_corollary(report: RegularityReport, f: SpectralField, u: SpectralField, theta: float, p: float,
                        lam: float, w: WeightModel, pairs, directions, sampler: TranslationSampler):
    """Шкала расстояния: L_beta(u), L_beta(X_i u), L_beta(X_i X_j u) при beta = (1-lambda) theta - 2 lambda"""
    beta = (1.0 - lam) * theta - 2.0 * lam
    if beta <= 0:
        report.notes.append(f"beta = {beta:.4g} <= 0: шкала расстояния пропущена")
        return
    k = canonical_difference_order(theta)
    base = dist_seminorm(f, theta, k, p, w, sampler).value
    k_beta = canonical_difference_order(beta)
    fields = [("u", u)] + [(f"X{i}u", direction_derivative(u, i, w)) for i in directions]
    fields += [(f"X{i}X{j}u", second_derivative(u, i, j, w)) for i, j in pairs]
    rows = []
    for label, g in fields:
        value = dist_seminorm(g, beta, k_beta, p, w, sampler).value
        rows.append({"quantity": label, "beta": beta, "L_beta": value, "L_theta_f": base,
                     "ratio": value / base if base > 0 else math.nan})
    table = pd.DataFrame(rows)
    report.tables["distance_regularity"] = table
    report.constants.update({"beta": beta, "L_theta_f": base, "max_distance_ratio": float(table["ratio"].max())})


def regularity_family_check(fields: Sequence[SpectralField], theta: float, p: float, w: WeightModel,
                            pairs: Optional[Sequence[Tuple[int, int]]] = None) -> ExperimentReport:
    """max по семейству Lambda_theta(R_i R_j f) / Lambda_theta(f) <= 2(p*-1)"""
    if not 1 < p < math.inf:
        raise ValueError(f"Оценка проверяется при 1 < p < inf, получено: {p}")
    bound = riesz_constant(p)
    n = canonical_lambda_order(theta)
    report = ExperimentReport(name="regularity-family", tag="poisson-lipschitz")
    best = 0.0
    for index, f in enumerate(fields):
        base = lambda_seminorm(f, theta, n, p, w).value
        if base == 0.0:
            continue
        for i, j in (pairs if pairs is not None else index_pairs(w.dimension)):
            ratio = lambda_seminorm(riesz_second(f, i, j, w), theta, n, p, w).value / base
            report.record(bound - ratio, {"field": index, "i": i, "j": j}, BOUND_TOLERANCE)
            best = max(best, ratio)
    report.constants.update({"max_ratio": best, "bound": bound, "theta": theta, "p": p})
    return report
