# src/lipschitz/comparisons.py
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..geometry.distance import distance_from_identity
from ..geometry.sampler import TranslationSampler
from ..riesz.transforms import riesz_first, riesz_second
from ..spectral.dictionary import Trial
from ..spectral.fields import SpectralField
from ..spectral.lattice import FrequencyLattice
from ..spectral.random_fields import DecayProfile, random_field
from ..spectral.weights import WeightModel
from ..utils.numeric import p_star, riesz_constant
from ..utils.report import ExperimentReport
from .seminorms import (
    DEFAULT_SAMPLER,
    SeminormReport,
    canonical_difference_order,
    canonical_lambda_order,
    dist_seminorm,
    lambda_seminorm,
    lambda_seminorm_fractional,
)

logger = logging.getLogger(__name__)

FAMILY_SIZE = 50
# Допустимый разброс отношения по семейству: max / median
FAMILY_SPREAD = 20.0
# Допустимое изменение отношения при огрублении сетки
GRID_RATIO_TOLERANCE = 0.1
FAMILY_PROFILES = ("polynomial:1.5", "polynomial:2", "polynomial:3")
# Порог, ниже которого полунорма считается нулевой
ZERO_SEMINORM = 1e-14
RELATIVE_TOLERANCE = 1e-8


def lacunary_field(lattice: FrequencyLattice, theta: float, axis: int = 1) -> SpectralField:
    """Лакунарный ряд sum_k 2^{-theta k} cos(2^k x_axis) по частотам 2^k <= B_axis"""
    d = lattice.d
    result = SpectralField.zeros(lattice)
    frequency, k = 1, 0
    while frequency <= lattice.bandwidths[axis - 1]:
        mode = [0] * d
        mode[axis - 1] = frequency
        result = result + SpectralField.cosine(lattice, mode, 2.0 ** (-theta * k))
        frequency, k = 2 * frequency, k + 1
    return result


def comparison_family(lattice: FrequencyLattice, theta: float, count: int = FAMILY_SIZE,
                      seed: int = 0) -> List[Trial]:
    """
    Семейство полей для сравнения шкал: лакунарные ряды, одиночные моды
    и случайные поля с полиномиальным убыванием коэффициентов

    Args:
        lattice: Решётка частот
        theta: Показатель лакунарного ряда
        count: Размер семейства
        seed: Базовое зерно случайных полей

    Returns:
        List[Trial]: Ровно count полей без среднего
    """
    d = lattice.d
    trials = [Trial(f"lacunary[{theta:g}]", lacunary_field(lattice, theta))]
    trials.append(Trial("lacunary[1]", lacunary_field(lattice, 1.0)))
    if d > 1:
        trials.append(Trial(f"lacunary[{theta:g},x{d}]", lacunary_field(lattice, theta, axis=d)))

    for i in range(min(d, 3)):
        mode = [0] * d
        mode[i] = 1
        trials.append(Trial(f"cos(e{i + 1})", SpectralField.cosine(lattice, mode)))
    if d >= 2:
        mode = [0] * d
        mode[0], mode[1] = 1, 1
        trials.append(Trial("sin(e1+e2)", SpectralField.sine(lattice, mode)))

    k = 0
    while len(trials) < count:
        profile = DecayProfile.parse(FAMILY_PROFILES[k % len(FAMILY_PROFILES)])
        s = seed + k
        trials.append(Trial(f"random[{profile.label}]#{s}", random_field(lattice, s, profile), s))
        k += 1
    return trials[:count]


def seminorm_table(entries: Sequence[Tuple[str, SeminormReport]]) -> pd.DataFrame:
    """Таблица полунорм: field_id, scale, theta, order, p, value, argmax, flag"""
    return pd.DataFrame([report.row(field_id) for field_id, report in entries])


def _ratio_delta(top: SeminormReport, bottom: SeminormReport) -> float:
    """Оценка относительного изменения отношения top/bottom при огрублении сеток"""
    return top.refinement_delta + bottom.refinement_delta


def _family_ratios(report: ExperimentReport, pairs: List[Tuple[Trial, SeminormReport, SeminormReport]],
                   ratio_name: str) -> pd.DataFrame:
    """
    Отношения top/bottom по семейству; 0/0 считается тривиально согласованным,
    ограниченность проверяется как max / median <= FAMILY_SPREAD
    """
    rows = []
    for trial, top, bottom in pairs:
        if top.value <= ZERO_SEMINORM and bottom.value <= ZERO_SEMINORM:
            rows.append({"field_id": trial.name, "top": top.value, "bottom": bottom.value,
                         ratio_name: math.nan, "grid_delta": 0.0, "status": "trivially consistent"})
            continue
        if bottom.value <= ZERO_SEMINORM:
            report.fail(f"{trial.name}: знаменатель {ratio_name} равен нулю", {"field": trial.name})
            rows.append({"field_id": trial.name, "top": top.value, "bottom": bottom.value,
                         ratio_name: math.inf, "grid_delta": 0.0, "status": "divergent"})
            continue
        delta = _ratio_delta(top, bottom)
        if delta > GRID_RATIO_TOLERANCE:
            report.fail(f"{trial.name}: отношение меняется на {delta:.2%} при огрублении сетки",
                        {"field": trial.name, "grid_delta": delta})
        rows.append({"field_id": trial.name, "top": top.value, "bottom": bottom.value,
                     ratio_name: top.value / bottom.value, "grid_delta": delta,
                     "status": "boundary" if top.boundary_attained or bottom.boundary_attained else ""})
    table = pd.DataFrame(rows)
    if table.empty:
        return table

    ratios = table[ratio_name].to_numpy(dtype=float)
    finite = ratios[np.isfinite(ratios)]
    if finite.size:
        median = float(np.median(finite))
        spread = float(finite.max() / median) if median > 0 else math.inf
        worst = table.loc[table[ratio_name].idxmax(), "field_id"] if np.isfinite(spread) else ""
        report.record(FAMILY_SPREAD - spread, {"field": worst, "max_over_median": spread})
        report.constants.update({f"max_{ratio_name}": float(finite.max()),
                                 f"median_{ratio_name}": median, "max_over_median": spread})
    return table


def compare_scales_forward(family: Sequence[Trial], theta: float, lam: float, p: float, w: WeightModel,
                           sampler: TranslationSampler = DEFAULT_SAMPLER) -> ExperimentReport:
    """
    Сравнение шкал L -> Lambda: отношение Lambda_beta / L_theta при beta = (1-lambda) theta - 2 lambda

    При theta > 1 и lambda < (theta-1)/(theta+4) добавляется вариант второго порядка
    Lambda_{beta2,2} с beta2 = (1-lambda) theta - 4 lambda.

    Args:
        family: Семейство полей
        theta: Показатель L-шкалы, 0 < theta < 2
        lam: Показатель класса CK_lambda
        p: Показатель
        w: Весовая модель

    Returns:
        ExperimentReport: Таблица отношений и проверка ограниченности по семейству
    """
    if not 0 < theta < 2:
        raise ValueError(f"Требуется 0 < theta < 2, получено: {theta}")
    if not 0 < lam < 1:
        raise ValueError(f"lambda должна лежать в (0, 1), получено: {lam}")
    beta = (1.0 - lam) * theta - 2.0 * lam
    if beta <= 0:
        raise ValueError(
            f"beta = (1-lambda)theta - 2lambda = {beta:.4g} <= 0 для theta={theta}, lambda={lam}: "
            "сравнение не определено"
        )
    second_order = theta > 1 and lam < (theta - 1.0) / (theta + 4.0)
    beta2 = (1.0 - lam) * theta - 4.0 * lam

    k = canonical_difference_order(theta)
    n = canonical_lambda_order(beta)
    report = ExperimentReport(name="compare-forward", tag="scale-comparison")
    report.constants.update({"theta": theta, "lambda": lam, "beta": beta, "p": p, "k": k, "n": n})
    pairs, pairs2, entries = [], [], []
    for trial in family:
        distance = dist_seminorm(trial.field, theta, k, p, w, sampler)
        semigroup = lambda_seminorm(trial.field, beta, n, p, w)
        pairs.append((trial, semigroup, distance))
        entries += [(trial.name, distance), (trial.name, semigroup)]
        if second_order:
            semigroup2 = lambda_seminorm(trial.field, beta2, 2, p, w)
            pairs2.append((trial, semigroup2, distance))
            entries.append((trial.name, semigroup2))
        logger.debug(f"{trial.name}: L={distance.value:.6g}, Lambda={semigroup.value:.6g}")

    report.tables["forward_ratios"] = _family_ratios(report, pairs, "ratio")
    if second_order:
        report.constants["beta2"] = beta2
        report.tables["forward_ratios_order2"] = _family_ratios(report, pairs2, "ratio2")
    report.tables["seminorms"] = seminorm_table(entries)
    logger.info(f"Сравнение L_{theta:g} -> Lambda_{beta:.4g} (p={p}): {'пройдено' if report.passed else 'нарушено'}")
    return report


def compare_scales_backward(family: Sequence[Trial], theta: float, p: float, w: WeightModel,
                            lam: Optional[float] = None,
                            sampler: TranslationSampler = DEFAULT_SAMPLER) -> ExperimentReport:
    """
    Сравнение шкал Lambda -> L: отношение L_theta / Lambda_theta при 1 < p < inf,
    L_beta / Lambda_theta с beta = theta / (1 + 3 lambda) при p в {1, inf}

    Args:
        family: Семейство полей
        theta: Показатель, 0 < theta < 1
        p: Показатель
        w: Весовая модель
        lam: Показатель класса CK_lambda (обязателен при p в {1, inf})

    Returns:
        ExperimentReport: Таблица отношений и проверка ограниченности
    """
    if not 0 < theta < 1:
        raise ValueError(f"Требуется 0 < theta < 1, получено: {theta}")
    endpoint = p == 1 or math.isinf(p)
    if endpoint:
        if lam is None or not 0 < lam < 1:
            raise ValueError(f"При p={p} требуется lambda из (0, 1), получено: {lam}")
        beta = theta / (1.0 + 3.0 * lam)
    elif p > 1:
        beta = theta
    else:
        raise ValueError(f"Показатель p должен быть >= 1, получено: {p}")

    report = ExperimentReport(name="compare-backward", tag="scale-comparison")
    report.constants.update({"theta": theta, "beta": beta, "p": p})
    if lam is not None:
        report.constants["lambda"] = lam
    pairs, entries = [], []
    for trial in family:
        semigroup = lambda_seminorm(trial.field, theta, canonical_lambda_order(theta), p, w)
        distance = dist_seminorm(trial.field, beta, 1, p, w, sampler)
        pairs.append((trial, distance, semigroup))
        entries += [(trial.name, semigroup), (trial.name, distance)]
    report.tables["backward_ratios"] = _family_ratios(report, pairs, "ratio")
    report.tables["seminorms"] = seminorm_table(entries)
    logger.info(f"Сравнение Lambda_{theta:g} -> L_{beta:.4g} (p={p}): {'пройдено' if report.passed else 'нарушено'}")
    return report


def check_herz(family: Sequence[Trial], theta: float, p: float, w: WeightModel, k: int = 1,
               sampler: TranslationSampler = DEFAULT_SAMPLER) -> ExperimentReport:
    """
    Двусторонняя оценка порядков разностей:
    (2^k - 2^theta) L_k <= k L_{k+1} и L_{k+1} <= 2 L_k

    Выборка сдвигов замкнута относительно удвоения, поэтому при p = 2
    неравенства выполняются для выборочных супремумов точно.
    """
    if not 0 < theta < k:
        raise ValueError(f"Требуется 0 < theta < k, получено: theta={theta}, k={k}")
    report = ExperimentReport(name="herz", tag="distance-orders")
    rows = []
    for trial in family:
        lower = dist_seminorm(trial.field, theta, k, p, w, sampler).value
        upper = dist_seminorm(trial.field, theta, k + 1, p, w, sampler).value
        tolerance = RELATIVE_TOLERANCE * max(lower, upper, 1.0)
        left_slack = k * upper - (2 ** k - 2 ** theta) * lower
        right_slack = 2.0 * lower - upper
        report.record(left_slack, {"field": trial.name, "side": "lower"}, tolerance)
        report.record(right_slack, {"field": trial.name, "side": "upper"}, tolerance)
        rows.append({"field_id": trial.name, "L_k": lower, "L_k1": upper,
                     "lower_slack": left_slack, "upper_slack": right_slack})
    report.tables["herz"] = pd.DataFrame(rows)
    report.constants.update({"theta": theta, "k": k, "p": p})
    return report


def check_order_raising(family: Sequence[Trial], theta: float, n: int, p: float,
                        w: WeightModel) -> ExperimentReport:
    """Повышение порядка: Lambda_{theta,n+1} <= 2^{n+1-theta/2} p* Lambda_{theta,n}, 1 < p < inf"""
    if not 1 < p < math.inf:
        raise ValueError(f"Повышение порядка проверяется при 1 < p < inf, получено: {p}")
    constant = 2.0 ** (n + 1 - theta / 2.0) * p_star(p)
    report = ExperimentReport(name="order-raising", tag="order-raising")
    report.constants.update({"theta": theta, "n": n, "p": p, "constant": constant})
    rows = []
    for trial in family:
        base = lambda_seminorm(trial.field, theta, n, p, w).value
        raised = lambda_seminorm(trial.field, theta, n + 1, p, w).value
        slack = constant * base - raised
        report.record(slack, {"field": trial.name}, RELATIVE_TOLERANCE * max(raised, 1.0))
        rows.append({"field_id": trial.name, "order_n": base, "order_n1": raised, "slack": slack})
    report.tables["order_raising"] = pd.DataFrame(rows)
    return report


def check_riesz_lipschitz(family: Sequence[Trial], theta: float, p: float, w: WeightModel,
                          pairs: Sequence[Tuple[int, ...]] = ((1,), (1, 1))) -> ExperimentReport:
    """
    Lambda_{theta,n}(R f) <= 2(p*-1) Lambda_{theta,n}(f) для R = R_i и R = R_i R_j

    Args:
        family: Семейство полей
        theta: Показатель
        p: Показатель, 1 < p < inf
        w: Весовая модель
        pairs: Индексы (i,) или (i, j)

    Returns:
        ExperimentReport: Отношения по семейству и наихудший запас
    """
    if not 1 < p < math.inf:
        raise ValueError(f"Оценка Рисса в шкале Lambda проверяется при 1 < p < inf, получено: {p}")
    bound = riesz_constant(p)
    n = canonical_lambda_order(theta)
    report = ExperimentReport(name="riesz-lipschitz", tag="riesz-lipschitz")
    report.constants.update({"theta": theta, "n": n, "p": p, "bound": bound})
    rows = []
    for trial in family:
        base = lambda_seminorm(trial.field, theta, n, p, w).value
        for indices in pairs:
            if len(indices) == 1:
                transformed = riesz_first(trial.field, indices[0], w)
            else:
                transformed = riesz_second(trial.field, indices[0], indices[1], w)
            value = lambda_seminorm(transformed, theta, n, p, w).value
            label = "R" + "R".join(str(i) for i in indices)
            report.record(bound * base - value, {"field": trial.name, "op": label}, RELATIVE_TOLERANCE)
            rows.append({"field_id": trial.name, "op": label, "base": base, "value": value,
                         "ratio": value / base if base > ZERO_SEMINORM else math.nan})
    table = pd.DataFrame(rows)
    report.tables["riesz_lipschitz"] = table
    if not table.empty:
        report.constants["max_ratio"] = float(table["ratio"].max())
    return report


def check_fractional_equivalence(family: Sequence[Trial], theta: float, p: float, w: WeightModel,
                                 etas: Tuple[float, float] = (1.0, 1.5)) -> ExperimentReport:
    """
    Эквивалентность Lambda_{theta,eta} для двух порядков eta: отношение ограничено по семейству.

    На усечённой решётке обе полунормы конечны, поэтому проверяется только ограниченность отношения.
    """
    low, high = etas
    report = ExperimentReport(name="fractional-equivalence", tag="fractional-orders")
    report.constants.update({"theta": theta, "p": p, "eta_low": low, "eta_high": high})
    pairs = []
    for trial in family:
        first = lambda_seminorm_fractional(trial.field, theta, low, p, w)
        second = lambda_seminorm_fractional(trial.field, theta, high, p, w)
        pairs.append((trial, second, first))
    report.tables["fractional_ratios"] = _family_ratios(report, pairs, "ratio")
    return report


def _monotonicity_factor(lower: SeminormReport, beta: float, w: WeightModel) -> float:
    """
    Множитель c >= 1 в S_theta <= c S_beta (theta < beta): c = max(1, r^{(beta-theta)/2}) для Lambda
    с r = argmax t и c = max(1, d(e, y)^{beta-theta}) для L с y = argmax
    """
    gap = beta - lower.theta
    if lower.scale == "L":
        distance = distance_from_identity(np.asarray(lower.argmax, dtype=float), w)
        return max(1.0, distance ** gap)
    return max(1.0, float(lower.argmax) ** (gap / 2.0))


def seminorm_sweep(family: Sequence[Trial], thetas: Sequence[float], ps: Sequence[float],
                   w: WeightModel, scale: str = "Lambda",
                   sampler: TranslationSampler = DEFAULT_SAMPLER) -> ExperimentReport:
    """
    Таблица полунорм семейства по сетке (theta, p) с проверкой монотонности по theta
    (S_theta <= c S_beta, множитель c из _monotonicity_factor) и по p (Lambda^p <= Lambda^inf)
    """
    if scale not in ("Lambda", "L"):
        raise ValueError(f"Некорректная шкала: {scale}. Допустимые значения: Lambda, L")
    thetas = sorted(thetas)
    report = ExperimentReport(name=f"seminorm[{scale}]", tag="seminorm")
    entries = []
    values: Dict[Tuple[str, float, float], SeminormReport] = {}
    # один порядок на всю сетку theta, чтобы монотонность сравнивала одинаковые полунормы
    order = canonical_lambda_order(thetas[-1]) if scale == "Lambda" else canonical_difference_order(thetas[-1])
    for trial in family:
        for p in ps:
            for theta in thetas:
                if scale == "Lambda":
                    result = lambda_seminorm(trial.field, theta, order, p, w)
                else:
                    result = dist_seminorm(trial.field, theta, max(order, 1), p, w, sampler)
                values[(trial.name, p, theta)] = result
                entries.append((trial.name, result))
            for lower, upper in zip(thetas, thetas[1:]):
                a, b = values[(trial.name, p, lower)], values[(trial.name, p, upper)]
                factor = _monotonicity_factor(a, upper, w)
                tolerance = RELATIVE_TOLERANCE * max(a.value, 1.0) + a.estimator_error + factor * b.estimator_error
                report.record(factor * b.value - a.value,
                              {"field": trial.name, "p": p, "theta": lower, "factor": factor}, tolerance)
        if scale == "Lambda" and math.inf in ps:
            for p in ps:
                if math.isinf(p):
                    continue
                for theta in thetas:
                    a, b = values[(trial.name, p, theta)], values[(trial.name, math.inf, theta)]
                    tolerance = RELATIVE_TOLERANCE * max(b.value, 1.0) + a.estimator_error
                    report.record(b.value - a.value, {"field": trial.name, "p": p, "theta": theta,
                                                      "check": "p-monotonicity"}, tolerance)
    report.tables["seminorms"] = seminorm_table(entries)
    report.constants.update({"order": order, "thetas": list(thetas), "ps": list(ps)})
    return report
