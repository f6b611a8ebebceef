# src/poisson/gradient_bounds.py
import logging
import math
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

from ..geometry.gradient import gradient_components
from ..semigroup.checks import m0
from ..semigroup.heat import heat_apply
from ..spectral.dictionary import Trial
from ..spectral.norms import sample_norms, vector_norm_estimate
from ..spectral.quadrature import quadrature_for
from ..spectral.weights import WeightModel
from ..utils.numeric import p_star, relative_change
from ..utils.report import ExperimentReport

logger = logging.getLogger(__name__)

# Допустимый разброс K по показателям: max / min
K_STABILITY = 2.0
# Допустимое изменение подобранной константы при огрублении сетки t
GRID_STABILITY = 0.1


def _interior_envelope(p: float, t: float) -> float:
    """2 sqrt(p*) (p*-1) t^{-1/2}"""
    q = p_star(p)
    return 2.0 * math.sqrt(q) * (q - 1.0) / math.sqrt(t)


def _endpoint_envelope(t: float, level: float) -> float:
    """t^{-1/2} max{M_0(t)^{3/2}, 1}"""
    return max(max(level, 0.0) ** 1.5, 1.0) / math.sqrt(t)


def gradient_bound_check(w: WeightModel, trials: Sequence[Trial], t_grid: Sequence[float],
                         ps: Sequence[float]) -> ExperimentReport:
    """
    Подбор констант в оценках градиента ||Gamma(H_t f, H_t f)^{1/2}||_p:
    K в 2K sqrt(p*)(p*-1) t^{-1/2} ||f||_p при 1 < p < inf и C в
    C t^{-1/2} max{M_0(t)^{3/2}, 1} ||f||_p при p в {1, inf}

    K и C численно не заданы, поэтому они подбираются как наименьшие допустимые
    на (f, t, p); проверяется устойчивость K по p (max/min <= 2) и по огрублению сетки t.

    Args:
        w: Весовая модель
        trials: Пробные поля
        t_grid: Сетка t
        ps: Показатели

    Returns:
        ExperimentReport: Подобранные K_hat, C_hat и таблица отношений
    """
    t_grid = np.sort(np.asarray(t_grid, dtype=float))
    ps = [float(p) for p in ps]
    for p in ps:
        if not p >= 1:
            raise ValueError(f"Показатель p должен быть >= 1, получено: {p}")
    endpoint_ps = [p for p in ps if p == 1 or math.isinf(p)]
    levels = {float(t): m0(float(t), w) for t in t_grid} if endpoint_ps else {}

    report = ExperimentReport(name="gradient-bounds", tag="gradient-bound")
    # отношения по индексам сетки: (p, индекс t) -> max по полям
    fitted: Dict[float, np.ndarray] = {p: np.zeros(len(t_grid)) for p in ps}
    rows: List[dict] = []
    for trial in trials:
        rule = quadrature_for(trial.field.lattice)
        base = sample_norms(trial.field, ps, rule)
        for k, t in enumerate(t_grid):
            t = float(t)
            components = gradient_components(heat_apply(trial.field, t, w), w)
            for p in ps:
                if base[p] == 0.0:
                    continue
                value = vector_norm_estimate(components, p, rule).value
                if p in endpoint_ps:
                    envelope = _endpoint_envelope(t, levels[t])
                else:
                    envelope = _interior_envelope(p, t)
                ratio = value / (envelope * base[p])
                fitted[p][k] = max(fitted[p][k], ratio)
                rows.append({"trial": trial.name, "p": p, "t": t, "gradient": value,
                             "f_norm": base[p], "ratio": ratio})
    report.tables["gradient_bounds"] = pd.DataFrame(rows)

    interior = {p: float(values.max()) for p, values in fitted.items() if p not in endpoint_ps}
    endpoint = {p: float(values.max()) for p, values in fitted.items() if p in endpoint_ps}
    if interior:
        k_hat = max(interior.values())
        coarse = max(float(values[::2].max()) for p, values in fitted.items() if p not in endpoint_ps)
        report.constants.update({"K_hat": k_hat, "K_hat_by_p": interior, "K_hat_coarse": coarse})
        positive = [v for v in interior.values() if v > 0]
        if positive:
            spread = max(positive) / min(positive)
            report.constants["K_spread"] = spread
            report.record(K_STABILITY - spread, {"check": "p-stability", "K_by_p": interior})
        drift = relative_change(k_hat, coarse)
        report.constants["K_grid_drift"] = drift
        if drift > GRID_STABILITY:
            report.fail(f"K_hat меняется на {drift:.2%} при огрублении сетки t", {"check": "grid-stability"})
    if endpoint:
        c_hat = max(endpoint.values())
        report.constants.update({"C_hat": c_hat, "C_hat_by_p": endpoint})
        if not math.isfinite(c_hat):
            report.fail("C_hat не конечна", {"check": "endpoint-envelope"})
    report.notes.append("константы K и C подобраны по данным; теоретические значения не утверждаются")
    logger.info(f"Оценки градиента: {report.constants.get('K_hat', '-')} (K), {report.constants.get('C_hat', '-')} (C)")
    return report
