# src/riesz/bounds.py
import logging
import math
from typing import Sequence, Union

import pandas as pd

from ..spectral.dictionary import Trial
from ..spectral.norms import lp_norm
from ..spectral.quadrature import quadrature_for
from ..utils.numeric import riesz_constant
from ..utils.report import ExperimentReport
from .transforms import RieszSymbol, RieszVector

logger = logging.getLogger(__name__)

RATIO_TOLERANCE = 1e-6

Operator = Union[RieszSymbol, RieszVector]


def estimate_operator_ratio(op: Operator, p: float, trials: Sequence[Trial]) -> ExperimentReport:
    """
    Нижняя оценка ||op||_{p->p} максимумом ||op f||_p / ||f||_p по словарю
    и проверка против 2(p*-1)

    Args:
        op: Символ Рисса или векторное преобразование
        p: Показатель, 1 < p < inf
        trials: Пробные поля

    Returns:
        ExperimentReport: Лучшее отношение, граница, запас и свидетель
    """
    if not 1 < p < math.inf:
        raise ValueError(f"Отношение норм оценивается при 1 < p < inf, получено: {p}")
    bound = riesz_constant(p)
    report = ExperimentReport(name=f"riesz-ratio[{op.name}]", tag="riesz-bound")
    best_ratio, best_trial = 0.0, None
    for trial in trials:
        rule = quadrature_for(trial.field.lattice)
        base = lp_norm(trial.field, p, rule)
        if base == 0.0:
            continue
        ratio = op.norm(trial.field, p, rule).value / base
        report.record(bound - ratio, {"trial": trial.name, "seed": trial.seed}, RATIO_TOLERANCE)
        if ratio > best_ratio:
            best_ratio, best_trial = ratio, trial
    report.constants = {"best_ratio": best_ratio, "bound": bound, "p": p}
    report.tables["riesz_ratios"] = pd.DataFrame([{
        "p": p,
        "op": op.name,
        "best_ratio": best_ratio,
        "bound": bound,
        "slack": bound - best_ratio,
        "witness": best_trial.name if best_trial else "",
        "witness_seed": best_trial.seed if best_trial else -1,
    }])
    logger.info(f"{op.name}, p={p}: лучшее отношение {best_ratio:.6f} <= {bound:.4f}")
    return report
