# src/semigroup/diagnostics.py
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from ..spectral.weights import WeightModel
from ..utils.numeric import log_grid, relative_change
from ..utils.report import ExperimentReport
from .theta import kernel_at_identity

logger = logging.getLogger(__name__)

DEFAULT_LAMBDAS = tuple(round(0.1 * k, 1) for k in range(1, 10))
DEFAULT_T_MIN = 1e-6
DEFAULT_T_POINTS = 120
# Критерий стабилизации текущего супремума за последнюю декаду t
STABILIZATION_TOLERANCE = 0.01
# Регрессия log log mu ~ -lambda log t по двум нижним декадам
FIT_DECADES = 2.0


@dataclass
class KernelDiagnostics:
    """
    log mu_t(e) = M_0(t) на логарифмической сетке t.
    Супремум h_t(x, y) = mu_t(x^-1 y) достигается при x = y, так как все
    коэффициенты Фурье e^{-t lambda(n)} положительны, поэтому M_0(t) = log mu_t(e).
    """

    t_grid: np.ndarray
    log_mu: np.ndarray
    effective_dimension: np.ndarray
    tail_significant: np.ndarray

    @property
    def m0(self) -> np.ndarray:
        return self.log_mu

    def is_decreasing(self) -> bool:
        order = np.argsort(self.t_grid)
        return bool(np.all(np.diff(self.log_mu[order]) < 0))

    def is_convex_in_log_t(self, tol: float = 1e-12) -> bool:
        """Выпуклость log mu_t(e) как функции log t (вторые разности на неравномерной сетке)"""
        order = np.argsort(self.t_grid)
        u = np.log(self.t_grid[order])
        v = self.log_mu[order]
        slopes = np.diff(v) / np.diff(u)
        return bool(np.all(np.diff(slopes) >= -tol * np.abs(slopes[1:]).max(initial=1.0)))

    def running_sup(self, lam: float) -> np.ndarray:
        """Текущий супремум t^lam log mu_t(e) при движении от больших t к малым"""
        order = np.argsort(self.t_grid)[::-1]
        values = self.t_grid[order] ** lam * self.log_mu[order]
        sup = np.maximum.accumulate(values)
        out = np.empty_like(sup)
        out[order] = sup
        return out

    def table(self, lambdas: Sequence[float] = ()) -> pd.DataFrame:
        """TSV-таблица: t, log_mu_t_e, M0, sup_t_lambda_<lam>"""
        frame = pd.DataFrame({
            "t": self.t_grid,
            "log_mu_t_e": self.log_mu,
            "M0": self.m0,
            "effective_dimension": self.effective_dimension,
        })
        for lam in lambdas:
            frame[f"sup_t_lambda_{lam:g}"] = self.running_sup(lam)
        return frame


def kernel_diagnostics(w: WeightModel, t_grid: Sequence[float]) -> KernelDiagnostics:
    """
    Диагностика ядра на сетке t

    Args:
        w: Диагональная весовая модель
        t_grid: Положительные значения t

    Returns:
        KernelDiagnostics: log mu_t(e) по всем t
    """
    t_grid = np.asarray(t_grid, dtype=float)
    results = [kernel_at_identity(float(t), w) for t in t_grid]
    return KernelDiagnostics(
        t_grid=t_grid,
        log_mu=np.array([r.log_mu for r in results]),
        effective_dimension=np.array([r.effective_dimension for r in results]),
        tail_significant=np.array([r.tail_significant for r in results]),
    )


@dataclass
class CKClassification:
    """Эмпирическая классификация CK-lambda по сетке t"""

    weights: str
    sups: Dict[float, float]
    stabilized: Dict[float, bool]
    fitted_exponent: float
    tail_dominated: bool
    diagnostics: KernelDiagnostics
    notes: List[str] = field(default_factory=list)

    @property
    def ck0_plus(self) -> bool:
        return not self.tail_dominated and all(self.stabilized.values())

    def verdict(self, lam: float) -> str:
        if self.tail_dominated:
            return "tail-dominated / not classifiable"
        return "empirical CK-lambda" if self.stabilized.get(lam, False) else "not stabilized"

    def to_report(self) -> ExperimentReport:
        report = ExperimentReport(name="classify", tag="ck-classification")
        report.constants = {
            "fitted_exponent": self.fitted_exponent,
            "ck0_plus": self.ck0_plus,
            "tail_dominated": self.tail_dominated,
            "t_min": float(self.diagnostics.t_grid.min()),
        }
        report.tables["ck_classification"] = pd.DataFrame({
            "lambda": list(self.sups),
            "sup_t_lambda_log_mu": list(self.sups.values()),
            "stabilized": [self.stabilized[lam] for lam in self.sups],
            "verdict": [self.verdict(lam) for lam in self.sups],
        })
        report.tables["kernel_diagnostics"] = self.diagnostics.table(list(self.sups))
        report.notes.extend(self.notes)
        report.notes.append("классификация эмпирическая: конечная сетка t не решает асимптотических условий")
        return report


def fit_growth_exponent(diagnostics: KernelDiagnostics, decades: float = FIT_DECADES) -> float:
    """Показатель lambda в log mu_t(e) ~ t^{-lambda} по нижним декадам сетки"""
    t = diagnostics.t_grid
    mask = (t <= t.min() * 10.0 ** decades) & (diagnostics.log_mu > 0)
    if mask.sum() < 3:
        return math.nan
    fit = stats.linregress(np.log(t[mask]), np.log(diagnostics.log_mu[mask]))
    return float(-fit.slope)


def classify_CK(w: WeightModel, lambdas: Sequence[float] = DEFAULT_LAMBDAS,
                t_grid: Optional[Sequence[float]] = None) -> CKClassification:
    """
    Эмпирическая проверка CK-lambda: стабилизация текущего супремума
    t^lambda log mu_t(e) за последнюю декаду t (изменение < 1%)

    Args:
        w: Диагональная весовая модель
        lambdas: Проверяемые lambda
        t_grid: Логарифмическая сетка в (0, 1]; по умолчанию 120 точек от 1e-6

    Returns:
        CKClassification: Супремумы, признаки стабилизации, подобранный показатель
    """
    if t_grid is None:
        t_grid = log_grid(DEFAULT_T_MIN, 1.0, DEFAULT_T_POINTS)
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= 0) or np.any(t_grid > 1):
        raise ValueError("Сетка t для классификации должна лежать в (0, 1]")

    diagnostics = kernel_diagnostics(w, t_grid)
    t_min = float(t_grid.min())
    last_decade = t_grid <= 10.0 * t_min
    tail_dominated = bool(np.any(diagnostics.tail_significant))

    sups, stabilized = {}, {}
    for lam in lambdas:
        running = diagnostics.running_sup(lam)
        sup = float(running[np.argmin(t_grid)])
        before = float(running[last_decade].min())
        sups[lam] = sup
        stabilized[lam] = (not tail_dominated) and relative_change(sup, before) < STABILIZATION_TOLERANCE

    exponent = fit_growth_exponent(diagnostics)
    result = CKClassification(
        weights=w.spec,
        sups=sups,
        stabilized=stabilized,
        fitted_exponent=exponent,
        tail_dominated=tail_dominated,
        diagnostics=diagnostics,
    )
    if tail_dominated:
        result.notes.append("хвост произведения значим: веса не растут, классификация невозможна")
    logger.info(
        f"Классификация {w.spec}: lambda_hat={exponent:.3f}, стабилизировано "
        f"{sum(stabilized.values())}/{len(stabilized)}, CK0+={result.ck0_plus}"
    )
    return result
