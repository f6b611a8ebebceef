# src/lipschitz/seminorms.py
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from ..geometry.distance import distance_from_identity
from ..geometry.sampler import TranslationSampler
from ..geometry.differences import difference_operator
from ..spectral.fields import SpectralField
from ..spectral.norms import lp_norm_estimate
from ..spectral.quadrature import NormEstimate, quadrature_for
from ..spectral.symbols import apply_multiplier, fractional_heat_symbol, time_derivative_symbol
from ..spectral.weights import WeightModel
from ..utils.numeric import log_grid, relative_change

logger = logging.getLogger(__name__)

DEFAULT_T_MIN = 1e-6
DEFAULT_T_MAX = 1e2
DEFAULT_T_POINTS = 240
GOLDEN_TOLERANCE = 1e-10
DEFAULT_SAMPLER = TranslationSampler()
# Разбиение сдвигов на блоки при векторизованной формуле Парсеваля
PARSEVAL_CHUNK = 64


def canonical_lambda_order(theta: float) -> int:
    """Наименьшее целое n > theta/2"""
    return int(math.floor(theta / 2.0)) + 1


def canonical_difference_order(theta: float) -> int:
    """Наименьшее целое k > theta"""
    return int(math.floor(theta)) + 1


@dataclass
class SeminormReport:
    """Значение полунормы, точка супремума и диагностика сетки"""

    value: float
    argmax: Any
    scale: str
    theta: float
    order: float
    p: float
    refinement_delta: float = 0.0
    estimator_error: float = 0.0
    boundary_attained: bool = False
    coarse_value: float = 0.0
    notes: Dict[str, Any] = field(default_factory=dict)

    @property
    def flag(self) -> str:
        return "boundary" if self.boundary_attained else ""

    def row(self, field_id: str) -> Dict[str, Any]:
        """Строка таблицы полунорм: field_id, scale, theta, order, p, value, argmax, flag"""
        argmax = self.argmax
        if isinstance(argmax, (tuple, list, np.ndarray)):
            argmax = ";".join(f"{v:.6g}" for v in argmax)
        return {"field_id": field_id, "scale": self.scale, "theta": self.theta, "order": self.order,
                "p": self.p, "value": self.value, "argmax": argmax, "flag": self.flag,
                "refinement_delta": self.refinement_delta}


def _semigroup_sup(f: SpectralField, exponent: float, symbol: Callable[[float], Callable],
                   p: float, t_grid: Optional[Sequence[float]], refine: bool,
                   scale: str, theta: float, order: float) -> SeminormReport:
    """sup_t t^exponent ||m_t(L) f||_p по логарифмической сетке с уточнением золотым сечением"""
    f = f.without_mean()
    if t_grid is None:
        t_grid = log_grid(DEFAULT_T_MIN, DEFAULT_T_MAX, DEFAULT_T_POINTS)
    t_grid = np.sort(np.asarray(t_grid, dtype=float))
    if f.is_zero():
        return SeminormReport(0.0, float(t_grid[0]), scale, theta, order, p)
    rule = quadrature_for(f.lattice)

    def evaluate(t: float) -> NormEstimate:
        estimate = lp_norm_estimate(apply_multiplier(f, symbol(t)), p, rule)
        factor = t ** exponent
        return NormEstimate(factor * estimate.value, factor * estimate.stderr)

    estimates = [evaluate(float(t)) for t in t_grid]
    values = np.array([e.value for e in estimates])
    k = int(np.argmax(values))
    best_t, best = float(t_grid[k]), estimates[k]
    coarse = float(values[::2].max())
    boundary = k == 0 or k == len(t_grid) - 1

    if refine and not boundary:
        u = np.log(t_grid)
        try:
            result = optimize.minimize_scalar(
                lambda s: -evaluate(math.exp(s)).value,
                bracket=(u[k - 1], u[k], u[k + 1]),
                method="golden",
                tol=GOLDEN_TOLERANCE,
            )
            if -result.fun > best.value:
                best_t = math.exp(float(result.x))
                best = evaluate(best_t)
        except ValueError as e:
            logger.debug(f"Уточнение золотым сечением пропущено: {e}")

    return SeminormReport(
        value=best.value,
        argmax=best_t,
        scale=scale,
        theta=theta,
        order=order,
        p=p,
        refinement_delta=relative_change(float(values.max()), coarse),
        estimator_error=best.stderr,
        boundary_attained=boundary,
        coarse_value=coarse,
    )


def lambda_seminorm(f: SpectralField, theta: float, n: int, p: float, w: WeightModel,
                    t_grid: Optional[Sequence[float]] = None, refine: bool = True) -> SeminormReport:
    """
    Полунорма Lambda^p_{theta,n}(f) = sup_t t^{n - theta/2} ||d^n/dt^n H_t f||_p

    Args:
        f: Поле (среднее исключается)
        theta: Показатель гладкости, 0 < theta < 2n
        n: Порядок производной по t
        p: Показатель, 1 <= p <= inf
        w: Весовая модель
        t_grid: Сетка t (по умолчанию 240 точек на [1e-6, 1e2])
        refine: Уточнять супремум золотым сечением

    Returns:
        SeminormReport: Значение, argmax t, признак граничного супремума
    """
    if n < 1 or not 0 < theta < 2 * n:
        raise ValueError(f"Требуется 0 < theta < 2n, получено: theta={theta}, n={n}")
    if not p >= 1:
        raise ValueError(f"Показатель p должен быть >= 1, получено: {p}")
    return _semigroup_sup(f, n - theta / 2.0, lambda t: time_derivative_symbol(w, t, n), p,
                          t_grid, refine, "Lambda", theta, n)


def lambda_seminorm_fractional(f: SpectralField, theta: float, eta: float, p: float, w: WeightModel,
                               t_grid: Optional[Sequence[float]] = None, refine: bool = True) -> SeminormReport:
    """Полунорма sup_t t^{eta - theta/2} ||L^eta H_t f||_p, 0 < theta <= 2 eta (при theta = 2 eta супремум граничный)"""
    if not 0 < theta <= 2 * eta:
        raise ValueError(f"Требуется 0 < theta <= 2 eta, получено: theta={theta}, eta={eta}")
    if not p >= 1:
        raise ValueError(f"Показатель p должен быть >= 1, получено: {p}")
    return _semigroup_sup(f, eta - theta / 2.0, lambda t: fractional_heat_symbol(w, t, eta), p,
                          t_grid, refine, "Lambda-eta", theta, eta)


def _difference_norms_l2(f: SpectralField, shifts: np.ndarray, k: int) -> np.ndarray:
    """||Delta_y^k f||_2 для всех сдвигов: sum |c_n|^2 (2 - 2 cos(n.y))^k"""
    freqs, coefficients = f.support()
    weights = np.abs(coefficients) ** 2
    out = np.empty(len(shifts))
    for start in range(0, len(shifts), PARSEVAL_CHUNK):
        block = shifts[start:start + PARSEVAL_CHUNK]
        factor = (2.0 - 2.0 * np.cos(block @ freqs.T)) ** k
        out[start:start + PARSEVAL_CHUNK] = np.sqrt(np.maximum(factor @ weights, 0.0))
    return out


def difference_ratios(f: SpectralField, theta: float, k: int, p: float, w: WeightModel,
                      shifts: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Отношения ||Delta_y^k f||_p / d(e, y)^theta по выборке

    Returns:
        Tuple: (отношения, стандартные ошибки, расстояния)
    """
    distances = np.atleast_1d(distance_from_identity(shifts, w))
    if p == 2:
        norms = _difference_norms_l2(f, shifts, k)
        errors = np.zeros_like(norms)
    else:
        rule = quadrature_for(f.lattice)
        estimates = [lp_norm_estimate(difference_operator(f, y, k), p, rule) for y in shifts]
        norms = np.array([e.value for e in estimates])
        errors = np.array([e.stderr for e in estimates])
    scale = distances ** theta
    return norms / scale, errors / scale, distances


def dist_seminorm(f: SpectralField, theta: float, k: int, p: float, w: WeightModel,
                  sampler: TranslationSampler = DEFAULT_SAMPLER) -> SeminormReport:
    """
    Полунорма L^p_{theta,k}(f) = sup_y ||Delta_y^k f||_p / d(e, y)^theta по выборке сдвигов

    Args:
        f: Поле
        theta: Показатель, 0 < theta <= k
        k: Порядок разности
        p: Показатель
        w: Весовая модель
        sampler: Выборка сдвигов (замкнута относительно удвоения)

    Returns:
        SeminormReport: Значение, argmax y, признак граничного супремума
    """
    if k < 1 or not 0 < theta <= k:
        raise ValueError(f"Требуется 0 < theta <= k, получено: theta={theta}, k={k}")
    if not p >= 1:
        raise ValueError(f"Показатель p должен быть >= 1, получено: {p}")
    integer_points = sampler.integer_sample(f.d)
    shifts = 2.0 * np.pi * np.asarray(integer_points, dtype=float) / sampler.modulus
    if f.without_mean().is_zero():
        return SeminormReport(0.0, tuple(shifts[0]), "L", theta, k, p)

    ratios, errors, distances = difference_ratios(f, theta, k, p, w, shifts)
    best = int(np.argmax(ratios))
    coarse_points = set(sampler.coarse().integer_sample(f.d))
    coarse_mask = np.array([point in coarse_points for point in integer_points])
    coarse = float(ratios[coarse_mask].max())
    # граничный супремум: при наименьшем или наибольшем расстоянии выборки
    boundary = bool(distances[best] <= distances.min() or distances[best] >= distances.max())
    return SeminormReport(
        value=float(ratios[best]),
        argmax=tuple(float(v) for v in shifts[best]),
        scale="L",
        theta=theta,
        order=k,
        p=p,
        refinement_delta=relative_change(float(ratios[best]), coarse),
        estimator_error=float(errors[best]),
        boundary_attained=boundary,
        coarse_value=coarse,
    )
