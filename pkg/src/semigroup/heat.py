# src/semigroup/heat.py
import logging

from ..spectral.fields import SpectralField
from ..spectral.symbols import (
    apply_multiplier,
    fractional_heat_symbol,
    heat_symbol,
    poisson_symbol,
    power_symbol,
    time_derivative_symbol,
    eigenvalues,
)
from ..spectral.lattice import FrequencyLattice
from ..spectral.weights import WeightModel

logger = logging.getLogger(__name__)


def heat_apply(f: SpectralField, t: float, w: WeightModel) -> SpectralField:
    """
    Тепловая полугруппа H_t f (мультипликатор e^{-t lambda(n)})

    Args:
        f: Поле
        t: Время, t >= 0 (t = 0 возвращает f)
        w: Весовая модель

    Returns:
        SpectralField: H_t f
    """
    if t < 0:
        raise ValueError(f"Время должно быть >= 0, получено: {t}")
    if t == 0:
        return f
    return apply_multiplier(f, heat_symbol(w, t))


def heat_time_derivative(f: SpectralField, t: float, n: int, w: WeightModel) -> SpectralField:
    """d^n/dt^n H_t f = (-L)^n H_t f"""
    if n < 1:
        raise ValueError(f"Порядок производной должен быть >= 1, получено: {n}")
    if t < 0:
        raise ValueError(f"Время должно быть >= 0, получено: {t}")
    return apply_multiplier(f, time_derivative_symbol(w, t, n))


def fractional_heat(f: SpectralField, t: float, eta: float, w: WeightModel) -> SpectralField:
    """L^eta H_t f"""
    if eta <= 0:
        raise ValueError(f"Порядок eta должен быть > 0, получено: {eta}")
    return apply_multiplier(f, fractional_heat_symbol(w, t, eta))


def poisson_apply(f: SpectralField, y: float, w: WeightModel) -> SpectralField:
    """Полугруппа Пуассона Q_y f = e^{-y sqrt(L)} f"""
    if y < 0:
        raise ValueError(f"Высота y должна быть >= 0, получено: {y}")
    if y == 0:
        return f
    return apply_multiplier(f, poisson_symbol(w, y))


def fractional_power(f: SpectralField, s: float, w: WeightModel) -> SpectralField:
    """
    Дробная степень L^s (lambda^s вне нуля, 0 в нуле)

    Args:
        f: Поле; при s < 0 должно иметь нулевое среднее
        s: Показатель степени
        w: Весовая модель

    Returns:
        SpectralField: L^s f
    """
    if s < 0 and not f.is_mean_zero():
        raise ValueError(f"Отрицательная степень L^{s} применима только к полям без среднего (c_0={f.mean:.3e})")
    return apply_multiplier(f, power_symbol(w, s))


def smallest_eigenvalue(lattice: FrequencyLattice, w: WeightModel) -> float:
    """lambda_1 = min_{n != 0} lambda(n) на решётке"""
    lam = eigenvalues(lattice.frequencies, w)
    return float(lam[lam > 0].min())
