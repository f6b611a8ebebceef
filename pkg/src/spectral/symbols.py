# src/spectral/symbols.py
"""
Символы операторов, диагональных в базисе характеров e^{i n.x}.

Каждая фабрика возвращает функцию m(n), где n - целочисленный массив
формы (d, ...). Все встроенные символы удовлетворяют m(-n) = conj(m(n)),
поэтому переводят вещественные поля в вещественные.
"""
import logging
from typing import Callable, Sequence, Union

import numpy as np

from .fields import SpectralField
from .weights import WeightModel

logger = logging.getLogger(__name__)

Symbol = Callable[[np.ndarray], np.ndarray]


def eigenvalues(n: np.ndarray, w: WeightModel) -> np.ndarray:
    """lambda(n) = n^t A n для массива частот формы (d, ...)"""
    n = np.asarray(n, dtype=float)
    if n.shape[0] != w.dimension:
        raise ValueError(f"Размерность частот {n.shape[0]} не совпадает с моделью {w.dimension}")
    if w.is_diagonal:
        return np.tensordot(w.weights, n * n, axes=(0, 0))
    return np.einsum("i...,ij,j...->...", n, w.gram, n)


def eigenvalue(n: Sequence[int], w: WeightModel) -> float:
    """
    Собственное значение L на характере e^{i n.x}

    Args:
        n: Частота
        w: Весовая модель

    Returns:
        float: sum a_i n_i^2 (диагональный случай) или n^t A n
    """
    return float(eigenvalues(np.asarray(n, dtype=float), w))


def _check_direction(i: int, w: WeightModel):
    if not 1 <= i <= w.dimension:
        raise IndexError(f"Индекс направления {i} вне диапазона 1..{w.dimension}")


def direction_projections(i: int, n: np.ndarray, w: WeightModel) -> np.ndarray:
    """tau_i . n для массива частот"""
    _check_direction(i, w)
    return np.tensordot(w.factor[i - 1], np.asarray(n, dtype=float), axes=(0, 0))


def direction_symbol(i: int, n: Sequence[int], w: WeightModel) -> complex:
    """Символ поля X_i на e^{i n.x}: i (tau_i . n)"""
    return complex(1j * direction_projections(i, np.asarray(n, dtype=float), w))


def _inverse_on_nonzero(values: np.ndarray, power: float) -> np.ndarray:
    """values^power вне нуля, 0 в нуле"""
    out = np.zeros_like(values, dtype=float)
    mask = values > 0
    out[mask] = values[mask] ** power
    return out


def heat_symbol(w: WeightModel, t: float) -> Symbol:
    return lambda n: np.exp(-t * eigenvalues(n, w))


def time_derivative_symbol(w: WeightModel, t: float, order: int) -> Symbol:
    """(-lambda)^order e^{-t lambda}"""
    def symbol(n):
        lam = eigenvalues(n, w)
        return (-lam) ** order * np.exp(-t * lam)
    return symbol


def fractional_heat_symbol(w: WeightModel, t: float, eta: float) -> Symbol:
    """lambda^eta e^{-t lambda}, 0 в нуле"""
    def symbol(n):
        lam = eigenvalues(n, w)
        return _inverse_on_nonzero(lam, eta) * np.exp(-t * lam)
    return symbol


def poisson_symbol(w: WeightModel, y: float) -> Symbol:
    return lambda n: np.exp(-y * np.sqrt(eigenvalues(n, w)))


def power_symbol(w: WeightModel, s: float) -> Symbol:
    """lambda^s вне нуля, 0 в нуле"""
    return lambda n: _inverse_on_nonzero(eigenvalues(n, w), s)


def direction_field_symbol(w: WeightModel, i: int) -> Symbol:
    """Символ X_i"""
    _check_direction(i, w)
    return lambda n: 1j * direction_projections(i, n, w)


def riesz_symbol(w: WeightModel, i: int) -> Symbol:
    """R_i = X_i L^{-1/2}: i (tau_i . n) / sqrt(lambda)"""
    _check_direction(i, w)
    def symbol(n):
        return 1j * direction_projections(i, n, w) * _inverse_on_nonzero(eigenvalues(n, w), -0.5)
    return symbol


def riesz_second_symbol(w: WeightModel, i: int, j: int) -> Symbol:
    """R_i R_j: -(tau_i . n)(tau_j . n) / lambda"""
    _check_direction(i, w)
    _check_direction(j, w)
    def symbol(n):
        return -direction_projections(i, n, w) * direction_projections(j, n, w) \
            * _inverse_on_nonzero(eigenvalues(n, w), -1.0)
    return symbol


def translation_symbol(y: Sequence[float]) -> Symbol:
    """Сдвиг f(. + y): e^{i n.y}"""
    y = np.asarray(y, dtype=float)
    return lambda n: np.exp(1j * np.tensordot(y, np.asarray(n, dtype=float), axes=(0, 0)))


def difference_symbol(y: Sequence[float], k: int) -> Symbol:
    """Разность порядка k с шагом y: (e^{i n.y} - 1)^k"""
    shift = translation_symbol(y)
    return lambda n: (shift(n) - 1.0) ** k


def apply_multiplier(field: SpectralField, m: Union[Symbol, np.ndarray]) -> SpectralField:
    """
    Применение диагонального мультипликатора c'_n = m(n) c_n

    Args:
        field: Спектральное поле
        m: Функция символа от массива частот или готовый массив значений

    Returns:
        SpectralField: Результат
    """
    values = np.asarray(m(field.lattice.frequencies) if callable(m) else m)
    if values.shape != field.lattice.shape:
        values = np.broadcast_to(values, field.lattice.shape)
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))[0] - np.asarray(field.lattice.bandwidths)
        raise ValueError(f"Символ не конечен в точке решётки n={tuple(int(k) for k in bad)}")
    return field.with_coefficients(field.coefficients * values)
