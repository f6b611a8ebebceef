# src/poisson/solver.py
import logging
from itertools import combinations_with_replacement
from typing import List, Tuple

import numpy as np

from ..semigroup.heat import fractional_power
from ..spectral.fields import SpectralField
from ..spectral.symbols import apply_multiplier, direction_projections
from ..spectral.weights import WeightModel

logger = logging.getLogger(__name__)

# Размер выборки пар (i, j) при d > FULL_PAIRS_DIMENSION
PAIR_SAMPLE_SIZE = 12
FULL_PAIRS_DIMENSION = 4


def solve_poisson(f: SpectralField, w: WeightModel) -> SpectralField:
    """
    Решение уравнения L u = f спектрально: u = L^{-1} f, мультипликатор 1/lambda(n) при n != 0

    Args:
        f: Правая часть с нулевым средним (|c_0| <= 1e-14)
        w: Весовая модель

    Returns:
        SpectralField: u без среднего
    """
    if not f.is_mean_zero():
        raise ValueError(f"Правая часть уравнения Пуассона должна иметь нулевое среднее, c_0={f.mean:.3e}")
    return fractional_power(f, -1.0, w)


def apply_generator(u: SpectralField, w: WeightModel) -> SpectralField:
    """L u"""
    return fractional_power(u, 1.0, w)


def second_derivative(u: SpectralField, i: int, j: int, w: WeightModel) -> SpectralField:
    """X_i X_j u: символ -(tau_i . n)(tau_j . n)"""
    return apply_multiplier(u, lambda n: -direction_projections(i, n, w) * direction_projections(j, n, w))


def tail_operator(u: SpectralField, m: int, w: WeightModel) -> SpectralField:
    """sum_{i=m}^d X_i^2 u"""
    d = w.dimension
    if not 1 <= m <= d + 1:
        raise IndexError(f"Начало хвоста m={m} вне диапазона 1..{d + 1}")

    def symbol(n):
        total = np.zeros(np.asarray(n).shape[1:])
        for i in range(m, d + 1):
            total = total - direction_projections(i, n, w) ** 2
        return total
    return apply_multiplier(u, symbol)


def index_pairs(d: int, seed: int = 0, sample_size: int = PAIR_SAMPLE_SIZE) -> List[Tuple[int, int]]:
    """Все пары i <= j при d <= 4, иначе детерминированная выборка sample_size пар"""
    pairs = list(combinations_with_replacement(range(1, d + 1), 2))
    if d <= FULL_PAIRS_DIMENSION or len(pairs) <= sample_size:
        return pairs
    rng = np.random.default_rng(seed)
    chosen = sorted(rng.choice(len(pairs), size=sample_size, replace=False))
    return [pairs[k] for k in chosen]
