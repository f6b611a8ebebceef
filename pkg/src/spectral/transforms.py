# src/spectral/transforms.py
import logging
from typing import Sequence, Tuple

import numpy as np

from .fields import GridField, SpectralField
from .lattice import FrequencyLattice

logger = logging.getLogger(__name__)


def _band_index(lattice: FrequencyLattice, grid_shape: Sequence[int]) -> Tuple[np.ndarray, ...]:
    """Индексы частот -B..B в массиве БПФ длины N (n mod N)"""
    return np.ix_(*[np.arange(-b, b + 1) % n for b, n in zip(lattice.bandwidths, grid_shape)])


def synthesize(field: SpectralField, grid_shape: Sequence[int]) -> np.ndarray:
    """
    Значения sum c_n e^{i n.x_j} на сетке x_j = 2*pi*j/N произвольного размера N_i >= 2B_i+1

    Args:
        field: Спектральное поле
        grid_shape: Размер сетки по осям

    Returns:
        np.ndarray: Вещественный массив для эрмитовых полей, иначе комплексный
    """
    lattice = field.lattice
    if len(grid_shape) != lattice.d or any(n < 2 * b + 1 for n, b in zip(grid_shape, lattice.bandwidths)):
        raise ValueError(f"Сетка {tuple(grid_shape)} не разрешает решётку {lattice.bandwidths}")
    full = np.zeros(tuple(grid_shape), dtype=complex)
    full[_band_index(lattice, grid_shape)] = field.coefficients
    samples = np.fft.ifftn(full) * float(np.prod(grid_shape))
    if field.is_real():
        return samples.real.copy()
    return samples


def transform_inverse(field: SpectralField) -> GridField:
    """
    Коэффициенты -> значения на тензорной сетке N_i = 2B_i + 2

    Args:
        field: Спектральное поле

    Returns:
        GridField: Значения на сетке
    """
    return GridField(field.lattice, synthesize(field, field.lattice.grid_shape))


def transform_forward(grid: GridField) -> SpectralField:
    """
    Значения на тензорной сетке -> коэффициенты полосы; частота Найквиста отбрасывается

    Args:
        grid: Поле на тензорной сетке

    Returns:
        SpectralField: Коэффициенты на решётке grid.lattice
    """
    if not grid.is_tensor:
        raise ValueError("Прямое преобразование определено только для тензорной сетки")
    lattice = grid.lattice
    if grid.samples.shape != lattice.grid_shape:
        raise ValueError(f"Форма значений {grid.samples.shape} не совпадает с сеткой {lattice.grid_shape}")
    spectrum = np.fft.fftn(grid.samples) / float(np.prod(lattice.grid_shape))
    return SpectralField(lattice, spectrum[_band_index(lattice, lattice.grid_shape)])
