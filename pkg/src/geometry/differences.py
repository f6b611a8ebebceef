# src/geometry/differences.py
import logging
from typing import Sequence, Union

import numpy as np
from scipy.special import comb

from ..spectral.fields import GridField, SpectralField
from ..spectral.symbols import apply_multiplier, difference_symbol
from ..spectral.transforms import transform_forward, transform_inverse
from .points import TorusPoint

logger = logging.getLogger(__name__)


def difference_operator(f: Union[SpectralField, GridField], y: Union[TorusPoint, Sequence[float]],
                        k: int) -> Union[SpectralField, GridField]:
    """
    Разность порядка k: sum_j (-1)^{k-j} C(k,j) f(x + j y), спектрально через (e^{i n.y} - 1)^k

    Args:
        f: Спектральное поле или значения на тензорной сетке
        y: Сдвиг (не обязательно узел сетки)
        k: Порядок, k >= 1

    Returns:
        Тот же тип, что и f
    """
    if k < 1:
        raise ValueError(f"Порядок разности должен быть >= 1, получено: {k}")
    shift = y.as_array() if isinstance(y, TorusPoint) else np.asarray(y, dtype=float)
    if isinstance(f, GridField):
        return transform_inverse(difference_operator(transform_forward(f), shift, k))
    if shift.shape != (f.d,):
        raise ValueError(f"Размерность сдвига {shift.shape} не совпадает с полем {f.d}")
    return apply_multiplier(f, difference_symbol(shift, k))


def pointwise_difference(grid: GridField, steps: Sequence[int], k: int) -> np.ndarray:
    """
    Биномиальная форма разности на сдвиге y = 2 pi steps / N (узел сетки)

    Args:
        grid: Значения на тензорной сетке
        steps: Сдвиг в узлах по каждой оси
        k: Порядок

    Returns:
        np.ndarray: Значения разности на сетке
    """
    if not grid.is_tensor:
        raise ValueError("Поточечная разность определена только на тензорной сетке")
    out = np.zeros_like(grid.samples)
    axes = tuple(range(grid.samples.ndim))
    for j in range(k + 1):
        shifted = np.roll(grid.samples, tuple(-j * s for s in steps), axis=axes)
        out = out + (-1) ** (k - j) * comb(k, j, exact=True) * shifted
    return out
