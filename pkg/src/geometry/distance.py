# src/geometry/distance.py
import itertools
import logging
import math
from typing import Union

import numpy as np

from ..spectral.weights import WeightModel
from .points import TWO_PI, TorusPoint, centered

logger = logging.getLogger(__name__)

DEFAULT_WINDING = 2
MAX_WINDING = 8
# Предел числа векторов намотки в одном переборе
MAX_WINDING_VECTORS = 5_000_000

PointLike = Union[TorusPoint, np.ndarray]


def _coordinates(point: PointLike) -> np.ndarray:
    return point.as_array() if isinstance(point, TorusPoint) else np.asarray(point, dtype=float)


def distance_from_identity(y, w: WeightModel, winding: int = DEFAULT_WINDING) -> np.ndarray:
    """
    d(e, y) для одного вектора (d,) или массива векторов (m, d)

    Args:
        y: Координаты
        w: Весовая модель
        winding: Начальный радиус перебора намоток W (матричный случай)

    Returns:
        np.ndarray или float: Расстояния
    """
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    delta = np.atleast_2d(y)
    if delta.shape[1] != w.dimension:
        raise ValueError(f"Размерность точки {delta.shape[1]} не совпадает с моделью {w.dimension}")
    if w.is_diagonal:
        # дуговое расстояние min(|delta|, 2 pi - |delta|) симметрично точно
        wrapped = np.mod(np.abs(delta), TWO_PI)
        arc = np.minimum(wrapped, TWO_PI - wrapped)
        squared = np.sum(arc ** 2 / w.weights, axis=1)
    else:
        squared = np.array([_matrix_squared_distance(row, w, winding) for row in centered(delta)])
    result = np.sqrt(squared)
    return float(result[0]) if single else result


def _matrix_squared_distance(delta: np.ndarray, w: WeightModel, winding: int) -> float:
    """min_m (delta - 2 pi m)^t A^{-1} (delta - 2 pi m) с расширением радиуса W до MAX_WINDING"""
    d = w.dimension
    radius = winding
    while radius <= MAX_WINDING:
        count = (2 * radius + 1) ** d
        if count > MAX_WINDING_VECTORS:
            raise ValueError(f"Перебор {count} векторов намотки при d={d}, W={radius} превышает предел")
        m = np.array(list(itertools.product(range(-radius, radius + 1), repeat=d)), dtype=float)
        v = delta[None, :] - TWO_PI * m
        q = np.einsum("ki,ij,kj->k", v, w.gram_inverse, v)
        best = int(np.argmin(q))
        if np.max(np.abs(m[best])) < radius:
            return float(q[best])
        logger.debug(f"Минимум на границе перебора намоток W={radius}, удваиваем радиус")
        radius *= 2
    raise ValueError(
        f"Минимум квадратичной формы достигается на границе перебора W={MAX_WINDING}: увеличьте радиус намоток"
    )


def intrinsic_distance(x: PointLike, y: PointLike, w: WeightModel,
                       winding: int = DEFAULT_WINDING) -> float:
    """
    Внутренняя метрика формы Дирихле d(x, y) = d(e, y - x)

    Args:
        x: Точка тора
        y: Точка тора
        w: Весовая модель
        winding: Начальный радиус перебора намоток (матричный случай)

    Returns:
        float: Расстояние
    """
    x, y = _coordinates(x), _coordinates(y)
    if x.shape != y.shape:
        raise ValueError(f"Размерности точек не совпадают: {x.shape} и {y.shape}")
    return distance_from_identity(y - x, w, winding)
