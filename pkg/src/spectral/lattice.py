# src/spectral/lattice.py
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from .weights import WeightModel

logger = logging.getLogger(__name__)

# Бюджет памяти по числу точек решётки частот
DEFAULT_MAX_POINTS = 2_000_000


@dataclass(frozen=True)
class FrequencyLattice:
    """
    Усечённая решётка частот {n in Z^d : |n_i| <= B_i}.

    Коэффициенты хранятся в центрированном массиве формы (2B_i+1, ...):
    частоте n соответствует индекс n + B. Порядок обхода - C-порядок массива.
    """

    bandwidths: Tuple[int, ...]
    max_points: int = DEFAULT_MAX_POINTS

    def __post_init__(self):
        if len(self.bandwidths) == 0:
            raise ValueError("Решётка должна иметь хотя бы одну ось")
        if any(int(b) != b or b < 1 for b in self.bandwidths):
            raise ValueError(f"Полосы B_i должны быть целыми >= 1, получено: {self.bandwidths}")
        if self.size > self.max_points:
            raise ValueError(
                f"Решётка {self.shape} содержит {self.size} точек, что превышает бюджет {self.max_points}"
            )

    @classmethod
    def uniform(cls, d: int, bandwidth: int, max_points: int = DEFAULT_MAX_POINTS) -> "FrequencyLattice":
        return cls(tuple([int(bandwidth)] * d), max_points)

    @classmethod
    def for_weights(cls, weights: WeightModel, first: int,
                    bandwidths: Optional[Sequence[int]] = None,
                    max_points: int = DEFAULT_MAX_POINTS) -> "FrequencyLattice":
        """
        Решётка для весовой модели: явные полосы или правило по умолчанию

        Args:
            weights: Весовая модель
            first: Полоса B_1 для правила по умолчанию
            bandwidths: Явные полосы (перекрывают правило)
            max_points: Бюджет числа точек

        Returns:
            FrequencyLattice: Решётка размерности weights.dimension
        """
        if bandwidths is not None:
            if len(bandwidths) != weights.dimension:
                raise ValueError(
                    f"Число полос {len(bandwidths)} не совпадает с размерностью {weights.dimension}"
                )
            return cls(tuple(int(b) for b in bandwidths), max_points)
        return cls(weights.default_bandwidths(first), max_points)

    @property
    def d(self) -> int:
        return len(self.bandwidths)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(2 * b + 1 for b in self.bandwidths)

    @property
    def grid_shape(self) -> Tuple[int, ...]:
        """Размер тензорной сетки N_i = 2B_i + 2"""
        return tuple(2 * b + 2 for b in self.bandwidths)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64))

    @property
    def zero_index(self) -> Tuple[int, ...]:
        return tuple(self.bandwidths)

    def axes(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.arange(-b, b + 1) for b in self.bandwidths)

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Частоты решётки: целочисленный массив формы (d, 2B_1+1, ..., 2B_d+1)"""
        grids = np.stack(np.meshgrid(*self.axes(), indexing="ij"))
        grids.setflags(write=False)
        return grids

    def index_of(self, n: Sequence[int]) -> Tuple[int, ...]:
        """Индекс частоты n в центрированном массиве"""
        if len(n) != self.d:
            raise ValueError(f"Размерность частоты {len(n)} не совпадает с размерностью решётки {self.d}")
        if not self.contains(n):
            raise ValueError(f"Частота {tuple(n)} вне решётки с полосами {self.bandwidths}")
        return tuple(int(k) + b for k, b in zip(n, self.bandwidths))

    def contains(self, n: Sequence[int]) -> bool:
        return len(n) == self.d and all(abs(int(k)) <= b for k, b in zip(n, self.bandwidths))

    def points(self) -> Iterator[Tuple[int, ...]]:
        """Детерминированный обход всех частот решётки"""
        flat = self.frequencies.reshape(self.d, -1)
        for column in flat.T:
            yield tuple(int(k) for k in column)

    def grid_points(self, oversampling: Sequence[int] = ()) -> Tuple[np.ndarray, ...]:
        """Узлы тензорной сетки x_j = 2*pi*j/N по каждой оси"""
        factors = tuple(oversampling) or (1,) * self.d
        return tuple(2.0 * np.pi * np.arange(k * n) / (k * n) for k, n in zip(factors, self.grid_shape))
