# src/geometry/sampler.py
"""
Выборка сдвигов y для супремумов по y. Сдвиги берутся на рациональной сетке
y = 2 pi j / q с нечётным q = 2^12 - 1: удвоение j -> 2j mod q переставляет
узлы, и выборка замыкается относительно y -> 2y вместе с орбитами удвоения
(длина орбиты не больше 12). Для замкнутой выборки двусторонние неравенства
между разностями порядков k и k+1 выполняются для выборочных супремумов точно.
"""
import logging
from dataclasses import dataclass
from typing import List, Sequence, Set, Tuple

import numpy as np

from .points import TWO_PI

logger = logging.getLogger(__name__)

DOUBLING_MODULUS = 4095
# Орбиты j = 1 и j = 3 дают 24 почти логарифмически равномерных модуля от 1.5e-3 до pi
AXIS_ORBIT_SEEDS = (1, 3)
DEFAULT_RANDOM_POINTS = 200
DEFAULT_SAMPLER_SEED = 7


def doubling_orbit(j: Tuple[int, ...], modulus: int = DOUBLING_MODULUS) -> List[Tuple[int, ...]]:
    """Орбита j, 2j, 4j, ... mod q"""
    orbit, current = [], tuple(int(v) % modulus for v in j)
    while current not in orbit:
        orbit.append(current)
        current = tuple((2 * v) % modulus for v in current)
    return orbit


@dataclass(frozen=True)
class TranslationSampler:
    """
    Выборка сдвигов: осевые векторы (орбиты AXIS_ORBIT_SEEDS по каждой оси)
    и случайные векторы с орбитами удвоения
    """

    n_random: int = DEFAULT_RANDOM_POINTS
    seed: int = DEFAULT_SAMPLER_SEED
    modulus: int = DOUBLING_MODULUS

    def integer_sample(self, d: int) -> List[Tuple[int, ...]]:
        seen: Set[Tuple[int, ...]] = set()
        ordered: List[Tuple[int, ...]] = []

        def extend(orbit):
            for point in orbit:
                if point not in seen and any(point):
                    seen.add(point)
                    ordered.append(point)

        for axis in range(d):
            for j in AXIS_ORBIT_SEEDS:
                base = [0] * d
                base[axis] = j
                extend(doubling_orbit(tuple(base), self.modulus))

        rng = np.random.default_rng(self.seed)
        random_count = 0
        while random_count < self.n_random:
            base = tuple(int(v) for v in rng.integers(0, self.modulus, size=d))
            before = len(ordered)
            extend(doubling_orbit(base, self.modulus))
            random_count += len(ordered) - before
        return ordered

    def sample(self, d: int) -> np.ndarray:
        """
        Сдвиги формы (m, d), без нулевого, замкнутые относительно удвоения

        Args:
            d: Размерность

        Returns:
            np.ndarray: Координаты сдвигов в [0, 2 pi)
        """
        points = np.asarray(self.integer_sample(d), dtype=float)
        return TWO_PI * points / self.modulus

    def coarse(self) -> "TranslationSampler":
        """Выборка половинного размера для оценки чувствительности супремума"""
        return TranslationSampler(max(1, self.n_random // 2), self.seed, self.modulus)


def axis_magnitudes(modulus: int = DOUBLING_MODULUS) -> np.ndarray:
    """Модули осевых сдвигов (дуговые расстояния до 0) в порядке возрастания"""
    values = set()
    for j in AXIS_ORBIT_SEEDS:
        for (v,) in doubling_orbit((j,), modulus):
            values.add(min(v, modulus - v))
    return np.sort(TWO_PI * np.asarray(sorted(values), dtype=float) / modulus)


def point_sample(d: int, count: int, seed: int, include: Sequence[Sequence[float]] = ()) -> np.ndarray:
    """Случайные точки тора [0, 2 pi)^d с добавленными точками include"""
    rng = np.random.default_rng(seed)
    points = rng.uniform(0.0, TWO_PI, size=(count, d))
    if include:
        points = np.vstack([np.asarray(include, dtype=float).reshape(-1, d), points])
    return points
