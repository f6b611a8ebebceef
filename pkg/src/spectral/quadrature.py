# src/spectral/quadrature.py
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .fields import GridField, SpectralField
from .lattice import FrequencyLattice
from .transforms import synthesize

logger = logging.getLogger(__name__)

# Выше этой размерности тензорная сетка заменяется решёткой ранга 1
TENSOR_MAX_DIMENSION = 4
# Бюджет числа узлов тензорной сетки с передискретизацией
DEFAULT_TENSOR_BUDGET = 2 ** 16
MAX_OVERSAMPLING = 16
# Параметры решётки ранга 1
DEFAULT_LATTICE_POINTS = 2 ** 16
DEFAULT_LATTICE_SHIFTS = 8
DEFAULT_LATTICE_SEED = 20240917
GENERATOR_CANDIDATES = 512


@dataclass(frozen=True)
class NormEstimate:
    """Оценка нормы и её стандартная ошибка (0 для точных квадратур)"""

    value: float
    stderr: float = 0.0

    def __float__(self) -> float:
        return self.value


class QuadratureRule(ABC):
    """Квадратура по нормированной мере Хаара на T^d"""

    def __init__(self, lattice: FrequencyLattice):
        self.lattice = lattice

    @abstractmethod
    def evaluate(self, field: SpectralField) -> np.ndarray:
        """
        Значения поля в узлах

        Returns:
            np.ndarray: Массив формы (R, M): R независимых повторов по M узлов
        """
        pass

    @property
    @abstractmethod
    def exact(self) -> bool:
        pass

    def to_grid_field(self, field: SpectralField) -> GridField:
        """Значения поля как облако точек первого повтора"""
        values = self.evaluate(field)[0]
        return GridField(self.lattice, values, self.nodes(0))

    @abstractmethod
    def nodes(self, replicate: int = 0) -> np.ndarray:
        pass

    def integrate(self, values: np.ndarray, p: float) -> NormEstimate:
        """
        (mean |g|^p)^{1/p} по значениям формы (R, M); p = inf - максимум

        Args:
            values: Значения |g| (или g) в узлах
            p: Показатель

        Returns:
            NormEstimate: Значение и стандартная ошибка (дельта-метод по повторам)
        """
        magnitudes = np.abs(values)
        if math.isinf(p):
            return NormEstimate(float(magnitudes.max(initial=0.0)), 0.0)
        moments = np.mean(magnitudes ** p, axis=1)
        moment = float(np.mean(moments))
        if moment <= 0.0:
            return NormEstimate(0.0, 0.0)
        value = moment ** (1.0 / p)
        if len(moments) < 2:
            return NormEstimate(value, 0.0)
        moment_error = float(np.std(moments, ddof=1) / math.sqrt(len(moments)))
        return NormEstimate(value, value / (p * moment) * moment_error)


class TensorGridRule(QuadratureRule):
    """
    Тензорная сетка с передискретизацией k*N_i узлов по каждой оси;
    для p = 2 и полиномов степени < N_i формула точна.
    """

    def __init__(self, lattice: FrequencyLattice, budget: int = DEFAULT_TENSOR_BUDGET,
                 oversampling: Optional[Sequence[int]] = None):
        super().__init__(lattice)
        if oversampling is None:
            base = float(np.prod(lattice.grid_shape))
            k = int(math.floor((budget / base) ** (1.0 / lattice.d) + 1e-9))
            oversampling = [min(MAX_OVERSAMPLING, max(1, k))] * lattice.d
        if len(oversampling) != lattice.d or any(k < 1 for k in oversampling):
            raise ValueError(f"Некорректная передискретизация: {oversampling}")
        self.oversampling = tuple(int(k) for k in oversampling)
        self.grid_shape = tuple(k * n for k, n in zip(self.oversampling, lattice.grid_shape))

    @property
    def exact(self) -> bool:
        return True

    def evaluate(self, field: SpectralField) -> np.ndarray:
        if field.lattice != self.lattice:
            raise ValueError("Поле задано на другой решётке")
        return synthesize(field, self.grid_shape).reshape(1, -1)

    def nodes(self, replicate: int = 0) -> np.ndarray:
        axes = self.lattice.grid_points(self.oversampling)
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def korobov_vector(generator: int, d: int, n_points: int) -> np.ndarray:
    """Порождающий вектор z = (1, a, a^2, ..., a^{d-1}) mod M"""
    z = np.zeros(d, dtype=np.int64)
    power = 1
    for j in range(d):
        z[j] = power % n_points
        power = (power * generator) % n_points
    return z


def find_injective_generator(lattice: FrequencyLattice, n_points: int,
                             candidates: int = GENERATOR_CANDIDATES) -> Tuple[int, np.ndarray]:
    """
    Поиск генератора Коробова, для которого n -> n.z mod M инъективно на решётке
    (тогда формула точна для всех произведений полей полосы с сопряжёнными)

    Args:
        lattice: Решётка частот
        n_points: Число узлов M
        candidates: Число проверяемых генераторов

    Returns:
        Tuple[int, np.ndarray]: Генератор и порождающий вектор
    """
    freqs = lattice.frequencies.reshape(lattice.d, -1).astype(np.int64)
    start = int(n_points * (math.sqrt(5.0) - 1.0) / 2.0) | 1
    for step in range(candidates):
        a = (start + 2 * step) % n_points
        if a < 3:
            continue
        z = korobov_vector(a, lattice.d, n_points)
        keys = np.mod(z @ freqs, n_points)
        if np.unique(keys).size == keys.size:
            return a, z
    raise ValueError(
        f"Не найден инъективный генератор решётки ранга 1 для {lattice.size} частот и M={n_points}"
    )


class RankOneLatticeRule(QuadratureRule):
    """
    Сдвинутая решётка ранга 1: x_j = 2*pi*frac(j z / M + Delta_r), r = 1..R.
    Значения в узлах вычисляются одним БПФ длины M агрегированных коэффициентов
    sum_{n.z = k mod M} c_n e^{i n.Delta}.
    """

    def __init__(self, lattice: FrequencyLattice, n_points: int = DEFAULT_LATTICE_POINTS,
                 n_shifts: int = DEFAULT_LATTICE_SHIFTS, seed: int = DEFAULT_LATTICE_SEED):
        super().__init__(lattice)
        if n_shifts < 2:
            raise ValueError(f"Для оценки ошибки нужно хотя бы 2 сдвига, получено: {n_shifts}")
        # M не меньше 4 * |решётки| для существования инъективного генератора
        minimum = 1 << int(math.ceil(math.log2(4 * lattice.size)))
        self.n_points = max(int(n_points), minimum)
        self.generator, self.z = find_injective_generator(lattice, self.n_points)
        rng = np.random.default_rng(seed)
        self.shifts = rng.random((n_shifts, lattice.d))
        freqs = lattice.frequencies.reshape(lattice.d, -1)
        self._keys = np.mod(self.z @ freqs.astype(np.int64), self.n_points)
        self._phases = np.exp(2j * np.pi * (self.shifts @ freqs.astype(float)))
        logger.debug(
            f"Решётка ранга 1: M={self.n_points}, генератор={self.generator}, сдвигов={n_shifts}"
        )

    @property
    def exact(self) -> bool:
        return False

    def evaluate(self, field: SpectralField) -> np.ndarray:
        if field.lattice != self.lattice:
            raise ValueError("Поле задано на другой решётке")
        real = field.is_real()
        coefficients = field.coefficients.ravel()
        rows = []
        for phase in self._phases:
            weighted = coefficients * phase
            bins = np.bincount(self._keys, weights=weighted.real, minlength=self.n_points) \
                + 1j * np.bincount(self._keys, weights=weighted.imag, minlength=self.n_points)
            values = np.fft.ifft(bins) * self.n_points
            rows.append(values.real if real else values)
        return np.stack(rows)

    def nodes(self, replicate: int = 0) -> np.ndarray:
        j = np.arange(self.n_points, dtype=float)[:, None]
        return 2.0 * np.pi * np.mod(j * self.z[None, :] / self.n_points + self.shifts[replicate], 1.0)


@lru_cache(maxsize=64)
def quadrature_for(lattice: FrequencyLattice) -> QuadratureRule:
    """
    Квадратура по умолчанию: тензорная сетка при d <= 4, иначе решётка ранга 1

    Args:
        lattice: Решётка частот

    Returns:
        QuadratureRule: Правило квадратуры (кэшируется по решётке)
    """
    if lattice.d <= TENSOR_MAX_DIMENSION:
        return TensorGridRule(lattice)
    return RankOneLatticeRule(lattice)
