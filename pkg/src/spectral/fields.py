# src/spectral/fields.py
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .lattice import FrequencyLattice

logger = logging.getLogger(__name__)

# Допуск эрмитовой симметрии для вещественных полей
REAL_TOLERANCE = 1e-12
# Допуск нулевого среднего
MEAN_ZERO_TOLERANCE = 1e-14


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SpectralField:
    """
    Функция на T^d, заданная коэффициентами Фурье c_n на решётке частот
    (нормированная мера Хаара: среднее значение равно c_0).
    """

    lattice: FrequencyLattice
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex, copy=True)
        if c.shape != self.lattice.shape:
            raise ValueError(f"Форма коэффициентов {c.shape} не совпадает с решёткой {self.lattice.shape}")
        object.__setattr__(self, "coefficients", _frozen(c))

    # --- конструкторы ---

    @classmethod
    def zeros(cls, lattice: FrequencyLattice) -> "SpectralField":
        return cls(lattice, np.zeros(lattice.shape, dtype=complex))

    @classmethod
    def constant(cls, lattice: FrequencyLattice, value: complex) -> "SpectralField":
        c = np.zeros(lattice.shape, dtype=complex)
        c[lattice.zero_index] = value
        return cls(lattice, c)

    @classmethod
    def character(cls, lattice: FrequencyLattice, n: Sequence[int], amplitude: complex = 1.0) -> "SpectralField":
        """Характер amplitude * e^{i n.x}"""
        c = np.zeros(lattice.shape, dtype=complex)
        c[lattice.index_of(n)] = amplitude
        return cls(lattice, c)

    @classmethod
    def cosine(cls, lattice: FrequencyLattice, n: Sequence[int], amplitude: float = 1.0) -> "SpectralField":
        """amplitude * cos(n.x)"""
        minus = tuple(-k for k in n)
        c = np.zeros(lattice.shape, dtype=complex)
        c[lattice.index_of(n)] += amplitude / 2.0
        c[lattice.index_of(minus)] += amplitude / 2.0
        return cls(lattice, c)

    @classmethod
    def sine(cls, lattice: FrequencyLattice, n: Sequence[int], amplitude: float = 1.0) -> "SpectralField":
        """amplitude * sin(n.x)"""
        minus = tuple(-k for k in n)
        c = np.zeros(lattice.shape, dtype=complex)
        c[lattice.index_of(n)] += amplitude / 2.0j
        c[lattice.index_of(minus)] -= amplitude / 2.0j
        return cls(lattice, c)

    # --- свойства ---

    @property
    def d(self) -> int:
        return self.lattice.d

    @property
    def mean(self) -> complex:
        return complex(self.coefficients[self.lattice.zero_index])

    def reflected(self) -> np.ndarray:
        """Массив conj(c_{-n}); отражение n -> -n есть разворот всех осей"""
        return np.conj(np.flip(self.coefficients))

    def is_real(self, tol: float = REAL_TOLERANCE) -> bool:
        """Эрмитова симметрия c_{-n} = conj(c_n) с относительным допуском tol"""
        scale = max(1.0, float(np.abs(self.coefficients).max(initial=0.0)))
        return bool(np.abs(self.coefficients - self.reflected()).max(initial=0.0) <= tol * scale)

    def is_mean_zero(self, tol: float = MEAN_ZERO_TOLERANCE) -> bool:
        return abs(self.mean) <= tol

    def is_zero(self) -> bool:
        return not np.any(self.coefficients)

    def l2_norm(self) -> float:
        """Норма L^2 по равенству Парсеваля"""
        return float(np.sqrt(np.sum(np.abs(self.coefficients) ** 2)))

    # --- преобразования ---

    def with_coefficients(self, coefficients: np.ndarray) -> "SpectralField":
        return SpectralField(self.lattice, coefficients)

    def hermitian_part(self) -> "SpectralField":
        """Проекция на вещественные поля (c + conj(c_{-n}))/2"""
        return self.with_coefficients((self.coefficients + self.reflected()) / 2.0)

    def without_mean(self) -> "SpectralField":
        c = self.coefficients.copy()
        c[self.lattice.zero_index] = 0.0
        return self.with_coefficients(c)

    def translated(self, z: Sequence[float]) -> "SpectralField":
        """Сдвиг f(. + z): множитель e^{i n.z}"""
        phase = np.tensordot(np.asarray(z, dtype=float), self.lattice.frequencies, axes=(0, 0))
        return self.with_coefficients(self.coefficients * np.exp(1j * phase))

    def embedded(self, lattice: FrequencyLattice) -> "SpectralField":
        """Перенос коэффициентов на другую решётку той же размерности (обрезка или дополнение нулями)"""
        if lattice.d != self.d:
            raise ValueError(f"Размерности решёток не совпадают: {lattice.d} != {self.d}")
        c = np.zeros(lattice.shape, dtype=complex)
        common = tuple(min(a, b) for a, b in zip(self.lattice.bandwidths, lattice.bandwidths))
        src = tuple(slice(b - m, b + m + 1) for b, m in zip(self.lattice.bandwidths, common))
        dst = tuple(slice(b - m, b + m + 1) for b, m in zip(lattice.bandwidths, common))
        c[dst] = self.coefficients[src]
        return SpectralField(lattice, c)

    def support(self, tol: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
        """
        Частоты и коэффициенты с |c_n| > tol

        Returns:
            Tuple[np.ndarray, np.ndarray]: (частоты формы (k, d), коэффициенты формы (k,))
        """
        mask = np.abs(self.coefficients) > tol
        freqs = self.lattice.frequencies[:, mask].T
        return freqs.astype(float), self.coefficients[mask]

    def _check_compatible(self, other: "SpectralField"):
        if other.lattice != self.lattice:
            raise ValueError(f"Поля заданы на разных решётках: {self.lattice.bandwidths} и {other.lattice.bandwidths}")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return self.with_coefficients(self.coefficients + other.coefficients)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return self.with_coefficients(self.coefficients - other.coefficients)

    def __mul__(self, scalar: complex) -> "SpectralField":
        return self.with_coefficients(self.coefficients * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return self.with_coefficients(-self.coefficients)

    def max_difference(self, other: "SpectralField") -> float:
        """max |c_n - c'_n|"""
        self._check_compatible(other)
        return float(np.abs(self.coefficients - other.coefficients).max(initial=0.0))


@dataclass(frozen=True, eq=False)
class GridField:
    """
    Значения функции на тензорной сетке N_i = 2B_i + 2 (points is None)
    или в облаке точек формы (M, d) для режима высокой размерности.
    """

    lattice: FrequencyLattice
    samples: np.ndarray
    points: Optional[np.ndarray] = None

    def __post_init__(self):
        samples = np.array(self.samples, copy=True)
        if self.points is None:
            if samples.shape != self.lattice.grid_shape:
                raise ValueError(
                    f"Форма значений {samples.shape} не совпадает с сеткой {self.lattice.grid_shape}"
                )
        else:
            points = np.array(self.points, dtype=float, copy=True)
            if points.ndim != 2 or points.shape[1] != self.lattice.d or points.shape[0] != samples.shape[0]:
                raise ValueError(f"Облако точек {points.shape} не согласовано со значениями {samples.shape}")
            object.__setattr__(self, "points", _frozen(points))
        object.__setattr__(self, "samples", _frozen(samples))

    @property
    def is_tensor(self) -> bool:
        return self.points is None

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.samples) or bool(np.abs(self.samples.imag).max(initial=0.0) <= 1e-12)
