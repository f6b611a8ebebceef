# src/spectral/weights.py
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

logger = logging.getLogger(__name__)

# Допустимые типы весовых моделей
VALID_KINDS = ["power", "geometric", "explicit", "matrix"]


@dataclass(frozen=True)
class WeightModel:
    """
    Коэффициенты лапласиана L = -sum a_i d_i^2 (диагональный случай)
    или L = -sum_{ij} A_ij d_i d_j с SPD-матрицей A = T^t T.

    Направление tau_i поля X_i - строка i верхнетреугольного множителя T,
    в диагональном случае tau_i = sqrt(a_i) e_i.
    """

    kind: str
    dimension: int
    parameter: float = 0.0
    values: Tuple[float, ...] = ()
    matrix: Tuple[Tuple[float, ...], ...] = ()

    def __post_init__(self):
        if self.kind not in VALID_KINDS:
            raise ValueError(
                f"Некорректный тип весов: {self.kind}. Допустимые значения: {', '.join(VALID_KINDS)}"
            )
        if self.dimension < 1:
            raise ValueError(f"Размерность тора должна быть >= 1, получено: {self.dimension}")

        if self.kind in ("power", "geometric") and not self.parameter > 0:
            raise ValueError(f"Параметр модели {self.kind} должен быть > 0, получено: {self.parameter}")

        if self.kind == "explicit":
            if len(self.values) < self.dimension:
                raise ValueError(
                    f"Явный список весов короче размерности: {len(self.values)} < {self.dimension}"
                )
            if any(not (v > 0 and math.isfinite(v)) for v in self.values):
                raise ValueError(f"Все веса должны быть положительны: {self.values}")

        if self.kind == "matrix":
            A = np.asarray(self.matrix, dtype=float)
            if A.shape != (self.dimension, self.dimension):
                raise ValueError(f"Матрица должна иметь размер {self.dimension}x{self.dimension}, получено: {A.shape}")
            if not np.allclose(A, A.T, rtol=0.0, atol=1e-12 * np.abs(A).max()):
                raise ValueError("Матрица A должна быть симметричной")
            eigenvalues = np.linalg.eigvalsh(A)
            if eigenvalues.min() <= 0:
                raise ValueError(f"Матрица A не положительно определена: min собственное значение {eigenvalues.min():.3e}")

    # --- конструкторы ---

    @classmethod
    def power(cls, lam: float, dimension: int) -> "WeightModel":
        """Степенные веса a_i = i^(1/lam)"""
        return cls(kind="power", dimension=dimension, parameter=float(lam))

    @classmethod
    def geometric(cls, sigma: float, dimension: int) -> "WeightModel":
        """Сверхстепенные веса a_i = 2^(i^sigma)"""
        return cls(kind="geometric", dimension=dimension, parameter=float(sigma))

    @classmethod
    def explicit(cls, values: Sequence[float], dimension: Optional[int] = None) -> "WeightModel":
        """Явный список весов; по умолчанию размерность равна длине списка"""
        values = tuple(float(v) for v in values)
        return cls(kind="explicit", dimension=dimension or len(values), values=values)

    @classmethod
    def from_matrix(cls, matrix) -> "WeightModel":
        """Конечная SPD-матрица A"""
        A = np.asarray(matrix, dtype=float)
        if A.ndim != 2:
            raise ValueError(f"Ожидалась квадратная матрица, получено измерений: {A.ndim}")
        rows = tuple(tuple(float(v) for v in row) for row in A)
        return cls(kind="matrix", dimension=A.shape[0], matrix=rows)

    @classmethod
    def from_spec(cls, spec: str, dimension: Optional[int] = None) -> "WeightModel":
        """
        Разбор строкового описания весов

        Args:
            spec: 'power:<lam>', 'geometric:<sigma>', 'explicit:<a1>,<a2>,...'
                или 'matrix:<row>;<row>' (элементы строки через запятую)
            dimension: Размерность тора (для matrix определяется матрицей)

        Returns:
            WeightModel: Весовая модель
        """
        kind, _, body = spec.partition(':')
        kind = kind.strip().lower()
        body = body.strip()
        if not body:
            raise ValueError(f"Пустые параметры в описании весов: '{spec}'")
        try:
            if kind == "power":
                return cls.power(float(body), dimension or 1)
            if kind == "geometric":
                return cls.geometric(float(body), dimension or 1)
            if kind == "explicit":
                return cls.explicit([float(v) for v in body.split(',')], dimension)
            if kind == "matrix":
                rows = [[float(v) for v in row.split(',')] for row in body.split(';')]
                model = cls.from_matrix(rows)
                if dimension is not None and dimension != model.dimension:
                    raise ValueError(f"Размерность {dimension} не совпадает с размером матрицы {model.dimension}")
                return model
        except ValueError as e:
            raise ValueError(f"Некорректное описание весов '{spec}': {e}") from e
        raise ValueError(f"Некорректный тип весов: {kind}. Допустимые значения: {', '.join(VALID_KINDS)}")

    # --- свойства ---

    @property
    def is_diagonal(self) -> bool:
        return self.kind != "matrix"

    @property
    def has_generator(self) -> bool:
        """Задано ли правило a_i для произвольного i (power/geometric)"""
        return self.kind in ("power", "geometric")

    @property
    def spec(self) -> str:
        """Строковое описание, обратное from_spec"""
        if self.kind in ("power", "geometric"):
            return f"{self.kind}:{self.parameter:g}"
        if self.kind == "explicit":
            return "explicit:" + ",".join(f"{v:g}" for v in self.values)
        return "matrix:" + ";".join(",".join(f"{v:g}" for v in row) for row in self.matrix)

    def weight(self, i: int) -> float:
        """
        Вес a_i для индекса i >= 1 (не ограничен размерностью для power/geometric)

        Args:
            i: Индекс направления, начиная с 1

        Returns:
            float: a_i (может быть inf при переполнении для geometric)
        """
        if i < 1:
            raise IndexError(f"Индекс направления должен быть >= 1, получено: {i}")
        if self.kind == "power":
            return float(i) ** (1.0 / self.parameter)
        if self.kind == "geometric":
            exponent = float(i) ** self.parameter
            return math.inf if exponent > 1023 else 2.0 ** exponent
        if self.kind == "explicit":
            if i > len(self.values):
                raise IndexError(f"Индекс {i} за пределами явного списка весов длины {len(self.values)}")
            return self.values[i - 1]
        if i > self.dimension:
            raise IndexError(f"Индекс {i} за пределами размерности {self.dimension}")
        return self.matrix[i - 1][i - 1]

    def weights_range(self, start: int, stop: int) -> np.ndarray:
        """Векторизованные веса a_i для i = start..stop-1"""
        idx = np.arange(start, stop, dtype=float)
        if self.kind == "power":
            return idx ** (1.0 / self.parameter)
        if self.kind == "geometric":
            with np.errstate(over="ignore"):
                return np.exp2(idx ** self.parameter)
        return np.array([self.weight(int(i)) for i in idx])

    @cached_property
    def weights(self) -> np.ndarray:
        """Диагональ (a_1, ..., a_d) на усечённом торе"""
        if self.kind == "matrix":
            values = np.diag(self.gram).copy()
        else:
            values = self.weights_range(1, self.dimension + 1)
        values.setflags(write=False)
        return values

    @cached_property
    def gram(self) -> np.ndarray:
        """Матрица A (для диагональных моделей diag(a))"""
        if self.kind == "matrix":
            A = np.asarray(self.matrix, dtype=float)
        else:
            A = np.diag(self.weights)
        A.setflags(write=False)
        return A

    @cached_property
    def factor(self) -> np.ndarray:
        """Верхнетреугольный T с T^t T = A; строка i - направление tau_i"""
        if self.kind == "matrix":
            T = linalg.cholesky(self.gram, lower=False)
        else:
            T = np.diag(np.sqrt(self.weights))
        T.setflags(write=False)
        return T

    @cached_property
    def gram_inverse(self) -> np.ndarray:
        A_inv = linalg.inv(self.gram) if self.kind == "matrix" else np.diag(1.0 / self.weights)
        A_inv.setflags(write=False)
        return A_inv

    def default_bandwidths(self, first: int) -> Tuple[int, ...]:
        """
        Полосы по умолчанию B_i = max(2, ceil(B_1 * sqrt(a_1 / a_i)))

        Args:
            first: Полоса по первой оси B_1

        Returns:
            Tuple[int, ...]: Полосы по всем осям
        """
        a = self.weights
        bands = [int(first)]
        for i in range(1, self.dimension):
            bands.append(max(2, int(math.ceil(first * math.sqrt(a[0] / a[i]) - 1e-12))))
        return tuple(bands)
