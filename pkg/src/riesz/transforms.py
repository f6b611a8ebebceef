# src/riesz/transforms.py
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..spectral.fields import SpectralField
from ..spectral.norms import lp_norm_estimate, vector_norm_estimate
from ..spectral.quadrature import NormEstimate, QuadratureRule
from ..spectral.symbols import apply_multiplier, riesz_second_symbol, riesz_symbol
from ..spectral.weights import WeightModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RieszSymbol:
    """
    Символ R_i = X_i L^{-1/2} (order=1): i (tau_i . n) / sqrt(lambda(n)),
    или R_i R_j (order=2): -(tau_i . n)(tau_j . n) / lambda(n); 0 при n = 0
    """

    order: int
    indices: Tuple[int, ...]
    weights: WeightModel

    def __post_init__(self):
        if self.order not in (1, 2) or len(self.indices) != self.order:
            raise ValueError(f"Некорректный символ Рисса: порядок {self.order}, индексы {self.indices}")
        for i in self.indices:
            if not 1 <= i <= self.weights.dimension:
                raise IndexError(f"Индекс направления {i} вне диапазона 1..{self.weights.dimension}")

    @property
    def name(self) -> str:
        return "R" + "R".join(str(i) for i in self.indices)

    def __call__(self, n: np.ndarray) -> np.ndarray:
        if self.order == 1:
            return riesz_symbol(self.weights, self.indices[0])(n)
        return riesz_second_symbol(self.weights, *self.indices)(n)

    def apply(self, f: SpectralField) -> SpectralField:
        return apply_multiplier(f, self)

    def norm(self, f: SpectralField, p: float, rule: Optional[QuadratureRule] = None) -> NormEstimate:
        return lp_norm_estimate(self.apply(f), p, rule)


@dataclass(frozen=True)
class RieszVector:
    """Векторное преобразование (R_m f, ..., R_{n_hi} f); по умолчанию R^G = (R_1, ..., R_d)"""

    weights: WeightModel
    first: int = 1
    last: Optional[int] = None

    def __post_init__(self):
        last = self.weights.dimension if self.last is None else self.last
        if not 1 <= self.first <= last <= self.weights.dimension:
            raise ValueError(
                f"Некорректный диапазон хвоста: m={self.first}, n={last}, d={self.weights.dimension}"
            )

    @property
    def upper(self) -> int:
        return self.weights.dimension if self.last is None else self.last

    @property
    def name(self) -> str:
        if self.first == 1 and self.upper == self.weights.dimension:
            return "RG"
        return f"R[{self.first}..{self.upper}]"

    def components(self, f: SpectralField) -> List[SpectralField]:
        return [riesz_first(f, i, self.weights) for i in range(self.first, self.upper + 1)]

    def norm(self, f: SpectralField, p: float, rule: Optional[QuadratureRule] = None) -> NormEstimate:
        return vector_norm_estimate(self.components(f), p, rule)


def riesz_first(f: SpectralField, i: int, w: WeightModel) -> SpectralField:
    """
    Преобразование Рисса первого порядка R_i f

    Args:
        f: Поле (постоянная составляющая обнуляется символом)
        i: Направление, 1 <= i <= d
        w: Весовая модель

    Returns:
        SpectralField: R_i f без среднего
    """
    return RieszSymbol(1, (i,), w).apply(f)


def riesz_second(f: SpectralField, i: int, j: int, w: WeightModel) -> SpectralField:
    """R_i R_j f"""
    return RieszSymbol(2, (i, j), w).apply(f)


def riesz_vector_norm(f: SpectralField, p: float, w: WeightModel,
                      rule: Optional[QuadratureRule] = None) -> float:
    """|| (sum_i |R_i f|^2)^{1/2} ||_p"""
    return RieszVector(w).norm(f, p, rule).value


def riesz_tail(f: SpectralField, m: int, n_hi: int, p: float, w: WeightModel,
               rule: Optional[QuadratureRule] = None) -> float:
    """
    Норма хвоста || (sum_{i=m}^{n_hi} |R_i f|^2)^{1/2} ||_p

    Args:
        f: Поле
        m: Первый индекс хвоста
        n_hi: Последний индекс хвоста
        p: Показатель
        w: Весовая модель
        rule: Квадратура

    Returns:
        float: Норма хвоста
    """
    return RieszVector(w, m, n_hi).norm(f, p, rule).value
