# src/spectral/random_fields.py
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fields import SpectralField
from .lattice import FrequencyLattice
from .symbols import eigenvalues
from .weights import WeightModel

logger = logging.getLogger(__name__)

# Допустимые профили убывания коэффициентов
VALID_PROFILES = ["flat", "polynomial", "exponential", "spectral"]


@dataclass(frozen=True)
class DecayProfile:
    """
    Огибающая |c_n| <= E(n):
    flat - 1, polynomial(alpha) - (1+|n|)^-alpha, exponential(gamma) - e^{-gamma|n|},
    spectral(alpha) - (1+lambda(n))^-alpha (нужна весовая модель)
    """

    kind: str = "flat"
    rate: float = 0.0

    def __post_init__(self):
        if self.kind not in VALID_PROFILES:
            raise ValueError(
                f"Некорректный профиль убывания: {self.kind}. Допустимые значения: {', '.join(VALID_PROFILES)}"
            )
        if self.kind != "flat" and not self.rate > 0:
            raise ValueError(f"Параметр профиля {self.kind} должен быть > 0, получено: {self.rate}")

    @classmethod
    def parse(cls, text: str) -> "DecayProfile":
        """Разбор 'flat', 'polynomial:2', 'exponential:0.5', 'spectral:1.5'"""
        kind, _, rate = text.partition(':')
        return cls(kind.strip().lower(), float(rate) if rate else 0.0)

    @property
    def label(self) -> str:
        return self.kind if self.kind == "flat" else f"{self.kind}:{self.rate:g}"

    def envelope(self, lattice: FrequencyLattice, weights: Optional[WeightModel] = None) -> np.ndarray:
        norm = np.sqrt(np.sum(lattice.frequencies.astype(float) ** 2, axis=0))
        if self.kind == "flat":
            return np.ones(lattice.shape)
        if self.kind == "polynomial":
            return (1.0 + norm) ** (-self.rate)
        if self.kind == "exponential":
            return np.exp(-self.rate * norm)
        if weights is None:
            raise ValueError("Профиль spectral требует весовую модель")
        return (1.0 + eigenvalues(lattice.frequencies, weights)) ** (-self.rate)


def random_field(lattice: FrequencyLattice, seed: int, profile: DecayProfile = DecayProfile(),
                 mean_zero: bool = True, weights: Optional[WeightModel] = None) -> SpectralField:
    """
    Детерминированное случайное вещественное поле с заданной огибающей

    Args:
        lattice: Решётка частот
        seed: Зерно генератора
        profile: Профиль убывания
        mean_zero: Обнулить среднее c_0
        weights: Весовая модель (для профиля spectral)

    Returns:
        SpectralField: Эрмитово-симметричное поле с |c_n| <= E(n)
    """
    rng = np.random.default_rng(seed)
    envelope = profile.envelope(lattice, weights)
    radius = rng.random(lattice.shape)
    phase = rng.uniform(0.0, 2.0 * np.pi, lattice.shape)
    raw = envelope * radius * np.exp(1j * phase)
    coefficients = (raw + np.conj(np.flip(raw))) / 2.0
    # c_0 вещественен после симметризации с точностью до округления
    zero = lattice.zero_index
    coefficients[zero] = 0.0 if mean_zero else coefficients[zero].real
    return SpectralField(lattice, coefficients)
