# src/geometry/points.py
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class TorusPoint:
    """Точка T^d; координаты приводятся к [0, 2 pi) при создании"""

    coordinates: Tuple[float, ...]

    def __post_init__(self):
        reduced = tuple(float(c) for c in np.mod(np.asarray(self.coordinates, dtype=float), TWO_PI))
        object.__setattr__(self, "coordinates", reduced)

    @classmethod
    def identity(cls, d: int) -> "TorusPoint":
        return cls((0.0,) * d)

    @classmethod
    def of(cls, values: Sequence[float]) -> "TorusPoint":
        return cls(tuple(values))

    @property
    def d(self) -> int:
        return len(self.coordinates)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coordinates)

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(tuple(self.as_array() + other.as_array()))

    def __sub__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(tuple(self.as_array() - other.as_array()))


def centered(delta: np.ndarray) -> np.ndarray:
    """Приведение разностей координат к [-pi, pi)"""
    return np.mod(np.asarray(delta, dtype=float) + np.pi, TWO_PI) - np.pi
