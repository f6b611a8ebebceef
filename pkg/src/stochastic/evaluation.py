# src/stochastic/evaluation.py
"""
Спектральное вычисление гармонических продолжений вдоль путей.

Q f(y, x) = sum_n c_n e^{i n.x} e^{-y sqrt(lambda(n))} вычисляется только по носителю
поля, блоками по путям, чтобы объём промежуточных массивов не превышал MAX_EVALUATION_ENTRIES.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..spectral.fields import SpectralField
from ..spectral.symbols import direction_projections, eigenvalues
from ..spectral.weights import WeightModel

logger = logging.getLogger(__name__)

MAX_EVALUATION_ENTRIES = 4_000_000
# Порог, ниже которого ядро вычисляется через expm1
SERIES_THRESHOLD = 1e-3

# kernel(y, kappa, c) -> массив формы (P, K) при y (P, 1), kappa и c (K,)
PairKernel = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def _rows_per_chunk(width: int) -> int:
    return max(1, MAX_EVALUATION_ENTRIES // max(width, 1))


def _real_series(weights: np.ndarray, freqs: np.ndarray, decay: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Re sum_k weights_k e^{i freqs_k . x} decay_k для одного блока путей"""
    phase = x @ freqs.T
    return (decay * (weights.real * np.cos(phase) - weights.imag * np.sin(phase))).sum(axis=1)


def poisson_kernel(y: np.ndarray, kappa: np.ndarray, c: np.ndarray) -> np.ndarray:
    """e^{-y sqrt(kappa)}"""
    return np.exp(-y * np.sqrt(kappa))


def killed_resolvent(y: np.ndarray, kappa: np.ndarray, c: np.ndarray) -> np.ndarray:
    """
    Решение kappa u - u'' = e^{-c y}, u(0) = 0:
    u(y) = (e^{-sqrt(kappa) y} - e^{-c y}) / (c^2 - kappa), c >= sqrt(kappa)

    При малом (c - sqrt(kappa)) y используется эквивалентная запись
    e^{-c y} y expm1(z) / z / (c + sqrt(kappa)), z = (c - sqrt(kappa)) y.
    """
    root = np.sqrt(kappa)
    gap = np.maximum(c - root, 0.0)
    total = c + root
    z = gap * y
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        direct = (np.exp(-root * y) - np.exp(-c * y)) / (gap * total)
        safe_z = np.where(z > SERIES_THRESHOLD, 1.0, z)
        phi = np.where(safe_z == 0.0, 1.0, np.expm1(safe_z) / np.where(safe_z == 0.0, 1.0, safe_z))
        series = np.exp(-c * y) * y * phi / total
        values = np.where(z > SERIES_THRESHOLD, direct, series)
    return np.where(total > 0.0, values, 0.0)


@dataclass(frozen=True)
class SupportSpectrum:
    """Носитель поля: частоты (k, d), коэффициенты (k,) и sqrt(lambda(n))"""

    freqs: np.ndarray
    coefs: np.ndarray
    lam: np.ndarray

    @classmethod
    def of(cls, f: SpectralField, w: WeightModel) -> "SupportSpectrum":
        freqs, coefs = f.support()
        lam = eigenvalues(freqs.T, w) if freqs.shape[0] else np.zeros(0)
        return cls(freqs, coefs, np.asarray(lam, dtype=float))

    @property
    def size(self) -> int:
        return int(self.coefs.shape[0])

    @property
    def sqrt_lam(self) -> np.ndarray:
        return np.sqrt(self.lam)

    def direction(self, i: int, w: WeightModel) -> np.ndarray:
        """Символ X_i на носителе: i (tau_i . n)"""
        if self.size == 0:
            return np.zeros(0, dtype=complex)
        return 1j * direction_projections(i, self.freqs.T, w)

    def values(self, y: np.ndarray, x: np.ndarray, multiplier: Optional[np.ndarray] = None) -> np.ndarray:
        """
        Re sum_n m_n c_n e^{i n.x} e^{-y sqrt(lambda(n))} в точках путей

        Args:
            y: Высоты формы (P,)
            x: Точки тора формы (P, d)
            multiplier: Символ m_n на носителе (по умолчанию 1)

        Returns:
            np.ndarray: Значения формы (P,)
        """
        y = np.asarray(y, dtype=float)
        out = np.zeros(y.shape[0])
        if self.size == 0:
            return out
        weights = self.coefs if multiplier is None else self.coefs * multiplier
        rows = _rows_per_chunk(self.size)
        root = self.sqrt_lam
        for start in range(0, y.shape[0], rows):
            block = slice(start, start + rows)
            decay = np.exp(-np.outer(y[block], root))
            out[block] = _real_series(weights, self.freqs, decay, x[block])
        return out

    def at_times(self, times: np.ndarray, point: np.ndarray, extra_height: Optional[np.ndarray] = None) -> np.ndarray:
        """
        Re sum_n c_n e^{i n.x0} e^{-tau lambda(n)} e^{-h sqrt(lambda(n))}: H_tau f(x0)
        с необязательным множителем Пуассона для усечённых путей
        """
        times = np.asarray(times, dtype=float)
        out = np.zeros(times.shape[0])
        if self.size == 0:
            return out
        phase = self.freqs @ np.asarray(point, dtype=float)
        weights = self.coefs * np.exp(1j * phase)
        rows = _rows_per_chunk(self.size)
        root = self.sqrt_lam
        for start in range(0, times.shape[0], rows):
            block = slice(start, start + rows)
            exponent = np.outer(times[block], self.lam)
            if extra_height is not None:
                exponent = exponent + np.outer(extra_height[block], root)
            out[block] = (np.exp(-exponent) @ weights).real
        return out

    def pair(self, other: "SupportSpectrum", left: np.ndarray, right: np.ndarray,
             w: WeightModel) -> "PairSpectrum":
        """
        Произведение двух продолжений sum_{n,m} l_n a_n r_m b_m e^{i(n+m).x} как спектр пар

        Args:
            other: Второй носитель
            left: Символ на первом носителе
            right: Символ на втором носителе
            w: Весовая модель (для lambda(n+m))

        Returns:
            PairSpectrum: Частоты n+m, веса, lambda(n+m) и c = sqrt(lambda(n)) + sqrt(lambda(m))
        """
        d = self.freqs.shape[1] if self.size else other.freqs.shape[1] if other.size else w.dimension
        if self.size == 0 or other.size == 0:
            return PairSpectrum(np.zeros((0, d)), np.zeros(0, dtype=complex), np.zeros(0), np.zeros(0))
        freqs = (self.freqs[:, None, :] + other.freqs[None, :, :]).reshape(-1, d)
        weights = np.outer(left * self.coefs, right * other.coefs).ravel()
        rate = np.add.outer(self.sqrt_lam, other.sqrt_lam).ravel()
        kappa = np.asarray(eigenvalues(freqs.T, w), dtype=float)
        keep = weights != 0
        return PairSpectrum(freqs[keep], weights[keep], kappa[keep], rate[keep])


@dataclass(frozen=True)
class PairSpectrum:
    """Спектр произведения двух продолжений: слагаемые w_k e^{i n_k.x} kernel(y, kappa_k, c_k)"""

    freqs: np.ndarray
    weights: np.ndarray
    kappa: np.ndarray
    rate: np.ndarray

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    def values(self, y: np.ndarray, x: np.ndarray, kernel: PairKernel) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        out = np.zeros(y.shape[0])
        if self.size == 0:
            return out
        rows = _rows_per_chunk(self.size)
        for start in range(0, y.shape[0], rows):
            block = slice(start, start + rows)
            decay = kernel(y[block, None], self.kappa[None, :], self.rate[None, :])
            out[block] = _real_series(self.weights, self.freqs, decay, x[block])
        return out

    def mean_over_torus(self, y: float, kernel: PairKernel) -> float:
        """Среднее по равномерной точке тора: остаются только пары с n + m = 0"""
        if self.size == 0:
            return 0.0
        zero = np.all(self.freqs == 0, axis=1)
        if not zero.any():
            return 0.0
        decay = kernel(np.array([[float(y)]]), self.kappa[None, zero], self.rate[None, zero])[0]
        return float((self.weights[zero] * decay).sum().real)
