# src/semigroup/theta.py
"""
Одномерный тепловой множитель theta(x, s) = sum_k e^{-s k^2} e^{ikx} и
плотность ядра mu_t на T^d. При s >= pi используется спектральный ряд,
при s < pi - ряд по образам sqrt(pi/s) sum_m e^{-(x - 2 pi m)^2 / (4s)}.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from ..spectral.symbols import eigenvalues
from ..spectral.weights import WeightModel

logger = logging.getLogger(__name__)

# Точка переключения представлений
THETA_CROSSOVER = math.pi
# При s >= pi хвосты обоих рядов после 6 слагаемых < 1e-14
SPECTRAL_TERMS = 6
IMAGE_TERMS = 6
# Допуск хвоста прямой решёточной суммы в матричном случае
MATRIX_TAIL_TOLERANCE = 1e-10
DEFAULT_MATRIX_BANDWIDTH = 24
# Критерий остановки произведения по i: 2 e^{-a_i t} < 1e-12 (sum + 1)
PRODUCT_TOLERANCE = 1e-12
PRODUCT_CHUNK = 1 << 14
MAX_PRODUCT_TERMS = 50_000_000


def _reduce_angle(x: np.ndarray) -> np.ndarray:
    """|x| после приведения к [-pi, pi]; theta чётна по x"""
    return np.abs(x - 2.0 * np.pi * np.round(x / (2.0 * np.pi)))


def _log_theta_spectral(x: np.ndarray, s: np.ndarray) -> np.ndarray:
    k = np.arange(1, SPECTRAL_TERMS + 1, dtype=float)
    # s k^2 = inf при огромных s даёт e^{-inf} = 0
    with np.errstate(over="ignore"):
        terms = np.exp(-s[..., None] * k * k) * np.cos(k * x[..., None])
    return np.log1p(2.0 * terms.sum(axis=-1))


def _log_theta_images(x: np.ndarray, s: np.ndarray) -> np.ndarray:
    m = np.arange(-IMAGE_TERMS, IMAGE_TERMS + 1, dtype=float)
    exponents = -((x[..., None] - 2.0 * np.pi * m) ** 2) / (4.0 * s[..., None])
    return 0.5 * np.log(np.pi / s) + logsumexp(exponents, axis=-1)


def log_theta1d(x, s, representation: Optional[str] = None):
    """
    log theta(x, s), векторизовано по x и s

    Args:
        x: Угол(ы)
        s: Параметр(ы) s > 0
        representation: 'spectral' или 'images' для принудительного выбора ряда

    Returns:
        float или np.ndarray: log theta
    """
    x_arr, s_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(s, dtype=float))
    if np.any(~(s_arr > 0)):
        raise ValueError(f"Параметр s должен быть > 0, получено: min s = {np.min(s_arr)}")
    x_arr = _reduce_angle(x_arr)
    if representation == "spectral":
        out = _log_theta_spectral(x_arr, s_arr)
    elif representation == "images":
        out = _log_theta_images(x_arr, s_arr)
    elif representation is None:
        out = np.empty(x_arr.shape, dtype=float)
        large = s_arr >= THETA_CROSSOVER
        if np.any(large):
            out[large] = _log_theta_spectral(x_arr[large], s_arr[large])
        if np.any(~large):
            out[~large] = _log_theta_images(x_arr[~large], s_arr[~large])
    else:
        raise ValueError(f"Неизвестное представление theta: {representation}")
    return float(out) if out.ndim == 0 else out


def theta1d(x, s, representation: Optional[str] = None):
    """theta(x, s) = sum_k e^{-s k^2} e^{ikx} > 0"""
    return np.exp(log_theta1d(x, s, representation))


def log_kernel_density(x: Sequence[float], t: float, w: WeightModel,
                       bandwidth: int = DEFAULT_MATRIX_BANDWIDTH) -> float:
    """
    log mu_t(x) на T^d (d = w.dimension)

    Args:
        x: Точка тора
        t: Время, t > 0
        w: Весовая модель
        bandwidth: Полоса прямой суммы для матричной модели

    Returns:
        float: log mu_t(x)
    """
    if t <= 0:
        raise ValueError(f"Время должно быть > 0, получено: {t}")
    x = np.asarray(x, dtype=float)
    if x.shape != (w.dimension,):
        raise ValueError(f"Размерность точки {x.shape} не совпадает с моделью {w.dimension}")
    if w.is_diagonal:
        return float(np.sum(log_theta1d(x, w.weights * t)))
    return math.log(matrix_kernel_sum(x, t, w, bandwidth))


def kernel_density(x: Sequence[float], t: float, w: WeightModel,
                   bandwidth: int = DEFAULT_MATRIX_BANDWIDTH) -> float:
    """
    Плотность mu_t(x): произведение theta(x_i, a_i t) или прямая сумма
    sum_n e^{-t n^t A n} e^{i n.x} для матричной модели
    """
    return math.exp(log_kernel_density(x, t, w, bandwidth))


def matrix_kernel_sum(x: np.ndarray, t: float, w: WeightModel, bandwidth: int) -> float:
    """Прямая решёточная сумма sum_n e^{-t n^t A n} cos(n.x) с контролем хвоста"""
    d = w.dimension
    axes = [np.arange(-bandwidth, bandwidth + 1)] * d
    n = np.stack(np.meshgrid(*axes, indexing="ij")).reshape(d, -1).astype(float)
    weights = np.exp(-t * eigenvalues(n, w))
    shell = np.abs(n).max(axis=0) == bandwidth
    tail = float(weights[shell].sum())
    if tail > MATRIX_TAIL_TOLERANCE:
        raise ValueError(
            f"Хвост решёточной суммы {tail:.3e} > {MATRIX_TAIL_TOLERANCE:g} при t={t}: "
            f"увеличьте полосу (сейчас {bandwidth})"
        )
    # симметрия n -> -n делает сумму вещественной
    return float(np.sum(weights * np.cos(x @ n)))


@dataclass(frozen=True)
class IdentityKernel:
    """log mu_t(e) и число множителей, понадобившихся для сходимости произведения"""

    log_mu: float
    effective_dimension: int
    tail_significant: bool = False


def kernel_at_identity(t: float, w: WeightModel, max_terms: int = MAX_PRODUCT_TERMS) -> IdentityKernel:
    """
    log mu_t(e) = sum_i log theta(0, a_i t) с адаптивным верхним индексом
    (не ограничен размерностью w.dimension для power/geometric)

    Args:
        t: Время, t > 0
        w: Диагональная весовая модель
        max_terms: Предел числа множителей

    Returns:
        IdentityKernel: Значение, эффективная размерность и признак значимого хвоста
    """
    if t <= 0:
        raise ValueError(f"Время должно быть > 0, получено: {t}")
    if not w.is_diagonal:
        raise ValueError("kernel_at_identity определена только для диагональных весов")

    total = 0.0
    if w.kind == "explicit":
        a = np.asarray(w.values)
        logs = log_theta1d(np.zeros_like(a), a * t)
        for i, value in enumerate(np.atleast_1d(logs)):
            total += float(value)
            if 2.0 * math.exp(-a[i] * t) < PRODUCT_TOLERANCE * (total + 1.0):
                return IdentityKernel(total, i + 1, False)
        logger.debug(f"Хвост явного списка весов значим при t={t:.3e}")
        return IdentityKernel(total, len(a), True)

    start = 1
    while start <= max_terms:
        stop = min(start + PRODUCT_CHUNK, max_terms + 1)
        a = w.weights_range(start, stop)
        logs = log_theta1d(np.zeros_like(a), a * t)
        with np.errstate(under="ignore"):
            tails = 2.0 * np.exp(-a * t)
        # cumsum накапливает последовательно, порядок суммирования фиксирован
        running = total + np.cumsum(logs)
        done = np.flatnonzero(tails < PRODUCT_TOLERANCE * (running + 1.0))
        if done.size:
            return IdentityKernel(float(running[done[0]]), start + int(done[0]), False)
        total = float(running[-1])
        start = stop
    logger.warning(f"Произведение не сошлось за {max_terms} множителей при t={t:.3e}")
    return IdentityKernel(total, max_terms, True)


def log_mu_identity(t: float, w: WeightModel) -> float:
    """M_0(t) = log mu_t(e)"""
    return kernel_at_identity(t, w).log_mu
