# src/utils/numeric.py
import math

import numpy as np


def p_star(p: float) -> float:
    """
    Сопряжённый показатель p* = max{p, p/(p-1)}

    Args:
        p: Показатель интегрируемости, 1 <= p <= inf

    Returns:
        float: p* (inf для p = 1 и p = inf)
    """
    if p < 1:
        raise ValueError(f"Показатель p должен быть >= 1, получено: {p}")
    if p == 1 or math.isinf(p):
        return math.inf
    return max(p, p / (p - 1.0))


def riesz_constant(p: float) -> float:
    """Константа 2(p*-1) из оценок преобразований Рисса"""
    return 2.0 * (p_star(p) - 1.0)


def log_grid(lower: float, upper: float, points: int) -> np.ndarray:
    """
    Логарифмическая сетка [lower, upper] из points точек

    Args:
        lower: Нижняя граница (> 0)
        upper: Верхняя граница (> lower)
        points: Число точек (>= 2)

    Returns:
        np.ndarray: Возрастающая сетка
    """
    if lower <= 0 or upper <= lower:
        raise ValueError(f"Некорректные границы сетки: [{lower}, {upper}]")
    if points < 2:
        raise ValueError(f"Сетка должна содержать хотя бы 2 точки, получено: {points}")
    return np.logspace(math.log10(lower), math.log10(upper), points)


def relative_change(new: float, old: float) -> float:
    """Относительное изменение |new - old| / max(|new|, |old|), 0 для двух нулей"""
    scale = max(abs(new), abs(old))
    if scale == 0.0:
        return 0.0
    return abs(new - old) / scale
