# src/spectral/norms.py
import logging
import math
from typing import Optional, Sequence, Union

import numpy as np

from .fields import GridField, SpectralField
from .quadrature import NormEstimate, QuadratureRule, quadrature_for

logger = logging.getLogger(__name__)


def _check_p(p: float):
    if not p >= 1:
        raise ValueError(f"Показатель p должен быть >= 1, получено: {p}")


def _grid_norm(grid: GridField, p: float) -> NormEstimate:
    magnitudes = np.abs(grid.samples).ravel()
    if math.isinf(p):
        return NormEstimate(float(magnitudes.max(initial=0.0)))
    return NormEstimate(float(np.mean(magnitudes ** p) ** (1.0 / p)))


def lp_norm_estimate(field: Union[SpectralField, GridField], p: float,
                     rule: Optional[QuadratureRule] = None) -> NormEstimate:
    """
    Норма L^p по нормированной мере Хаара со стандартной ошибкой

    Args:
        field: Спектральное поле или значения на сетке
        p: Показатель, 1 <= p <= inf
        rule: Квадратура (по умолчанию quadrature_for(lattice))

    Returns:
        NormEstimate: Значение и стандартная ошибка
    """
    _check_p(p)
    if isinstance(field, GridField):
        if p != 2 and not field.is_real:
            raise ValueError("Норма L^p при p != 2 определена только для вещественных полей")
        return _grid_norm(field, p)

    if p == 2:
        return NormEstimate(field.l2_norm())
    if not field.is_real():
        raise ValueError("Норма L^p при p != 2 определена только для вещественных полей")
    if field.is_zero():
        return NormEstimate(0.0)
    rule = rule or quadrature_for(field.lattice)
    return rule.integrate(rule.evaluate(field), p)


def lp_norm(field: Union[SpectralField, GridField], p: float,
            rule: Optional[QuadratureRule] = None) -> float:
    """Норма L^p (значение без ошибки)"""
    return lp_norm_estimate(field, p, rule).value


def vector_norm_estimate(fields: Sequence[SpectralField], p: float,
                         rule: Optional[QuadratureRule] = None) -> NormEstimate:
    """
    Норма || (sum_i |g_i|^2)^{1/2} ||_p векторного поля

    Args:
        fields: Компоненты (на одной решётке)
        p: Показатель
        rule: Квадратура

    Returns:
        NormEstimate: Значение и стандартная ошибка
    """
    _check_p(p)
    if not fields:
        return NormEstimate(0.0)
    if p == 2:
        return NormEstimate(float(math.sqrt(sum(f.l2_norm() ** 2 for f in fields))))
    rule = rule or quadrature_for(fields[0].lattice)
    squared = None
    for component in fields:
        if component.is_zero():
            continue
        values = np.abs(rule.evaluate(component)) ** 2
        squared = values if squared is None else squared + values
    if squared is None:
        return NormEstimate(0.0)
    return rule.integrate(np.sqrt(squared), p)


def vector_lp_norm(fields: Sequence[SpectralField], p: float,
                   rule: Optional[QuadratureRule] = None) -> float:
    return vector_norm_estimate(fields, p, rule).value


def sample_norms(field: SpectralField, ps: Sequence[float],
                 rule: Optional[QuadratureRule] = None) -> dict:
    """Нормы для нескольких p по одному синтезу значений (p = 2 по Парсевалю)"""
    for p in ps:
        _check_p(p)
    result = {}
    rest = [p for p in ps if p != 2]
    if 2 in ps:
        result[2] = field.l2_norm()
    if rest:
        if field.is_zero():
            result.update({p: 0.0 for p in rest})
            return result
        if not field.is_real():
            raise ValueError("Норма L^p при p != 2 определена только для вещественных полей")
        rule = rule or quadrature_for(field.lattice)
        values = rule.evaluate(field)
        for p in rest:
            result[p] = rule.integrate(values, p).value
    return result
