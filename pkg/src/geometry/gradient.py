# src/geometry/gradient.py
import logging
from typing import List, Optional

from ..spectral.fields import SpectralField
from ..spectral.norms import vector_norm_estimate
from ..spectral.quadrature import NormEstimate, QuadratureRule
from ..spectral.symbols import apply_multiplier, direction_field_symbol
from ..spectral.weights import WeightModel

logger = logging.getLogger(__name__)


def direction_derivative(f: SpectralField, i: int, w: WeightModel) -> SpectralField:
    """X_i f"""
    return apply_multiplier(f, direction_field_symbol(w, i))


def gradient_components(f: SpectralField, w: WeightModel) -> List[SpectralField]:
    """(X_1 f, ..., X_d f); Gamma(f, f) = sum_i |X_i f|^2"""
    return [direction_derivative(f, i, w) for i in range(1, w.dimension + 1)]


def gradient_norm(f: SpectralField, w: WeightModel, p: float,
                  rule: Optional[QuadratureRule] = None) -> NormEstimate:
    """||Gamma(f, f)^{1/2}||_p"""
    return vector_norm_estimate(gradient_components(f, w), p, rule)
