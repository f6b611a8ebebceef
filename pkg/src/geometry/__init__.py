# src/geometry/__init__.py
from .points import TorusPoint
from .distance import distance_from_identity, intrinsic_distance
from .differences import difference_operator, pointwise_difference
from .gradient import direction_derivative, gradient_components, gradient_norm
from .sampler import TranslationSampler, axis_magnitudes, point_sample
from .bounds import poincare_check, verify_gaussian_bound
