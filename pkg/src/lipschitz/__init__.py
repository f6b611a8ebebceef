# src/lipschitz/__init__.py
from .seminorms import (
    SeminormReport,
    canonical_difference_order,
    canonical_lambda_order,
    difference_ratios,
    dist_seminorm,
    lambda_seminorm,
    lambda_seminorm_fractional,
)
from .comparisons import (
    check_fractional_equivalence,
    check_herz,
    check_order_raising,
    check_riesz_lipschitz,
    compare_scales_backward,
    compare_scales_forward,
    comparison_family,
    lacunary_field,
    seminorm_sweep,
    seminorm_table,
)
