# src/semigroup/__init__.py
from .heat import fractional_heat, fractional_power, heat_apply, heat_time_derivative, poisson_apply
from .theta import (
    IdentityKernel,
    kernel_at_identity,
    kernel_density,
    log_kernel_density,
    log_theta1d,
    matrix_kernel_sum,
    theta1d,
)
from .diagnostics import CKClassification, KernelDiagnostics, classify_CK, kernel_diagnostics
from .checks import (
    check_analyticity,
    check_contraction,
    check_fractional_bound,
    check_kernel_value,
    check_L1_Linf_differentiability,
    check_ultracontractivity,
    finite_difference_order,
    m0,
)
