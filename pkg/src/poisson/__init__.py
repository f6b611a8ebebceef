# src/poisson/__init__.py
from .solver import apply_generator, index_pairs, second_derivative, solve_poisson, tail_operator
from .regularity import (
    RegularityReport,
    lipschitz_regularity_report,
    regularity_family_check,
    sobolev_report,
    tail_convergence,
)
from .gradient_bounds import gradient_bound_check
