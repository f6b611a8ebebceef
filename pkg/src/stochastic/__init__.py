from .paths import (
    DEFAULT_COMPLETION_LEVEL,
    PathBatch,
    PathConfig,
    PathWalker,
    StepView,
    block_generators,
    simulate_heights,
    simulate_paths,
)
from .evaluation import PairSpectrum, SupportSpectrum, killed_resolvent, poisson_kernel
from .checks import (
    PairingCase,
    PairingEstimate,
    coordinate_variance_check,
    exit_time_check,
    hitting_law_check,
    mc_riesz_pairing,
    mc_second_order_pairing,
    pairing_panel,
    quadratic_variation_check,
    stderr_scaling_check,
    subordination_check,
    terminal_uniformity_check,
    wrapped_marginal_probabilities,
)
