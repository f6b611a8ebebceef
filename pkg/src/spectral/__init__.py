# src/spectral/__init__.py
from .weights import WeightModel
from .lattice import FrequencyLattice
from .fields import SpectralField, GridField
from .transforms import transform_forward, transform_inverse
from .symbols import apply_multiplier, direction_symbol, eigenvalue, eigenvalues
from .quadrature import NormEstimate, RankOneLatticeRule, TensorGridRule, quadrature_for
from .norms import lp_norm, lp_norm_estimate, vector_lp_norm, vector_norm_estimate
from .random_fields import DecayProfile, random_field
from .dictionary import Trial, trial_dictionary
from .io import field_from_frame, field_to_frame, read_field_csv, write_field_csv
