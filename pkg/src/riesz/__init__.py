# src/riesz/__init__.py
from .transforms import RieszSymbol, RieszVector, riesz_first, riesz_second, riesz_tail, riesz_vector_norm
from .bounds import estimate_operator_ratio
