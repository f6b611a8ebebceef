# src/utils/__init__.py
from .logger import setup_logger, add_logging_args
from .numeric import p_star, riesz_constant, log_grid
from .report import ExperimentReport
