from .config import (
    PARAM_DEFAULTS,
    REQUIRED_FIELDS,
    SCHEMA_VERSION,
    VALID_KINDS,
    ConfigError,
    build_field,
    config_hash,
    load_config,
    resolve_config,
    validate_config,
)
from .reports import write_outputs
from .runner import EXIT_CONFIG_ERROR, EXIT_FAILED, EXIT_OK, RUNNERS, RunResult, build_reports, run_config
from .suite import SUITES, run_suite, spectral_exactness_check
