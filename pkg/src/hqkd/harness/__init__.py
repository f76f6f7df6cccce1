from .config import SessionConfig, derive_seed, load_config, parse_config
from .experiments import eve_study, rng_sweep, run_session
from .report import REPORT_SCHEMA, SessionReport

__all__ = [
    "REPORT_SCHEMA",
    "SessionConfig",
    "SessionReport",
    "derive_seed",
    "eve_study",
    "load_config",
    "parse_config",
    "rng_sweep",
    "run_session",
]
