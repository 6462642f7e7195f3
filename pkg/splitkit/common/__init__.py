"""
splitkit common library
Errors, configuration, logging and command-line helpers.
"""

from .config import DEFAULT_CONFIG, DISJOINTNESS_MODES, get_config_path, load_config, update_config
from .errors import (
    AutomorphismError,
    GraphOfGroupsError,
    HypothesisError,
    NormalizationError,
    ScenarioError,
    SplitkitError,
    UnsupportedError,
    WordError,
)
from .logging_common import LOG_LEVELS, get_level_colors, setup_logging
from .cli_common import create_common_parser, emit_json, resolve_log_level, resolve_settings, validate_args

__all__ = [
    'DEFAULT_CONFIG',
    'DISJOINTNESS_MODES',
    'get_config_path',
    'load_config',
    'update_config',
    'SplitkitError',
    'WordError',
    'AutomorphismError',
    'GraphOfGroupsError',
    'NormalizationError',
    'HypothesisError',
    'UnsupportedError',
    'ScenarioError',
    'LOG_LEVELS',
    'get_level_colors',
    'setup_logging',
    'create_common_parser',
    'validate_args',
    'resolve_settings',
    'resolve_log_level',
    'emit_json',
]
