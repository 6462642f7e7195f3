"""
config.py
YAML configuration defaults for the splitkit command line.
"""
import logging
import os

import yaml

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = {
    "saturation": 1,
    "envelope_disjointness": "vertex",  # 'vertex' or 'lenient'
    "seed": 1729,
    "log_level": "WARNING",
    "json_indent": 2,
    "selfcheck_samples": 200,
    "selfcheck_max_length": 20,
}

DISJOINTNESS_MODES = ("vertex", "lenient")


def get_config_path() -> str:
    """
    Default location of the user config file, next to the installed package.

    Returns:
        str: Absolute path of ``splitkit_config.yaml``.
    """
    package_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    return os.path.join(package_dir, "splitkit_config.yaml")


def load_config(config_path: str) -> dict:
    """
    Load configuration from a YAML file.
    Returns default config if file is missing or invalid.

    Args:
        config_path: Path to the config file.

    Returns:
        dict: Configuration dictionary with default values merged.
    """
    if config_path and os.path.exists(config_path):
        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                config = yaml.safe_load(f) or {}
            if not isinstance(config, dict):
                logger.warning("Ignoring config %s: top level is not a mapping", config_path)
                return DEFAULT_CONFIG.copy()
            unknown = sorted(set(config) - set(DEFAULT_CONFIG))
            if unknown:
                logger.warning("Unknown config keys in %s: %s", config_path, ", ".join(unknown))
            return {**DEFAULT_CONFIG, **config}
        except (OSError, yaml.YAMLError) as exc:
            logger.warning("Could not read config %s: %s", config_path, exc)
    return DEFAULT_CONFIG.copy()


def update_config(config_path: str, **values) -> bool:
    """
    Update the config file with the provided non-None values.

    Args:
        config_path: Path to the config file.
        **values: Keys from DEFAULT_CONFIG and their new values.

    Returns:
        bool: True if the file was written.
    """
    config = {}
    if os.path.exists(config_path):
        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                config = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as exc:
            logger.warning("Overwriting unreadable config %s: %s", config_path, exc)
            config = {}

    changed = False
    for key, value in values.items():
        if value is None:
            continue
        if key not in DEFAULT_CONFIG:
            raise KeyError(f"unknown config key '{key}'")
        if config.get(key) != value:
            config[key] = value
            changed = True

    if changed:
        with open(config_path, 'w', encoding='utf-8') as f:
            yaml.safe_dump(config, f, sort_keys=True)
        logger.info("Config updated: %s", config_path)
    return changed
