"""
cli_common.py
Shared command-line interface utilities for splitkit.
"""
import argparse
import json
import sys
from typing import Any, Dict, Mapping, Optional, TextIO

from .config import DEFAULT_CONFIG, DISJOINTNESS_MODES
from .logging_common import LOG_LEVELS

SETTING_KEYS = ("saturation", "envelope_disjointness", "seed")


def create_common_parser() -> argparse.ArgumentParser:
    """
    Create the parent parser holding options shared by every sub-command.

    Returns:
        argparse.ArgumentParser: Parser without its own help, for ``parents=``.
    """
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--config', type=str, help='Path to a YAML config file')
    parser.add_argument('--saturation', type=int, help='Longest generator product used for blocks (>= 1)')
    parser.add_argument('--envelope-disjointness', type=str, choices=DISJOINTNESS_MODES,
                        help='Envelope disjointness: vertex or lenient')
    parser.add_argument('--seed', type=int, help='Seed for randomized commands')
    parser.add_argument('--format', type=str, choices=['json', 'dot'], default='json',
                        help='Output format (dot where supported)')
    parser.add_argument('--log-level', type=str, choices=LOG_LEVELS, help='Logging level')
    parser.add_argument('-v', '--verbose', action='store_true', help='Shorthand for --log-level DEBUG')
    return parser


def validate_args(args) -> bool:
    """
    Validate common command-line arguments.

    Args:
        args: Parsed arguments from argparse.

    Returns:
        bool: True if valid, False otherwise.
    """
    saturation = getattr(args, 'saturation', None)
    if saturation is not None and saturation < 1:
        print("Error: --saturation must be a positive integer.", file=sys.stderr)
        return False
    samples = getattr(args, 'samples', None)
    if samples is not None and samples < 0:
        print("Error: --samples must not be negative.", file=sys.stderr)
        return False
    return True


def resolve_settings(args, config: Mapping[str, Any], options: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    """
    Effective settings: CLI flag, then scenario options, then config file,
    then DEFAULT_CONFIG.
    """
    options = options or {}
    settings = {}
    for key in SETTING_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
        elif key in options:
            settings[key] = options[key]
        else:
            settings[key] = config.get(key, DEFAULT_CONFIG[key])
    return settings


def resolve_log_level(args, config: Mapping[str, Any]) -> str:
    if getattr(args, 'verbose', False):
        return "DEBUG"
    return getattr(args, 'log_level', None) or str(config.get("log_level", DEFAULT_CONFIG["log_level"])).upper()


def emit_json(data: Any, indent: Optional[int] = 2, stream: Optional[TextIO] = None) -> None:
    stream = stream if stream is not None else sys.stdout
    stream.write(json.dumps(data, indent=indent, sort_keys=False))
    stream.write("\n")


def emit_text(text: str, stream: Optional[TextIO] = None) -> None:
    stream = stream if stream is not None else sys.stdout
    stream.write(text)
