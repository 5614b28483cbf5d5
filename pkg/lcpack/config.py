# coding=utf-8
import logging
import os
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Optional, Union

import yaml

__all__ = [
    "get_config",
    "get_config_path",
    "log",
    "parse_fraction",
    "reset_config_cache",
]

_logger = logging.getLogger("lcpack")

RationalLike = Union[Fraction, int, str, float]


def log(message: str, level: str = "info") -> None:
    """Send a message to the package logger at the given level name."""
    _logger.log(getattr(logging, level.upper(), logging.INFO), message)


def _packaged_config_path() -> str:
    return os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "sources", "config.yml")


def get_config_path() -> Optional[str]:
    """Path of the local override file, if LCPACK_CONFIG names a readable file."""
    local_yaml = os.environ.get("LCPACK_CONFIG")
    if local_yaml and os.path.isfile(local_yaml):
        return local_yaml
    return None


@lru_cache(maxsize=4)
def _load(local_path: Optional[str]) -> Dict[str, Any]:
    with open(_packaged_config_path(), "r", encoding="utf-8") as stream:
        settings = yaml.safe_load(stream) or {}
    if local_path:
        try:
            with open(local_path, "r", encoding="utf-8") as stream:
                local = yaml.safe_load(stream) or {}
        except (OSError, yaml.YAMLError) as ex:
            log(f"Ignoring unreadable config override {local_path}: {ex}", "warning")
            local = {}
        if isinstance(local, dict):
            settings.update(local)
        else:
            log(f"Ignoring config override {local_path}: not a mapping", "warning")
    return settings


def reset_config_cache() -> None:
    _load.cache_clear()


def get_config(key: str, default: Any = None) -> Any:
    """
    Look up a configuration value.

    The packaged `data/sources/config.yml` supplies defaults; a YAML file named by
    the LCPACK_CONFIG environment variable overrides individual keys.

    Args:
        key: the configuration key
        default: returned when neither file defines the key

    Returns:
        The configured value, or `default`.
    """
    return _load(get_config_path()).get(key, default)


def parse_fraction(value: RationalLike) -> Fraction:
    """
    Normalize a rational parameter such as ε.

    Accepts a Fraction, an int, a string like "1/4" or "0.25", or a float (converted
    through its shortest decimal representation so that 0.1 becomes 1/10).

    Raises:
        ValueError: if the value cannot be read as a rational number.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"Not a rational number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as ex:
        raise ValueError(f"Not a rational number: {value!r}") from ex
