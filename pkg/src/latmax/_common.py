"""Shared tolerances, limits, errors and number formatting."""
import os

#: Global comparison tolerance for float-valued oracles.
TAU = 1e-9

DEFAULT_ENUM_LIMIT = 2 ** 24


class LatmaxError(Exception):
    """Base class for errors raised by this package."""


class DomainError(LatmaxError, ValueError):
    """A point, set or structure does not belong to the expected domain."""


class DomainTooLargeError(LatmaxError):
    """An exhaustive enumeration would exceed the configured limit."""


def enum_limit(limit=None):
    """Resolve an enumeration cap: explicit value, then LATMAX_ENUM_LIMIT, then default."""
    if limit is not None:
        return int(limit)
    env = os.environ.get("LATMAX_ENUM_LIMIT")
    if env:
        return int(env)
    return DEFAULT_ENUM_LIMIT


def fmt(x):
    """Format a number with 12 significant digits (stable across platforms)."""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".12g")
