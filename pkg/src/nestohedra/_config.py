"""Runtime limits, read from the environment on every call."""

import os

DEFAULT_MAX_GROUND = 64
DEFAULT_ENUM_BUDGET = 10**7


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        return default
    return value if value > 0 else default


def max_ground() -> int:
    """Largest allowed ground-set size (``NESTO_MAX_GROUND``)."""
    return _env_int("NESTO_MAX_GROUND", DEFAULT_MAX_GROUND)


def enum_budget() -> int:
    """Node cap for clique and isomorphism searches (``NESTO_ENUM_BUDGET``)."""
    return _env_int("NESTO_ENUM_BUDGET", DEFAULT_ENUM_BUDGET)
