"""Argument validators shared by the calculators."""

import math

from .errors import DomainError


def check_t(t: float) -> float:
    t = float(t)
    if not (t > 0 and math.isfinite(t)):
        raise DomainError(f"t must be finite and > 0, got {t!r}")
    return t


def check_n(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return int(n)


def check_delta(delta: float) -> float:
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta!r}")
    return float(delta)


def nonneg(name: str, x: float) -> float:
    x = float(x)
    if not (x >= 0 and math.isfinite(x)):
        raise DomainError(f"{name} must be finite and >= 0, got {x!r}")
    return x
