"""Scalar tail functions.

``g(t) = e^t - t - 1`` is the convex function that replaces the indicator in
the trace-moment argument, and ``phi(t) = t / g(t)`` is the resulting
dimension-free tail, a slightly weaker replacement for ``e^{-t}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SERIES_CUTOFF = 1e-3
LOG_SPACE_CUTOFF = 700.0
MAX_BISECTIONS = 200


@dataclass(frozen=True)
class TailProbability:
    """A probability bound kept both clamped (``value``) and as computed (``raw``)."""

    raw: float

    def __post_init__(self):
        if not self.raw >= 0.0:
            raise DomainError(f"probability bound must be >= 0, got {self.raw!r}")

    @property
    def value(self) -> float:
        return min(1.0, self.raw)

    @property
    def vacuous(self) -> bool:
        return self.raw >= 1.0


def g(t):
    """``e^t - t - 1``, accurate to ~1e-12 relative error for every finite ``t``.

    Accepts scalars or arrays. Near zero the truncated Taylor series is used
    to avoid cancellation.
    """
    x = np.asarray(t, dtype=np.float64)
    small = np.abs(x) < SERIES_CUTOFF
    with np.errstate(over="ignore"):
        direct = np.expm1(np.where(small, 0.0, x)) - np.where(small, 0.0, x)
    series = x * x * (0.5 + x * (1.0 / 6 + x * (1.0 / 24 + x / 120)))
    out = np.where(small, series, direct)
    return float(out) if out.ndim == 0 else out


def phi(t):
    """``t / (e^t - t - 1)`` for ``t > 0``.

    Strictly decreasing from ``+inf`` (like ``2/t`` near zero) to ``0`` (like
    ``t e^{-t}`` for large ``t``). Above ``t = 700`` the value is formed in log
    space since ``e^t`` overflows near 709.

    Raises:
        DomainError: if any ``t <= 0``.
    """
    x = np.asarray(t, dtype=np.float64)
    if np.any(~(x > 0)) or np.any(~np.isfinite(x)):
        raise DomainError("phi requires finite t > 0")
    big = x > LOG_SPACE_CUTOFF
    safe = np.where(big, 1.0, x)
    out = np.where(big, np.exp(np.log(x) - x), safe / g(safe))
    return float(out) if out.ndim == 0 else out


def invert_phi(p: float) -> float:
    """Unique ``t > 0`` with ``phi(t) == p``.

    Brackets by doubling the upper end from ``[1e-12, 1]`` (halving the lower
    end if ``p`` is enormous), then bisects. Bisection stops when the bracket
    can no longer be split in floating point or after 200 steps.
    """
    if not (p > 0 and math.isfinite(p)):
        raise DomainError(f"invert_phi requires finite p > 0, got {p!r}")
    lo, hi = 1e-12, 1.0
    while phi(hi) >= p:
        lo, hi = hi, 2.0 * hi
    while phi(lo) < p:
        lo *= 0.5
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if phi(mid) > p:
            lo = mid
        else:
            hi = mid
    # pick the endpoint whose value is closer to p
    return lo if abs(phi(lo) - p) <= abs(phi(hi) - p) else hi


def tail_probability(multiplier: float, t: float, sides: int = 1) -> TailProbability:
    """``sides * multiplier * phi(t)``, clamped for display but kept raw."""
    if multiplier < 0:
        raise DomainError(f"multiplier must be >= 0, got {multiplier!r}")
    return TailProbability(sides * multiplier * phi(t))
