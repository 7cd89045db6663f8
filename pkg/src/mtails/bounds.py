"""Dimension-free tail bounds for averages of random symmetric matrices.

Each calculator returns a :class:`TailCertificate` asserting

    Pr[ lambda_max( (1/n) sum_i X_i ) > deviation ] <= probability

for independent (or martingale-difference) symmetric ``X_i`` meeting the
stated moment conditions. Dimension never enters; its role is played by the
intrinsic-dimension ratio ``k_bar`` (trace over largest eigenvalue of a
second-moment-type matrix).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from . import specmat
from ._checks import check_delta, check_n, check_t, nonneg
from .errors import DomainError, NotPSD
from .tailfn import TailProbability, g, invert_phi, phi, tail_probability

SOURCES = ("subgaussian", "bernstein", "generic", "application-specific")


@dataclass(frozen=True)
class SubgaussianParams:
    """Sample count ``n``, variance proxy ``sigma2_bar`` and intrinsic dimension ``k_bar``."""

    n: int
    sigma2_bar: float
    k_bar: float = 1.0

    def __post_init__(self):
        check_n(self.n)
        nonneg("sigma2_bar", self.sigma2_bar)
        if not (math.isfinite(self.k_bar) and self.k_bar > 0):
            raise DomainError(f"k_bar must be finite and > 0, got {self.k_bar!r}")
        if self.sigma2_bar > 0 and self.k_bar < 1:
            raise DomainError(f"k_bar must be >= 1 when sigma2_bar > 0, got {self.k_bar!r}")


@dataclass(frozen=True)
class BernsteinParams:
    """Adds the almost-sure eigenvalue bound ``b_bar`` to the subgaussian pair."""

    n: int
    b_bar: float
    sigma2_bar: float
    k_bar: float = 1.0

    def __post_init__(self):
        check_n(self.n)
        nonneg("b_bar", self.b_bar)
        nonneg("sigma2_bar", self.sigma2_bar)
        if not (math.isfinite(self.k_bar) and self.k_bar > 0):
            raise DomainError(f"k_bar must be finite and > 0, got {self.k_bar!r}")
        if self.sigma2_bar > 0 and self.k_bar < 1:
            raise DomainError(f"k_bar must be >= 1 when sigma2_bar > 0, got {self.k_bar!r}")


@dataclass(frozen=True)
class TailCertificate:
    """``Pr[statistic > deviation] <= probability.value``.

    ``sides`` is 1 for a bound on ``lambda_max`` and 2 for a bound on the
    spectral norm obtained by a union over both tails. ``params`` echoes the
    inputs (and any derived constants) for auditability.
    """

    deviation: float
    probability: TailProbability
    t: float
    sides: int = 1
    source: str = "generic"
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.deviation >= 0:
            raise DomainError(f"deviation must be >= 0, got {self.deviation!r}")
        if self.sides not in (1, 2):
            raise DomainError(f"sides must be 1 or 2, got {self.sides!r}")
        if self.source not in SOURCES:
            raise DomainError(f"unknown certificate source {self.source!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "deviation": self.deviation,
            "probability": self.probability.value,
            "probability_raw": self.probability.raw,
            "t": self.t,
            "sides": "one" if self.sides == 1 else "two",
            "source": self.source,
            "params": dict(self.params),
        }


def generic_rhs(trace_quantity: float, t: float) -> TailProbability:
    """``trace_quantity / (e^t - t - 1)``: the right-hand side of the generic inequality.

    ``trace_quantity`` is ``tr E[-eta sum X_i + sum log E_i exp(eta X_i)]``,
    supplied by the caller.
    """
    tq = nonneg("trace_quantity", trace_quantity)
    t = check_t(t)
    return TailProbability(tq / g(t))


def subgaussian_tail(p: SubgaussianParams, t: float) -> TailCertificate:
    """Deviation ``sqrt(2 sigma2_bar t / n)`` at probability ``k_bar * phi(t)``."""
    t = check_t(t)
    dev = math.sqrt(2.0 * p.sigma2_bar * t / p.n)
    return TailCertificate(
        deviation=dev,
        probability=tail_probability(p.k_bar, t),
        t=t,
        source="subgaussian",
        params=asdict(p),
    )


def subgaussian_deviation_at_confidence(p: SubgaussianParams, delta: float) -> TailCertificate:
    """Smallest certified deviation whose failure probability is exactly ``delta``."""
    delta = check_delta(delta)
    return subgaussian_tail(p, invert_phi(delta / p.k_bar))


def bernstein_tail(p: BernsteinParams, t: float) -> TailCertificate:
    """Deviation ``sqrt(2 sigma2_bar t / n) + b_bar t / (3 n)`` at probability ``k_bar * phi(t)``."""
    t = check_t(t)
    dev = math.sqrt(2.0 * p.sigma2_bar * t / p.n) + p.b_bar * t / (3.0 * p.n)
    return TailCertificate(
        deviation=dev,
        probability=tail_probability(p.k_bar, t),
        t=t,
        source="bernstein",
        params=asdict(p),
    )


def bernstein_deviation_at_confidence(p: BernsteinParams, delta: float) -> TailCertificate:
    delta = check_delta(delta)
    return bernstein_tail(p, invert_phi(delta / p.k_bar))


def intrinsic_dimension(M) -> tuple[float, float]:
    """``(lambda_max(M), tr(M) / lambda_max(M))`` for a PSD matrix.

    The ratio is defined as 1 when ``M`` is zero.

    Raises:
        NotPSD: if ``lambda_min < -1e-10 * lambda_max``.
    """
    a = specmat.symmetrize(M)
    w = specmat.eigenvalues(a)
    top, bottom = float(w[0]), float(w[-1])
    if bottom < -1e-10 * max(top, 0.0):
        raise NotPSD(f"matrix has eigenvalue {bottom:.6g} < 0")
    if top <= 0.0:
        return 0.0, 1.0
    # rounding can push tr/top a hair below 1 for rank-one input
    return top, max(1.0, float(np.trace(a)) / top)


def params_from_moments(b_bar_input: float, second_moment, n: int) -> BernsteinParams:
    """Bernstein parameters from the exact average second-moment matrix ``(1/n) sum E[X_i^2]``."""
    sigma2, k_bar = intrinsic_dimension(second_moment)
    return BernsteinParams(n=check_n(n), b_bar=nonneg("b_bar", b_bar_input),
                           sigma2_bar=sigma2, k_bar=k_bar)


def phi_regime_check(t: float) -> bool:
    """Whether ``phi(t) <= e^{-t/2}`` holds at ``t`` (true for every ``t >= 2.6``)."""
    return phi(t) <= math.exp(-t / 2)
