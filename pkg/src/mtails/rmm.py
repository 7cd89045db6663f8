"""Approximate matrix multiplication by non-uniform column sampling.

``A B^T = sum_i a_i b_i^T`` is estimated by averaging ``n`` terms
``a_i b_i^T / p_i`` with column ``i`` drawn with probability
``p_i = ||a_i|| ||b_i|| / Z``. Viewing each draw through the symmetric
dilation ``X = [[0, a b^T], [b a^T, 0]] / p`` turns the spectral-norm error
into an eigenvalue statement, so the Bernstein bound applies with
``||X|| <= Z`` and ``||E X^2|| <= ||A|| ||B|| Z``.

Randomness comes from a Philox counter-based generator keyed by the seed;
draw ``j`` is the ``j``-th uniform of that stream, so results do not depend
on how the work is batched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import specmat
from ._checks import check_delta, check_n, check_t
from .errors import AllZeroColumns, DomainError, PlanMismatch, ShapeMismatch
from .tailfn import TailProbability, phi

SAMPLE_SIZE_CONSTANT = 8.0 / 3.0 + 2.0 * math.sqrt(5.0 / 3.0)


def _pair(A, B) -> tuple[np.ndarray, np.ndarray]:
    a = specmat.as_matrix(A, square=False)
    b = specmat.as_matrix(B, square=False)
    if a.shape[1] != b.shape[1]:
        raise ShapeMismatch(f"A has {a.shape[1]} columns but B has {b.shape[1]}")
    return a, b


def _column_products(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.linalg.norm(a, axis=0) * np.linalg.norm(b, axis=0)


def make_rng(seed: int, counter: int | None = None) -> np.random.Generator:
    """Philox generator keyed by ``seed`` (and optionally a second key word)."""
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < 2**64:
        raise DomainError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    key = int(seed) if counter is None else int(seed) | (int(counter) << 64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True, eq=False)
class SamplingPlan:
    """Column-sampling distribution for the pair ``(A, B)``.

    Columns with ``||a_i|| ||b_i|| == 0`` contribute nothing to ``A B^T`` and
    are left out of ``active``; their probability is zero.
    """

    m: int
    probs: np.ndarray
    Z: float
    active: np.ndarray
    cum: np.ndarray
    stable_rank_a: float
    stable_rank_b: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "Z": self.Z,
            "probs": self.probs.tolist(),
            "active": self.active.tolist(),
            "stable_rank_a": self.stable_rank_a,
            "stable_rank_b": self.stable_rank_b,
        }


def build_plan(A, B) -> SamplingPlan:
    a, b = _pair(A, B)
    prod = _column_products(a, b)
    active = np.flatnonzero(prod > 0)
    if active.size == 0:
        raise AllZeroColumns("every column pair has ||a_i|| ||b_i|| == 0")
    Z = float(prod[active].sum())
    probs = np.zeros(a.shape[1])
    probs[active] = prod[active] / Z
    cum = np.cumsum(probs[active])
    cum[-1] = 1.0
    for arr in (probs, active, cum):
        arr.flags.writeable = False
    return SamplingPlan(
        m=a.shape[1],
        probs=probs,
        Z=Z,
        active=active,
        cum=cum,
        stable_rank_a=specmat.stable_rank(a),
        stable_rank_b=specmat.stable_rank(b),
    )


def _check_plan(a: np.ndarray, b: np.ndarray, plan: SamplingPlan) -> None:
    if plan.m != a.shape[1]:
        raise PlanMismatch(f"plan has {plan.m} columns, inputs have {a.shape[1]}")
    expect = _column_products(a, b) / plan.Z
    if not np.allclose(expect, plan.probs, rtol=1e-10, atol=1e-14):
        raise PlanMismatch("plan probabilities do not match the column norms of A and B")


def sample_indices(plan: SamplingPlan, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. column indices by inverse-CDF lookup of one uniform each."""
    u = rng.random(check_n(n))
    return plan.active[np.searchsorted(plan.cum, u, side="right")]


def estimate_from_counts(a: np.ndarray, b: np.ndarray, plan: SamplingPlan,
                         counts: np.ndarray, n: int) -> np.ndarray:
    """``(1/n) sum_j a_{i_j} b_{i_j}^T / p_{i_j}`` given how often each active column was drawn."""
    cols = plan.active
    w = counts / (n * plan.probs[cols])
    return (a[:, cols] * w) @ b[:, cols].T


def approx_product(A, B, plan: SamplingPlan, n: int, seed: int) -> np.ndarray:
    """Sampled estimate of ``A B^T`` from ``n`` columns; a pure function of its arguments.

    Duplicate draws are aggregated into integer counts before the single
    weighted product, so the output does not depend on draw order.
    """
    a, b = _pair(A, B)
    _check_plan(a, b, plan)
    n = check_n(n)
    idx = sample_indices(plan, n, make_rng(seed))
    counts = np.bincount(idx, minlength=plan.m)[plan.active]
    return estimate_from_counts(a, b, plan, counts, n)


def dilation_atoms(A, B, plan: SamplingPlan | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Atoms ``dilate(a_i b_i^T) / p_i`` and their probabilities, over active columns."""
    a, b = _pair(A, B)
    plan = build_plan(a, b) if plan is None else plan
    p, q = a.shape[0], b.shape[0]
    cols = plan.active
    atoms = np.zeros((cols.size, p + q, p + q))
    outer = np.einsum("ik,jk->kij", a[:, cols], b[:, cols]) / plan.probs[cols][:, None, None]
    atoms[:, :p, p:] = outer
    atoms[:, p:, :p] = outer.transpose(0, 2, 1)
    return atoms, plan.probs[cols].copy()


@dataclass(frozen=True)
class RmmCertificate:
    """Spectral-norm error certificate for the sampled product.

    ``deviation`` is in the units flagged by ``normalized``: absolute when
    false, relative to ``||A||_2 ||B||_2`` when true. ``norm_product`` (when
    known) converts between the two.
    """

    deviation: float
    probability: TailProbability
    k_coeff: float
    variant: str
    t: float
    n: int
    normalized: bool
    norm_product: float | None = None
    params: dict[str, Any] | None = None

    @property
    def absolute_deviation(self) -> float | None:
        if not self.normalized:
            return self.deviation
        return None if self.norm_product is None else self.deviation * self.norm_product

    @property
    def relative_deviation(self) -> float | None:
        if self.normalized:
            return self.deviation
        if not self.norm_product:
            return None
        return self.deviation / self.norm_product

    def to_dict(self) -> dict[str, Any]:
        return {
            "deviation": self.deviation,
            "normalized": self.normalized,
            "absolute_deviation": self.absolute_deviation,
            "relative_deviation": self.relative_deviation,
            "probability": self.probability.value,
            "probability_raw": self.probability.raw,
            "k_coeff": self.k_coeff,
            "variant": self.variant,
            "t": self.t,
            "sides": "two",
            "source": "application-specific",
            "params": dict(self.params or {}, n=self.n, norm_product=self.norm_product),
        }


def product_statistics(A, B) -> dict[str, float]:
    """``||A||_2``, ``||B||_2``, ``Z`` and ``Z^2 - tr(A^T A B^T B)``.

    The gap is summed over off-diagonal Gram entries only, each
    ``||a_i|| ||a_j|| ||b_i|| ||b_j|| - (a_i.a_j)(b_i.b_j)`` being nonnegative,
    so it is exactly zero for a single column and never goes negative.
    """
    a, b = _pair(A, B)
    ga = a.T @ a
    gb = b.T @ b
    z = np.sqrt(np.diag(ga) * np.diag(gb))
    gap = np.outer(z, z) - ga * gb
    np.fill_diagonal(gap, 0.0)
    return {
        "norm_a": specmat.spectral_norm(a),
        "norm_b": specmat.spectral_norm(b),
        "Z": float(z.sum()),
        "gap": max(0.0, float(gap.sum())),
    }


def certificate_precise(A, B, n: int, t: float) -> RmmCertificate:
    """Bernstein certificate for ``||M_hat_n - M||_2`` computed from ``A`` and ``B`` directly."""
    n = check_n(n)
    t = check_t(t)
    s = product_statistics(A, B)
    nab = s["norm_a"] * s["norm_b"]
    Z = s["Z"]
    if nab == 0:
        raise AllZeroColumns("A B^T estimation is trivial for zero inputs")
    dev = math.sqrt(2.0 * nab * (Z + nab) * t / n) + (Z + nab) * t / (3.0 * n)
    k = 4.0 * s["gap"] / (nab * (Z + nab))
    return RmmCertificate(
        deviation=dev,
        probability=TailProbability(k * phi(t)),
        k_coeff=k,
        variant="precise",
        t=t,
        n=n,
        normalized=False,
        norm_product=nab,
        params={"Z": Z, "norm_a": s["norm_a"], "norm_b": s["norm_b"],
                "trace_gap": s["gap"]},
    )


def _check_ranks(rA: float, rB: float) -> float:
    if not (rA >= 1 and rB >= 1 and math.isfinite(rA) and math.isfinite(rB)):
        raise DomainError(f"stable ranks must be finite and >= 1, got {rA!r}, {rB!r}")
    return math.sqrt(rA * rB)


def certificate_simplified(rA: float, rB: float, n: int, t: float,
                           norm_product: float | None = None) -> RmmCertificate:
    """Stable-rank certificate with failure probability ``e^{-t}``.

    The deviation is relative to ``||A||_2 ||B||_2``. ``k_coeff`` reports the
    multiplier ``4 sqrt(rA rB)`` that upper-bounds the precise one.
    """
    root = _check_ranks(rA, rB)
    n = check_n(n)
    t = check_t(t)
    L = (1.0 + root) * (math.log(4.0 * root) + t)
    dev = 2.0 * math.sqrt(L / n) + 2.0 * L / (3.0 * n)
    return RmmCertificate(
        deviation=dev,
        probability=TailProbability(math.exp(-t)),
        k_coeff=4.0 * root,
        variant="simplified",
        t=t,
        n=n,
        normalized=True,
        norm_product=norm_product,
        params={"rA": rA, "rB": rB},
    )


def certificate_simplified_for(A, B, n: int, t: float) -> RmmCertificate:
    a, b = _pair(A, B)
    return certificate_simplified(specmat.stable_rank(a), specmat.stable_rank(b), n, t,
                                  norm_product=specmat.spectral_norm(a) * specmat.spectral_norm(b))


def sample_size(rA: float, rB: float, eps: float, delta: float) -> int:
    """Columns needed for relative error ``eps`` with probability ``1 - delta``."""
    root = _check_ranks(rA, rB)
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps!r}")
    delta = check_delta(delta)
    need = (SAMPLE_SIZE_CONSTANT * (1.0 + root)
            * (math.log(4.0 * root) + math.log(1.0 / delta)) / eps**2)
    return max(1, math.ceil(need))
