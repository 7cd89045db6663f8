"""Exact and deterministic checks of the underlying inequalities.

Nothing here is statistical: enumeration over every atom sequence of a
discrete ensemble, midpoint concavity on explicit matrices, and adaptive
quadrature against closed forms. Inequalities are judged with an additive
tolerance of 1e-9.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .. import specmat
from ..errors import DomainError, Divergent, NotPositiveDefinite, TooLarge, UnknownMoments
from ..tailfn import g
from .ensembles import DiagSubgaussian, DiscreteAtoms, Ensemble, RademacherOuter

ENUM_CAP = 10**6
EXACT_TOL = 1e-9


class CheckResult(NamedTuple):
    """``lhs <= rhs`` up to ``EXACT_TOL``."""

    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + EXACT_TOL

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


def enumerate_sums(e: DiscreteAtoms, n: int) -> tuple[np.ndarray, np.ndarray]:
    """All ``k^n`` sums ``X_1 + ... + X_n`` with their probabilities."""
    k = len(e.probs)
    if n < 1 or k**n > ENUM_CAP:
        raise TooLarge(f"{k}^{n} sequences exceed the cap of {ENUM_CAP}")
    d = e.dim
    sums = np.zeros((1, d, d))
    probs = np.ones(1)
    for _ in range(n):
        sums = (sums[:, None] + e.atoms[None]).reshape(-1, d, d)
        probs = (probs[:, None] * e.probs[None]).reshape(-1)
    return sums, probs


def exact_lemma2_check(e: DiscreteAtoms, n: int) -> CheckResult:
    """``E tr exp(sum X_i - n log E exp X) <= tr exp(0) = dim`` by full enumeration."""
    sums, probs = enumerate_sums(e, n)
    shift = n * e.log_mgf(1.0)
    w = np.linalg.eigvalsh(sums - shift)
    value = float(np.dot(probs, np.exp(w).sum(axis=1)))
    return CheckResult(value, float(e.dim))


def exact_theorem3_check(e: DiscreteAtoms, n: int, eta: float, t: float) -> CheckResult:
    """Exact ``Pr[lambda_max(eta S - n L) > t]`` against ``tr E[-eta S + n L] / g(t)``.

    ``S`` is the sum of ``n`` i.i.d. draws and ``L = log E exp(eta X)``.
    """
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t!r}")
    sums, probs = enumerate_sums(e, n)
    L = e.log_mgf(eta)
    top = np.linalg.eigvalsh(eta * sums - n * L)[:, -1]
    lhs = float(probs[top > t].sum())
    mean = e.exact_moments().mean
    trace_quantity = n * (float(np.trace(L)) - eta * float(np.trace(mean)))
    return CheckResult(lhs, max(0.0, trace_quantity) / g(t))


def _tr_exp_h_log(H: np.ndarray, M: np.ndarray) -> float:
    return float(np.exp(np.linalg.eigvalsh(H + specmat.mat_log(M))).sum())


def lieb_midpoint_gap(H, M1, M2) -> float:
    """``f((M1 + M2)/2) - (f(M1) + f(M2))/2`` for ``f(M) = tr exp(H + log M)``.

    Nonnegative for positive definite ``M1, M2`` by concavity.
    """
    h = specmat.symmetrize(H)
    m1 = specmat.symmetrize(M1)
    m2 = specmat.symmetrize(M2)
    for m in (m1, m2):
        if not specmat.is_positive_definite(m):
            raise NotPositiveDefinite("M1 and M2 must be positive definite")
    mid = _tr_exp_h_log(h, 0.5 * (m1 + m2))
    return mid - 0.5 * (_tr_exp_h_log(h, m1) + _tr_exp_h_log(h, m2))


def lieb_concavity_check(H, M1, M2) -> bool:
    return lieb_midpoint_gap(H, M1, M2) >= -EXACT_TOL


# -- scalar laws and the MGF / tail-integral identity ---------------------------------


@dataclass(frozen=True)
class Exponential:
    rate: float = 1.0

    def mean(self) -> float:
        return 1.0 / self.rate

    def mgf(self, eta: float) -> float:
        if eta >= self.rate:
            raise Divergent(f"E exp(eta W) is infinite for eta = {eta} >= rate {self.rate}")
        return self.rate / (self.rate - eta)

    def survival(self, t):
        return np.exp(-self.rate * np.asarray(t, dtype=float))

    def log_survival(self, t: float) -> float:
        return -self.rate * t

    breakpoints: tuple[float, ...] = ()
    support_max: float = math.inf


@dataclass(frozen=True)
class Constant:
    c: float

    def __post_init__(self):
        if self.c < 0:
            raise DomainError("W must be nonnegative")

    def mean(self) -> float:
        return self.c

    def mgf(self, eta: float) -> float:
        return math.exp(eta * self.c)

    def survival(self, t):
        return (np.asarray(t, dtype=float) < self.c).astype(float)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (self.c,)

    @property
    def support_max(self) -> float:
        return self.c


@dataclass(frozen=True)
class Uniform:
    hi: float = 1.0

    def mean(self) -> float:
        return 0.5 * self.hi

    def mgf(self, eta: float) -> float:
        x = eta * self.hi
        return 1.0 + x / 2 if abs(x) < 1e-8 else math.expm1(x) / x

    def survival(self, t):
        return np.clip(1.0 - np.asarray(t, dtype=float) / self.hi, 0.0, 1.0)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (self.hi,)

    @property
    def support_max(self) -> float:
        return self.hi


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-13, max_depth: int = 60) -> float:
    """Adaptive Simpson quadrature with Richardson correction (explicit stack, no recursion)."""
    if b <= a:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) * (fa + 4 * fm + fb) / 6
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    total = 0.0
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = (mid - lo) * (flo + 4 * flm + fmid) / 6
        right = (hi - mid) * (fmid + 4 * frm + fhi) / 6
        diff = left + right - est
        if depth >= max_depth or abs(diff) <= 15 * eps:
            total += left + right + diff / 15
        else:
            stack.append((lo, mid, flo, flm, fmid, left, eps / 2, depth + 1))
            stack.append((mid, hi, fmid, frm, fhi, right, eps / 2, depth + 1))
    return total


def tail_integral(law, eta: float, tail_tol: float = 1e-12) -> float:
    """``eta * int_0^inf (e^{eta t} - 1) Pr[W > t] dt`` by piecewise adaptive Simpson.

    For unbounded support the upper limit doubles until the integrand falls
    below ``tail_tol`` and the integral stops changing.
    """
    law.mgf(eta)  # raises Divergent outside the MGF domain

    log_surv = getattr(law, "log_survival", None)

    def integrand(t):
        x = eta * t
        if log_surv is not None and x > 1.0:
            # (e^x - 1) S(t) = e^{x + log S(t)} - S(t), formed without overflow
            ls = log_surv(t)
            return eta * (math.exp(x + ls) - math.exp(ls))
        return eta * math.expm1(x) * float(law.survival(t))

    cuts = sorted(set(b for b in law.breakpoints if b > 0))
    if math.isfinite(law.support_max):
        edges = [0.0] + cuts
        return sum(adaptive_simpson(integrand, lo, hi) for lo, hi in zip(edges, edges[1:]))
    T = max([1.0] + cuts)
    while abs(integrand(T)) > tail_tol:
        T *= 2
        if T > 1e6:
            raise Divergent("tail integrand does not decay")
    edges = [0.0] + [c for c in cuts if c < T] + [T]
    value = sum(adaptive_simpson(integrand, lo, hi) for lo, hi in zip(edges, edges[1:]))
    while True:
        extra = adaptive_simpson(integrand, T, 2 * T)
        value += extra
        T *= 2
        if abs(extra) <= tail_tol * max(1.0, abs(value)):
            return value


class IdentityResult(NamedTuple):
    lhs: float
    rhs: float

    @property
    def agrees(self) -> bool:
        return abs(self.lhs - self.rhs) <= 1e-6 * max(1.0, abs(self.lhs))


def mgf_identity_check(law, eta: float) -> IdentityResult:
    """``E e^{eta W} - eta E W - 1`` (closed form) against the tail integral (quadrature)."""
    lhs = law.mgf(eta) - eta * law.mean() - 1.0
    return IdentityResult(lhs, tail_integral(law, eta))


def mgf_hypothesis_grid_check(e: Ensemble, eta_grid: Sequence[float],
                              sigma2_bar: float | None = None,
                              k_bar: float | None = None) -> bool:
    """Check the subgaussian MGF conditions on a finite grid of ``eta > 0``.

    At each ``eta``: ``lambda_max(log E exp(eta X)) <= eta^2 sigma2_bar / 2`` and
    ``tr(log E exp(eta X)) <= eta^2 sigma2_bar k_bar / 2``. When not given,
    ``sigma2_bar`` and ``k_bar`` default to the top eigenvalue and intrinsic
    dimension of ``E[X^2]``.
    """
    if isinstance(e, RademacherOuter):
        e = e.as_atoms()
    if isinstance(e, DiagSubgaussian):
        log_mgf = e.log_mgf
        second = e.exact_moments().second
    elif isinstance(e, DiscreteAtoms):
        log_mgf = e.log_mgf
        second = e.exact_moments().second
    else:
        raise UnknownMoments(f"no computable MGF for {e.ensemble_id}")
    if sigma2_bar is None or k_bar is None:
        w = specmat.eigenvalues(second)
        top = max(0.0, float(w[0]))
        sigma2_bar = top if sigma2_bar is None else sigma2_bar
        k_bar = (float(np.trace(second)) / top if top > 0 else 1.0) if k_bar is None else k_bar
    for eta in eta_grid:
        if not eta > 0:
            raise DomainError(f"grid values must be > 0, got {eta!r}")
        L = log_mgf(eta)
        w = specmat.eigenvalues(L)
        cap = 0.5 * eta * eta * sigma2_bar
        tol = 1e-12 * max(1.0, cap * k_bar)
        if w[0] > cap + tol or float(np.trace(L)) > cap * k_bar + tol:
            return False
    return True
