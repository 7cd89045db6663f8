"""Certificates for concrete estimation problems.

* supremum of a family of subgaussian variables, by embedding them on the
  diagonal of a random matrix;
* spectral-norm error of an empirical second-moment matrix, either directly
  (dimension-free) or split into a top eigenspace handled by a covering
  argument plus a dimension-free remainder;
* the Gaussian reference bound built from Lipschitz concentration;
* Rayleigh-quotient and covering-number tools for subgaussian vectors.

Each calculator works on summary statistics. The ``from_*`` constructors
derive those statistics exactly from matrices or from a finitely supported
distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import specmat
from ._checks import check_delta, check_n, check_t, nonneg
from .bounds import TailCertificate
from .errors import DomainError, PreconditionFailed
from .tailfn import TailProbability, phi

PHI_REGIME = 2.6
SIDES = ("one_upper", "one_lower", "two")


@dataclass(frozen=True)
class ProcessSpec:
    """Variance proxies ``sigma2[i]`` of subgaussian variables ``Z_i``."""

    sigma2: tuple[float, ...]

    def __post_init__(self):
        s = tuple(float(x) for x in self.sigma2)
        if not s:
            raise DomainError("sigma2 must be non-empty")
        if not all(math.isfinite(x) and x > 0 for x in s):
            raise DomainError("every sigma2 entry must be finite and > 0")
        object.__setattr__(self, "sigma2", s)

    @property
    def v(self) -> float:
        return max(self.sigma2)

    @property
    def k(self) -> float:
        return math.fsum(self.sigma2) / self.v


def sup_process_bound(p: ProcessSpec, tau: float, strict: bool = False) -> TailCertificate:
    """``Pr[max_i Z_i > 2 sqrt(v (log k + tau))] <= e^{-tau}``.

    The bound comes from the subgaussian matrix tail at ``t = 2 (tau + log k)``
    together with ``phi(t) <= e^{-t/2}``, which needs ``t >= 2.6``. With
    ``strict=True`` the stronger assumption ``log k >= 1.3`` (sufficient for
    every ``tau > 0``) is enforced instead.
    """
    tau = check_t(tau)
    log_k = math.log(p.k)
    t = 2.0 * (tau + log_k)
    if strict and log_k < PHI_REGIME / 2:
        raise PreconditionFailed(
            f"log k = {log_k:.6g} < 1.3 (strict mode); raw t = 2(tau + log k) = {t:.6g}"
        )
    if t < PHI_REGIME:
        raise PreconditionFailed(
            f"t = 2(tau + log k) = {t:.6g} < 2.6, so phi(t) <= e^(-t/2) is not guaranteed"
        )
    return TailCertificate(
        deviation=2.0 * math.sqrt(p.v * (log_k + tau)),
        probability=TailProbability(math.exp(-tau)),
        t=t,
        source="application-specific",
        params={
            "kind": "sup_process",
            "tau": tau,
            "v": p.v,
            "k": p.k,
            "sigma2": list(p.sigma2),
            "probability_before_simplification": p.k * phi(t),
        },
    )


@dataclass(frozen=True)
class CovarianceStats:
    """Second-moment statistics of a bounded random vector ``x``.

    ``lam_K`` and ``tr_K`` are the top eigenvalue and trace of
    ``K - Sigma^2`` with ``Sigma = E[x x^T]`` and ``K = E[x x^T x x^T]``;
    ``ell2_bar`` bounds ``||x||^2`` almost surely.
    """

    lam_K: float
    tr_K: float
    ell2_bar: float
    lam_min_S: float
    lam_max_S: float
    n: int

    def __post_init__(self):
        check_n(self.n)
        for name in ("lam_K", "tr_K", "ell2_bar", "lam_min_S", "lam_max_S"):
            nonneg(name, getattr(self, name))
        tol = 1e-12 * max(1.0, self.tr_K, self.ell2_bar)
        if self.tr_K < self.lam_K - tol:
            raise DomainError("tr_K must be >= lam_K")
        if self.lam_max_S < self.lam_min_S - tol:
            raise DomainError("lam_max_S must be >= lam_min_S")
        if self.ell2_bar < self.lam_max_S - tol:
            raise DomainError("ell2_bar must be >= lam_max_S")

    @property
    def intrinsic_dimension(self) -> float:
        """``tr_K / lam_K``, taken as 1 when ``lam_K == 0``."""
        return 1.0 if self.lam_K == 0 else max(1.0, self.tr_K / self.lam_K)

    @classmethod
    def from_matrices(cls, sigma, K, ell2_bar: float, n: int) -> "CovarianceStats":
        s = specmat.symmetrize(sigma)
        d = specmat.symmetrize(np.asarray(K, dtype=float) - s @ s, rel_tol=1e-6)
        ws = specmat.eigenvalues(s)
        wd = specmat.eigenvalues(d)
        return cls(
            lam_K=max(0.0, float(wd[0])),
            tr_K=max(0.0, float(np.trace(d))),
            ell2_bar=float(ell2_bar),
            lam_min_S=max(0.0, float(ws[-1])),
            lam_max_S=max(0.0, float(ws[0])),
            n=n,
        )

    @classmethod
    def from_distribution(cls, points, weights, n: int) -> "CovarianceStats":
        """Exact statistics of a vector uniform over ``points`` rows with ``weights``."""
        sigma, K, ell2 = _second_moments(points, weights)
        return cls.from_matrices(sigma, K, ell2, n)


def _second_moments(points, weights):
    x = np.atleast_2d(np.asarray(points, dtype=float))
    w = np.asarray(weights, dtype=float)
    if x.shape[0] != w.shape[0] or np.any(w < 0) or not math.isclose(w.sum(), 1.0, abs_tol=1e-12):
        raise DomainError("weights must be nonnegative, one per point, summing to 1")
    sq = np.einsum("ij,ij->i", x, x)
    sigma = (x * w[:, None]).T @ x
    K = (x * (w * sq)[:, None]).T @ x
    ell2 = float(np.max(sq[w > 0]))
    return sigma, K, ell2


def covariance_certificate(s: CovarianceStats, t: float, sides: str = "two") -> TailCertificate:
    """Spectral-error certificate for the empirical second-moment matrix.

    ``sides`` selects the event: ``one_upper`` bounds
    ``lambda_max(Sigma_hat - Sigma)``, ``one_lower`` bounds
    ``lambda_max(Sigma - Sigma_hat)`` and ``two`` bounds
    ``||Sigma_hat - Sigma||_2`` by a union of the two.
    """
    t = check_t(t)
    if sides not in SIDES:
        raise DomainError(f"sides must be one of {SIDES}, got {sides!r}")
    upper = s.ell2_bar - s.lam_min_S
    lower = s.lam_max_S
    c = {"one_upper": upper, "one_lower": lower, "two": max(upper, lower)}[sides]
    n_sides = 2 if sides == "two" else 1
    k = s.intrinsic_dimension
    dev = math.sqrt(2.0 * s.lam_K * t / s.n) + c * t / (3.0 * s.n)
    return TailCertificate(
        deviation=dev,
        probability=TailProbability(n_sides * k * phi(t)),
        t=t,
        sides=n_sides,
        source="application-specific",
        params={"kind": "covariance", "direction": sides, "additive_scale": c,
                "multiplier": k, **_stats_dict(s)},
    )


def _stats_dict(s: CovarianceStats) -> dict:
    return {"lam_K": s.lam_K, "tr_K": s.tr_K, "ell2_bar": s.ell2_bar,
            "lam_min_S": s.lam_min_S, "lam_max_S": s.lam_max_S, "n": s.n}


@dataclass(frozen=True)
class SplitStats:
    """Statistics for the split bound.

    ``d`` is the dimension of the top eigenspace of ``Sigma``, ``gamma_d0`` the
    subgaussian constant of the whitened projection onto it, ``lam_max_S``
    equals ``||Sigma||_2``, and ``tail`` holds the covariance statistics of the
    projection onto the orthogonal complement (its ``n`` is ignored).
    """

    d: int
    gamma_d0: float
    lam_max_S: float
    tail: CovarianceStats

    def __post_init__(self):
        check_n(self.d)
        if not (self.gamma_d0 > 0 and math.isfinite(self.gamma_d0)):
            raise DomainError(f"gamma_d0 must be finite and > 0, got {self.gamma_d0!r}")
        nonneg("lam_max_S", self.lam_max_S)

    @classmethod
    def from_distribution(cls, points, weights, d: int, gamma_d0: float) -> "SplitStats":
        x = np.atleast_2d(np.asarray(points, dtype=float))
        sigma, _, _ = _second_moments(x, weights)
        p1 = np.eye(sigma.shape[0]) - top_eigenspace_projector(sigma, d)
        tail = CovarianceStats.from_distribution(x @ p1, weights, n=1)
        return cls(d=d, gamma_d0=gamma_d0, lam_max_S=specmat.lambda_max(sigma), tail=tail)


def top_eigenspace_projector(sigma, d: int) -> np.ndarray:
    """Orthogonal projector onto the span of the ``d`` leading eigenvectors."""
    w, v = specmat.spectrum(sigma)
    if not 1 <= d <= len(w):
        raise DomainError(f"d must lie in [1, {len(w)}], got {d!r}")
    q = v[:, :d]
    return q @ q.T


def split_covariance_certificate(s: SplitStats, n: int, t: float) -> TailCertificate:
    """Split spectral-error bound with failure probability ``4 e^{-t/2}``, for ``t >= 2.6``.

    The head term ``4 gamma ||Sigma|| (sqrt((71 d + 16 t)/n) + (5 d + t)/n)``
    comes from the covering argument; the remaining two terms are the
    dimension-free two-sided bound on the complement evaluated at
    ``log(tr_K1 / lam_K1) + t`` and doubled. When the complement statistics
    vanish the dimension-free terms are zero.

    ``params["union_probability_raw"]`` carries the probability obtained by
    evaluating the union bound without the ``phi <= e^{-t/2}`` simplification.
    """
    n = check_n(n)
    t = check_t(t)
    if t < PHI_REGIME:
        raise PreconditionFailed(f"t = {t:.6g} < 2.6")
    head = 4.0 * s.gamma_d0 * s.lam_max_S * (math.sqrt((71.0 * s.d + 16.0 * t) / n)
                                            + (5.0 * s.d + t) / n)
    tl = s.tail
    k = tl.intrinsic_dimension
    tt = math.log(k) + t
    c = max(tl.ell2_bar - tl.lam_min_S, tl.lam_max_S)
    rest = 2.0 * math.sqrt(2.0 * tl.lam_K * tt / n) + 2.0 * c * tt / (3.0 * n)
    union = 2.0 * math.exp(-t / 2) + (2.0 * k * phi(tt) if tl.lam_K > 0 else 0.0)
    return TailCertificate(
        deviation=head + rest,
        probability=TailProbability(4.0 * math.exp(-t / 2)),
        t=t,
        sides=2,
        source="application-specific",
        params={"kind": "split_covariance", "d": s.d, "gamma_d0": s.gamma_d0,
                "lam_max_S": s.lam_max_S, "n": n, "head_term": head, "tail_terms": rest,
                "union_probability_raw": union,
                "tail": {k_: v for k_, v in _stats_dict(tl).items() if k_ != "n"}},
    )


def gaussian_covariance_bound(lam_max_S: float, tr_S: float, n: int, t: float) -> TailCertificate:
    """Upper bound on ``||Sigma_hat_n||_2`` for i.i.d. ``N(0, Sigma)`` vectors, failing w.p. ``e^{-t}``.

    Combines Lipschitz concentration of ``||Sigma^{1/2} Z||_2`` with the
    Gordon bound on its mean.
    """
    n = check_n(n)
    t = check_t(t)
    lam = nonneg("lam_max_S", lam_max_S)
    tr = nonneg("tr_S", tr_S)
    if not (lam > 0 and tr >= lam * (1 - 1e-12)):
        raise DomainError("need tr_S >= lam_max_S > 0")
    thr = (lam + 2.0 * math.sqrt(lam * tr / n) + 2.0 * math.sqrt(2.0 * lam * lam * t / n)
           + (tr + 2.0 * math.sqrt(2.0 * tr * lam * t) + 2.0 * lam * t) / n)
    return TailCertificate(
        deviation=thr,
        probability=TailProbability(math.exp(-t)),
        t=t,
        source="application-specific",
        params={"kind": "gaussian_covariance", "lam_max_S": lam, "tr_S": tr, "n": n},
    )


def gaussian_covariance_bound_from(sigma, n: int, t: float) -> TailCertificate:
    s = specmat.symmetrize(sigma)
    return gaussian_covariance_bound(specmat.lambda_max(s), float(np.trace(s)), n, t)


class RayleighBounds(NamedTuple):
    upper: float
    lower: float


def rayleigh_tail(gamma: float, n: int, delta: float) -> RayleighBounds:
    """One-directional bounds on ``a^T Sigma_hat a`` for a fixed unit ``a``.

    For isotropic vectors whose projections are ``gamma``-subgaussian, each
    of ``a^T Sigma_hat a > upper`` and ``a^T Sigma_hat a < lower`` has
    probability at most ``delta``.
    """
    if not (gamma > 0 and math.isfinite(gamma)):
        raise DomainError(f"gamma must be finite and > 0, got {gamma!r}")
    n = check_n(n)
    if not 0.0 < delta <= 1.0:
        raise DomainError(f"delta must lie in (0, 1], got {delta!r}")
    L = math.log(1.0 / delta)
    root = math.sqrt(32.0 * gamma * gamma * L / n)
    return RayleighBounds(upper=1.0 + root + 2.0 * gamma * L / n, lower=1.0 - root)


def covering_number(d: int, eps0: float) -> float:
    """Size bound ``(1 + 2/eps0)^d`` for an ``eps0``-net of the unit sphere in ``R^d``."""
    check_n(d)
    if not eps0 > 0:
        raise DomainError(f"eps0 must be > 0, got {eps0!r}")
    return (1.0 + 2.0 / eps0) ** d


class EigenBound(NamedTuple):
    epsilon: float
    upper: float
    lower: float


def empirical_covariance_eigen_bound(gamma: float, d: int, n: int, eps0: float = 0.25,
                                     delta: float = 0.05) -> EigenBound:
    """Joint bounds on the extreme eigenvalues of ``(1/n) sum x_i x_i^T``.

    For isotropic ``gamma``-subgaussian vectors in ``R^d``, with probability at
    least ``1 - delta`` both ``lambda_max <= upper`` and ``lambda_min >= lower``.
    """
    if not (gamma > 0 and math.isfinite(gamma)):
        raise DomainError(f"gamma must be finite and > 0, got {gamma!r}")
    check_n(d)
    n = check_n(n)
    if not 0.0 < eps0 < 0.5:
        raise DomainError(f"eps0 must lie in (0, 1/2), got {eps0!r}")
    delta = check_delta(delta)
    L = d * math.log(1.0 + 2.0 / eps0) + math.log(2.0 / delta)
    eps = gamma * (math.sqrt(32.0 * L / n) + 2.0 * L / n)
    widen = eps / (1.0 - 2.0 * eps0)
    return EigenBound(epsilon=eps, upper=1.0 + widen, lower=1.0 - widen)


def split_norm_bound(delta_matrix, projector) -> float:
    """``2 ||P0 D P0||_2 + 2 ||P1 D P1||_2``, an upper bound on ``||D||_2`` for symmetric ``D``."""
    D = specmat.symmetrize(delta_matrix)
    p0 = specmat.symmetrize(projector)
    p1 = np.eye(p0.shape[0]) - p0
    return 2.0 * specmat.spectral_norm(p0 @ D @ p0) + 2.0 * specmat.spectral_norm(p1 @ D @ p1)
