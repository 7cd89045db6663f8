"""Random-matrix ensembles with known parameters.

Every ensemble knows how to

* draw the raw randomness for one trial of ``n`` samples (``draw``),
* reduce a stack of such draws to the scalar statistic a certificate bounds
  (``statistics``), and
* build that certificate (``certificate``).

Per-trial draws have a fixed shape so a chunk of trials can be reduced with
one batched eigen/singular-value call.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .. import applications, bounds, rmm, specmat
from ..errors import DomainError, PreconditionFailed, TooLarge, UnknownMoments
from ..tailfn import TailProbability

RADEMACHER_ENUM_MAX_D = 12


class Moments(NamedTuple):
    """``E[X]`` and ``E[X^2]`` of a random symmetric matrix."""

    mean: np.ndarray
    second: np.ndarray


class Target(NamedTuple):
    """What one Monte Carlo configuration checks: ``Pr[stat > deviation] <= probability``."""

    deviation: float
    probability: TailProbability
    certificate: object


def _top_eig(mats: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(mats)[..., -1]


def _abs_eig(mats: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(mats)
    return np.maximum(w[..., -1], -w[..., 0])


class Ensemble:
    """Base class; subclasses fill in the sampling and certificate hooks."""

    kinds: tuple[str, ...] = ()

    @property
    def ensemble_id(self) -> str:
        raise NotImplementedError

    def exact_moments(self) -> Moments:
        raise UnknownMoments(f"{self.ensemble_id} has no exact moments")

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def statistics(self, draws: np.ndarray, kind: str) -> np.ndarray:
        raise NotImplementedError

    def target(self, kind: str, n: int, t: float, eps: float | None = None) -> Target:
        raise NotImplementedError

    def _check_kind(self, kind: str) -> None:
        if kind not in self.kinds:
            raise UnknownMoments(
                f"{self.ensemble_id} supports certificates {self.kinds}, not {kind!r}"
            )


def _cert_target(cert) -> Target:
    return Target(cert.deviation, cert.probability, cert)


@dataclass(frozen=True, eq=False)
class DiscreteAtoms(Ensemble):
    """``X`` equal to ``atoms[i]`` with probability ``probs[i]``."""

    atoms: np.ndarray
    probs: np.ndarray
    name: str = "atoms"
    kinds = ("bernstein",)

    def __post_init__(self):
        a = np.asarray(self.atoms, dtype=float)
        if a.ndim == 2:
            a = a[None]
        if a.ndim != 3 or a.shape[1] != a.shape[2]:
            raise DomainError(f"atoms must be a stack of square matrices, got shape {a.shape}")
        a = np.stack([specmat.symmetrize(x) for x in a])
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if p.shape[0] != a.shape[0] or np.any(p <= 0) or abs(p.sum() - 1.0) > 1e-12:
            raise DomainError("probabilities must be positive, one per atom, summing to 1")
        a.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "atoms", a)
        object.__setattr__(self, "probs", p)
        cum = np.cumsum(p)
        cum[-1] = 1.0
        object.__setattr__(self, "_cum", cum)

    @classmethod
    def scalar(cls, values, probs, name: str = "scalar") -> "DiscreteAtoms":
        v = np.asarray(values, dtype=float).reshape(-1, 1, 1)
        return cls(v, probs, name=name)

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    @property
    def ensemble_id(self) -> str:
        return f"{self.name}(k={len(self.probs)},dim={self.dim})"

    def exact_moments(self) -> Moments:
        p = self.probs[:, None, None]
        mean = np.sum(p * self.atoms, axis=0)
        second = np.sum(p * (self.atoms @ self.atoms), axis=0)
        return Moments(0.5 * (mean + mean.T), 0.5 * (second + second.T))

    def mgf(self, eta: float) -> np.ndarray:
        """``E[exp(eta X)]``, exact."""
        return sum(p * specmat.mat_exp(eta * x) for p, x in zip(self.probs, self.atoms))

    def log_mgf(self, eta: float) -> np.ndarray:
        return specmat.mat_log(self.mgf(eta))

    def centered(self) -> tuple[np.ndarray, np.ndarray]:
        """Atoms minus the mean, and ``E[(X - EX)^2]``."""
        mean = self.exact_moments().mean
        c = self.atoms - mean
        second = np.sum(self.probs[:, None, None] * (c @ c), axis=0)
        return c, 0.5 * (second + second.T)

    def draw(self, rng, n):
        return np.searchsorted(self._cum, rng.random(n), side="right")

    def statistics(self, draws, kind):
        self._check_kind(kind)
        c, _ = self.centered()
        counts = (draws[..., None] == np.arange(len(self.probs))).sum(axis=1)
        avg = np.einsum("bk,kij->bij", counts / draws.shape[1], c)
        return _top_eig(avg)

    def target(self, kind, n, t, eps=None):
        self._check_kind(kind)
        c, second = self.centered()
        b_bar = max(0.0, float(np.max(np.linalg.eigvalsh(c)[:, -1])))
        params = bounds.params_from_moments(b_bar, second, n)
        return _cert_target(bounds.bernstein_tail(params, t))


@dataclass(frozen=True)
class RademacherOuter(Ensemble):
    """``X = x x^T - I`` with ``x`` uniform on ``{-1, +1}^d``."""

    d: int
    kinds = ("bernstein", "covariance", "covariance_upper")

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"d must be a positive integer, got {self.d!r}")

    @property
    def ensemble_id(self) -> str:
        return f"rademacher(d={self.d})"

    def exact_moments(self) -> Moments:
        """Closed form: ``E[X] = 0`` and ``E[X^2] = (d - 1) I``."""
        return Moments(np.zeros((self.d, self.d)), (self.d - 1) * np.eye(self.d))

    def sign_vectors(self) -> np.ndarray:
        if self.d > RADEMACHER_ENUM_MAX_D:
            raise TooLarge(f"2^{self.d} sign vectors exceed the enumeration cap")
        return np.array(list(itertools.product((-1.0, 1.0), repeat=self.d)))

    def as_atoms(self) -> DiscreteAtoms:
        x = self.sign_vectors()
        atoms = np.einsum("ki,kj->kij", x, x) - np.eye(self.d)
        return DiscreteAtoms(atoms, np.full(len(x), 1.0 / len(x)), name=f"rademacher{self.d}")

    def brute_force_moments(self) -> Moments:
        """Moments by summing over all ``2^d`` sign vectors (``d <= 12``)."""
        atoms = self.as_atoms().atoms
        k = atoms.shape[0]
        return Moments(atoms.sum(axis=0) / k, (atoms @ atoms).sum(axis=0) / k)

    def draw(self, rng, n):
        return rng.integers(0, 2, size=(n, self.d), dtype=np.int8) * 2 - 1

    def statistics(self, draws, kind):
        self._check_kind(kind)
        x = draws.astype(float)
        cov = np.einsum("bni,bnj->bij", x, x) / x.shape[1] - np.eye(self.d)
        return _abs_eig(cov) if kind == "covariance" else _top_eig(cov)

    def covariance_stats(self, n: int) -> applications.CovarianceStats:
        d = self.d
        return applications.CovarianceStats.from_matrices(np.eye(d), d * np.eye(d), float(d), n)

    def target(self, kind, n, t, eps=None):
        self._check_kind(kind)
        if kind == "bernstein":
            params = bounds.params_from_moments(self.d - 1, self.exact_moments().second, n)
            return _cert_target(bounds.bernstein_tail(params, t))
        sides = "two" if kind == "covariance" else "one_upper"
        return _cert_target(applications.covariance_certificate(self.covariance_stats(n), t, sides))


@dataclass(frozen=True)
class DiagSubgaussian(Ensemble):
    """``X = diag(Z_1, ..., Z_k)`` with independent ``Z_i ~ N(0, sigma2[i])``."""

    sigma2: tuple[float, ...]
    kinds = ("subgaussian", "sup")

    def __post_init__(self):
        object.__setattr__(self, "sigma2", applications.ProcessSpec(self.sigma2).sigma2)

    @property
    def ensemble_id(self) -> str:
        return f"diag_gaussian(k={len(self.sigma2)})"

    @property
    def process(self) -> applications.ProcessSpec:
        return applications.ProcessSpec(self.sigma2)

    def exact_moments(self) -> Moments:
        k = len(self.sigma2)
        return Moments(np.zeros((k, k)), np.diag(self.sigma2))

    def log_mgf(self, eta: float) -> np.ndarray:
        """Closed form ``diag(eta^2 sigma2 / 2)``."""
        return np.diag(0.5 * eta * eta * np.asarray(self.sigma2))

    def draw(self, rng, n):
        return rng.standard_normal((n, len(self.sigma2))) * np.sqrt(self.sigma2)

    def statistics(self, draws, kind):
        self._check_kind(kind)
        # the average is diagonal, so its top eigenvalue is the largest entry
        return draws.mean(axis=1).max(axis=1)

    def target(self, kind, n, t, eps=None):
        self._check_kind(kind)
        p = self.process
        if kind == "sup":
            if n != 1:
                raise DomainError("the supremum certificate is for a single draw (n = 1)")
            return _cert_target(applications.sup_process_bound(p, t))
        params = bounds.SubgaussianParams(n=n, sigma2_bar=p.v, k_bar=p.k)
        return _cert_target(bounds.subgaussian_tail(params, t))


@dataclass(frozen=True, eq=False)
class GaussianVectors(Ensemble):
    """``x ~ N(0, Sigma)``; the statistic is ``||(1/n) sum x_i x_i^T||_2``."""

    sigma: np.ndarray
    kinds = ("gaussian_cov",)

    def __post_init__(self):
        s = specmat.symmetrize(self.sigma)
        w, v = specmat.spectrum(s)
        if w[-1] < -1e-10 * max(1.0, w[0]):
            raise DomainError("Sigma must be positive semidefinite")
        root = v * np.sqrt(np.clip(w, 0.0, None))
        object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "_root", root)

    @property
    def ensemble_id(self) -> str:
        return f"gaussian(dim={self.sigma.shape[0]})"

    def exact_moments(self) -> Moments:
        """Moments of ``X = x x^T - Sigma``: zero mean, ``E X^2 = Sigma^2 + tr(Sigma) Sigma``."""
        s = self.sigma
        return Moments(np.zeros_like(s), s @ s + np.trace(s) * s)

    def draw(self, rng, n):
        return rng.standard_normal((n, self.sigma.shape[0])) @ self._root.T

    def statistics(self, draws, kind):
        self._check_kind(kind)
        cov = np.einsum("bni,bnj->bij", draws, draws) / draws.shape[1]
        return _top_eig(cov)

    def target(self, kind, n, t, eps=None):
        self._check_kind(kind)
        return _cert_target(applications.gaussian_covariance_bound_from(self.sigma, n, t))


@dataclass(frozen=True, eq=False)
class RmmSampler(Ensemble):
    """Column-sampling estimator of ``A B^T``; the statistic is ``||M_hat - A B^T||_2``."""

    A: np.ndarray
    B: np.ndarray
    kinds = ("rmm_precise", "rmm_simplified", "rmm_epsilon")
    plan: rmm.SamplingPlan = field(init=False)

    def __post_init__(self):
        a = specmat.as_matrix(self.A)
        b = specmat.as_matrix(self.B)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "plan", rmm.build_plan(a, b))
        object.__setattr__(self, "_product", a @ b.T)

    @property
    def ensemble_id(self) -> str:
        return f"rmm({self.A.shape[0]}x{self.A.shape[1]},{self.B.shape[0]}x{self.B.shape[1]})"

    def exact_moments(self) -> Moments:
        atoms, p = rmm.dilation_atoms(self.A, self.B, self.plan)
        w = p[:, None, None]
        return Moments(np.sum(w * atoms, axis=0), np.sum(w * (atoms @ atoms), axis=0))

    def draw(self, rng, n):
        idx = rmm.sample_indices(self.plan, n, rng)
        return np.bincount(idx, minlength=self.plan.m)[self.plan.active]

    def statistics(self, draws, kind):
        self._check_kind(kind)
        cols = self.plan.active
        n = int(draws[0].sum())
        w = draws / (n * self.plan.probs[cols])
        est = np.einsum("pk,bk,qk->bpq", self.A[:, cols], w, self.B[:, cols])
        return np.linalg.svd(est - self._product, compute_uv=False)[:, 0]

    def target(self, kind, n, t, eps=None):
        self._check_kind(kind)
        if kind == "rmm_precise":
            return _cert_target(rmm.certificate_precise(self.A, self.B, n, t))
        cert = rmm.certificate_simplified_for(self.A, self.B, n, t)
        if kind == "rmm_simplified":
            return Target(cert.absolute_deviation, cert.probability, cert)
        if eps is None:
            raise DomainError("rmm_epsilon needs eps")
        delta = math.exp(-t)
        need = rmm.sample_size(self.plan.stable_rank_a, self.plan.stable_rank_b, eps, delta)
        if n < need:
            raise PreconditionFailed(f"n = {n} is below the required sample size {need}")
        return Target(eps * cert.norm_product, TailProbability(delta), cert)
