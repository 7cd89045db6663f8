"""Dense symmetric-matrix numerics.

All spectral quantities go through one backend, ``numpy.linalg.eigh``.
Matrices in this package are small (tens of rows), so the cubic cost of a
full eigendecomposition is not a concern and functional calculus
(exp, log, ...) stays exact up to rounding.

A "symmetric matrix" here is a plain ``float64`` ndarray that has passed
through :func:`symmetrize`; the returned array is read-only so it can be
shared freely.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    AsymmetricInput,
    EigFailure,
    NonFinite,
    NotPositiveDefinite,
    ShapeMismatch,
    ZeroMatrix,
)

SYM_RTOL = 1e-8
PD_RTOL = 1e-12


class Spectrum(NamedTuple):
    """Eigenvalues sorted in descending order, with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None


def as_matrix(raw, *, square: bool = False) -> np.ndarray:
    """Validated finite 2D float64 copy of ``raw``; scalars become 1x1."""
    a = np.array(raw, dtype=np.float64)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.size == 0:
        raise ShapeMismatch(f"expected a non-empty 2D array, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix has NaN or infinite entries")
    return a


def symmetrize(raw, rel_tol: float = SYM_RTOL) -> np.ndarray:
    """Validate near-symmetry of ``raw`` and return ``(raw + raw.T) / 2``.

    The largest asymmetry ``|a_ij - a_ji|`` may not exceed
    ``rel_tol * max(1, max|a_ij|)``.

    Raises:
        NonFinite: if any entry is NaN or infinite.
        AsymmetricInput: if the asymmetry tolerance is exceeded.
    """
    a = as_matrix(raw, square=True)
    scale = max(1.0, float(np.max(np.abs(a))))
    asym = float(np.max(np.abs(a - a.T)))
    if asym > rel_tol * scale:
        raise AsymmetricInput(
            f"max asymmetry {asym:.3g} exceeds {rel_tol:.3g} * {scale:.3g}"
        )
    out = 0.5 * (a + a.T)
    out.flags.writeable = False
    return out


def _eigh(a: np.ndarray, vectors: bool):
    try:
        if vectors:
            w, v = np.linalg.eigh(a)
            return w[::-1], v[:, ::-1]
        return np.linalg.eigvalsh(a)[::-1], None
    except np.linalg.LinAlgError as exc:
        raise EigFailure(str(exc)) from exc


def spectrum(A, vectors: bool = True) -> Spectrum:
    a = symmetrize(A)
    w, v = _eigh(a, vectors)
    return Spectrum(w, v)


def eigenvalues(A) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, descending."""
    return spectrum(A, vectors=False).eigenvalues


def lambda_max(A) -> float:
    return float(eigenvalues(A)[0])


def lambda_min(A) -> float:
    return float(eigenvalues(A)[-1])


def trace(A) -> float:
    return float(np.trace(symmetrize(A)))


def spectral_norm(C) -> float:
    """Largest singular value of a (possibly rectangular) matrix."""
    c = as_matrix(C, square=False)
    try:
        return float(np.linalg.svd(c, compute_uv=False)[0])
    except np.linalg.LinAlgError as exc:
        raise EigFailure(str(exc)) from exc


def frobenius_norm(C) -> float:
    return float(np.linalg.norm(as_matrix(C, square=False)))


def dilate(C) -> np.ndarray:
    """Symmetric embedding ``[[0, C], [C.T, 0]]`` of a rectangular matrix.

    The eigenvalues of the result are the singular values of ``C`` with both
    signs, padded with zeros, so ``lambda_max(dilate(C)) == ||C||_2``.
    """
    c = as_matrix(C, square=False)
    p, q = c.shape
    out = np.zeros((p + q, p + q))
    out[:p, p:] = c
    out[p:, :p] = c.T
    out.flags.writeable = False
    return out


def apply_function(A, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Spectral functional calculus: ``Q f(L) Q^T`` for ``A = Q L Q^T``."""
    w, v = spectrum(A)
    out = (v * f(w)) @ v.T
    out = 0.5 * (out + out.T)
    out.flags.writeable = False
    return out


def mat_exp(A) -> np.ndarray:
    return apply_function(A, np.exp)


def is_positive_definite(A) -> bool:
    w = eigenvalues(A)
    return bool(w[-1] > PD_RTOL * max(1.0, w[0]))


def mat_log(P) -> np.ndarray:
    """Principal logarithm of a symmetric positive definite matrix.

    Raises:
        NotPositiveDefinite: if ``lambda_min <= 1e-12 * max(1, lambda_max)``.
    """
    w, v = spectrum(P)
    if not w[-1] > PD_RTOL * max(1.0, w[0]):
        raise NotPositiveDefinite(f"lambda_min = {w[-1]:.6g} is not positive")
    out = (v * np.log(w)) @ v.T
    out = 0.5 * (out + out.T)
    out.flags.writeable = False
    return out


def stable_rank(C) -> float:
    """Stable (numerical) rank ``||C||_F^2 / ||C||_2^2``, in ``[1, rank(C)]``."""
    c = as_matrix(C, square=False)
    s = np.linalg.svd(c, compute_uv=False)
    if s[0] == 0.0:
        raise ZeroMatrix("stable rank is undefined for the zero matrix")
    return float(np.sum(s**2) / s[0] ** 2)
