"""Dense linear algebra for the detector: centering, covariance, a cyclic
Jacobi eigensolver for symmetric matrices, and the Mahalanobis quadratic form.

Matrices are plain float64 numpy arrays in row-major order; the validators
below reject anything non-rectangular or non-finite. All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericalError

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap

# Jacobi convergence: off-diagonal Frobenius norm relative to ||S||_F.
_JACOBI_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 100

# Relative magnitude below which negative eigenvalues are treated as roundoff.
_EIG_CLAMP_REL = 1e-10

_SYMMETRY_TOL = 1e-10


def as_matrix(X, name: str = "matrix") -> np.ndarray:
    """Validate and convert to a finite 2-D float64 array."""
    A = np.asarray(X, dtype=np.float64)
    if A.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-dimensional, got ndim={A.ndim}")
    if A.shape[0] == 0 or A.shape[1] == 0:
        raise InvalidInputError(f"{name} is empty (shape {A.shape})")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} contains NaN or Inf entries")
    return A


def as_vector(x, name: str = "vector") -> np.ndarray:
    """Validate and convert to a finite 1-D float64 array."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] == 0:
        raise InvalidInputError(f"{name} must be a non-empty 1-D vector")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} contains NaN or Inf entries")
    return v


@dataclass(frozen=True)
class SymEigen:
    """Eigendecomposition of a symmetric matrix.

    eigenvalues are sorted descending; eigenvectors[:, i] is the unit-norm
    eigenvector paired with eigenvalues[i], sign-canonicalized so the
    largest-magnitude component is positive (lowest index on ties).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def center_columns(X) -> tuple[np.ndarray, np.ndarray]:
    """Subtract each column's mean; returns (centered matrix, mean vector)."""
    A = as_matrix(X)
    mean = A.mean(axis=0)
    return A - mean, mean


def covariance(X_centered) -> np.ndarray:
    """Sample covariance X'X / (n-1) of an already-centered matrix.

    Symmetrized explicitly so downstream symmetry checks hold exactly.
    """
    A = as_matrix(X_centered)
    n = A.shape[0]
    if n < 2:
        raise InvalidInputError("covariance needs at least 2 rows")
    S = (A.T @ A) / (n - 1)
    return 0.5 * (S + S.T)


@njit(cache=True)
def _jacobi_sweeps(A, V, tol, skip, max_sweeps):  # pragma: no cover - jitted
    """Cyclic Jacobi rotations in place; returns the final off-diagonal norm.

    Each rotation zeroes A[p,q]: rows p and q are rotated, columns follow by
    symmetry, and the 2x2 pivot block is set from the closed-form update.
    """
    n = A.shape[0]
    off = 0.0
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += A[i, j] * A[i, j]
        off = math.sqrt(off)
        if off <= tol:
            return off
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= skip:
                    continue
                app = A[p, p]
                aqq = A[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if theta != 0.0:
                    sign = 1.0 if theta > 0.0 else -1.0
                    t = sign / (abs(theta) + math.sqrt(theta * theta + 1.0))
                else:
                    t = 1.0
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for i in range(n):
                    aip = A[p, i]
                    aiq = A[q, i]
                    A[p, i] = c * aip - s * aiq
                    A[q, i] = s * aip + c * aiq
                for i in range(n):
                    A[i, p] = A[p, i]
                    A[i, q] = A[q, i]
                A[p, p] = c * c * app - 2.0 * s * c * apq + s * s * aqq
                A[q, q] = s * s * app + 2.0 * s * c * apq + c * c * aqq
                A[p, q] = 0.0
                A[q, p] = 0.0
                for i in range(n):
                    vip = V[i, p]
                    viq = V[i, q]
                    V[i, p] = c * vip - s * viq
                    V[i, q] = s * vip + c * viq
    off = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                off += A[i, j] * A[i, j]
    return math.sqrt(off)


def sym_eigen(S) -> SymEigen:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Deterministic: identical input yields bit-identical output. Negative
    eigenvalues within roundoff of zero (relative to the trace) are clamped
    to 0 so PSD inputs stay PSD.
    """
    A = as_matrix(S, "S")
    n, m = A.shape
    if n != m:
        raise InvalidInputError(f"eigensolver needs a square matrix, got {A.shape}")
    asym = float(np.max(np.abs(A - A.T)))
    if asym > _SYMMETRY_TOL:
        raise InvalidInputError(f"matrix is not symmetric (max asymmetry {asym:.3e})")

    trace = float(np.trace(A))
    A = np.ascontiguousarray(0.5 * (A + A.T))
    V = np.eye(n)
    norm = float(np.linalg.norm(A))
    tol = _JACOBI_TOL * norm
    # Rotations smaller than this cannot move the off-diagonal norm past tol.
    skip = tol / (10.0 * n) if n > 1 else 0.0

    off = _jacobi_sweeps(A, V, tol, skip, _JACOBI_MAX_SWEEPS)
    if off > tol:
        raise NumericalError(
            f"Jacobi eigensolver did not converge in {_JACOBI_MAX_SWEEPS} "
            f"sweeps (off-diagonal norm {off:.3e}, target {tol:.3e})"
        )

    vals = np.diag(A).copy()
    clamp = _EIG_CLAMP_REL * abs(trace)
    vals[(vals < 0.0) & (np.abs(vals) < clamp)] = 0.0

    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    V = V[:, order]

    for j in range(n):
        i = int(np.argmax(np.abs(V[:, j])))
        if V[i, j] < 0.0:
            V[:, j] = -V[:, j]

    return SymEigen(eigenvalues=vals, eigenvectors=V)


def sym_inverse(S) -> np.ndarray:
    """Inverse of a symmetric positive-definite matrix via its eigensystem."""
    eig = sym_eigen(S)
    if np.any(eig.eigenvalues <= 0.0):
        raise InvalidInputError("matrix is singular; cannot invert")
    V = eig.eigenvectors
    return (V / eig.eigenvalues) @ V.T


def mahalanobis_sq(x, mu, S_inv) -> float:
    """Squared Mahalanobis distance (x-mu)' S_inv (x-mu)."""
    xv = as_vector(x, "x")
    mv = as_vector(mu, "mu")
    A = as_matrix(S_inv, "S_inv")
    if xv.shape != mv.shape or A.shape != (xv.shape[0], xv.shape[0]):
        raise InvalidInputError(
            f"dimension mismatch: x {xv.shape}, mu {mv.shape}, S_inv {A.shape}"
        )
    d = xv - mv
    return max(float(d @ A @ d), 0.0)
