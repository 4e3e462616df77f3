"""Multivariate Gaussian kernel density estimation with a Scott's-rule
bandwidth, evaluated by exact summation over the sample points.

The estimate at x is the average of Gaussian kernels centered at each sample:
f(x) = (1/n) * sum_i K_H(x - x_i), with K_H the multivariate normal density
with covariance H. All ranking paths work in log space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SingularBandwidthError
from .linalg import as_matrix, as_vector, sym_eigen

# Below this relative eigenvalue the bandwidth is treated as singular.
_SINGULAR_REL = 1e-12

# Off-diagonal magnitude below which H is handled as exactly diagonal.
_DIAG_TOL = 1e-14

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class Bandwidth:
    """Symmetric positive-definite bandwidth matrix with cached inverse,
    log-determinant and the sample-size scaling that produced it."""

    H: np.ndarray
    H_inv: np.ndarray
    log_det_H: float
    scott_factor: float


@dataclass(frozen=True)
class KdeModel:
    samples: np.ndarray
    bandwidth: Bandwidth
    n: int
    d: int


def _spd_inverse_logdet(H: np.ndarray) -> tuple[np.ndarray, float]:
    """Inverse and log-determinant of H; fast path when H is diagonal."""
    d = H.shape[0]
    off = np.abs(H - np.diag(np.diag(H)))
    if float(off.max(initial=0.0)) <= _DIAG_TOL:
        diag = np.diag(H).copy()
        if np.any(diag <= _SINGULAR_REL * max(float(diag.sum()), 0.0)) or np.any(
            diag <= 0.0
        ):
            raise SingularBandwidthError(
                "bandwidth has a (near-)zero diagonal entry; reduce the "
                "dimension to drop the degenerate direction"
            )
        return np.diag(1.0 / diag), float(np.sum(np.log(diag)))
    eig = sym_eigen(H)
    vals = eig.eigenvalues
    if np.any(vals <= _SINGULAR_REL * max(float(vals.sum()), 0.0)) or np.any(
        vals <= 0.0
    ):
        raise SingularBandwidthError(
            "bandwidth matrix is singular or near-singular; reduce the "
            "dimension to drop the degenerate direction"
        )
    V = eig.eigenvectors
    return (V / vals) @ V.T, float(np.sum(np.log(vals)))


def scott_bandwidth(S, n: int, rule: str = "scott") -> Bandwidth:
    """Bandwidth H = n^(-1/(d+4)) * S from a covariance estimate S.

    rule "scott-squared" applies the square of the factor instead, the
    conventional covariance-form variant of the same rule.
    """
    A = as_matrix(S, "S")
    if A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"covariance must be square, got {A.shape}")
    if n < 2:
        raise InvalidInputError(f"bandwidth needs n >= 2 samples, got {n}")
    if rule not in ("scott", "scott-squared"):
        raise InvalidInputError(f"unknown bandwidth rule {rule!r}")
    d = A.shape[0]
    factor = float(n) ** (-1.0 / (d + 4))
    scale = factor * factor if rule == "scott-squared" else factor
    H = 0.5 * scale * (A + A.T)
    H_inv, log_det = _spd_inverse_logdet(H)
    return Bandwidth(H=H, H_inv=H_inv, log_det_H=log_det, scott_factor=scale)


def fit_kde(samples, bandwidth: Bandwidth) -> KdeModel:
    """Bundle reference samples with a bandwidth of matching dimension."""
    X = as_matrix(samples, "samples")
    n, d = X.shape
    if n < 2:
        raise InvalidInputError(f"KDE needs at least 2 samples, got {n}")
    if bandwidth.H.shape[0] != d:
        raise InvalidInputError(
            f"bandwidth is {bandwidth.H.shape[0]}-dimensional, samples are {d}"
        )
    return KdeModel(samples=X, bandwidth=bandwidth, n=n, d=d)


def _log_kernel_const(bw: Bandwidth, d: int) -> float:
    return -0.5 * d * _LOG_2PI - 0.5 * bw.log_det_H


def gaussian_kernel(x, bw: Bandwidth) -> float:
    """Multivariate normal kernel K_H(x), computed through log space."""
    v = as_vector(x, "x")
    d = bw.H.shape[0]
    if v.shape[0] != d:
        raise InvalidInputError(f"x has length {v.shape[0]}, bandwidth is {d}-dim")
    quad = max(float(v @ bw.H_inv @ v), 0.0)
    return float(np.exp(_log_kernel_const(bw, d) - 0.5 * quad))


def density(model: KdeModel, query) -> float:
    """f(query) by direct summation over all samples (self included when the
    query is one of them)."""
    q = as_vector(query, "query")
    if q.shape[0] != model.d:
        raise InvalidInputError(
            f"query has length {q.shape[0]}, model is {model.d}-dimensional"
        )
    diffs = model.samples - q
    quad = np.maximum(np.einsum("ij,jk,ik->i", diffs, model.bandwidth.H_inv, diffs), 0.0)
    logk = _log_kernel_const(model.bandwidth, model.d) - 0.5 * quad
    return float(np.mean(np.exp(logk)))


def log_density_all(model: KdeModel, queries) -> np.ndarray:
    """log f(q) for every query row, via a log-sum-exp reduction.

    Agrees with exp-of-density wherever density() does not underflow, but
    stays finite for far queries in high dimension.
    """
    Q = as_matrix(queries, "queries")
    if Q.shape[1] != model.d:
        raise InvalidInputError(
            f"queries have {Q.shape[1]} columns, model is {model.d}-dimensional"
        )
    # Shift to the sample mean before expanding the quadratic form; the
    # expansion cancels badly for points far from the origin.
    shift = model.samples.mean(axis=0)
    X = model.samples - shift
    H_inv = model.bandwidth.H_inv
    const = _log_kernel_const(model.bandwidth, model.d)
    xx = np.einsum("ij,jk,ik->i", X, H_inv, X)

    out = np.empty(Q.shape[0])
    chunk = max(1, int(4_000_000 // model.n))
    for start in range(0, Q.shape[0], chunk):
        Qc = Q[start : start + chunk] - shift
        qq = np.einsum("ij,jk,ik->i", Qc, H_inv, Qc)
        cross = (Qc @ H_inv) @ X.T
        quad = np.maximum(qq[:, None] + xx[None, :] - 2.0 * cross, 0.0)
        logk = const - 0.5 * quad
        peak = logk.max(axis=1)
        out[start : start + chunk] = (
            peak
            + np.log(np.sum(np.exp(logk - peak[:, None]), axis=1))
            - np.log(model.n)
        )
    return out


def log_density_loo(model: KdeModel) -> np.ndarray:
    """log of the leave-one-out density of every sample point: the average
    kernel over the other n-1 samples.

    Dropping the self term is a uniform shift of the estimate, so the
    ranking matches the self-inclusive density in exact arithmetic. In high
    dimension it is also the only ranking float64 can represent: the self
    kernel K_H(0) dwarfs every other term, and the self-inclusive sum
    rounds to the same value for every point.
    """
    X = model.samples
    shift = X.mean(axis=0)
    Xs = X - shift
    H_inv = model.bandwidth.H_inv
    const = _log_kernel_const(model.bandwidth, model.d)
    xx = np.einsum("ij,jk,ik->i", Xs, H_inv, Xs)

    out = np.empty(model.n)
    chunk = max(1, int(4_000_000 // model.n))
    for start in range(0, model.n, chunk):
        Qc = Xs[start : start + chunk]
        qq = xx[start : start + chunk]
        cross = (Qc @ H_inv) @ Xs.T
        quad = np.maximum(qq[:, None] + xx[None, :] - 2.0 * cross, 0.0)
        logk = const - 0.5 * quad
        rows = np.arange(Qc.shape[0])
        logk[rows, start + rows] = -np.inf
        peak = logk.max(axis=1)
        out[start : start + chunk] = (
            peak
            + np.log(np.sum(np.exp(logk - peak[:, None]), axis=1))
            - np.log(model.n - 1)
        )
    return out
