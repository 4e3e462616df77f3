"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines.
"""

import contextlib
import math
import os
import sys
import time

import numpy as np
import pytest

from pkde.baselines import lof_score
from pkde.datasets import SynthSpec, gen_synthetic, load_csv
from pkde.detector import (
    DetectorConfig,
    detect,
    k_from_contamination,
    pkde_fit_score,
    top_k_select,
)
from pkde.kde import (
    Bandwidth,
    density,
    fit_kde,
    log_density_all,
    scott_bandwidth,
)
from pkde.linalg import covariance, sym_eigen
from pkde.metrics import f1_score
from pkde.pca import choose_dim, fit_pca, project

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "data")


@contextlib.contextmanager
def criterion(num, text):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {num:2d} FAIL: {text}", file=sys.stderr)
        raise
    print(f"ACCEPTANCE {num:2d} PASS: {text}")


def oracle_density(samples, H, query):
    """Double-loop linear-space reference estimate, independent of the
    library's evaluation path."""
    H_inv = np.linalg.inv(H)
    d = H.shape[0]
    norm = 1.0 / math.sqrt((2.0 * math.pi) ** d * np.linalg.det(H))
    total = 0.0
    for row in samples:
        diff = query - row
        quad = 0.0
        for a in range(d):
            for b in range(d):
                quad += diff[a] * H_inv[a, b] * diff[b]
        total += norm * math.exp(-0.5 * quad)
    return total / len(samples)


def test_criterion_1_kde_oracle_equivalence():
    with criterion(1, "density matches double-loop oracle, 50 random pairs"):
        rng = np.random.default_rng(100)
        start = time.perf_counter()
        for _ in range(50):
            n = int(rng.integers(5, 51))
            d = int(rng.integers(1, 6))
            X = rng.standard_normal((n, d)) * rng.uniform(0.5, 2.0)
            A = rng.standard_normal((d + 2, d))
            H = A.T @ A / (d + 1) + 0.1 * np.eye(d)
            bw = Bandwidth(
                H=H,
                H_inv=np.linalg.inv(H),
                log_det_H=float(np.log(np.linalg.det(H))),
                scott_factor=1.0,
            )
            model = fit_kde(X, bw)
            q = rng.standard_normal(d)
            expected = oracle_density(X, H, q)
            assert abs(density(model, q) - expected) <= 1e-10 * expected
        assert time.perf_counter() - start < 1.0


def test_criterion_2_eigendecomposition_soundness():
    with criterion(2, "eigendecomposition reconstructs 100 random PSD matrices"):
        rng = np.random.default_rng(101)
        start = time.perf_counter()
        for _ in range(100):
            d = int(rng.integers(1, 13))
            A = rng.standard_normal((d + int(rng.integers(0, 5)), d))
            S = A.T @ A
            eig = sym_eigen(S)
            V, lam = eig.eigenvectors, eig.eigenvalues
            recon = np.abs(V @ np.diag(lam) @ V.T - S).max()
            assert recon <= 1e-8 * max(1.0, np.abs(S).max())
            assert np.abs(V.T @ V - np.eye(d)).max() <= 1e-10
        assert time.perf_counter() - start < 5.0


def test_criterion_3_projection_covariance_diagonal():
    with criterion(3, "covariance of the PCA projection is diagonal"):
        rng = np.random.default_rng(102)
        for _ in range(20):
            n = int(rng.integers(10, 201))
            d = int(rng.integers(2, 21))
            X = rng.standard_normal((n, d)) @ rng.standard_normal((d, d))
            model = fit_pca(X)
            proj = project(model, X, d)
            S = covariance(proj)
            off = np.abs(S - np.diag(np.diag(S))).max()
            assert off <= 1e-8 * model.eigenvalues[0]


def test_criterion_4_scott_factor():
    with criterion(4, "Scott factor for n=100, d=2 is 0.46416"):
        bw = scott_bandwidth(np.eye(2), 100)
        assert abs(bw.scott_factor - 0.46416) <= 1e-5
        # high-precision scalar: 100^(-1/6) = 10^(-1/3)
        assert bw.scott_factor == pytest.approx(10.0 ** (-1.0 / 3.0), abs=1e-15)


def test_criterion_5_planted_outlier_exactness():
    with criterion(5, "planted 95+5 2D dataset detected with F1 = 1.0"):
        ds = gen_synthetic(
            SynthSpec(
                "gaussian-planted", n_normal=95, n_outlier=5, dim=2, seed=7,
                distance=10.0,
            )
        )
        result = pkde_fit_score(ds.X, DetectorConfig(contamination=0.05))
        assert f1_score(result.labels, ds.labels)["f1"] == 1.0


def test_criterion_6_high_dimensional_planted():
    with criterion(6, "dim=100 planted outliers: F1 >= 0.95 in under 10 s"):
        sym_eigen(np.eye(3))  # warm the jitted eigensolver
        start = time.perf_counter()
        ds = gen_synthetic(
            SynthSpec(
                "gaussian-planted", n_normal=475, n_outlier=25, dim=100,
                seed=3, distance=15.0,
            )
        )
        cfg = DetectorConfig(contamination=0.05, variance_threshold=0.9)
        result = pkde_fit_score(ds.X, cfg)
        assert f1_score(result.labels, ds.labels)["f1"] >= 0.95
        knn = detect("knn-dist", ds.X, cfg)
        assert int(knn.labels.sum()) == knn.k_used
        assert time.perf_counter() - start < 10.0


def test_criterion_7_leave_one_out_invariance():
    with criterion(7, "identical labels under self-inclusive and LOO scoring"):
        rng = np.random.default_rng(103)
        for _ in range(10):
            n = int(rng.integers(20, 80))
            d = int(rng.integers(2, 6))
            X = rng.standard_normal((n, d)) @ rng.standard_normal((d, d))
            cfg = DetectorConfig(contamination=0.1)
            result = pkde_fit_score(X, cfg)
            model = fit_pca(X)
            m = choose_dim(model, cfg.variance_threshold)
            reduced = project(model, X, m)
            bw = scott_bandwidth(covariance(reduced), n)
            kde = fit_kde(reduced, bw)
            self_scores = -log_density_all(kde, reduced)
            assert np.array_equal(
                result.labels, top_k_select(self_scores, result.k_used)
            )


def test_criterion_8_top_k_contract():
    with criterion(8, "top-K matches full-sort oracle for 1000 score vectors"):
        rng = np.random.default_rng(104)
        for _ in range(1000):
            n = int(rng.integers(1, 60))
            # small integer pool forces plenty of boundary ties
            scores = rng.integers(-5, 6, n).astype(float)
            c = float(rng.uniform(0.01, 0.5))
            k = k_from_contamination(c, n)
            assert k == math.ceil(c * n)
            labels = top_k_select(scores, k)
            order = sorted(range(n), key=lambda i: (-scores[i], i))
            expected = np.zeros(n, dtype=int)
            expected[order[:k]] = 1
            assert np.array_equal(labels, expected)
            assert int(labels.sum()) == k


FIXTURE_SHAPES = {
    "ecoli": (336, 7),
    "satimage": (6435, 36),
    "spectrometer": (531, 93),
    "yeast_ml8": (2417, 103),
}


def test_criterion_9_fixture_shapes():
    missing = [
        name
        for name in FIXTURE_SHAPES
        if not os.path.exists(os.path.join(DATA_DIR, f"{name}.csv"))
    ]
    if missing:
        msg = (
            f"ACCEPTANCE  9 SKIP: reference dataset fixtures not available: "
            f"{', '.join(missing)} (expected under data/<name>.csv)"
        )
        print(msg)
        pytest.skip(msg)
    with criterion(9, "reference dataset fixtures load with published shapes"):
        for name, (n, d) in FIXTURE_SHAPES.items():
            ds = load_csv(
                os.path.join(DATA_DIR, f"{name}.csv"), label_column="label"
            )
            assert ds.n == n, name
            assert ds.d == d, name


def test_criterion_10_timing_sanity():
    with criterion(10, "2417x103 PKDE under 5 s and faster than LOF"):
        sym_eigen(np.eye(3))  # warm the jitted eigensolver
        ds = gen_synthetic(
            SynthSpec(
                "gaussian-planted", n_normal=2296, n_outlier=121, dim=103,
                seed=11, distance=15.0,
            )
        )
        start = time.perf_counter()
        pkde_fit_score(ds.X, DetectorConfig(contamination=0.05))
        pkde_total = time.perf_counter() - start
        assert pkde_total < 5.0
        start = time.perf_counter()
        k = min(10, ds.n - 1)
        lof_score(ds.X, k)
        top_k_select(np.zeros(ds.n) + 1.0, 1)
        lof_total = time.perf_counter() - start
        assert pkde_total < lof_total


def test_criterion_11_f1_arithmetic():
    with criterion(11, "F1 arithmetic on the three reference cases"):
        truth = [0, 1, 0, 1, 0]
        perfect = f1_score(truth, truth)
        assert perfect["precision"] == perfect["recall"] == perfect["f1"] == 1.0
        half = f1_score([1, 1, 0, 0], [1, 0, 1, 0])
        assert half["precision"] == half["recall"] == half["f1"] == 0.5
        degenerate = f1_score([0, 0, 0], [0, 1, 1])
        assert degenerate["recall"] == 0.0
        assert degenerate["f1"] == 0.0
