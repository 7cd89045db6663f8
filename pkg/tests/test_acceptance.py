"""Acceptance criteria, one test each.

Each test records a ``PASS``/``FAIL`` line (criterion, measured quantity,
runtime against its budget); the lines are printed in the pytest terminal
summary and when this file is run as a script.
"""

import math
import time

import numpy as np
import pytest

from mtails import bounds, rmm, specmat
from mtails.harness import (
    CertSpec,
    Constant,
    DiagSubgaussian,
    DiscreteAtoms,
    Exponential,
    RademacherOuter,
    RmmSampler,
    exact_lemma2_check,
    exact_theorem3_check,
    lieb_concavity_check,
    mc_validate_many,
    mgf_identity_check,
    trial_statistics,
)
from mtails.tailfn import invert_phi, phi

RESULTS: dict[int, str] = {}


def record(num: int, ok: bool, detail: str, elapsed: float, budget: float) -> bool:
    ok = bool(ok) and elapsed < budget
    RESULTS[num] = f"{'PASS' if ok else 'FAIL'}  criterion {num:2d}: {detail} [{elapsed:.2f}s / {budget:g}s]"
    print(RESULTS[num])
    return ok


def test_01_tail_regime():
    t0 = time.perf_counter()
    t = 2.6 + 0.01 * np.arange(4741)
    grid_ok = bool(np.all(phi(t) <= np.exp(-t / 2)))
    worst = float(np.max(phi(t) - np.exp(-t / 2)))
    below, edge = phi(2.59), math.exp(-2.59 / 2)
    near_tight = below > edge
    detail = (f"grid t in [2.6, 50] holds={grid_ok} (max phi - e^(-t/2) = {worst:.3g}); "
              f"phi(2.59) = {below:.6f} > e^(-1.295) = {edge:.6f} is {near_tight}")
    assert record(1, grid_ok and near_tight, detail, time.perf_counter() - t0, 1.0)


def test_02_rademacher_parameters():
    t0 = time.perf_counter()
    worst = 0.0
    for d in range(2, 17):
        if d <= 12:
            second = RademacherOuter(d).brute_force_moments().second
        else:
            second = (d - 1) * np.eye(d)
        p = bounds.params_from_moments(d - 1, second, 100)
        worst = max(worst, abs(p.b_bar - (d - 1)), abs(p.sigma2_bar - (d - 1)), abs(p.k_bar - d))
    assert record(2, worst <= 1e-12, f"max |(b, sigma2, k) - (d-1, d-1, d)| = {worst:.3g} for d = 2..16",
                  time.perf_counter() - t0, 10.0)


def test_03_exact_enumeration():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    checks, worst = 0, -math.inf
    for _ in range(50):
        d, k, n = int(rng.integers(1, 4)), int(rng.integers(1, 4)), int(rng.integers(1, 6))
        raw = rng.standard_normal((k, d, d))
        e = DiscreteAtoms(0.5 * (raw + raw.transpose(0, 2, 1)), rng.dirichlet(np.ones(k)))
        r = exact_lemma2_check(e, n)
        worst = max(worst, r.lhs - r.rhs)
        checks += 1
        for eta in (0.25, 0.5, 1.0):
            for t in (0.5, 1.0, 2.0, 4.0):
                r = exact_theorem3_check(e, n, eta, t)
                worst = max(worst, r.lhs - r.rhs)
                checks += 1
    assert record(3, worst <= 1e-9, f"{checks} exact checks, max lhs - rhs = {worst:.3g}",
                  time.perf_counter() - t0, 60.0)


def test_04_lieb_concavity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    passed = 0
    for _ in range(500):
        h = rng.standard_normal((3, 3))
        a, b = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
        passed += lieb_concavity_check(h + h.T, a @ a.T + 0.05 * np.eye(3), b @ b.T + 0.05 * np.eye(3))
    assert record(4, passed == 500, f"{passed}/500 midpoint checks", time.perf_counter() - t0, 10.0)


def test_05_mgf_identity():
    t0 = time.perf_counter()
    ex = mgf_identity_check(Exponential(1.0), 0.5)
    co = mgf_identity_check(Constant(2.0), 1.0)
    ok = ex.lhs == 0.5 and abs(ex.rhs - 0.5) <= 1e-6 and abs(co.lhs - co.rhs) <= 1e-6
    detail = (f"Exp(1): lhs = {ex.lhs!r}, quadrature = {ex.rhs:.12g}; "
              f"W = 2: |lhs - rhs| = {abs(co.lhs - co.rhs):.3g}")
    assert record(5, ok, detail, time.perf_counter() - t0, 1.0)


MC_TRIALS = 100_000
MC_CONFIGS = [
    (RademacherOuter(4), "bernstein", 100),
    (DiagSubgaussian((1.0,) * 8), "subgaussian", 10),
    (RmmSampler(np.eye(4), np.eye(4)), "rmm_precise", 200),
]


def test_06_monte_carlo():
    t0 = time.perf_counter()
    lines, ok = [], True
    for seed, (ens, kind, n) in enumerate(MC_CONFIGS):
        for r in mc_validate_many(ens, kind, n, [4.0, 8.0], MC_TRIALS, alpha=1e-3, seed=seed):
            ok &= r.empirical <= r.bound + r.slack
            lines.append(f"{r.ensemble_id} t={r.t:g}: {r.empirical:.5f} <= {r.bound:.5f}+{r.slack:.5f}")
    assert record(6, ok, "; ".join(lines), time.perf_counter() - t0, 300.0)


def test_07_rmm_end_to_end():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    A = np.outer(rng.standard_normal(6), rng.standard_normal(50))
    B = np.outer(rng.standard_normal(5), rng.standard_normal(50))
    rA, rB = specmat.stable_rank(A), specmat.stable_rank(B)
    n = rmm.sample_size(rA, rB, 0.5, 0.1)
    ens = RmmSampler(A, B)
    target = ens.target("rmm_epsilon", n, math.log(10.0), eps=0.5)
    errs = trial_statistics(ens, "rmm_epsilon", n, 2000, seed=2024)
    freq = float(np.mean(errs > 0.5 * specmat.spectral_norm(A) * specmat.spectral_norm(B)))
    limit = 0.1 + math.sqrt(math.log(1000) / (2 * 2000))
    ok = n == 155 and target.deviation > 0 and freq <= limit
    assert record(7, ok, f"n = {n}, failure frequency {freq:.4f} <= {limit:.4f}",
                  time.perf_counter() - t0, 120.0)


def test_08_rmm_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    worst = 0.0
    rel = lambda x, y: abs(x - y) / max(abs(y), 1e-300)
    for _ in range(100):
        p, q, m = (int(v) for v in rng.integers(1, 7, 3))
        A, B = rng.standard_normal((p, m)), rng.standard_normal((q, m))
        atoms, probs = rmm.dilation_atoms(A, B)
        Z = rmm.build_plan(A, B).Z
        w = probs[:, None, None]
        mean = np.sum(w * atoms, axis=0)
        second = np.sum(w * (atoms @ atoms), axis=0)
        target = specmat.dilate(A @ B.T)
        worst = max(worst, rel(np.trace(second), 2 * Z * Z),
                    np.max(np.abs(mean - target)) / max(1.0, np.max(np.abs(target))),
                    max(rel(np.linalg.norm(x, 2), Z) for x in atoms))
        gram = np.trace(A.T @ A @ B.T @ B)
        worst = max(worst, max(0.0, (gram - Z * Z) / (Z * Z)))
    assert record(8, worst <= 1e-9, f"max relative defect over 100 pairs = {worst:.3g}",
                  time.perf_counter() - t0, 30.0)


def test_09_constants_bridge():
    t0 = time.perf_counter()
    d = np.arange(1, 65)[:, None]
    t = np.linspace(0.0, 100.0, 10001)[None, :]
    ok1 = np.all(32 * (d * math.log(9) + t / 2) <= 71 * d + 16 * t)
    ok2 = np.all(2 * (d * math.log(9) + t / 2) <= 5 * d + t)
    assert record(9, ok1 and ok2, f"64 x 10001 grid: 32-form {bool(ok1)}, 2-form {bool(ok2)}",
                  time.perf_counter() - t0, 1.0)


def test_10_inversion():
    t0 = time.perf_counter()
    ps = np.logspace(-9, 3, 121)
    worst = max(abs(phi(invert_phi(p)) - p) / p for p in ps)
    assert record(10, worst <= 1e-9, f"max relative error over 121 p in [1e-9, 1e3] = {worst:.3g}",
                  time.perf_counter() - t0, 1.0)


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                pass
