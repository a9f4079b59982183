"""Acceptance gate: one test per criterion, each reported as a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary section
"acceptance criteria" lists every criterion in order.
"""
import math
import sys
import time

import numpy as np
import pytest

import oracles
from conftest import random_models
from msglass.bipartite import (
    BipartiteModel,
    bipartite_critical,
    bipartite_free_energy,
    bipartite_overlap,
    critical_point,
)
from msglass.critical import critical_residuals, g_and_derivative, qc_formula_residuals, solve_critical
from msglass.mcverify import (
    covariance_check,
    gradient_ascent_ground_state,
    replica_seed,
    small_beta_free_energy,
    split_sizes,
    wishart_ground_state,
)
from msglass.model import ModelSpec, xi_eval
from msglass.supercritical import find_y0, free_energy_at, gamma_vector, solve_supercritical, theta, upsilon

MODELS = random_models(50, seed=2024)


def criterion(n, title):
    return pytest.mark.criterion(n, title)


@criterion(1, "bipartite exactness, lambda=(1/2,1/2)")
def test_bipartite_exactness(record_property):
    m = BipartiteModel(0.5, 0.5)
    t0 = time.perf_counter()
    beta_c, e_star, q_c = bipartite_critical(m)
    elapsed = time.perf_counter() - t0
    err = max(abs(beta_c - 2**-0.5), abs(e_star - math.sqrt(2)))
    record_property("detail", f"max abs error {err:.1e}, {elapsed * 1e3:.3f} ms")
    assert err <= 1e-12
    assert np.all(q_c == 0)
    assert elapsed < 1e-3


@criterion(2, "dual-path agreement, 20 bipartite models x 16 betas")
def test_dual_path(record_property):
    rng = np.random.default_rng(42)
    cases = []
    for ls in rng.uniform(0.05, 0.95, size=20):
        m = BipartiteModel.from_lambda_s(float(ls))
        cases.append((m, m.to_model(), critical_point(m)))
    worst = 0.0
    t0 = time.perf_counter()
    for m, spec, cp in cases:
        for beta in cp.beta_c * np.linspace(5.0, 1.0, 16, endpoint=False)[::-1]:
            sol = solve_supercritical(spec, cp, float(beta))
            qs, qt, _ = bipartite_overlap(m, float(beta))
            f = bipartite_free_energy(m, float(beta))
            rel = np.abs(sol.q - [qs, qt]) / np.array([qs, qt])
            worst = max(worst, rel.max(), abs(sol.free_energy - f) / abs(f))
    elapsed = time.perf_counter() - t0
    record_property("detail", f"max rel diff {worst:.1e}, {elapsed:.3f} s")
    assert worst < 1e-10
    assert elapsed < 1.0


@criterion(3, "critical-point residuals, 50 random models")
def test_critical_residuals(record_property):
    t0 = time.perf_counter()
    worst_eq, worst_qc = 0.0, 0.0
    for m in MODELS:
        cp = solve_critical(m)
        worst_eq = max(worst_eq, critical_residuals(m, cp.beta_c, cp.q_c, cp.e_star)["max"])
        worst_qc = max(worst_qc, qc_formula_residuals(m, cp.q_c).max())
    elapsed = time.perf_counter() - t0
    record_property("detail", f"max residual {worst_eq:.1e} / {worst_qc:.1e}, {elapsed:.3f} s")
    assert worst_eq < 1e-9 and worst_qc < 1e-9
    assert elapsed < 2.0


@criterion(4, "self-consistency y* = beta sqrt(xi(q))")
def test_self_consistency(record_property):
    worst = 0.0
    for m in MODELS:
        cp = solve_critical(m)
        for f in (1.1, 2.0, 5.0):
            sol = solve_supercritical(m, cp, f * cp.beta_c)
            ref = sol.beta * math.sqrt(xi_eval(m, sol.q))
            worst = max(worst, abs(sol.y_star - ref) / ref)
    record_property("detail", f"max rel diff {worst:.1e}")
    assert worst < 1e-10


def _upsilon_window(m, g, y0, target):
    # Upsilon(y0) <= target, so both loops leave y0 and the window brackets both crossings
    lo = hi = y0
    while upsilon(m, g, lo)[0] <= target:
        lo /= 10.0
    while upsilon(m, g, hi)[0] <= target:
        hi *= 10.0
    return lo, hi


@criterion(5, "Theta/Upsilon structure suite")
def test_structure(record_property):
    ys = np.linspace(-5.0, 5.0, 1001)
    worst_theta = 0.0
    for m in MODELS:
        assert all(theta(m, y)[2] > 0 for y in ys)
        cp = solve_critical(m)
        worst_theta = max(worst_theta, abs(theta(m, math.sqrt(cp.phi_qc))[0] - cp.e_star) / cp.e_star)
        g = gamma_vector(m, cp.phi_qc)
        y0, _ = find_y0(m, g)
        for f in (1.1, 2.0, 5.0):
            target = (f * cp.beta_c) ** 2
            lo, hi = _upsilon_window(m, g, y0, target)
            grid = np.geomspace(lo, hi, 10_000)
            vals = np.array([upsilon(m, g, y)[0] for y in grid])
            slope = np.sign(np.diff(vals))
            slope = slope[slope != 0]  # exact ties at the grid minimum
            assert slope[0] < 0 < slope[-1] and np.count_nonzero(np.diff(slope)) == 1, (m, f)
            assert len(oracles.sign_changes_on_grid(lambda y: upsilon(m, g, y)[0] - target, grid)) == 2
        zs = np.logspace(-10, 10, 2001)
        gp = np.array([g_and_derivative(m, z)[1] for z in zs])
        assert np.all(np.diff(gp) >= 0.0)
    record_property("detail", f"Theta(E*-A*) rel err {worst_theta:.1e}")
    assert worst_theta < 1e-9


@criterion(6, "continuity and slope of F at beta_c")
def test_continuity(record_property):
    models = [m for m in MODELS if m.total_degree >= 3][:10]
    worst_gap, worst_slope = 0.0, 0.0
    h = 1e-6
    for m in models:
        cp = solve_critical(m)
        f_c = 0.5 * cp.beta_c**2 * xi_eval(m, np.ones(m.n_species))
        f_h = free_energy_at(m, cp, cp.beta_c + h)
        worst_gap = max(worst_gap, abs(f_h - f_c))
        worst_slope = max(worst_slope, abs((f_h - f_c) / h - cp.beta_c))
    record_property("detail", f"max gap {worst_gap:.1e}, max slope error {worst_slope:.1e}")
    assert worst_gap < 1e-4 and worst_slope < 1e-3


@criterion(7, "covariance identity at finite N")
def test_covariance(record_property):
    t0 = time.perf_counter()
    a = covariance_check(ModelSpec((0.5, 0.5), (1, 1)), (30, 30), 2000, 10, seed=7)
    b = covariance_check(ModelSpec((2 / 3, 1 / 3), (2, 1)), (40, 20), 2000, 10, seed=7)
    elapsed = time.perf_counter() - t0
    record_property("detail", f"max |z| {a.max_abs_z:.2f} and {b.max_abs_z:.2f}, {elapsed:.1f} s")
    assert a.passed and b.passed
    assert elapsed < 30.0


@criterion(8, "Wishart ground state, n=1000, 10 seeds")
def test_wishart(record_property):
    t0 = time.perf_counter()
    parts, ok = [], True
    for ls in (0.5, 0.25):
        limit = math.sqrt(ls) + math.sqrt(1 - ls)
        est = float(np.mean([wishart_ground_state(1000, ls, replica_seed(7, r)) for r in range(10)]))
        ok &= limit * 0.98 <= est <= limit * 1.005
        parts.append(f"{est:.4f}/{limit:.4f}")
    elapsed = time.perf_counter() - t0
    record_property("detail", f"estimate/limit {', '.join(parts)}, {elapsed:.1f} s")
    assert ok
    assert elapsed < 20.0


@pytest.mark.slow
@criterion(9, "gradient-ascent envelope, p=(2,1), N=150, 20 restarts")
def test_gradient_ascent(record_property):
    m = ModelSpec((2 / 3, 1 / 3), (2, 1))
    e_star = solve_critical(m).e_star
    est = gradient_ascent_ground_state(m, split_sizes(m, 150), 20, seed=7)
    record_property("detail", f"estimate {est:.4f}, E* {e_star:.4f}")
    assert e_star - 0.2 <= est <= e_star + 0.05


@criterion(10, "small-beta free energy smoke test")
def test_small_beta(record_property):
    m = ModelSpec((0.5, 0.5), (1, 1))
    est = small_beta_free_energy(m, (100, 100), 0.2, 100_000, seed=7)
    target = 0.5 * 0.2**2
    record_property("detail", f"estimate {est:.5f}, target {target:.5f}")
    assert abs(est - target) < 0.02


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
