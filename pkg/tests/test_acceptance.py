"""End-to-end acceptance checks at their stated tolerances.

Each test records one PASS/FAIL line; the lines are repeated in the pytest
terminal summary under "acceptance criteria".
"""

import math
import time

import numpy as np
import pytest

from fano_sim.analysis import (
    coherence_lifetime,
    derivative_sign_changes,
    oscillation_frequency,
    positivity_report,
    sweep_steady,
)
from fano_sim.dynamics import propagate, rk4_oracle, simulate, steady_state, time_series
from fano_sim.generators import build_population_generator
from fano_sim.linalg import matrix_exponential
from fano_sim.model import GROUND_STATE, POLARIZED_FRACTION, SystemParams, derive_rates

from conftest import REFERENCE_CASES, reference_params, random_params

T_END = 20.0
N_SAMPLES = 2048
N_AXIS = np.geomspace(0.01, 345, 20)
D_AXIS = np.geomspace(0.01, 10, 20)


@pytest.fixture(scope="module")
def grids():
    start = time.perf_counter()
    sym = sweep_steady(SystemParams(), N_AXIS, D_AXIS)
    elapsed = time.perf_counter() - start
    asym = sweep_steady(SystemParams.dimensionless(gamma_ratio=10.0), N_AXIS, D_AXIS)
    return sym, asym, elapsed


def test_01_oracle_equivalence(verdict):
    start = time.perf_counter()
    times = np.linspace(0.0, T_END, 21)
    worst = 0.0
    for panel in sorted(REFERENCE_CASES):
        A = build_population_generator(reference_params(panel))
        for t in times:
            gap = np.max(np.abs(propagate(A, GROUND_STATE, t) - rk4_oracle(A, GROUND_STATE, t)))
            worst = max(worst, float(gap))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 10.0
    assert verdict(1, "oracle equivalence", ok, f"max |expm - rk4| = {worst:.2e} (<= 1e-8), {elapsed:.2f} s (< 10 s)")


def test_02_trace_and_positivity(verdict):
    worst_trace, worst_eig = 0.0, math.inf
    for panel in sorted(REFERENCE_CASES):
        s = simulate(reference_params(panel), T_END, N_SAMPLES)
        worst_trace = max(worst_trace, float(np.max(np.abs(s.trace - 1.0))))
        worst_eig = min(worst_eig, positivity_report(s).min_eigenvalue)
    ok = worst_trace <= 1e-11 and worst_eig >= -1e-9
    assert verdict(2, "trace and positivity", ok, f"max trace error {worst_trace:.2e} (<= 1e-11), min eigenvalue {worst_eig:.2e} (>= -1e-9)")


def test_03_steady_state_consistency(verdict, grids):
    sym, _, elapsed = grids
    worst = float(np.nanmax(sym.method_agreement))
    ok = bool(sym.valid.all()) and worst <= 1e-8 and elapsed < 30.0
    assert verdict(
        3, "steady-state consistency", ok,
        f"{int(sym.valid.sum())}/400 cells valid, max |nullspace - propagation| = {worst:.2e} (<= 1e-8), {elapsed:.2f} s (< 30 s)",
    )


def test_04_quarter_bound(verdict, grids):
    sym, _, _ = grids
    top = float(np.nanmax(sym.coherence_magnitude))
    ok = top <= 0.25 + 1e-9 and top > 0.20
    assert verdict(4, "coherence bound", ok, f"max |rho_ab| = {top:.6f} (<= 0.25, > 0.20)")


def test_05_ratio_bound(verdict, grids):
    sym, _, _ = grids
    top = float(np.nanmax(sym.coherence_ratio))
    corner = float(sym.coherence_ratio[-1, 0])
    ok = top <= 0.5 + 1e-9 and corner >= 0.45
    assert verdict(5, "coherence ratio", ok, f"max ratio = {top:.6f} (<= 0.5), corner ratio = {corner:.6f} (>= 0.45)")


def test_06_underdamped_frequency(verdict):
    params = reference_params("a")
    omega = oscillation_frequency(simulate(params, T_END, N_SAMPLES))
    rel = abs(omega - params.delta) / params.delta if omega is not None else math.inf
    ok = rel <= 0.05
    assert verdict(6, "underdamped oscillation", ok, f"FFT frequency {omega} vs delta {params.delta:g}, relative error {rel:.2%} (<= 5%)")


def test_07_overdamped_monotonicity(verdict):
    s = simulate(reference_params("b"), T_END, N_SAMPLES)
    resolved = derivative_sign_changes(s, t_min=2.0)
    raw = derivative_sign_changes(s, t_min=2.0, rtol=0.0)
    ok = resolved == 0
    assert verdict(
        7, "overdamped monotonicity", ok,
        f"{resolved} slope sign changes after t = 2 above 1e-9 of max|rho_ab| (unfloored count {raw})",
    )


def test_08_lifetime(verdict):
    s = simulate(reference_params("a"), T_END, N_SAMPLES)
    gap = abs(s.coherence_magnitude[-1] - s.coherence_magnitude[0])
    tau = coherence_lifetime(s, 0.05 * gap)
    ok = 1.0 / 3.0 <= tau <= 3.0
    assert verdict(8, "coherence lifetime", ok, f"tau = {tau:.3f} / gamma_bar (within a factor 3 of 1)")


def test_09_symmetric_dominance(verdict, grids):
    sym, asym, _ = grids
    margin = float(np.nanmin(sym.coherence_magnitude - asym.coherence_magnitude))
    ok = bool(asym.valid.all()) and margin >= 0.0
    assert verdict(9, "symmetric dominance", ok, f"min (symmetric - asymmetric) |rho_ab| over 400 cells = {margin:.3e} (>= 0)")


def test_10_null_tests(verdict):
    ground = steady_state(SystemParams.dimensionless(n_bar=0.0, delta_over_gamma=1.0)).x_ss
    ground_err = float(np.max(np.abs(ground - GROUND_STATE)))
    worst_coh = 0.0
    times = np.linspace(0.0, T_END, N_SAMPLES)
    for panel in sorted(REFERENCE_CASES):
        ratio, dog, n_bar = REFERENCE_CASES[panel]
        params = SystemParams.dimensionless(gamma_ratio=ratio, delta_over_gamma=dog, n_bar=n_bar, field_mode="isotropic")
        A = build_population_generator(params)
        for x0 in (GROUND_STATE, np.array([0.3, 0.2, 0.5, 0.0, 0.0])):
            worst_coh = max(worst_coh, float(np.max(time_series(A, x0, times).coherence_magnitude)))
    ok = ground_err <= 1e-10 and worst_coh <= 1e-12
    assert verdict(10, "null tests", ok, f"n_bar = 0 distance to ground {ground_err:.1e} (<= 1e-10), isotropic p = 0 max |rho_ab| {worst_coh:.1e} (<= 1e-12)")


def test_11_rate_identity(verdict):
    target = 3.0 / (16.0 * math.pi)
    worst = 0.0
    for gamma in (1.0, 0.37, 2 * math.pi * 5.75e6, 1e-3):
        rates = derive_rates(SystemParams(gamma_a_iso=gamma, gamma_b_iso=gamma))
        worst = max(worst, abs(rates.gamma_a_pol / gamma - target) / target)
    ok = POLARIZED_FRACTION == target and worst <= 2 * np.finfo(float).eps
    assert verdict(11, "polarized rate identity", ok, f"gamma_pol/gamma_iso relative error {worst:.1e} (<= 2 eps)")


def test_12_linalg_properties(verdict):
    rng = np.random.default_rng(12)
    semigroup = 0.0
    for _ in range(20):
        A = build_population_generator(random_params(rng))
        t1, t2 = rng.uniform(0, 20, size=2)
        gap = matrix_exponential(A * t1) @ matrix_exponential(A * t2) - matrix_exponential(A * (t1 + t2))
        semigroup = max(semigroup, float(np.max(np.abs(gap))))
    rotation = 0.0
    for angle in (math.pi / 2, 1.0, 10.0):
        R = matrix_exponential(np.array([[0.0, angle], [-angle, 0.0]]))
        c, s = math.cos(angle), math.sin(angle)
        rotation = max(rotation, float(np.max(np.abs(R - [[c, s], [-s, c]]))))
    trace = 0.0
    for seed in range(100):
        A = build_population_generator(random_params(np.random.default_rng(seed)))
        E = matrix_exponential(A * float(np.random.default_rng(seed).uniform(0, 100)))
        trace = max(trace, float(np.max(np.abs(E[:3].sum(axis=0) - [1, 1, 1, 0, 0]))))
    ok = semigroup <= 1e-10 and rotation <= 1e-10 and trace <= 1e-11
    assert verdict(12, "matrix exponential", ok, f"semigroup {semigroup:.1e}, rotation {rotation:.1e} (<= 1e-10), trace over 100 seeds {trace:.1e} (<= 1e-11)")
