import math

import mpmath
import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from fano_sim.dynamics import propagate
from fano_sim.generators import build_population_generator
from fano_sim.linalg import (
    THETA_13,
    DegenerateKernel,
    hermitian3_eigenvalues,
    matrix_exponential,
    scaling_exponent,
    steady_nullspace,
)
from fano_sim.model import SystemParams, density_from_state

from conftest import reference_params, random_params


def mp_expm(M, dps=50):
    mpmath.mp.dps = dps
    return np.array(mpmath.expm(mpmath.matrix(M.tolist())).tolist(), dtype=float)


def test_exp_of_zero_is_identity():
    np.testing.assert_allclose(matrix_exponential(np.zeros((4, 4))), np.eye(4), rtol=0, atol=1e-15)


def test_exp_of_diagonal():
    E = matrix_exponential(np.diag([-1.0, -2.0]))
    np.testing.assert_allclose(E, np.diag([math.exp(-1), math.exp(-2)]), rtol=1e-15, atol=1e-16)


@pytest.mark.parametrize("angle", [math.pi / 2, 0.3, 10.0, 250.0])
def test_exp_of_generator_is_rotation(angle):
    E = matrix_exponential(np.array([[0.0, angle], [-angle, 0.0]]))
    c, s = math.cos(angle), math.sin(angle)
    np.testing.assert_allclose(E, [[c, s], [-s, c]], atol=1e-13 * max(1.0, angle / 10))


def test_quarter_turn():
    E = matrix_exponential(np.array([[0.0, math.pi / 2], [-math.pi / 2, 0.0]]))
    np.testing.assert_allclose(E, [[0, 1], [-1, 0]], atol=1e-13)


def test_against_high_precision_on_generators(rng):
    for scale in (0.1, 1.0, 20.0, 200.0):
        for _ in range(5):
            M = build_population_generator(random_params(rng)) * scale
            ref = mp_expm(M)
            err = np.linalg.norm(matrix_exponential(M) - ref, 1) / np.linalg.norm(ref, 1)
            assert err <= 1e-12


def test_against_high_precision_random_dense(rng):
    for n in (3, 4, 5, 8):
        M = rng.normal(size=(n, n)) * 3
        ref = mp_expm(M)
        err = np.linalg.norm(matrix_exponential(M) - ref, 1) / np.linalg.norm(ref, 1)
        assert err <= 1e-12


@settings(max_examples=60, deadline=None)
@given(hnp.arrays(np.float64, (5, 5), elements=st.floats(-20, 20)))
def test_agrees_with_high_precision(M):
    ref = mp_expm(M, dps=40)
    scale = max(np.linalg.norm(ref, 1), 1e-300)
    assert np.linalg.norm(matrix_exponential(M) - ref, 1) / scale <= 1e-11


def test_agrees_with_scipy_on_generators(rng):
    for _ in range(50):
        M = build_population_generator(random_params(rng)) * float(rng.uniform(0.01, 100))
        ref = scipy.linalg.expm(M)
        assert np.linalg.norm(matrix_exponential(M) - ref, 1) / np.linalg.norm(ref, 1) <= 1e-12


def test_scaling_exponent_meets_threshold(rng):
    for norm in (0.5, THETA_13, 6.0, 1e3, 1e6):
        M = rng.normal(size=(5, 5))
        M *= norm / np.linalg.norm(M, 1)
        s = scaling_exponent(M)
        assert np.linalg.norm(M, 1) / 2**s <= THETA_13
        if s:
            assert np.linalg.norm(M, 1) / 2 ** (s - 1) > THETA_13


def test_semigroup_on_generators(rng):
    for _ in range(30):
        A = build_population_generator(random_params(rng))
        t1, t2 = rng.uniform(0, 50, size=2)
        lhs = matrix_exponential(A * t1) @ matrix_exponential(A * t2)
        np.testing.assert_allclose(lhs, matrix_exponential(A * (t1 + t2)), atol=1e-10)


@pytest.mark.parametrize("bad", [np.nan, np.inf])
def test_rejects_non_finite(bad):
    M = np.zeros((3, 3))
    M[1, 2] = bad
    with pytest.raises(ValueError):
        matrix_exponential(M)


def test_steady_without_pump_is_ground(rng):
    for _ in range(10):
        params = SystemParams.dimensionless(gamma_ratio=float(rng.uniform(0.1, 10)), delta_over_gamma=float(rng.uniform(0, 5)))
        x = steady_nullspace(build_population_generator(params))
        np.testing.assert_allclose(x, [0, 0, 1, 0, 0], atol=1e-15)


def test_steady_strong_pump_matches_long_propagation():
    A = build_population_generator(reference_params("c"))
    x = steady_nullspace(A)
    assert 0.15 < math.hypot(x[3], x[4]) < 0.25
    assert x[:3].sum() == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(propagate(A, [0, 0, 1, 0, 0], 200.0), x, atol=1e-8)


def test_steady_symmetric_overdamped_weak_pump():
    x = steady_nullspace(build_population_generator(reference_params("b")))
    assert x[0] == pytest.approx(x[1], rel=1e-12)
    assert math.hypot(x[3], x[4]) == pytest.approx(x[0], rel=0.05)


def test_steady_residual_and_fixed_point(rng):
    for _ in range(30):
        A = build_population_generator(random_params(rng))
        x = steady_nullspace(A)
        assert np.max(np.abs(A @ x)) <= 1e-11 * np.linalg.norm(A, 1)
        np.testing.assert_allclose(matrix_exponential(A * 100.0) @ x, x, atol=1e-9)


def test_degenerate_kernel_detected():
    with pytest.raises(DegenerateKernel):
        steady_nullspace(np.zeros((5, 5)))
    # parallel dipoles, isotropic field, degenerate levels: a dark state doubles the kernel
    A = build_population_generator(SystemParams(p=1.0, n_bar=1.0, delta=0.0, field_mode="isotropic"))
    with pytest.raises(DegenerateKernel):
        steady_nullspace(A)


def cardano_eigenvalues(H):
    """Closed-form eigenvalues of a 3x3 Hermitian matrix (trigonometric form)."""
    H = np.asarray(H, dtype=complex)
    q = np.trace(H).real / 3
    K = H - q * np.eye(3)
    p = math.sqrt(max(np.trace(K @ K).real / 6, 0.0))
    if p == 0:
        return np.array([q, q, q])
    r = np.clip(np.linalg.det(K / p).real / 2, -1, 1)
    phi = math.acos(r) / 3
    e1 = q + 2 * p * math.cos(phi)
    e3 = q + 2 * p * math.cos(phi + 2 * math.pi / 3)
    return np.sort([e1, 3 * q - e1 - e3, e3])


def test_eigenvalues_simple_cases():
    np.testing.assert_allclose(hermitian3_eigenvalues(np.eye(3) / 3), [1 / 3] * 3, atol=1e-15)
    np.testing.assert_allclose(hermitian3_eigenvalues(np.diag([0, 0, 1.0])), [0, 0, 1], atol=1e-15)
    rho = density_from_state([0.5, 0.5, 0, 0.5, 0])
    np.testing.assert_allclose(hermitian3_eigenvalues(rho), [0, 0, 1], atol=1e-15)


def test_eigenvalues_against_closed_form(rng):
    for _ in range(200):
        G = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        H = G + G.conj().T
        ev = hermitian3_eigenvalues(H)
        np.testing.assert_allclose(ev, cardano_eigenvalues(H), atol=1e-9 * np.abs(ev).max())
        assert ev.sum() == pytest.approx(np.trace(H).real, abs=1e-12 * np.abs(H).max() * 3)


def test_eigenvalues_invariant_under_level_permutation(rng):
    G = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    H = G @ G.conj().T
    P = np.eye(3)[[2, 0, 1]]
    np.testing.assert_allclose(hermitian3_eigenvalues(P @ H @ P.T), hermitian3_eigenvalues(H), atol=1e-13)


def test_eigenvalues_reject_non_hermitian():
    M = np.zeros((3, 3), dtype=complex)
    M[0, 1] = 1e-6
    with pytest.raises(ValueError):
        hermitian3_eigenvalues(M)


def test_propagator_preserves_trace(rng):
    for _ in range(100):
        A = build_population_generator(random_params(rng))
        E = matrix_exponential(A * float(rng.uniform(0, 100)))
        np.testing.assert_allclose(E[:3].sum(axis=0), [1, 1, 1, 0, 0], atol=1e-11)
