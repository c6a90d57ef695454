"""Time propagation, steady states and the Runge-Kutta reference integrator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .generators import build_optical_generator, build_population_generator
from .linalg import matrix_exponential, steady_nullspace
from .model import GROUND_STATE, SystemParams, derive_rates

#: Maximum tolerated sup-norm gap between the kernel solve and long-time propagation.
AGREEMENT_TOL = 1e-8


class MethodDisagreement(RuntimeError):
    """Kernel solve and long-time propagation give different steady states."""

    def __init__(self, agreement: float, horizon: float):
        super().__init__(
            f"steady state from kernel solve and propagation to t={horizon:.6g} differ by {agreement:.3e}"
        )
        self.agreement = agreement
        self.horizon = horizon


@dataclass
class TimeSeries:
    """Sampled trajectory.

    ``states`` has shape ``(n, 5)`` (population vector per sample); ``optical``
    is ``(n, 4)`` when the one-photon coherences were propagated.
    """

    times: np.ndarray
    states: np.ndarray
    optical: np.ndarray | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if self.times.ndim != 1 or self.states.shape != (self.times.size, 5):
            raise ValueError("times and states have inconsistent shapes")
        if self.optical is not None:
            self.optical = np.asarray(self.optical, dtype=float)
            if self.optical.shape != (self.times.size, 4):
                raise ValueError("optical states have inconsistent shape")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def __len__(self):
        return self.times.size

    @property
    def coherence(self) -> np.ndarray:
        """Complex excited-state coherence rho_ab per sample."""
        return self.states[:, 3] + 1j * self.states[:, 4]

    @property
    def coherence_magnitude(self) -> np.ndarray:
        return np.hypot(self.states[:, 3], self.states[:, 4])

    @property
    def trace(self) -> np.ndarray:
        return self.states[:, :3].sum(axis=1)


@dataclass(frozen=True)
class SteadyResult:
    x_ss: np.ndarray
    residual: float
    method_agreement: float
    coherence_magnitude: float
    coherence_ratio: float
    horizon: float


def _check_time(t: float) -> float:
    t = float(t)
    if not t >= 0 or not math.isfinite(t):
        raise ValueError(f"time must be finite and non-negative, got {t!r}")
    return t


def propagate(A, x0, t: float) -> np.ndarray:
    """``exp(A t) @ x0``."""
    t = _check_time(t)
    x0 = np.asarray(x0, dtype=float)
    if t == 0:
        return x0.copy()
    return matrix_exponential(np.asarray(A, dtype=float) * t) @ x0


def propagate_optical(C, z0, t: float) -> np.ndarray:
    """``exp(C t) @ z0`` for the one-photon coherence vector."""
    return propagate(C, z0, t)


def _propagate_grid(M, v0, t_grid: np.ndarray) -> np.ndarray:
    steps = np.diff(t_grid)
    out = np.empty((t_grid.size, v0.size))
    out[0] = propagate(M, v0, t_grid[0])
    if t_grid.size == 1:
        return out
    if np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        step = matrix_exponential(M * steps[0])
        for k in range(1, t_grid.size):
            out[k] = step @ out[k - 1]
    else:
        for k in range(1, t_grid.size):
            out[k] = matrix_exponential(M * t_grid[k]) @ v0
    return out


def time_series(A, x0, t_grid, C=None, z0=None) -> TimeSeries:
    """Sample ``x(t)`` (and ``z(t)`` when ``C`` is given) on ``t_grid``.

    A uniform grid reuses one step propagator; otherwise every sample gets its
    own exponential.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("time grid must be a non-empty 1-D array")
    if t_grid[0] < 0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("time grid must start at t >= 0 and be strictly increasing")
    A = np.asarray(A, dtype=float)
    states = _propagate_grid(A, np.asarray(x0, dtype=float), t_grid)
    optical = None
    if C is not None:
        z0 = np.zeros(4) if z0 is None else np.asarray(z0, dtype=float)
        optical = _propagate_grid(np.asarray(C, dtype=float), z0, t_grid)
    return TimeSeries(t_grid, states, optical)


def simulate(
    params: SystemParams,
    t_max: float,
    n_samples: int = 2048,
    x0=GROUND_STATE,
    include_optical: bool = False,
    z0=None,
) -> TimeSeries:
    """Trajectory on ``linspace(0, t_max, n_samples)`` in the units of ``params``."""
    if t_max <= 0 or n_samples < 2:
        raise ValueError("need t_max > 0 and at least two samples")
    rates = derive_rates(params)
    A = build_population_generator(params, rates)
    C = build_optical_generator(params, rates) if include_optical else None
    return time_series(A, x0, np.linspace(0.0, t_max, n_samples), C=C, z0=z0)


def _rk4_step_matrix(A: np.ndarray, h: float) -> np.ndarray:
    # Classical RK4 stages applied to every basis vector at once; for a linear
    # autonomous system one step is exactly this matrix acting on the state.
    ident = np.eye(A.shape[0])
    k1 = A
    k2 = A @ (ident + 0.5 * h * k1)
    k3 = A @ (ident + 0.5 * h * k2)
    k4 = A @ (ident + h * k3)
    return ident + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _rk4_fixed(A: np.ndarray, x0: np.ndarray, t: float, dt: float) -> tuple[np.ndarray, int]:
    n_steps = max(1, math.ceil(t / dt - 1e-12))
    step = _rk4_step_matrix(A, t / n_steps)
    return np.linalg.matrix_power(step, n_steps) @ x0, n_steps


def rk4_oracle(A, x0, t: float, dt: float | None = None, tol: float = 1e-10, max_steps: int = 10**7) -> np.ndarray:
    """Fixed-step fourth-order Runge-Kutta solution of ``dx/dt = A x`` at ``t``.

    With ``dt`` given, ``ceil(t/dt)`` equal steps are taken (``dt`` must not
    exceed ``0.1 / ||A||_1``). Without it the step starts at ``1e-3/||A||_1``
    and is halved until two successive results differ by less than ``tol``.
    The ``n`` steps are composed by repeated squaring of the one-step map,
    which is algebraically identical to stepping ``n`` times.
    """
    t = _check_time(t)
    A = np.asarray(A, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if t == 0:
        return x0.copy()
    norm = np.linalg.norm(A, 1)
    if norm == 0:
        return x0.copy()
    if dt is not None:
        if not dt > 0:
            raise ValueError("dt must be positive")
        if dt > 0.1 / norm * (1 + 1e-12):
            raise ValueError(f"dt = {dt:.3g} exceeds the stability bound 0.1/||A||_1 = {0.1 / norm:.3g}")
        return _rk4_fixed(A, x0, t, dt)[0]

    dt = 1e-3 / norm
    previous, n_steps = _rk4_fixed(A, x0, t, dt)
    while True:
        dt *= 0.5
        if t / dt > max_steps:
            raise RuntimeError(f"RK4 did not converge to {tol:g} within {max_steps} steps")
        current, n_steps = _rk4_fixed(A, x0, t, dt)
        if np.max(np.abs(current - previous)) < tol:
            return current
        previous = current


def spectral_gap(A) -> float:
    """Slowest nonzero relaxation rate: smallest ``|Re lambda|`` once the stationary eigenvalue is dropped."""
    ev = np.linalg.eigvals(np.asarray(A, dtype=float))
    ev = ev[np.argsort(np.abs(ev))][1:]
    return float(np.min(np.abs(ev.real))) if ev.size else math.inf


def relaxation_horizon(params: SystemParams, A=None) -> float:
    """Propagation time used as the stand-in for ``t -> infinity``.

    The rate estimates alone miss slow near-dark modes at ``|p| -> 1``, so
    the horizon also covers 30 e-folds of the slowest eigenmode of ``A``.
    """
    rates = derive_rates(params)
    mean_pol = 0.5 * (rates.gamma_a_pol + rates.gamma_b_pol)
    if A is None:
        A = build_population_generator(params, rates)
    gap = spectral_gap(A)
    return max(
        100.0 / params.gamma_bar,
        20.0 / (params.n_bar * mean_pol + params.gamma_bar),
        20.0 / min(params.gamma_a_iso, params.gamma_b_iso),
        30.0 / gap if gap > 0 else 0.0,
    )


def steady_state(params: SystemParams, x0=GROUND_STATE, horizon: float | None = None) -> SteadyResult:
    """Stationary population vector, cross-checked by long-time propagation.

    Raises
    ------
    DegenerateKernel
        From the kernel solve.
    MethodDisagreement
        When the two routes differ by more than :data:`AGREEMENT_TOL`.
    """
    A = build_population_generator(params)
    x_ss = steady_nullspace(A)
    residual = float(np.max(np.abs(A @ x_ss)))
    T = relaxation_horizon(params, A) if horizon is None else float(horizon)
    x_long = propagate(A, x0, T)
    agreement = float(np.max(np.abs(x_ss - x_long)))
    if not agreement <= AGREEMENT_TOL:
        raise MethodDisagreement(agreement, T)
    magnitude = float(math.hypot(x_ss[3], x_ss[4]))
    excited = x_ss[0] + x_ss[1]
    ratio = magnitude / excited if excited > 1e-15 else math.nan
    return SteadyResult(
        x_ss=x_ss,
        residual=residual,
        method_agreement=agreement,
        coherence_magnitude=magnitude,
        coherence_ratio=ratio,
        horizon=T,
    )
