"""Coherence metrics, regime labels, trajectory diagnostics and parameter sweeps."""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .dynamics import MethodDisagreement, TimeSeries, steady_state
from .linalg import DegenerateKernel, hermitian3_eigenvalues
from .model import InvalidParameters, SystemParams, density_from_state

# Regime thresholds on delta/gamma_bar and n_bar. Labels are metadata only.
UNDERDAMPED_MIN = 5.0
OVERDAMPED_MAX = 0.2
STRONG_MIN = 5.0
WEAK_MAX = 0.2


class NoExcitedPopulation(ValueError):
    """The coherence ratio is undefined for an empty excited manifold."""


class NotConverged(RuntimeError):
    """The trajectory has not settled within the sampled window."""


class Damping(str, enum.Enum):
    UNDERDAMPED = "underdamped"
    OVERDAMPED = "overdamped"
    CROSSOVER = "crossover"


class Pumping(str, enum.Enum):
    WEAK = "weak"
    STRONG = "strong"
    INTERMEDIATE = "intermediate"


@dataclass(frozen=True)
class RegimeLabel:
    damping: Damping
    pumping: Pumping


def coherence_magnitude(x) -> float:
    """``|rho_ab|`` of a population vector."""
    return float(math.hypot(x[3], x[4]))


def coherence_ratio(x) -> float:
    """``|rho_ab| / (rho_aa + rho_bb)``; at most 1/2 for a positive state."""
    excited = float(x[0] + x[1])
    if excited <= 1e-15:
        raise NoExcitedPopulation(f"excited population {excited:.3g} is too small")
    return coherence_magnitude(x) / excited


def classify_regime(params: SystemParams) -> RegimeLabel:
    ratio = abs(params.delta_over_gamma)
    if ratio >= UNDERDAMPED_MIN:
        damping = Damping.UNDERDAMPED
    elif ratio <= OVERDAMPED_MAX:
        damping = Damping.OVERDAMPED
    else:
        damping = Damping.CROSSOVER
    if params.n_bar >= STRONG_MIN:
        pumping = Pumping.STRONG
    elif params.n_bar <= WEAK_MAX:
        pumping = Pumping.WEAK
    else:
        pumping = Pumping.INTERMEDIATE
    return RegimeLabel(damping, pumping)


def _uniform_step(times: np.ndarray) -> float:
    steps = np.diff(times)
    if steps.size == 0 or not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
        raise ValueError("a uniform time grid is required")
    return float(steps[0])


def oscillation_frequency(series: TimeSeries, steady_value: float | None = None, min_peak_ratio: float = 10.0):
    """Dominant angular frequency of ``Re rho_ab(t)``, or ``None`` if there is none.

    The signal minus its stationary value (default: the last sample) is
    Hann-windowed and Fourier transformed; the strongest non-DC bin is refined
    by a three-point parabola. A peak below ``min_peak_ratio`` times the median
    spectral power is treated as absent.
    """
    dt = _uniform_step(series.times)
    signal = series.states[:, 3]
    baseline = signal[-1] if steady_value is None else steady_value
    signal = (signal - baseline) * np.hanning(signal.size)
    power = np.abs(np.fft.rfft(signal)) ** 2
    freqs = 2.0 * np.pi * np.fft.rfftfreq(signal.size, dt)
    body = power[1:]
    if body.size < 3 or not np.any(body > 0):
        return None
    k = int(np.argmax(body)) + 1
    if power[k] < min_peak_ratio * np.median(body):
        return None
    offset = 0.0
    if 1 < k < power.size - 1:
        left, mid, right = power[k - 1], power[k], power[k + 1]
        denom = left - 2.0 * mid + right
        if denom != 0:
            offset = 0.5 * (left - right) / denom
    return float(freqs[k] + offset * (freqs[1] - freqs[0]))


def coherence_lifetime(series: TimeSeries, epsilon: float) -> float:
    """Earliest time after which ``|rho_ab|`` stays within ``epsilon`` of its final value.

    The crossing is located by linear interpolation between samples.

    Raises
    ------
    NotConverged
        If the last 10% of samples still vary by ``epsilon/10`` or more.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    mag = series.coherence_magnitude
    times = series.times
    tail = mag[-max(2, mag.size // 10):]
    if np.ptp(tail) >= epsilon / 10.0:
        raise NotConverged(f"tail of |rho_ab| varies by {np.ptp(tail):.3g} >= {epsilon / 10:.3g}")
    gap = np.abs(mag - mag[-1])
    outside = np.nonzero(gap > epsilon)[0]
    if outside.size == 0:
        return float(times[0])
    i = int(outside[-1])
    g0, g1 = gap[i], gap[i + 1]
    frac = (g0 - epsilon) / (g0 - g1)
    return float(times[i] + frac * (times[i + 1] - times[i]))


def derivative_sign_changes(series: TimeSeries, t_min: float = 0.0, rtol: float = 1e-9) -> int:
    """Number of sign changes of the sampled slope of ``|rho_ab|`` after ``t_min``.

    Increments smaller than ``rtol * max|rho_ab|`` are below resolution and
    carry no sign.
    """
    mag = series.coherence_magnitude
    slope = np.diff(mag)
    keep = series.times[1:] > t_min
    slope = slope[keep]
    floor = rtol * float(np.max(np.abs(mag))) if mag.size else 0.0
    signs = np.sign(slope[np.abs(slope) > floor])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


@dataclass(frozen=True)
class PositivityReport:
    min_eigenvalue: float
    time_of_min: float
    violated: bool


def positivity_report(series: TimeSeries, tol: float = 1e-9) -> PositivityReport:
    """Smallest density-matrix eigenvalue along the trajectory."""
    worst = math.inf
    when = float(series.times[0])
    for k, t in enumerate(series.times):
        z = None if series.optical is None else series.optical[k]
        lowest = hermitian3_eigenvalues(density_from_state(series.states[k], z))[0]
        if lowest < worst:
            worst, when = float(lowest), float(t)
    return PositivityReport(min_eigenvalue=worst, time_of_min=when, violated=worst < -tol)


@dataclass
class SweepResult:
    """Steady-state metrics on an ``(n_bar, delta/gamma_bar)`` grid.

    2-D arrays are indexed ``[i_n_bar, i_delta]``. Cells whose computation
    failed carry NaN and ``valid = False``; their messages are in ``errors``.
    """

    n_bar_axis: np.ndarray
    delta_over_gamma_axis: np.ndarray
    coherence_magnitude: np.ndarray
    coherence_ratio: np.ndarray
    population_a: np.ndarray
    population_b: np.ndarray
    method_agreement: np.ndarray
    valid: np.ndarray
    errors: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.coherence_magnitude.shape


def cell_params(template: SystemParams, n_bar: float, delta_over_gamma: float) -> SystemParams:
    """``template`` with the pump strength and splitting of one grid cell."""
    delta = delta_over_gamma * template.gamma_bar
    params = replace(template, n_bar=n_bar, delta=delta, omega_ac=0.0, omega_bc=0.0)
    if template.omega_ac and template.omega_bc:
        params = replace(params, omega_ac=template.omega_bc + delta, omega_bc=template.omega_bc)
    return params


def _evaluate_cell(args):
    template, n_bar, delta_over_gamma = args
    try:
        result = steady_state(cell_params(template, n_bar, delta_over_gamma))
    except (DegenerateKernel, MethodDisagreement, InvalidParameters, np.linalg.LinAlgError) as exc:
        return None, f"{type(exc).__name__}: {exc}"
    return (
        result.coherence_magnitude,
        result.coherence_ratio,
        float(result.x_ss[0]),
        float(result.x_ss[1]),
        result.method_agreement,
    ), None


def sweep_steady(template: SystemParams, n_bar_axis, delta_axis, jobs: int = 1) -> SweepResult:
    """Steady state at every ``(n_bar, delta/gamma_bar)`` pair.

    Cells are independent; with ``jobs > 1`` they are farmed out to worker
    processes and reassembled by index, so the result does not depend on
    execution order. Per-cell failures are recorded, not raised.
    """
    n_bar_axis = np.atleast_1d(np.asarray(n_bar_axis, dtype=float))
    delta_axis = np.atleast_1d(np.asarray(delta_axis, dtype=float))
    if n_bar_axis.size == 0 or delta_axis.size == 0:
        raise ValueError("sweep axes must be non-empty")
    tasks = [(template, float(n), float(d)) for n in n_bar_axis for d in delta_axis]
    if jobs is None or jobs < 1:
        jobs = os.cpu_count() or 1
    if jobs == 1 or len(tasks) == 1:
        outcomes = [_evaluate_cell(task) for task in tasks]
    else:
        chunk = max(1, len(tasks) // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_evaluate_cell, tasks, chunksize=chunk))

    shape = (n_bar_axis.size, delta_axis.size)
    arrays = [np.full(shape, np.nan) for _ in range(5)]
    valid = np.zeros(shape, dtype=bool)
    errors = {}
    for flat, (values, error) in enumerate(outcomes):
        idx = np.unravel_index(flat, shape)
        if error is not None:
            errors[tuple(int(i) for i in idx)] = error
            continue
        valid[idx] = True
        for array, value in zip(arrays, values):
            array[idx] = value
    magnitude, ratio, pop_a, pop_b, agreement = arrays
    return SweepResult(
        n_bar_axis=n_bar_axis,
        delta_over_gamma_axis=delta_axis,
        coherence_magnitude=magnitude,
        coherence_ratio=ratio,
        population_a=pop_a,
        population_b=pop_b,
        method_agreement=agreement,
        valid=valid,
        errors=errors,
    )
