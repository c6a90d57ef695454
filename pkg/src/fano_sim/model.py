"""Physical parameters, derived rates and density-matrix assembly for a V-type
three-level system (excited levels |a>, |b>, common ground |c>).

State vectors
-------------
The population subsystem is the real 5-vector::

    x = (rho_aa, rho_bb, rho_cc, Re rho_ab, Im rho_ab)

and the one-photon coherence subsystem is the real 4-vector::

    z = (Re rho_ac, Im rho_ac, Re rho_bc, Im rho_bc)

All rates are angular frequencies. Nothing in this module fixes a unit; the
dimensionless convention used throughout the package is ``gamma_bar = 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

#: Ratio gamma_pol / gamma_iso for a linearly polarized beam driving two
#: orthogonal circular transitions.
POLARIZED_FRACTION = 3.0 / (16.0 * math.pi)


class InvalidParameters(ValueError):
    """Raised when a parameter set violates its physical constraints."""


class FieldMode(str, enum.Enum):
    """Angular/polarization structure of the incoherent pump."""

    POLARIZED = "polarized"
    ISOTROPIC = "isotropic"


@dataclass(frozen=True)
class SystemParams:
    """Inputs of the V-system model.

    Parameters
    ----------
    gamma_a_iso, gamma_b_iso : float
        Isotropic spontaneous decay rates of |a> and |b>.
    p : float
        Dipole alignment ``cos(Theta)`` in [-1, 1].
    delta : float
        Excited-state splitting ``omega_ac - omega_bc``.
    n_bar : float
        Mean photon number of the pump at the mean transition frequency.
    omega_ac, omega_bc : float
        Optical transition frequencies; they only enter the one-photon
        coherence generator. Zero means "not given".
    field_mode : FieldMode
        Polarized-anisotropic or isotropic driving.
    """

    gamma_a_iso: float = 1.0
    gamma_b_iso: float = 1.0
    p: float = 0.0
    delta: float = 0.0
    n_bar: float = 0.0
    omega_ac: float = 0.0
    omega_bc: float = 0.0
    field_mode: FieldMode = FieldMode.POLARIZED

    def __post_init__(self):
        object.__setattr__(self, "field_mode", FieldMode(self.field_mode))
        for name in ("gamma_a_iso", "gamma_b_iso", "p", "delta", "n_bar", "omega_ac", "omega_bc"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidParameters(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.gamma_a_iso <= 0 or self.gamma_b_iso <= 0:
            raise InvalidParameters("spontaneous decay rates must be positive")
        if not -1.0 <= self.p <= 1.0:
            raise InvalidParameters(f"alignment p must lie in [-1, 1], got {self.p}")
        if self.n_bar < 0:
            raise InvalidParameters(f"n_bar must be non-negative, got {self.n_bar}")
        if self.omega_ac < 0 or self.omega_bc < 0:
            raise InvalidParameters("transition frequencies must be non-negative")
        if self.omega_ac != 0 and self.omega_bc != 0:
            mismatch = abs(self.omega_ac - self.omega_bc - self.delta)
            if mismatch > 1e-9 * max(abs(self.omega_ac), 1.0):
                raise InvalidParameters(
                    f"omega_ac - omega_bc = {self.omega_ac - self.omega_bc} does not match delta = {self.delta}"
                )

    @property
    def gamma_bar(self) -> float:
        """Average spontaneous emission rate."""
        return 0.5 * (self.gamma_a_iso + self.gamma_b_iso)

    @property
    def delta_over_gamma(self) -> float:
        return self.delta / self.gamma_bar

    @classmethod
    def dimensionless(
        cls,
        gamma_ratio: float = 1.0,
        delta_over_gamma: float = 0.0,
        n_bar: float = 0.0,
        p: float = 0.0,
        field_mode: FieldMode = FieldMode.POLARIZED,
    ) -> "SystemParams":
        """Build a parameter set in units where ``gamma_bar = 1``.

        ``gamma_ratio`` is ``gamma_a_iso / gamma_b_iso``.
        """
        if gamma_ratio <= 0:
            raise InvalidParameters("gamma_ratio must be positive")
        gamma_b = 2.0 / (1.0 + gamma_ratio)
        return cls(
            gamma_a_iso=gamma_ratio * gamma_b,
            gamma_b_iso=gamma_b,
            p=p,
            delta=delta_over_gamma,
            n_bar=n_bar,
            field_mode=field_mode,
        )

    def scaled(self, k: float) -> "SystemParams":
        """Multiply every rate and frequency by ``k`` (``n_bar`` and ``p`` unchanged)."""
        if k <= 0:
            raise InvalidParameters("scale factor must be positive")
        return replace(
            self,
            gamma_a_iso=self.gamma_a_iso * k,
            gamma_b_iso=self.gamma_b_iso * k,
            delta=self.delta * k,
            omega_ac=self.omega_ac * k,
            omega_bc=self.omega_bc * k,
        )

    def normalized(self) -> "SystemParams":
        """Same physics in units where ``gamma_bar = 1``."""
        return self.scaled(1.0 / self.gamma_bar)


@dataclass(frozen=True)
class DerivedRates:
    """Rates entering the generators.

    In isotropic mode the ``*_pol`` fields carry the isotropic rates, because
    the isotropic master equation is the same linear system with the pump
    channel relabelled.
    """

    gamma_a_pol: float
    gamma_b_pol: float
    r_a_pol: float
    r_b_pol: float
    gamma_bar: float
    cross_pump: float
    cross_decay: float

    @property
    def cross_total(self) -> float:
        """Interference strength multiplying the population/coherence couplings."""
        return self.cross_pump + self.cross_decay


def derive_rates(params: SystemParams) -> DerivedRates:
    """Compute pump, decay and interference rates for ``params``."""
    ga, gb, n = params.gamma_a_iso, params.gamma_b_iso, params.n_bar
    cross_decay = params.p * math.sqrt(ga * gb)
    if params.field_mode is FieldMode.POLARIZED:
        ga_pol = POLARIZED_FRACTION * ga
        gb_pol = POLARIZED_FRACTION * gb
        cross_pump = math.sqrt(ga_pol * gb_pol) * n
    else:
        ga_pol, gb_pol = ga, gb
        cross_pump = params.p * math.sqrt(ga * gb) * n
    return DerivedRates(
        gamma_a_pol=ga_pol,
        gamma_b_pol=gb_pol,
        r_a_pol=n * ga_pol,
        r_b_pol=n * gb_pol,
        gamma_bar=params.gamma_bar,
        cross_pump=cross_pump,
        cross_decay=cross_decay,
    )


def mean_photon_number(hbar_omega_over_kT: float) -> float:
    """Bose-Einstein occupation ``1 / (exp(x) - 1)`` at ``x = hbar*omega/(k_B*T)``."""
    x = float(hbar_omega_over_kT)
    if not x > 0 or not math.isfinite(x):
        raise ValueError(f"hbar*omega/(k_B*T) must be positive and finite, got {x!r}")
    return 1.0 / math.expm1(x)


def density_from_state(x, z=None) -> np.ndarray:
    """Assemble the 3x3 density matrix in the basis (|a>, |b>, |c>).

    ``z`` may be omitted, in which case the one-photon coherences are zero.
    """
    x = np.asarray(x, dtype=float)
    z = np.zeros(4) if z is None else np.asarray(z, dtype=float)
    if x.shape != (5,) or z.shape != (4,):
        raise ValueError(f"expected x of shape (5,) and z of shape (4,), got {x.shape} and {z.shape}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(z))):
        raise ValueError("state vectors must be finite")
    rho_ab = complex(x[3], x[4])
    rho_ac = complex(z[0], z[1])
    rho_bc = complex(z[2], z[3])
    return np.array(
        [
            [x[0], rho_ab, rho_ac],
            [rho_ab.conjugate(), x[1], rho_bc],
            [rho_ac.conjugate(), rho_bc.conjugate(), x[2]],
        ],
        dtype=complex,
    )


def satisfies_positivity(x, z=None, tol: float = 1e-10) -> bool:
    """Cauchy-Schwarz checks ``|rho_lj|^2 <= rho_ll * rho_jj`` on every pair.

    A necessary condition for positivity; see
    :func:`fano_sim.analysis.positivity_report` for the eigenvalue test.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x[:3] < -tol):
        return False
    ok = x[3] ** 2 + x[4] ** 2 <= x[0] * x[1] + tol
    if z is not None:
        z = np.asarray(z, dtype=float)
        ok = ok and z[0] ** 2 + z[1] ** 2 <= x[0] * x[2] + tol
        ok = ok and z[2] ** 2 + z[3] ** 2 <= x[1] * x[2] + tol
    return bool(ok)


GROUND_STATE = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
GROUND_STATE.setflags(write=False)
