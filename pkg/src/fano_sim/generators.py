"""Real generator matrices of the two decoupled linear subsystems.

``dx/dt = A x`` for the populations and excited-state coherence, and
``dz/dt = C z`` for the one-photon coherences (see :mod:`fano_sim.model` for
the component order).

Index convention: the formulas below are written with 1-based element labels
``A_ij`` (row i, column j); the arrays are 0-based, so ``A_ij`` lives at
``A[i - 1, j - 1]``.
"""

from __future__ import annotations

import numpy as np

from .model import DerivedRates, SystemParams, derive_rates


def build_population_generator(params: SystemParams, rates: DerivedRates | None = None) -> np.ndarray:
    """Return the 5x5 generator ``A``.

    Non-zero elements::

        A_11 = -A_31 = -(r_a + gamma_a)          A_13 = r_a
        A_22 = -A_32 = -(r_b + gamma_b)          A_23 = r_b
        A_33 = -(r_a + r_b)
        A_14 = A_24 = -K,  A_34 = 2K,  A_41 = A_42 = -K/2,  A_43 = K_pump
        A_44 = A_55 = -((r_a + r_b)/2 + gamma_bar)
        A_45 = -A_54 = delta

    with ``r_l = n_bar * gamma_l_pol``, ``K_pump`` the pump interference term
    and ``K = K_pump + p*sqrt(gamma_a*gamma_b)``. Columns 1-3 sum to zero,
    which conserves the trace.
    """
    if rates is None:
        rates = derive_rates(params)
    ga, gb = params.gamma_a_iso, params.gamma_b_iso
    ra, rb = rates.r_a_pol, rates.r_b_pol
    k = rates.cross_total
    damping = -(0.5 * (ra + rb) + rates.gamma_bar)

    A = np.zeros((5, 5))
    A[0, 0] = -(ra + ga)
    A[2, 0] = ra + ga
    A[1, 1] = -(rb + gb)
    A[2, 1] = rb + gb
    A[0, 2] = ra
    A[1, 2] = rb
    A[2, 2] = -(ra + rb)
    A[0, 3] = A[1, 3] = -k
    A[2, 3] = 2.0 * k
    A[3, 0] = A[3, 1] = -0.5 * k
    A[3, 2] = rates.cross_pump
    A[3, 3] = A[4, 4] = damping
    A[3, 4] = params.delta
    A[4, 3] = -params.delta
    return A


def build_optical_generator(params: SystemParams, rates: DerivedRates | None = None) -> np.ndarray:
    """Return the 4x4 generator ``C``.

    Non-zero elements::

        C_11 = C_22 = -(r_a + r_b/2 + gamma_a/2)
        C_33 = C_44 = -(r_b + r_a/2 + gamma_b/2)
        C_12 = -C_21 = omega_ac
        C_43 = -C_34 = omega_bc
        C_13 = C_31 = C_24 = C_42 = -K/2

    The rotation terms use the full ``omega_ac``/``omega_bc`` and opposite
    senses for the two coherences, exactly as the element list is published.
    """
    if rates is None:
        rates = derive_rates(params)
    ra, rb = rates.r_a_pol, rates.r_b_pol
    half_k = 0.5 * rates.cross_total

    C = np.zeros((4, 4))
    C[0, 0] = C[1, 1] = -(ra + 0.5 * rb + 0.5 * params.gamma_a_iso)
    C[2, 2] = C[3, 3] = -(rb + 0.5 * ra + 0.5 * params.gamma_b_iso)
    C[0, 1] = params.omega_ac
    C[1, 0] = -params.omega_ac
    C[3, 2] = params.omega_bc
    C[2, 3] = -params.omega_bc
    C[0, 2] = C[2, 0] = C[1, 3] = C[3, 1] = -half_k
    return C
