"""Small dense linear algebra: matrix exponential, trace-constrained kernel
solve and Hermitian 3x3 eigenvalues."""

from __future__ import annotations

import math

import numpy as np

# Degree-13 diagonal Pade coefficients b_0 .. b_13 of exp.
_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
#: Largest 1-norm for which the degree-13 approximant meets double precision
#: backward error without scaling.
THETA_13 = 5.371920351148152

TRACE_ROW = np.array([1.0, 1.0, 1.0, 0.0, 0.0])
TRACE_ROW.setflags(write=False)


class DegenerateKernel(np.linalg.LinAlgError):
    """The generator has no unique trace-one stationary state."""


def _as_finite_square(M, name="matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def scaling_exponent(M) -> int:
    """Number of squarings ``s`` so that ``||M / 2**s||_1 <= THETA_13``."""
    norm = np.linalg.norm(M, 1)
    if norm <= THETA_13:
        return 0
    s = max(0, math.ceil(math.log2(norm / THETA_13)))
    # guard against log2 rounding just below the threshold
    while norm / 2.0**s > THETA_13:
        s += 1
    return s


def matrix_exponential(M) -> np.ndarray:
    """``exp(M)`` by scaling and squaring with a degree-13 Pade approximant.

    A single order is used (no lower-degree ladder): ``M`` is scaled by
    ``2**-s`` until its 1-norm is at most :data:`THETA_13`, the rational
    approximant ``q(X)^-1 p(X)`` is evaluated with six matrix products and one
    solve, and the result is squared ``s`` times.
    """
    M = _as_finite_square(M)
    n = M.shape[0]
    s = scaling_exponent(M)
    X = M / 2.0**s if s else M
    b = _PADE13
    ident = np.eye(n)
    X2 = X @ X
    X4 = X2 @ X2
    X6 = X4 @ X2
    U = X @ (
        X6 @ (b[13] * X6 + b[11] * X4 + b[9] * X2)
        + b[7] * X6 + b[5] * X4 + b[3] * X2 + b[1] * ident
    )
    V = (
        X6 @ (b[12] * X6 + b[10] * X4 + b[8] * X2)
        + b[6] * X6 + b[4] * X4 + b[2] * X2 + b[0] * ident
    )
    E = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        E = E @ E
    return E


def steady_nullspace(A, constraint=TRACE_ROW, rcond: float = 1e-10) -> np.ndarray:
    """Kernel vector of ``A`` normalized by ``constraint @ x = 1``.

    Each row of ``A`` in turn is replaced by the constraint row and the
    best-conditioned of the resulting square systems is solved. Replacing a
    row that is linearly dependent on the others is what keeps the system
    regular, so scanning all rows makes the choice automatic.

    Raises
    ------
    DegenerateKernel
        If every modified system has reciprocal 1-norm condition below ``rcond``.
    """
    A = _as_finite_square(A, "generator")
    constraint = np.asarray(constraint, dtype=float)
    n = A.shape[0]
    best = None
    best_cond = math.inf
    for row in range(n):
        B = A.copy()
        B[row] = constraint
        with np.errstate(all="ignore"):
            cond = np.linalg.cond(B, 1)
        if np.isfinite(cond) and cond < best_cond:
            best, best_cond = row, cond
    if best is None or 1.0 / best_cond < rcond:
        raise DegenerateKernel(f"no well-conditioned trace-constrained system (cond = {best_cond:.3g})")
    B = A.copy()
    B[best] = constraint
    rhs = np.zeros(n)
    rhs[best] = 1.0
    return np.linalg.solve(B, rhs)


def hermitian3_eigenvalues(rho, tol: float = 1e-10) -> np.ndarray:
    """Ascending eigenvalues of a 3x3 Hermitian matrix.

    The Hermitian part ``(rho + rho^H) / 2`` is diagonalized; inputs deviating
    from Hermiticity by more than ``tol`` (max-abs) are rejected.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise ValueError("matrix has non-finite entries")
    skew = np.max(np.abs(rho - rho.conj().T))
    if skew > tol:
        raise ValueError(f"matrix is not Hermitian (deviation {skew:.3g})")
    return np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
