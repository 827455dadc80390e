"""Dense symmetric matrix primitives shared by all covariance recursions.

Everything here operates on plain float64 numpy arrays. Covariance
coefficient matrices at the mesh sizes of interest are small (at most a
few hundred rows) and inherently dense, so no sparse paths are provided.
"""

import warnings
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .exceptions import (
    NonSymmetricError,
    NoConvergenceError,
    NotPSDError,
    SingularError,
)

__all__ = ["SymEig", "sym_eig", "psd_sqrt", "congruence_solve", "symmetrize"]

#: relative symmetry slack accepted by sym_eig
SYMMETRY_RTOL = 1e-9

#: pivot floor for congruence_solve, relative to max|L|
PIVOT_RTOL = 1e-14


class SymEig(NamedTuple):
    """Eigendecomposition of a symmetric matrix.

    eigenvalues are ascending; eigenvectors are the columns of an
    orthogonal matrix V with A = V diag(eigenvalues) V^T.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def symmetrize(A):
    """Return (A + A^T)/2."""
    return 0.5 * (A + A.T)


def _as_square(A, name="matrix"):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError(f"{name} has non-finite entries")
    return A

def _check_symmetric(A, rtol=SYMMETRY_RTOL):
    scale = max(np.abs(A).max(), 1e-300)
    gap = np.abs(A - A.T).max()
    if gap > rtol * scale:
        raise NonSymmetricError(
            f"matrix is not symmetric: max|A - A^T| = {gap:.3e} "
            f"exceeds {rtol:.1e} * max|A| = {rtol * scale:.3e}"
        )


def sym_eig(A):
    """Symmetric eigendecomposition with ascending eigenvalues.

    Parameters
    ----------
    A : (n, n) array_like
        Symmetric matrix; asymmetry up to 1e-9 relative is tolerated and
        averaged away before the decomposition.

    Returns
    -------
    SymEig
        Named tuple (eigenvalues, eigenvectors).

    Raises
    ------
    NonSymmetricError
        If A is not symmetric within tolerance.
    NoConvergenceError
        If the underlying QR iteration fails.
    """
    A = _as_square(A)
    _check_symmetric(A)
    try:
        w, V = np.linalg.eigh(symmetrize(A))
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(str(exc)) from exc
    return SymEig(w, V)


def psd_sqrt(A, tol=1e-10):
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues in [-tol * max(1, lambda_max), 0) are treated as roundoff
    and clamped to zero, so rank-deficient Gram matrices are fine.

    Parameters
    ----------
    A : (n, n) array_like
        Symmetric positive semidefinite matrix.
    tol : float, optional
        Relative clamp tolerance for negative eigenvalues.

    Returns
    -------
    (n, n) ndarray
        Symmetric PSD matrix B with B @ B ~= A.

    Raises
    ------
    NotPSDError
        If an eigenvalue falls below -tol * max(1, lambda_max).
    """
    w, V = sym_eig(A)
    floor = -tol * max(1.0, w[-1] if w.size else 1.0)
    if w.size and w[0] < floor:
        raise NotPSDError(
            f"matrix is not PSD: min eigenvalue {w[0]:.3e} < {floor:.3e}"
        )
    root = V * np.sqrt(np.clip(w, 0.0, None))
    return symmetrize(root @ V.T)


def congruence_solve(L, RHS):
    """Solve L X L^T = RHS for symmetric RHS.

    The workhorse of the covariance recursions, where L = M + dt*A is
    factored outside any symmetry assumptions. X is symmetrized before
    return to stop roundoff drift from accumulating across time steps.

    Parameters
    ----------
    L : (n, n) array_like
        Invertible matrix.
    RHS : (n, n) array_like
        Symmetric right-hand side.

    Returns
    -------
    (n, n) ndarray
        Symmetrized solution X = L^{-1} RHS L^{-T}.

    Raises
    ------
    SingularError
        If an LU pivot magnitude drops below 1e-14 * max|L|.
    """
    L = _as_square(L, "L")
    RHS = _as_square(RHS, "RHS")
    if L.shape != RHS.shape:
        raise ValueError(f"shape mismatch: L {L.shape} vs RHS {RHS.shape}")
    lu, piv = _quiet_lu_factor(L)
    floor = PIVOT_RTOL * max(np.abs(L).max(), 1e-300)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < floor:
        raise SingularError(
            f"pivot {pivots.min():.3e} below floor {floor:.3e}"
        )
    Y = scipy.linalg.lu_solve((lu, piv), RHS, check_finite=False)
    X = scipy.linalg.lu_solve((lu, piv), Y.T, check_finite=False)
    return symmetrize(X)


def factored_congruence(lu_piv, RHS):
    """congruence_solve against a prefactored (lu, piv) pair.

    Used by the run loops, which factor M + dt*A once and apply it every
    step. No pivot check here; the caller checked at factorization time.
    """
    Y = scipy.linalg.lu_solve(lu_piv, RHS, check_finite=False)
    return symmetrize(scipy.linalg.lu_solve(lu_piv, Y.T, check_finite=False))


def _quiet_lu_factor(L):
    # the pivot check below turns singularity into a typed error; the
    # scipy advisory warning would only duplicate it
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        return scipy.linalg.lu_factor(L, check_finite=False)


def lu_factor_checked(L):
    """LU-factor L, raising SingularError on a collapsed pivot."""
    L = _as_square(L, "L")
    lu, piv = _quiet_lu_factor(L)
    floor = PIVOT_RTOL * max(np.abs(L).max(), 1e-300)
    if np.abs(np.diag(lu)).min() < floor:
        raise SingularError("matrix numerically singular")
    return lu, piv
