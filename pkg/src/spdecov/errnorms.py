"""Trace-class and Hilbert-Schmidt distances between covariance operators.

Both operators live on (possibly different) uniform meshes; the
distances are computed through Gram matrices of the joint hat basis, so
no interpolation between meshes is ever performed. For nested meshes
the joint basis is linearly dependent and the joint Gram matrix is
singular PSD; that is fine, its square root only needs the eigenvalue
clamp.
"""

import numpy as np

from .exceptions import NegativeSquareError, ShapeMismatchError
from .fem import assemble_mass, cross_mass
from .linalg import psd_sqrt, sym_eig, symmetrize

__all__ = ["err_trace_norm", "err_hs_norm"]

#: relative clamp below which a negative squared norm is roundoff
HS_CLAMP_RTOL = 1e-10


def _difference_blocks(K, mesh, Kref, mesh_ref):
    K = np.asarray(K, dtype=float)
    Kref = np.asarray(Kref, dtype=float)
    if K.shape != (mesh.n_dof, mesh.n_dof):
        raise ShapeMismatchError(
            f"K shape {K.shape} does not match mesh ({mesh.n_dof} DoF)"
        )
    if Kref.shape != (mesh_ref.n_dof, mesh_ref.n_dof):
        raise ShapeMismatchError(
            f"Kref shape {Kref.shape} does not match mesh ({mesh_ref.n_dof} DoF)"
        )
    return K, Kref


def err_trace_norm(K, mesh, Kref, mesh_ref):
    """Trace-norm (L1) distance between two covariance operators.

    The operators are K = sum K[m,n] phi_m x phi_n on `mesh` and
    likewise Kref on `mesh_ref`. Their difference has coefficient
    matrix D = blockdiag(K, -Kref) over the concatenated basis with
    joint Gram matrix N, and the distance is

        sum |eig( sqrt(N) D sqrt(N) )|,

    the trace norm of the difference operator.

    Parameters
    ----------
    K, Kref : (n, n), (m, m) array_like
        Symmetric covariance coefficient matrices.
    mesh, mesh_ref : Mesh1D
        The meshes carrying them; must share the bc flavor.

    Returns
    -------
    float
    """
    K, Kref = _difference_blocks(K, mesh, Kref, mesh_ref)
    Ma = assemble_mass(mesh)
    if mesh == mesh_ref:
        # same basis: reduce on the mesh directly; the joint Gram below is
        # singular in this case and its square root costs ~sqrt(eps) accuracy
        root = psd_sqrt(Ma)
        W = symmetrize(root @ (K - Kref) @ root)
        return float(np.abs(sym_eig(W).eigenvalues).sum())
    Mb = assemble_mass(mesh_ref)
    C = cross_mass(mesh, mesh_ref)
    N = np.block([[Ma, C], [C.T, Mb]])
    root = psd_sqrt(N)
    n = Ma.shape[0]
    D = np.zeros_like(N)
    D[:n, :n] = K
    D[n:, n:] = -Kref
    W = symmetrize(root @ D @ root)
    return float(np.abs(sym_eig(W).eigenvalues).sum())


def err_hs_norm(K, mesh, Kref, mesh_ref):
    """Hilbert-Schmidt (L2) distance between two covariance operators.

    Evaluated through the three-trace expansion

        trace((K Ma)^2) - 2 trace(K C Kref C^T) + trace((Kref Mb)^2)

    with C the cross-mesh Gram matrix, then the square root. Cancellation
    can push the expression a hair negative when the operators nearly
    coincide; anything above -1e-10 of the leading term is clamped.

    Raises
    ------
    NegativeSquareError
        If the expression is negative beyond the clamp.
    """
    K, Kref = _difference_blocks(K, mesh, Kref, mesh_ref)
    Ma = assemble_mass(mesh)
    if mesh == mesh_ref:
        # same basis: work on the difference, dodging the cancellation
        D = (K - Kref) @ Ma
        return float(np.sqrt(max(np.sum(D * D.T), 0.0)))
    Mb = assemble_mass(mesh_ref)
    C = cross_mass(mesh, mesh_ref)

    KM = K @ Ma
    RM = Kref @ Mb
    t1 = float(np.sum(KM * KM.T))
    t3 = float(np.sum(RM * RM.T))
    X = K @ C
    Y = Kref @ C.T
    t2 = float(np.sum(X * Y.T))

    val = t1 - 2.0 * t2 + t3
    lead = max(abs(t1), abs(t2), abs(t3), 1e-300)
    if val < -HS_CLAMP_RTOL * lead:
        raise NegativeSquareError(
            f"squared HS distance {val:.3e} below -{HS_CLAMP_RTOL:.0e} * {lead:.3e}"
        )
    return float(np.sqrt(max(val, 0.0)))
