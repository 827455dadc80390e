"""Covariance kernels of the driving noise and their Gram matrices.

A kernel spec is either white noise (no pointwise kernel; its Gram is
the mass matrix) or a pointwise kernel q(x, y): exponential, Matern,
Brownian bridge, or a user-supplied callable. assemble_Q produces
Q_h[i, j] = <Q phi_i, phi_j> by Gauss-Legendre quadrature over cell
pairs.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import kv

from .exceptions import NoPointwiseKernelError
from .fem import assemble_mass, hat_values
from .linalg import symmetrize

__all__ = [
    "Kernel",
    "WhiteNoise",
    "Exponential",
    "Matern",
    "BrownianBridge",
    "Custom",
    "kernel_eval",
    "assemble_Q",
]

#: tensor Gauss-Legendre order per cell pair
Q_QUAD_ORDER = 6

#: graded composite rule for the triangle subdivisions of same-cell
#: pairs, where the kernels may kink or cusp along x = y
DUFFY_PANEL_ORDER = 8
DUFFY_PANELS = 8
DUFFY_GRADE = 0.1


class Kernel:
    """Base class for kernel specs."""

    def pointwise(self, x, y):
        raise NoPointwiseKernelError(
            f"{type(self).__name__} has no pointwise kernel"
        )


@dataclass(frozen=True)
class WhiteNoise(Kernel):
    """Spatially uncorrelated noise, Q = I."""


@dataclass(frozen=True)
class Exponential(Kernel):
    """q(x, y) = exp(-scale * |x - y|)."""

    scale: float

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def pointwise(self, x, y):
        return np.exp(-self.scale * np.abs(x - y))


@dataclass(frozen=True)
class Matern(Kernel):
    """Matern kernel in distance z = |x - y|:

        q(z) = sigma^2 2^(1-nu) / Gamma(nu) * (sqrt(2 nu) z / rho)^nu
               * K_nu(sqrt(2 nu) z / rho),

    with the z -> 0 limit sigma^2 taken explicitly (the product is a
    0 * inf form there).
    """

    sigma: float
    nu: float
    rho: float

    def __post_init__(self):
        if min(self.sigma, self.nu, self.rho) <= 0:
            raise ValueError("sigma, nu, rho must all be positive")

    def pointwise(self, x, y):
        z = np.abs(np.asarray(x, dtype=float) - y)
        w = math.sqrt(2.0 * self.nu) / self.rho * z
        safe = np.where(w > 0, w, 1.0)
        val = (
            self.sigma**2
            * 2.0 ** (1.0 - self.nu)
            / math.gamma(self.nu)
            * safe**self.nu
            * kv(self.nu, safe)
        )
        return np.where(w > 0, val, self.sigma**2)


@dataclass(frozen=True)
class BrownianBridge(Kernel):
    """q(x, y) = min(x, y) - x y, the Brownian bridge covariance."""

    def pointwise(self, x, y):
        return np.minimum(x, y) - np.asarray(x, dtype=float) * y


@dataclass(frozen=True)
class Custom(Kernel):
    """User-supplied kernel; q must accept array arguments."""

    q: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def pointwise(self, x, y):
        # expand degenerate outputs (e.g. constants) to the full shape
        shape = np.broadcast_shapes(np.shape(x), np.shape(y))
        return np.broadcast_to(np.asarray(self.q(x, y), dtype=float), shape)


def kernel_eval(spec, x, y):
    """Evaluate the pointwise kernel q(x, y).

    Parameters
    ----------
    spec : Kernel
        Any spec except WhiteNoise.
    x, y : float or array_like
        Points in [0, 1]; broadcast against each other.

    Raises
    ------
    NoPointwiseKernelError
        For white noise.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.min() < 0 or x.max() > 1 or y.min() < 0 or y.max() > 1:
        raise ValueError("kernel arguments must lie in [0, 1]")
    out = spec.pointwise(x, y)
    if np.ndim(out) == 0:
        return float(out)
    return out


def _graded_gauss(order, panels, grade):
    """Composite Gauss-Legendre on [0, 1], panels graded toward 0.

    Panel edges are 0, grade^(panels-1), ..., grade, 1. Endpoint
    algebraic singularities t^alpha (Matern cusps with tiny nu) lose an
    order of magnitude per panel instead of stalling a single rule.
    """
    edges = np.concatenate(([0.0], grade ** np.arange(panels - 1, -1.0, -1.0)))
    xg, wg = np.polynomial.legendre.leggauss(order)
    pts = edges[:-1, None] + 0.5 * np.diff(edges)[:, None] * (xg[None, :] + 1.0)
    wts = 0.5 * np.diff(edges)[:, None] * wg[None, :]
    return pts.ravel(), wts.ravel()


def _duffy_triangles(spec, xl, h):
    """Same-cell contribution, split along the diagonal y = x.

    On the triangle y <= x the substitution x = xl + h u, y = xl + h u v
    (Jacobian h^2 u) keeps |x - y| = h u (1 - v) away from sign changes,
    so kernels with a kink or cusp on the diagonal are integrated from
    smooth data. u is graded toward 0 and v toward 1, where the residual
    edge cusps of nearly-white Matern kernels sit. The mirrored triangle
    is handled explicitly rather than by symmetry so Custom kernels need
    not be symmetric.

    Returns the 2 x 2 local matrix over (left, right) basis pairs.
    """
    g, wgr = _graded_gauss(DUFFY_PANEL_ORDER, DUFFY_PANELS, DUFFY_GRADE)
    u, wu = g, wgr
    v, wv = 1.0 - g, wgr
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wu, wv) * h * h * U

    xs = xl + h * U
    ys = xl + h * U * V
    # local hats: index 0 tracks the left node, 1 the right node
    bx = np.stack([1.0 - U, U])
    by = np.stack([1.0 - U * V, U * V])

    loc = np.zeros((2, 2))
    for lower in (True, False):
        qv = spec.pointwise(xs, ys) if lower else spec.pointwise(ys, xs)
        for i in range(2):
            for j in range(2):
                if lower:
                    loc[i, j] += np.sum(W * qv * bx[i] * by[j])
                else:
                    loc[i, j] += np.sum(W * qv * by[i] * bx[j])
    return loc


def _graded_adjacent_pair(spec, xa, xb, h):
    """Cell pair sharing one node, graded toward the shared corner.

    Nearly-white Matern kernels cusp at |x - y| = 0, which for adjacent
    cells sits at one corner of the integration square; a plain tensor
    rule stalls there even though |x - y| itself never changes sign.
    Grading both axes toward that corner restores fast convergence and
    costs nothing for kernels that are smooth across it.
    """
    g, wgr = _graded_gauss(DUFFY_PANEL_ORDER, DUFFY_PANELS, DUFFY_GRADE)
    if xb > xa:
        u, v = 1.0 - g, g
    else:
        u, v = g, 1.0 - g
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wgr, wgr) * h * h
    qv = spec.pointwise(xa + h * U, xb + h * V)
    bx = np.stack([1.0 - U, U])
    by = np.stack([1.0 - V, V])
    loc = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            loc[i, j] = np.sum(W * qv * bx[i] * by[j])
    return loc


def _plain_pair(spec, xa, xb, h, order):
    """One cell-pair contribution by plain tensor Gauss-Legendre."""
    xg, wg = np.polynomial.legendre.leggauss(order)
    u = 0.5 * (xg + 1.0)
    w = 0.5 * h * wg
    X, Y = np.meshgrid(xa + h * u, xb + h * u, indexing="ij")
    qv = spec.pointwise(X, Y)
    b = np.stack([1.0 - u, u])
    loc = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            loc[i, j] = np.sum(np.outer(w * b[i], w * b[j]) * qv)
    return loc


def assemble_Q(mesh, spec):
    """Noise Gram matrix Q_h[i, j] = <Q phi_i, phi_j>.

    White noise returns the mass matrix exactly. Pointwise kernels are
    integrated with a 6x6 tensor Gauss-Legendre rule per cell pair;
    pairs within one cell of the diagonal, where kernels may kink or
    cusp at |x - y| = 0, are redone with graded rules (a triangle split
    on same-cell pairs, corner grading on adjacent ones).
    """
    if isinstance(spec, WhiteNoise):
        return assemble_mass(mesh)

    h = mesh.h
    xg, wg = np.polynomial.legendre.leggauss(Q_QUAD_ORDER)
    left = np.arange(mesh.n_cells) * h
    pts = (left[:, None] + 0.5 * h * (xg[None, :] + 1.0)).ravel()
    wts = np.tile(0.5 * h * wg, mesh.n_cells)

    B = hat_values(mesh, pts) * wts[:, None]
    qv = spec.pointwise(pts[:, None], pts[None, :])
    Q = B.T @ qv @ B

    # replace the plain rule on and next to the diagonal
    for ca in range(mesh.n_cells):
        for cb in (ca - 1, ca, ca + 1):
            if cb < 0 or cb >= mesh.n_cells:
                continue
            if ca == cb:
                delta = _duffy_triangles(spec, left[ca], h)
            else:
                delta = _graded_adjacent_pair(spec, left[ca], left[cb], h)
            delta -= _plain_pair(spec, left[ca], left[cb], h, Q_QUAD_ORDER)
            for i_loc, node_i in enumerate((ca, ca + 1)):
                gi = mesh.dof_index(node_i)
                if gi < 0:
                    continue
                for j_loc, node_j in enumerate((cb, cb + 1)):
                    gj = mesh.dof_index(node_j)
                    if gj >= 0:
                        Q[gi, gj] += delta[i_loc, j_loc]
    return symmetrize(Q)
