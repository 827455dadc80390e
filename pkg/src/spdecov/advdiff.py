"""Fully discrete covariance recursion for stochastic advection-diffusion.

Backward Euler in time, P1 elements in space. One step advances the
covariance coefficient matrix through

    (M + dt A) K_j (M + dt A)^T = (1 + 2 c0 dt) M K_{j-1} M + dt Q_h,

where A is the (generally nonsymmetric) form matrix of the shifted
bilinear form and Q_h the noise Gram matrix. With the assembly
convention of `fem.assemble_form` (rows test, columns trial) this is
exactly the covariance of the backward Euler path scheme for the
forward equation.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .fem import Coefficients, Mesh1D, assemble_form, assemble_mass
from .kernels import Kernel, assemble_Q
from .linalg import (
    congruence_solve,
    factored_congruence,
    lu_factor_checked,
    symmetrize,
)

__all__ = ["AdvDiffConfig", "advdiff_step", "advdiff_run"]


@dataclass(frozen=True)
class AdvDiffConfig:
    """One advection-diffusion covariance run.

    dt is derived as T / n_steps, which keeps T an exact multiple of the
    step and avoids end-of-horizon rounding games. K0 is the initial
    covariance coefficient matrix (projection of the initial covariance
    onto the mesh is the caller's business); None means deterministic
    initial data.
    """

    mesh: Mesh1D
    coeffs: Coefficients
    c0: float
    kernel: Kernel
    T: float
    n_steps: int
    K0: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("T must be positive")
        if self.n_steps < 1:
            raise ValueError("need at least one step")
        if self.dt > 1.0:
            raise ValueError("dt must not exceed 1")
        if self.K0 is not None:
            n = self.mesh.n_dof
            if np.shape(self.K0) != (n, n):
                raise ValueError(
                    f"K0 shape {np.shape(self.K0)} does not fit {n} DoF"
                )

    @property
    def dt(self):
        return self.T / self.n_steps


def advdiff_step(K_prev, M, A, Q_h, dt, c0):
    """One backward Euler covariance step.

    Returns the symmetrized solution of
    (M + dt A) K (M + dt A)^T = (1 + 2 c0 dt) M K_prev M + dt Q_h.
    """
    RHS = (1.0 + 2.0 * c0 * dt) * (M @ K_prev @ M) + dt * Q_h
    return congruence_solve(M + dt * A, symmetrize(RHS))


def advdiff_run(config, callback=None):
    """Iterate the covariance recursion to t = T.

    Parameters
    ----------
    config : AdvDiffConfig
    callback : callable, optional
        Called as callback(j, K_j) after every step, j = 1..n_steps.
        Meant for invariant monitoring and snapshots; the recursion
        itself never depends on it.

    Returns
    -------
    (n, n) ndarray
        Covariance coefficient matrix at the final time.
    """
    mesh = config.mesh
    M = assemble_mass(mesh)
    A = assemble_form(mesh, config.coeffs, config.c0)
    Q_h = assemble_Q(mesh, config.kernel)
    dt = config.dt
    c0 = config.c0

    K = np.zeros_like(M) if config.K0 is None else symmetrize(
        np.asarray(config.K0, dtype=float)
    )
    lu_piv = lu_factor_checked(M + dt * A)
    growth = 1.0 + 2.0 * c0 * dt
    for j in range(1, config.n_steps + 1):
        RHS = growth * (M @ K @ M) + dt * Q_h
        K = factored_congruence(lu_piv, symmetrize(RHS))
        if callback is not None:
            callback(j, K)
    return K
