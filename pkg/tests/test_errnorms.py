import numpy as np
import pytest
from numpy.testing import assert_allclose

from spdecov import (
    AdvDiffConfig,
    Coefficients,
    Exponential,
    Mesh1D,
    ShapeMismatchError,
    advdiff_run,
    assemble_mass,
    err_hs_norm,
    err_trace_norm,
    psd_sqrt,
    sym_eig,
    symmetrize,
)
from spdecov.spectral import midpoint_rule, nodal_cov_function


def test_rank_one_trace_norm():
    # coefficient c on the single-hat mesh: trace norm c * ||phi||^2 = c/3
    mesh = Mesh1D(2, "dirichlet")
    K = np.array([[0.9]])
    Z = np.zeros((1, 1))
    assert err_trace_norm(K, mesh, Z, mesh) == pytest.approx(0.9 / 3.0, abs=1e-14)
    assert err_hs_norm(K, mesh, Z, mesh) == pytest.approx(0.9 / 3.0, abs=1e-14)


def test_same_mesh_reduction():
    mesh = Mesh1D(7, "neumann")
    rng = np.random.default_rng(21)
    K = symmetrize(rng.standard_normal((8, 8)))
    Kref = symmetrize(rng.standard_normal((8, 8)))
    M = assemble_mass(mesh)
    root = psd_sqrt(M)
    W = symmetrize(root @ (K - Kref) @ root)
    direct = np.abs(sym_eig(W).eigenvalues).sum()
    assert abs(err_trace_norm(K, mesh, Kref, mesh) - direct) <= 1e-9


def test_same_mesh_hs_reduction():
    mesh = Mesh1D(5, "dirichlet")
    rng = np.random.default_rng(3)
    K = symmetrize(rng.standard_normal((4, 4)))
    Kref = symmetrize(rng.standard_normal((4, 4)))
    M = assemble_mass(mesh)
    D = (K - Kref) @ M
    direct = np.sqrt(np.sum(D * D.T))
    assert abs(err_hs_norm(K, mesh, Kref, mesh) - direct) <= 1e-12


def test_schatten_ordering():
    rng = np.random.default_rng(8)
    mesh = Mesh1D(6, "dirichlet")
    for _ in range(5):
        K = symmetrize(rng.standard_normal((5, 5)))
        Kref = symmetrize(rng.standard_normal((5, 5)))
        hs = err_hs_norm(K, mesh, Kref, mesh)
        tr = err_trace_norm(K, mesh, Kref, mesh)
        assert hs <= tr + 1e-12


def test_psd_difference_trace_identity():
    # if K - Kref is PSD the trace norm equals trace(M (K - Kref))
    mesh = Mesh1D(6, "neumann")
    rng = np.random.default_rng(4)
    Kref = symmetrize(rng.standard_normal((7, 7)))
    B = rng.standard_normal((7, 3))
    K = Kref + B @ B.T
    M = assemble_mass(mesh)
    expected = np.trace(M @ (K - Kref))
    assert err_trace_norm(K, mesh, Kref, mesh) == pytest.approx(expected, rel=1e-10)


def test_symmetry_in_arguments():
    mesh = Mesh1D(5, "dirichlet")
    rng = np.random.default_rng(6)
    K = symmetrize(rng.standard_normal((4, 4)))
    Kref = symmetrize(rng.standard_normal((4, 4)))
    assert err_trace_norm(K, mesh, Kref, mesh) == pytest.approx(
        err_trace_norm(Kref, mesh, K, mesh), rel=1e-12
    )
    assert err_hs_norm(K, mesh, Kref, mesh) == pytest.approx(
        err_hs_norm(Kref, mesh, K, mesh), rel=1e-12
    )


def test_triangle_inequality_same_mesh():
    mesh = Mesh1D(6, "dirichlet")
    rng = np.random.default_rng(13)
    Ks = [symmetrize(rng.standard_normal((5, 5))) for _ in range(3)]
    for err in (err_trace_norm, err_hs_norm):
        d13 = err(Ks[0], mesh, Ks[2], mesh)
        d12 = err(Ks[0], mesh, Ks[1], mesh)
        d23 = err(Ks[1], mesh, Ks[2], mesh)
        assert d13 <= d12 + d23 + 1e-9


def test_zero_distance():
    mesh = Mesh1D(4, "dirichlet")
    K = np.eye(3)
    assert err_trace_norm(K, mesh, K, mesh) <= 1e-14
    assert err_hs_norm(K, mesh, K, mesh) <= 1e-14


def test_shape_gate():
    mesh = Mesh1D(4, "dirichlet")
    with pytest.raises(ShapeMismatchError):
        err_trace_norm(np.eye(2), mesh, np.eye(3), mesh)


def _cov_grids(n_coarse, n_fine):
    coeffs = Coefficients.constant(a11=1.0)

    def run(n_cells):
        mesh = Mesh1D(n_cells, "dirichlet")
        cfg = AdvDiffConfig(
            mesh=mesh,
            coeffs=coeffs,
            c0=0.0,
            kernel=Exponential(1.0),
            T=0.5,
            n_steps=32,
        )
        return mesh, advdiff_run(cfg)

    return run(n_coarse), run(n_fine)


def test_cross_mesh_hs_matches_function_quadrature():
    # the HS distance is the L2((0,1)^2) distance of covariance functions,
    # so a dense quadrature of the nodal interpolants must reproduce it
    (mesh_a, K), (mesh_b, Kref) = _cov_grids(4, 8)
    hs = err_hs_norm(K, mesh_a, Kref, mesh_b)
    x, w = midpoint_rule(2048)
    Ca = nodal_cov_function(K, mesh_a, x)
    Cb = nodal_cov_function(Kref, mesh_b, x)
    D = Ca - Cb
    quad = np.sqrt(np.einsum("p,q,pq->", w, w, D * D))
    assert hs == pytest.approx(quad, rel=5e-6)


def test_cross_mesh_trace_matches_dense_operator():
    # trace norm via a dense grid discretization of the kernel difference
    (mesh_a, K), (mesh_b, Kref) = _cov_grids(4, 8)
    tr = err_trace_norm(K, mesh_a, Kref, mesh_b)
    x, w = midpoint_rule(2048)
    D = nodal_cov_function(K, mesh_a, x) - nodal_cov_function(Kref, mesh_b, x)
    rw = np.sqrt(w)
    vals = np.linalg.eigvalsh(symmetrize(rw[:, None] * D * rw[None, :]))
    assert tr == pytest.approx(np.abs(vals).sum(), rel=5e-6)


def test_cross_mesh_nested_refinement_sanity():
    # distance to a refinement of itself shrinks as the fine run refines
    (mesh_a, K), (mesh_b, Kref) = _cov_grids(4, 8)
    (_, _), (mesh_c, Kref2) = _cov_grids(4, 16)
    d_ab = err_hs_norm(K, mesh_a, Kref, mesh_b)
    d_bc = err_hs_norm(Kref, mesh_b, Kref2, mesh_c)
    assert d_bc < d_ab
