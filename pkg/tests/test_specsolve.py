import math

import numpy as np
import pytest

from clifford_doubling import specsolve as ss
from clifford_doubling.driver import linear_context
from clifford_doubling.geomq import chart_shape
from clifford_doubling.models import flat_cylinder, flat_square, octahedral_sphere, torus_cell


def test_neumann_square_constant_mode():
    res = ss.eigen_low(ss.assemble_operator(flat_square(24), None, "g", potential=0.0), 3)
    assert abs(res.values[0]) < 1e-10
    assert np.ptp(res.vectors[:, 0]) < 1e-8
    # lowest fully symmetric nonconstant Neumann mode on the unit square: cos(2 pi x) + cos(2 pi y)
    assert res.values[1] == pytest.approx(4 * math.pi ** 2, rel=0.02)


def test_sphere_jacobi_spectrum():
    op = ss.assemble_operator(octahedral_sphere(8), None, "g", potential=2.0)
    full = ss.eigen_low(op, 4, "none")
    assert full.values[0] == pytest.approx(-2.0, abs=1e-3)
    # the l = 1 modes are Jacobi fields of rotations; the sym class removes them
    assert np.allclose(full.values[1:4], 0.0, atol=1e-3)
    sym = ss.eigen_low(op, 2)
    assert sym.values[1] > 3.0


def test_eigen_dense_and_sparse_agree():
    op = ss.assemble_operator(octahedral_sphere(6), None, "g", potential=2.0)
    a = ss.eigen_low(op, 3, dense=True)
    b = ss.eigen_low(op, 3, dense=False)
    assert np.allclose(a.values, b.values, atol=1e-8)


@pytest.mark.parametrize("length", [5.0, 10.0])
def test_cylinder_dirichlet(length):
    r = ss.neck_dirichlet_eig(flat_cylinder(length, 200, 16))
    assert r.eigenvalue == pytest.approx((math.pi / length) ** 2, rel=0.01)


def test_cylinder_decay_and_precondition():
    cyl = flat_cylinder(10.0, 200, 16)
    assert 1.5 <= ss.neck_harmonic_decay(cyl).rate <= 2.2
    with pytest.raises(ss.PreconditionError):
        ss.neck_harmonic_decay(cyl, data=np.cos)


def test_symmetry_projection_idempotent():
    cell = torus_cell(6, 16)
    u = np.random.default_rng(0).normal(size=cell.n)
    P = ss.symmetry_project(u, mesh=cell)
    assert np.allclose(ss.symmetry_project(P, mesh=cell), P, atol=1e-14)
    assert ss.symmetry_defect(P, cell) < 1e-12


def test_operator_on_constants():
    cell = torus_cell(6, 16)
    op = ss.assemble_operator(cell, chart_shape(cell), "g")
    assert np.allclose(op.apply(np.ones(cell.n)), 4.0)


def test_gauge_errors(mesh6):
    with pytest.raises(ValueError):
        ss.assemble_operator(mesh6, None, "q", potential=0.0)
    with pytest.raises(ss.OperatorError):
        ss.assemble_operator(mesh6, None, "g")
    with pytest.raises(ss.OperatorError):
        ss.assemble_operator(mesh6, None, "h", potential=1.0)


def test_unknown_symmetry_class(mesh6):
    with pytest.raises(ValueError):
        ss.ScalarField(np.zeros(mesh6.n), "odd", mesh6)


@pytest.fixture(scope="module")
def ctx6(mesh6):
    return linear_context(mesh6)


def test_mod_kernel_solve(ctx6, mesh6):
    E = ss.symmetry_project(np.random.default_rng(1).normal(size=mesh6.n), "sym", mesh6)
    sol = ss.solve_mod_kernel(ctx6.op, ss.ScalarField(E, "sym", mesh6), ctx6.f0, ctx6.w, ctx6.h_mass)
    assert sol.residual < 1e-8
    assert sol.pde_residual < 1e-6
    assert sol.orthogonality < 1e-8
    assert ss.symmetry_defect(sol.u.values, mesh6) < 1e-10


def test_mod_kernel_requires_chi(mesh6, ctx6):
    op = ss.assemble_operator(mesh6, chart_shape(mesh6), "g")
    E = ss.ScalarField(np.zeros(mesh6.n), "sym", mesh6)
    with pytest.raises(ss.OperatorError):
        ss.solve_mod_kernel(op, E, ctx6.f0, ctx6.w, ctx6.h_mass)
    with pytest.raises(ss.NumericalError):
        ss.solve_mod_kernel(ctx6.op, E, ctx6.f0, ctx6.w, ctx6.h_mass, gap=1e-9)


def test_substitute_w(mesh6):
    w = ss.substitute_w(mesh6).values
    assert w.min() == 0.0 and w.max() == pytest.approx(1.0)
    assert np.all(w[mesh6.r <= 1 / 6] == 0)


def test_weighted_norm_of_constant(mesh6):
    one = ss.ScalarField(np.ones(mesh6.n), "sym", mesh6)
    n0 = ss.weighted_norm(one, 0, mesh=mesh6)
    # sup of 1 / f_tilde is attained on the bridge core
    p = mesh6.params
    assert n0 == pytest.approx(math.exp(p.gamma * (p.a_bar - 2 * p.b)), rel=1e-12)


def test_approximate_kernel_small_model(mesh6):
    op = ss.assemble_operator(mesh6, chart_shape(mesh6), "h")
    res = ss.eigen_low(op, 4)
    ker = ss.approximate_kernel(res, mesh6)
    # at m = 6 the near-kernel eigenvalue sits just outside [-0.2, 0.2]
    assert ker.index == int(np.argmin(np.abs(res.values)))
    assert ker.count_gap == 1
    assert ker.s1_means.shape == (4,)
    assert abs(ker.s1_means[ker.index]) == pytest.approx(np.max(np.abs(ker.s1_means)))
