import math

import numpy as np
import pytest

from clifford_doubling import geomq as gq
from clifford_doubling.models import torus_cell


@pytest.mark.parametrize("c", [-0.3, 0.0, 0.2])
def test_parallel_torus_chart_curvature(c):
    cell = torus_cell(6, 8, c)
    sh = gq.chart_shape(cell)
    assert np.max(np.abs(sh.H - 2 * math.tan(2 * c))) < 1e-10
    # principal curvatures tan(pi/4 + c) and -cot(pi/4 + c)
    k1, k2 = math.tan(math.pi / 4 + c), -1 / math.tan(math.pi / 4 + c)
    assert np.allclose(sh.A2, k1 ** 2 + k2 ** 2, atol=1e-10)
    assert gq.parallel_torus_H(c) == pytest.approx(2 * math.tan(2 * c), abs=1e-12)


def test_discrete_H_on_parallel_torus():
    cell = torus_cell(6, 16, 0.2)
    H = gq.discrete_H(cell).H
    assert np.max(np.abs(H - 2 * math.tan(0.4))) < 1e-4


def test_jacobi_potential_on_clifford_torus():
    # d/ds of 2 tan 2s at s = 0 is 4 = |A|^2 + 2
    V = gq.jacobi_potential(torus_cell(6, 16))
    assert np.allclose(V, 4.0, atol=0.1)


def test_perturbation_too_large():
    cell = torus_cell(6, 16)
    with pytest.raises(gq.PerturbationError):
        gq.perturb_normal(cell, np.full(cell.n, 10.0))


def test_perturb_constant_gives_parallel_torus():
    cell = torus_cell(6, 16)
    pm = gq.perturb_normal(cell, np.full(cell.n, 0.05))
    H = gq.discrete_H(pm).H
    assert np.allclose(np.abs(H), 2 * math.tan(0.1), rtol=0.03)


def test_cross_validation_initial_surface(mesh6):
    cv = gq.h_cross_validation(mesh6)
    assert cv["relative_l2"] <= 0.05
    assert cv["normal_alignment"] > 0.99


def test_loglog_slope_exact():
    x = np.array([1e-2, 1e-3, 1e-4])
    s, local = gq.loglog_slope(x, 3 * x ** 2)
    assert s == pytest.approx(2.0)
    assert np.allclose(local, 2.0)


def test_fourier_field_symmetric_and_normalized():
    F = gq.FourierField.random(6, 3, seed=0)
    x, y = 0.13, -0.21
    assert float(F(x, y)) == pytest.approx(float(F(y, x)))
    assert float(F(x, y)) == pytest.approx(float(F(-x, y)))
    c = F.coeffs
    assert gq.FourierField._c2_bound(c, 6) == pytest.approx(1.0)
    assert np.array_equal(gq.FourierField.random(6, 3, seed=0).coeffs, c)


def test_linearization_on_torus():
    r = gq.linearization_check(torus_cell(6, 16), gq.FourierField.random(6, 3, seed=1), weight="one")
    assert r.ok and abs(r.slope - 2) < 0.1


def test_linearization_rejects_unknown_weight():
    with pytest.raises(ValueError):
        gq.linearization_check(torus_cell(6, 8), gq.FourierField.random(6, 2, seed=0), weight="bad")


def test_interior_vertices_excludes_boundary(mesh6):
    idx = gq.interior_vertices(mesh6, 2)
    assert not np.isin(mesh6.boundary_vertices(), idx).any()
    cell = torus_cell(6, 8)
    idx = gq.interior_vertices(cell, 1)
    assert not np.isin(cell.boundary_vertices(), idx).any()


def test_verify_estimates_keys(mesh6):
    v = gq.verify_estimates(mesh6)
    assert {"H_weighted", "A2_weighted", "EH_ratio"} <= set(v)
    assert all(np.isfinite(val) for val in v.values())
