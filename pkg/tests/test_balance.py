import math

import numpy as np
import pytest

from clifford_doubling import balance as bal
from clifford_doubling.geomq import chart_shape, discrete_H
from clifford_doubling.initsurf import build_mesh, derive_params
from clifford_doubling.models import torus_cell


@pytest.mark.parametrize("c", [0.1, -0.2])
def test_torus_force_three_ways(c):
    cell = torus_cell(6, 32, c)
    d = math.pi / (math.sqrt(2) * 6)
    exact = bal.parallel_torus_interior(c, d)
    Fi = bal.interior_force(cell, chart_shape(cell).H)
    Fb = bal.torus_boundary_force(cell)["total"]
    assert Fi == pytest.approx(exact, rel=1e-3)
    assert Fb == pytest.approx(exact, rel=1e-3)


def test_zeta_update_fixed_point():
    p = derive_params(8, 0.3)
    assert bal.zeta_update(0.0, p) == pytest.approx(0.3)
    F = 1e-4
    assert bal.zeta_update(F, p) == pytest.approx(0.3 + 64 * F / (8 * p.tau * math.pi ** 2))
    assert bal.force_slope_target(p) == pytest.approx(-8 * math.pi ** 2 * p.tau / 64)


@pytest.fixture(scope="module")
def report8():
    mesh = build_mesh(derive_params(8))
    rep = bal.boundary_force(mesh)
    rep.F_interior = bal.interior_force(mesh, discrete_H(mesh).H)
    return rep


def test_five_pieces(report8):
    assert set(report8.pieces) == set(bal.PIECES)
    assert report8.pieces["+1"] == pytest.approx(report8.pieces["-1"], rel=1e-10)
    assert report8.pieces["+2"] == pytest.approx(report8.pieces["-2"], rel=1e-10)


def test_waist_piece(report8):
    assert report8.pieces["0"] == pytest.approx(-2 * math.pi * report8.tau, rel=1e-2)


def test_interior_boundary_agree_coarsely(report8):
    assert report8.relative_gap < 5e-3


def test_balance_ratio_definition(report8):
    p = derive_params(8)
    assert report8.balance_ratio == pytest.approx(bal.zeta_update(report8.F_boundary, p))


def test_edge_and_flux_forms_close():
    mesh = build_mesh(derive_params(8))
    a = bal.boundary_force(mesh).F_boundary
    b = bal.boundary_force(mesh, form="edge").F_boundary
    assert b == pytest.approx(a, rel=0.05)
    with pytest.raises(ValueError):
        bal.boundary_force(mesh, form="midpoint")


def test_report_dict(report8):
    d = report8.to_dict()
    assert set(d["pieces"]) == set(bal.PIECES)
    assert np.isfinite(d["relative_gap"])
