import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clifford_doubling import ambient as amb
from clifford_doubling.suites import ambient_identities

coord = st.floats(-2.0, 2.0)
zc = st.floats(-0.7, 0.7)


def test_identity_suite_tolerances():
    errs = ambient_identities(1000, seed=3)
    for k in ("frame_fd", "christoffel_fd"):
        assert errs[k] < 1e-8, k
    for k in ("metric", "det", "on_sphere", "killing", "killing_tangent", "equivariance"):
        assert errs[k] < 1e-12, k


def test_z_outside_slab_rejected():
    with pytest.raises(amb.DomainError):
        amb.phi_map([0.0, 0.0, math.pi / 4])
    with pytest.raises(amb.DomainError):
        amb.ambient_metric(np.array([0.9]))


@given(coord, coord, zc)
@settings(max_examples=200, deadline=None)
def test_inverse_roundtrip(x, y, z):
    p = np.array([x, y, z])
    q = amb.phi_inverse(amb.phi_map(p))
    # x and y are angles with period pi sqrt2
    per = amb.PERIOD
    dxy = (q[:2] - p[:2] + per / 2) % per - per / 2
    assert np.allclose(dxy, 0.0, atol=1e-12)
    assert abs(q[2] - z) < 1e-12


def test_clifford_torus_is_z_zero():
    rng = np.random.default_rng(1)
    p = np.column_stack([rng.uniform(-3, 3, 50), rng.uniform(-3, 3, 50), np.zeros(50)])
    X = amb.phi_map(p)
    assert np.allclose(np.hypot(X[:, 0], X[:, 1]), 1 / math.sqrt(2))
    assert np.allclose(np.hypot(X[:, 2], X[:, 3]), 1 / math.sqrt(2))


def test_metric_values_at_known_point():
    z = np.array([0.3])
    d = amb.ambient_metric(z).diag[0]
    assert d == pytest.approx([1 + math.sin(0.6), 1 - math.sin(0.6), 1.0])
    assert amb.ambient_metric(z).det[0] == pytest.approx(math.cos(0.6))


def test_offset_matches_difference_without_cancellation():
    base = np.array([0.1, -0.2, 0.05])
    p = base + np.array([1e-9, -2e-9, 3e-9])
    off = amb.phi_offset(p, base)
    frame = amb.coordinate_frame(base)
    lin = (p - base) @ frame
    assert np.allclose(off, lin, rtol=1e-6, atol=0)


def test_killing_is_antisymmetric_linear():
    B = amb.killing_matrix()
    assert np.allclose(B, -B.T)
    X = amb.phi_map(np.array([[0.2, 0.3, 0.1]]))
    assert np.allclose(amb.killing_ambient(X), X @ B.T)


def test_killing_field_unknown_form():
    with pytest.raises(ValueError):
        amb.killing_field(np.zeros(3), form="bogus")


@pytest.mark.parametrize("kind", ["translate-x", "translate-y", "reflect-x", "reflect-y", "reflect-z"])
def test_generators_are_isometries(kind):
    s = amb.SymmetryElement.generator(kind, 0.37)
    assert np.allclose(s.M @ s.M.T, np.eye(4))
    rng = np.random.default_rng(2)
    p = np.column_stack([rng.uniform(-1, 1, 20), rng.uniform(-1, 1, 20), rng.uniform(-0.6, 0.6, 20)])
    assert np.allclose(amb.phi_map(s.on_domain(p)), s.on_ambient(amb.phi_map(p)), atol=1e-13)


def test_reflections_are_involutions():
    for kind in ("reflect-x", "reflect-y", "reflect-z"):
        s = amb.SymmetryElement.generator(kind, 0.2)
        sq = amb.compose(s, s)
        assert np.allclose(sq.M, np.eye(4))
        assert np.allclose(sq.A, np.eye(3)) and np.allclose(sq.b, 0)


def test_unknown_generator():
    with pytest.raises(ValueError):
        amb.SymmetryElement.generator("rotate")
    with pytest.raises(ValueError):
        amb.apply_symmetry(amb.SymmetryElement.generator("reflect-z"), np.zeros(3), space="x")


@given(st.floats(0.0, 3.0))
@settings(max_examples=50, deadline=None)
def test_geodesic_exp_stays_on_sphere(t):
    p = amb.phi_map(np.array([0.1, 0.2, 0.0]))
    v = amb.killing_ambient(p)
    v = t * v / np.linalg.norm(v)
    q = amb.geodesic_exp(p, v)
    assert abs(np.linalg.norm(q) - 1) < 1e-14
    assert math.acos(np.clip(q @ p, -1, 1)) == pytest.approx(min(t, 2 * math.pi - t), abs=1e-7)
