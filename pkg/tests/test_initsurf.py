import math

import numpy as np
import pytest

from clifford_doubling import initsurf as ini
from clifford_doubling.meshops import edge_topology


def test_tau_and_a_definitions():
    p = ini.derive_params(8, 0.5)
    assert p.tau_bar == pytest.approx(math.exp(-64 / (4 * math.pi)) / 8)
    assert p.tau == pytest.approx(math.exp(0.5) * p.tau_bar)
    # a solves m tau cosh a = 1
    assert 8 * p.tau * math.cosh(p.a) == pytest.approx(1.0)
    assert p.d == pytest.approx(math.pi / (math.sqrt(2) * 8))


@pytest.mark.parametrize("kw", [dict(m=2), dict(m=6.5), dict(m=6, zeta=11.0), dict(m=6, gamma=1.2),
                                dict(m=6, n_theta=60), dict(m=6, n_axial=7), dict(m=6, b=-1.0),
                                dict(m=6, rho_target="m")])
def test_invalid_params(kw):
    with pytest.raises(ini.ConstructionError):
        ini.derive_params(**kw)


def test_bridge_too_wide():
    # m tau >= 1 leaves no room for a catenoid
    with pytest.raises(ini.ConstructionError):
        ini.derive_params(3, 2.5)


@pytest.mark.parametrize("m", range(6, 17))
@pytest.mark.parametrize("zeta", [-1.0, 0.0, 1.0])
def test_ea_bound_from_m6(m, zeta):
    assert ini.derive_params(m, zeta).ea_holds


def test_ea_error_grows_with_tau_at_small_m():
    # the log2 expansion behind the bound is accurate to O((m tau)^2)
    p = ini.derive_params(4, 1.0)
    assert not p.ea_holds
    assert 0.5 < p.ea_error / ((4 * p.tau) ** 2 / 4) < 2.0


def test_ell_bound():
    for m in (4, 10, 16):
        p = ini.derive_params(m)
        _, _, err = ini.ell_values(p, p.b)
        assert err < 10


def test_cutoff():
    s = np.linspace(-1, 3, 401)
    v = ini.cutoff_psi(0.0, 2.0, s)
    assert v[0] == 0 and v[-1] == 1
    assert np.all(np.diff(v) >= 0)
    assert ini.cutoff_psi(0.0, 2.0, 1.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        ini.cutoff_psi(1.0, 1.0, 0.0)


def test_profile_glues_to_sheet():
    p = ini.derive_params(6)
    r = np.array([2.0 / 6, 0.5])
    _, glued = ini.profile_phi(r, p)
    assert np.allclose(glued, p.tau * p.a)
    cat, glued = ini.profile_phi(np.array([p.tau * 1.5]), p)
    assert glued[0] == pytest.approx(cat[0])
    with pytest.raises(ini.ConstructionError):
        ini.profile_phi(np.array([p.tau / 2]), p)


def test_mesh_structure(mesh6):
    p = mesh6.params
    assert mesh6.n == ini.expected_vertex_count(p)
    _, count = edge_topology(mesh6.tri)
    assert count.max() == 2
    assert np.sum(count == 1) == len(mesh6.boundary_edges)
    assert np.allclose(np.linalg.norm(mesh6.X, axis=1), 1.0, atol=1e-14)
    assert ini.seam_mismatch(mesh6) < 1e-10


def test_mesh_symmetries(mesh6):
    for name in mesh6.symmetries:
        assert ini.symmetry_error(mesh6, name) < 1e-10
        perm = mesh6.symmetries[name]
        assert np.array_equal(perm[perm], np.arange(mesh6.n))


def test_positive_orientation(mesh6):
    from clifford_doubling.meshops import triangle_areas
    assert np.all(triangle_areas(mesh6.rel, mesh6.tri) > 0)


def test_rebuild_keeps_grid(mesh6):
    m2 = ini.rebuild_for_zeta(mesh6, 0.7)
    assert m2.n == mesh6.n
    assert m2.tri.shape == mesh6.tri.shape
    bridge = mesh6.chart == ini.CHART_CATENOID
    assert np.allclose(m2.t_under[bridge], mesh6.t_under[bridge])
    assert np.array_equal(m2.domain[~bridge, :2], mesh6.domain[~bridge, :2])
    assert m2.params.zeta == 0.7


def test_region_labels(mesh6):
    p = mesh6.params
    d = ini.region_labels(mesh6, p.b)
    assert d.available and d.eellm_holds
    assert set(np.unique(d.region)) <= {-2, -1, 0, 1, 2}
    bad = ini.region_labels(mesh6, p.a_bar)
    assert not bad.available and bad.reason
    lab = ini.region_label(0.0, p, p.b)
    assert lab.x_under == pytest.approx(-p.b)


def test_f_tilde_range(mesh6):
    p = mesh6.params
    w = ini.field_weights(mesh6, p.gamma)
    assert np.all(w.f_tilde <= 1.0 + 1e-15)
    assert w.f_tilde.min() == pytest.approx(math.exp(-p.gamma * (p.a_bar - 2 * p.b)))
    assert w.lower_ok


@pytest.mark.parametrize("m", [10, 14])
def test_f_tilde_lower_bound(m):
    p = ini.derive_params(m)
    assert ini.field_weights(ini.build_mesh(p), 0.5).lower_ok


def test_rho_f_tilde_upper_bound_is_reported(mesh6):
    # the upper bound only sets in for tau far below desk-scale values; it is reported, not enforced
    w = ini.field_weights(mesh6, 0.5)
    assert np.max(w.rho * w.f_tilde) > w.upper_bound
    assert w.upper_ok is False


def test_tube_triangles_counts():
    tri = ini.tube_triangles(5, 8)
    assert tri.shape == (2 * 4 * 8, 3)
    _, count = edge_topology(tri)
    assert count.max() == 2
