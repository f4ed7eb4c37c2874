import math

import numpy as np
import pytest

from clifford_doubling import driver as drv
from clifford_doubling.initsurf import build_mesh, derive_params


def test_tolerances_from_dict():
    t = drv.Tolerances.from_dict({"tol_H": 1e-6, "max_iter": 4})
    assert t.tol_H == 1e-6 and t.max_iter == 4 and t.inner_steps == 3
    with pytest.raises(ValueError):
        drv.Tolerances.from_dict({"tolerance": 1.0})


def test_initial_surface_separation(mesh6):
    p = mesh6.params
    rep = drv.embeddedness_check(mesh6)
    # flat sheets at z = +-a tau, geodesic distance 2 a tau
    assert rep.separation == pytest.approx(2 * p.a * p.tau, rel=1e-9)
    assert rep.embedded and rep.bridge_monotone
    assert rep.margin == pytest.approx(1.5, rel=1e-9)


@pytest.mark.parametrize("m", [4, 6, 9])
def test_genus(m):
    rep = drv.embeddedness_check(build_mesh(derive_params(m, n_theta=32)))
    assert rep.euler_characteristic == 2 - 2 * (m * m + 1)
    assert rep.genus == m * m + 1


def test_cell_euler_characteristic(mesh6):
    assert drv.cell_euler_characteristic(mesh6) == pytest.approx(-2.0)


def test_zeta_escape_is_terminal():
    p = derive_params(6, c_bar=0.3)
    s = drv.run_newton(p, drv.Tolerances(max_iter=3, inner_steps=1))
    assert s.status == drv.ZETA_ESCAPED
    assert abs(s.zeta) <= 0.3


def test_huge_initial_perturbation(mesh6):
    s = drv.run_newton(mesh6.params, mesh=mesh6, phi0=np.full(mesh6.n, 5.0))
    assert s.status == drv.PERTURBATION_TOO_LARGE


@pytest.fixture(scope="module")
def solved():
    return drv.run_newton(derive_params(6))


def test_solve_contracts(solved):
    assert solved.reduction >= 1e3
    assert abs(solved.zeta) <= 10
    res = [h[0] for h in solved.history]
    assert res[-1] < res[0]
    assert drv.embeddedness_check(solved.perturbed).embedded


def test_solve_keeps_symmetry(solved):
    from clifford_doubling.specsolve import symmetry_defect
    assert symmetry_defect(solved.phi.values, solved.mesh) <= 1e-10


def test_multiplier_vanishes_at_fixed_point(solved):
    # mu is the chord multiplier, mu_fit its least-squares version; both shrink with the residual
    first_mu = solved.history[0][3]
    assert abs(solved.mu) < 0.05 * abs(first_mu)
    assert abs(solved.mu_fit) < 0.05 * abs(first_mu)


def test_warm_start_is_near_fixed_point(solved):
    again = drv.run_newton(solved.mesh.params, drv.Tolerances(max_iter=1), mesh=solved.mesh,
                           phi0=solved.phi.values)
    assert again.initial_residual == pytest.approx(solved.residual_H, rel=1e-12)
    assert again.residual_H <= solved.residual_H
    assert abs(again.zeta - solved.zeta) < 1e-12


def test_state_dict(solved):
    d = solved.to_dict()
    assert d["status"] in drv.STATUSES
    assert len(d["history"]) == d["iteration"]
    assert math.isfinite(d["phi_over_tau"])
