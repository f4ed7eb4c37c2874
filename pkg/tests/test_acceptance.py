"""Acceptance criteria 1 to 10, one PASS/FAIL line per sub-check.

The lines are collected and printed in the terminal summary (see conftest).
Tolerances are the published ones; nothing is loosened here.  Criteria that
do not hold at desk-scale resolution fail visibly.
"""

import json
import time

import numpy as np
import pytest

from clifford_doubling import build_mesh, derive_params
from clifford_doubling.driver import embeddedness_check, run_newton
from clifford_doubling.geomq import FourierField, chart_shape, verify_estimates
from clifford_doubling.models import flat_cylinder
from clifford_doubling.specsolve import neck_dirichlet_eig, neck_harmonic_decay, quadratic_estimate
from clifford_doubling.suites import (suite_ambient, suite_construction, suite_curvature,
                                      suite_force, suite_linearization, suite_spectrum)


class Criterion:
    def __init__(self, number, log, budget):
        self.number = number
        self.log = log
        self.budget = budget
        self.failed = []
        self.t0 = time.perf_counter()

    def check(self, name, passed, value, tol):
        line = f"criterion {self.number:>2} {'PASS' if passed else 'FAIL'}  {name}: {value} (tolerance {tol})"
        self.log.append(line)
        print(line)
        if not passed:
            self.failed.append(name)

    def section(self, sec):
        for c in sec.checks:
            if c.hard:
                self.check(c.name, c.passed, f"{c.value:.6g}", c.threshold)
        if sec.status != "ok":
            self.check(f"{sec.name} completed", False, sec.error, "no error")

    def finish(self):
        elapsed = time.perf_counter() - self.t0
        self.check("runtime", elapsed <= self.budget, f"{elapsed:.1f} s", f"{self.budget} s")
        assert not self.failed, f"criterion {self.number} failed: {self.failed}"


@pytest.fixture
def crit(acceptance_log):
    def make(number, budget):
        return Criterion(number, acceptance_log, budget)
    return make


def test_criterion_01_ambient_identities(crit):
    c = crit(1, 5)
    c.section(suite_ambient(n=1000, seed=0))
    c.finish()


def test_criterion_02_construction_bounds(crit):
    c = crit(2, 5)
    sec = suite_construction(derive_params(6), m_values=range(4, 17), zetas=(-1.0, 0.0, 1.0))
    c.section(sec)
    c.finish()


def test_criterion_03_curvature(crit):
    c = crit(3, 120)
    c.section(suite_curvature(derive_params(6), refine=True))
    c.finish()


def test_criterion_04_linearization(crit):
    c = crit(4, 120)
    c.section(suite_linearization(derive_params(6), n_fields=3, quadratic=False))
    c.finish()


def test_criterion_05_quadratic_estimate(crit):
    c = crit(5, 300)
    mesh = build_mesh(derive_params(10))
    for seed in range(2):
        r = quadratic_estimate(mesh, FourierField.random(10, 3, seed))
        c.check(f"m=10 field {seed} remainder slope", abs(r.slope - 2) <= 0.15, f"{r.slope:.4f}", "2 +- 0.15")
    c.finish()


def test_criterion_06_weighted_H_bound(crit):
    c = crit(6, 600)
    ratios = {}
    for m in (6, 10, 14):
        mesh = build_mesh(derive_params(m))
        ratios[m] = verify_estimates(mesh, chart_shape(mesh))["EH_ratio"]
        c.check(f"m={m} sup |rho^-2 H| / (f tau)", np.isfinite(ratios[m]), f"{ratios[m]:.4g}", "finite")
    v = np.array(list(ratios.values()))
    c.check("variation max/min", v.max() / v.min() < 2, f"{v.max() / v.min():.4f}", "< 2")
    c.finish()


def test_criterion_07_spectrum(crit):
    c = crit(7, 600)
    c.section(suite_spectrum(derive_params(14), k=6, models=True))
    c.finish()


def test_criterion_08_neck(crit):
    c = crit(8, 120)
    cyl = flat_cylinder(10.0, 200, 16)
    r = neck_dirichlet_eig(cyl)
    err = abs(r.eigenvalue / r.flat_value - 1)
    c.check("flat cylinder (pi/l)^2", err <= 0.01, f"{err:.3g}", "0.01 relative")
    mesh = build_mesh(derive_params(14))
    rate = neck_harmonic_decay(mesh, 2.0, shape=chart_shape(mesh)).rate
    c.check("m=14 neck decay rate of cos 2 theta data", 1.5 <= rate <= 2.2, f"{rate:.4f}", "[1.5, 2.2]")
    c.finish()


def test_criterion_09_balancing(crit, acceptance_log):
    c = crit(9, 300)
    sec = suite_force(derive_params(8), m_values=(8, 10))
    c.section(sec)
    ratios = suite_force(derive_params(6), m_values=(6, 8, 10, 12)).data["balance_ratio"]
    v = np.array(list(ratios.values()))
    spread = float(np.ptp(v) / np.mean(v))
    c.check("balance ratio m=6..12 relative spread", spread <= 0.1,
            f"{spread:.4f} (ratios {', '.join(f'{x:.4f}' for x in v)})", "<= 0.1")
    c.finish()


def test_criterion_10_solve(crit):
    c = crit(10, 900)
    p = derive_params(6)
    s1 = run_newton(p)
    s2 = run_newton(p)
    emb = embeddedness_check(s1.perturbed)
    c.check("residual reduction within 10 iterations", s1.reduction >= 1e3 and s1.iteration <= 10,
            f"{s1.reduction:.4g} after {s1.iteration}", ">= 1e3")
    c.check("final |zeta|", abs(s1.zeta) <= 10, f"{abs(s1.zeta):.5f}", "<= 10")
    c.check("embedded", emb.embedded, f"margin {emb.margin:.4f}", "separation >= a tau / 2")
    d1, d2 = s1.to_dict(), s2.to_dict()
    d1.pop("timings"), d2.pop("timings")
    same = json.dumps(d1, sort_keys=True) == json.dumps(d2, sort_keys=True)
    c.check("deterministic repeat", same, same, "bit-identical")
    mu0 = s1.history[0][3]
    c.check("multiplier shrinks at the fixed point", abs(s1.mu) < 0.05 * abs(mu0),
            f"mu {s1.mu:.3g} (first {mu0:.3g})", "< 5% of first")
    c.finish()
