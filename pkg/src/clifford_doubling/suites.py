"""Check suites collected into a :class:`DiagnosticsReport`.

Each suite returns a :class:`Section` holding named checks.  A check is hard
(it decides the exit code) or soft (reported only).  Suites never raise: a
module error is caught, recorded on the section and counted as a failure.
"""

from __future__ import annotations

import math
import time
import traceback
from dataclasses import dataclass, field

import numpy as np

from . import ambient as amb
from .initsurf import (ConstructionError, ConstructionParams, build_mesh, derive_params,
                       ell_values, expected_vertex_count, symmetry_error, with_zeta)
from .meshops import edge_topology

SUITES = ("ambient", "construction", "curvature", "linearization", "spectrum", "neck",
          "force", "solve")


@dataclass
class CheckResult:
    name: str
    value: float
    threshold: float | tuple
    passed: bool
    hard: bool = True
    detail: str = ""

    def to_dict(self) -> dict:
        thr = list(self.threshold) if isinstance(self.threshold, tuple) else self.threshold
        return {"name": self.name, "value": _clean(self.value), "threshold": thr,
                "passed": self.passed, "hard": self.hard, "detail": self.detail}


@dataclass
class Section:
    name: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    status: str = "ok"
    error: str = ""
    elapsed: float = 0.0

    def add(self, name, value, threshold, passed, *, hard=True, detail="") -> CheckResult:
        c = CheckResult(name, float(value), threshold, bool(passed), hard, detail)
        self.checks.append(c)
        return c

    def upper(self, name, value, bound, **kw) -> CheckResult:
        return self.add(name, value, bound, value <= bound, **kw)

    def within(self, name, value, lo, hi, **kw) -> CheckResult:
        return self.add(name, value, (lo, hi), lo <= value <= hi, **kw)

    @property
    def passed(self) -> bool:
        return self.status == "ok" and all(c.passed for c in self.checks if c.hard)

    def to_dict(self, timings: bool = True) -> dict:
        out = {"name": self.name, "status": self.status, "passed": self.passed,
               "checks": [c.to_dict() for c in self.checks], "data": _clean(self.data)}
        if self.error:
            out["error"] = self.error
        if timings:
            out["elapsed"] = self.elapsed
        return out


@dataclass
class DiagnosticsReport:
    params: dict
    sections: dict = field(default_factory=dict)
    spectrum_table: list = field(default_factory=list)
    force: dict = field(default_factory=dict)
    solve_history: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    schema_version: str = "1.0"

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.sections.values())

    def to_dict(self, deterministic: bool = False) -> dict:
        out = {
            "schema_version": self.schema_version,
            "params": _clean(self.params),
            "passed": self.passed,
            "sections": {k: s.to_dict(not deterministic) for k, s in self.sections.items()},
            "spectrum_table": _clean(self.spectrum_table),
            "force": _clean(self.force),
            "solve_history": _clean(self.solve_history),
        }
        if not deterministic:
            out["timings"] = dict(self.timings)
        return out


def _clean(obj):
    """JSON-safe copy: numpy scalars and arrays to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


# --- ambient identities ----------------------------------------------------------

def _random_points(n: int, seed: int, margin: float = 0.1) -> np.ndarray:
    rng = np.random.default_rng(seed)
    lim = math.pi / 4 - margin
    return np.column_stack([rng.uniform(-math.pi, math.pi, n), rng.uniform(-math.pi, math.pi, n),
                            rng.uniform(-lim, lim, n)])


def ambient_identities(n: int = 1000, seed: int = 0, h: float = 1e-5) -> dict:
    """Max errors of the coordinate identities at ``n`` random points.

    Finite-difference comparisons use centered steps of size ``h``.
    """
    p = _random_points(n, seed)
    out = {}
    frame = amb.coordinate_frame(p)
    X = amb.phi_map(p)
    # frame against differences of Phi
    fd = np.stack([(amb.phi_map(p + h * e) - amb.phi_map(p - h * e)) / (2 * h) for e in np.eye(3)], 1)
    out["frame_fd"] = float(np.max(np.abs(fd - frame)))
    # metric: Gram matrix of the frame against the closed form
    gram = np.einsum("nik,njk->nij", frame, frame)
    met = amb.ambient_metric(p[:, 2])
    out["metric"] = float(np.max(np.abs(gram - np.einsum("ni,ij->nij", met.diag, np.eye(3)))))
    # Christoffels from centered differences of the metric (only z-dependence)
    dz = (amb.ambient_metric(p[:, 2] + h).diag - amb.ambient_metric(p[:, 2] - h).diag) / (2 * h)
    g = met.diag
    gam = np.zeros_like(met.christoffel)
    for k in range(3):
        for i in range(3):
            for j in range(3):
                d_i_gjk = dz[:, j] * (i == 2) * (j == k)
                d_j_gik = dz[:, i] * (j == 2) * (i == k)
                d_k_gij = dz[:, i] * (k == 2) * (i == j)
                gam[:, k, i, j] = 0.5 / g[:, k] * (d_i_gjk + d_j_gik - d_k_gij)
    out["christoffel_fd"] = float(np.max(np.abs(gam - met.christoffel)))
    out["det"] = float(np.max(np.abs(np.sqrt(np.prod(g, axis=1)) - met.det)))
    out["on_sphere"] = float(np.max(np.abs(np.linalg.norm(X, axis=1) - 1.0)))
    out["killing"] = float(np.max(np.abs(amb.killing_field(p, form="coords")
                                         - amb.killing_field(p, form="ambient"))))
    out["killing_tangent"] = float(np.max(np.abs(np.einsum("ij,ij->i", amb.killing_ambient(X), X))))
    # equivariance Phi(s p) = M Phi(p) for the generators and one composite
    rng = np.random.default_rng(seed + 1)
    gens = [amb.SymmetryElement.generator(k, c) for k, c in
            (("translate-x", rng.uniform(-1, 1)), ("translate-y", rng.uniform(-1, 1)),
             ("reflect-x", rng.uniform(-1, 1)), ("reflect-y", rng.uniform(-1, 1)),
             ("reflect-z", 0.0))]
    gens.append(amb.compose(gens[2], gens[4]))
    out["equivariance"] = float(max(np.max(np.abs(amb.phi_map(s.on_domain(p)) - s.on_ambient(X)))
                                    for s in gens))
    return out


_AMBIENT_TOL = {"frame_fd": 1e-8, "christoffel_fd": 1e-8, "metric": 1e-12, "det": 1e-12,
                "on_sphere": 1e-12, "killing": 1e-12, "killing_tangent": 1e-12,
                "equivariance": 1e-12}


def suite_ambient(params=None, *, n: int = 1000, seed: int = 0, **_) -> Section:
    sec = Section("ambient")
    errs = ambient_identities(n, seed)
    for k, tol in _AMBIENT_TOL.items():
        sec.upper(k, errs[k], tol)
    sec.data = {"n_points": n, "seed": seed}
    return sec


# --- construction ----------------------------------------------------------------

def suite_construction(params: ConstructionParams, *, m_values=range(4, 17),
                       zetas=(-1.0, 0.0, 1.0), mesh_m=None, **_) -> Section:
    """Parameter bounds over a grid of (m, zeta) and structural checks of one mesh."""
    sec = Section("construction")
    rows = []
    for m in m_values:
        for z in zetas:
            p = derive_params(m, z, gamma=params.gamma, n_theta=params.n_theta)
            _, ell, e_ell = ell_values(p, p.b)
            rows.append({"m": m, "zeta": z, "tau": p.tau, "a": p.a, "ell": ell,
                         "ea_error": p.ea_error, "tau_bar": p.tau_bar, "eellm_error": e_ell})
            sec.add(f"Ea m={m} zeta={z:g}", p.ea_error, p.tau_bar, p.ea_holds)
            sec.upper(f"Eellm m={m} zeta={z:g}", e_ell, 10.0)
    sec.data["bounds"] = rows
    p = params if mesh_m is None else with_zeta(derive_params(mesh_m, gamma=params.gamma,
                                                              n_theta=params.n_theta), params.zeta)
    mesh = build_mesh(p)
    _, count = edge_topology(mesh.tri)
    boundary = mesh.boundary_edges
    sec.add("vertex count", mesh.n, expected_vertex_count(p), mesh.n == expected_vertex_count(p))
    sec.add("manifold edges", int(count.max()), 2, count.max() <= 2)
    sec.add("boundary edges", int(np.sum(count == 1)), len(boundary),
            np.sum(count == 1) == len(boundary))
    sec.upper("on sphere", float(np.max(np.abs(np.linalg.norm(mesh.X, axis=1) - 1.0))), 1e-12)
    for name in mesh.symmetries:
        sec.upper(f"symmetry {name}", symmetry_error(mesh, name), 1e-10)
    sec.data["mesh"] = {"m": p.m, "n_vertices": mesh.n, "n_triangles": len(mesh.tri)}
    return sec


# --- curvature ------------------------------------------------------------------

def suite_curvature(params: ConstructionParams, *, refine: bool = True, **_) -> Section:
    from .geomq import chart_shape, h_cross_validation, parallel_torus_H, verify_estimates
    from .models import torus_cell

    sec = Section("curvature")
    mesh = build_mesh(params)
    shape = chart_shape(mesh)
    cv = h_cross_validation(mesh, shape)
    sec.upper("H cross-validation", cv["relative_l2"], 0.05)
    sec.data["cross_validation"] = cv
    if refine:
        p2 = derive_params(params.m, params.zeta, params.b, params.gamma, 2 * params.n_theta,
                           c_bar=params.c_bar, rho_target=params.rho_target)
        cv2 = h_cross_validation(build_mesh(p2))
        sec.add("H refinement decreases", cv2["relative_l2"], cv["relative_l2"],
                cv2["relative_l2"] < cv["relative_l2"])
        sec.data["cross_validation_refined"] = cv2
    worst = 0.0
    for c in (-0.3, -0.1, 0.05, 0.2):
        cell = torus_cell(params.m, 8, c)
        sh = chart_shape(cell)
        worst = max(worst, float(np.max(np.abs(sh.H - 2.0 * math.tan(2.0 * c)))),
                    abs(parallel_torus_H(c) - 2.0 * math.tan(2.0 * c)))
    sec.upper("parallel torus H", worst, 1e-10)
    sec.data["estimates"] = verify_estimates(mesh, shape)
    return sec


# --- linearization and the quadratic remainder -------------------------------------

def suite_linearization(params: ConstructionParams, *, n_fields: int = 3,
                        quadratic: bool = True, **_) -> Section:
    from .geomq import FourierField, linearization_check
    from .models import torus_cell
    from .specsolve import quadratic_estimate

    sec = Section("linearization")
    surfaces = (("torus", torus_cell(params.m, 16), "one"),
                ("initial", build_mesh(params), "inv_rho"))
    for label, mesh, weight in surfaces:
        for s in range(n_fields):
            r = linearization_check(mesh, FourierField.random(params.m, 3, seed=s), weight=weight)
            sec.within(f"{label} field {s} slope", r.slope, 1.9, 2.1)
            sec.data[f"{label}_{s}"] = r.to_dict()
    if quadratic:
        r = quadratic_estimate(surfaces[1][1], FourierField.random(params.m, 3, seed=0))
        sec.within("quadratic remainder slope", r.slope, 1.85, 2.15)
        sec.data["quadratic"] = r.to_dict()
    return sec


# --- spectrum -------------------------------------------------------------------

def suite_spectrum(params: ConstructionParams, *, k: int = 6, models: bool = True,
                   report: "DiagnosticsReport | None" = None, **_) -> Section:
    from .geomq import chart_shape
    from .models import flat_square, octahedral_sphere
    from .specsolve import approximate_kernel, assemble_operator, eigen_low

    sec = Section("spectrum")
    mesh = build_mesh(params)
    op = assemble_operator(mesh, chart_shape(mesh), "h")
    res = eigen_low(op, k)
    ker = approximate_kernel(res, mesh)
    sec.add("one eigenvalue in [-0.2, 0.2]", ker.count_small, 1, ker.count_small == 1)
    sec.add("no second eigenvalue in [-0.5, 0.5]", ker.count_gap, 1, ker.count_gap == 1)
    sec.upper("f0 near 1 on S_5[1]", ker.deviation, 0.2)
    sec.data["kernel"] = ker.to_dict()
    sec.data["method"] = res.method
    table = [{"index": i, "eigenvalue": float(v), "symmetry": res.symmetry,
              "s1_mean": float(ker.s1_means[i])} for i, v in enumerate(res.values)]
    if report is not None:
        report.spectrum_table = table
    if models:
        sq = eigen_low(assemble_operator(flat_square(32), None, "g", potential=0.0), 2)
        sec.upper("Neumann square lowest", abs(sq.values[0]), 1e-10)
        sec.add("Neumann square gap", sq.values[1], 0.0, sq.values[1] > 1.0)
        sph = eigen_low(assemble_operator(octahedral_sphere(8), None, "g", potential=2.0), 3)
        # sym spectrum of -(Delta + 2): the constant at -2, then the l = 2 modes near 4
        sec.upper("sphere lowest sym", abs(sph.values[0] + 2.0), 0.02)
        sec.add("sphere sym gap", sph.values[1], 0.0, sph.values[1] > 0.5)
        sec.data["models"] = {"square": sq.values.tolist(), "sphere": sph.values.tolist()}
    return sec


# --- neck ------------------------------------------------------------------------

def suite_neck(params: ConstructionParams, *, length: float = 10.0, **_) -> Section:
    from .geomq import chart_shape
    from .models import flat_cylinder
    from .specsolve import neck_dirichlet_eig, neck_harmonic_decay

    sec = Section("neck")
    cyl = flat_cylinder(length, 200, 16)
    ce = neck_dirichlet_eig(cyl)
    sec.upper("cylinder Dirichlet eigenvalue", abs(ce.scaled / (ce.flat_value * ce.length ** 2) - 1), 0.01)
    sec.within("cylinder decay rate", neck_harmonic_decay(cyl).rate, 1.5, 2.2)
    mesh = build_mesh(params)
    shape = chart_shape(mesh)
    ne = neck_dirichlet_eig(mesh, min(2.0, params.b), shape=shape)
    sec.add("neck lowest Dirichlet positive", ne.eigenvalue, 0.0, ne.eigenvalue > 0)
    sec.add("neck eigenvalue times length^2", ne.scaled, ne.flat_value * ne.length ** 2, True,
            hard=False, detail="compared against the flat cylinder value")
    dec = neck_harmonic_decay(mesh, min(2.0, params.b), shape=shape)
    sec.within("neck decay rate", dec.rate, 1.5, 2.2)
    sec.data = {"cylinder": ce.to_dict(), "neck": ne.to_dict(), "neck_decay_rate": dec.rate}
    return sec


# --- force ---------------------------------------------------------------------

def suite_force(params: ConstructionParams, *, report: "DiagnosticsReport | None" = None,
                stencil: float = 0.5, m_values=None, **_) -> Section:
    from .balance import boundary_force, force_slope_target, interior_force
    from .geomq import discrete_H

    sec = Section("force")
    mesh = build_mesh(params)
    rep = boundary_force(mesh)
    rep.F_interior = interior_force(mesh, discrete_H(mesh).H)
    sec.upper("interior/boundary agreement", rep.relative_gap, 1e-3)
    sec.upper("waist piece", abs(rep.pieces["0"] / (-2 * math.pi * rep.tau) - 1), 1e-2)
    sym = abs(rep.pieces["+1"] - rep.pieces["-1"]) + abs(rep.pieces["+2"] - rep.pieces["-2"])
    sec.upper("opposite faces agree", sym / abs(rep.F_boundary), 1e-8, hard=False)
    ratios = {}
    for m in (m_values or (params.m,)):
        p0 = derive_params(m, 0.0, gamma=params.gamma, n_theta=params.n_theta)
        F = {z: boundary_force(build_mesh(with_zeta(p0, z))).F_boundary for z in (-stencil, stencil)}
        dF = (F[stencil] - F[-stencil]) / (2 * stencil)
        target = force_slope_target(p0)
        sec.upper(f"dF/dzeta m={m}", abs(dF / target - 1), 0.3)
        ratios[m] = boundary_force(build_mesh(p0)).balance_ratio
    sec.data = {"report": rep.to_dict(), "balance_ratio": ratios}
    if len(ratios) > 1:
        v = np.array(list(ratios.values()))
        sec.add("balance ratio spread", float(np.ptp(v)), 0.0, True, hard=False)
    if report is not None:
        report.force = rep.to_dict()
    return sec


# --- solve ------------------------------------------------------------------------

def suite_solve(params: ConstructionParams, *, tolerances=None,
                report: "DiagnosticsReport | None" = None, **_) -> Section:
    from .driver import embeddedness_check, run_newton

    sec = Section("solve")
    state = run_newton(params, tolerances)
    emb = embeddedness_check(state.perturbed if state.perturbed is not None else state.mesh)
    sec.add("residual reduction", state.reduction, 1e3, state.reduction >= 1e3)
    sec.upper("|zeta|", abs(state.zeta), params.c_bar)
    sec.add("embedded", emb.margin, 0.0, emb.embedded)
    sec.add("genus", emb.genus, params.m ** 2 + 1, emb.genus == params.m ** 2 + 1)
    sd = state.to_dict()
    sd.pop("timings")
    sec.data = {"state": sd, "embeddedness": emb.to_dict()}
    if report is not None:
        report.solve_history = sd["history"]
    return sec


_SUITE_FUNCS = {
    "ambient": suite_ambient, "construction": suite_construction, "curvature": suite_curvature,
    "linearization": suite_linearization, "spectrum": suite_spectrum, "neck": suite_neck,
    "force": suite_force, "solve": suite_solve,
}


def run_suites(params: ConstructionParams, which=None, options: dict | None = None
               ) -> DiagnosticsReport:
    """Run the selected suites in canonical order; unknown names raise ValueError."""
    which = list(SUITES if which is None else which)
    unknown = [w for w in which if w not in _SUITE_FUNCS]
    if unknown:
        raise ValueError(f"unknown check suites: {unknown}")
    options = options or {}
    report = DiagnosticsReport(params=params.to_dict())
    for name in SUITES:
        if name not in which:
            continue
        t0 = time.perf_counter()
        try:
            sec = _SUITE_FUNCS[name](params, report=report, **options.get(name, {}))
        except (ConstructionError, ArithmeticError, RuntimeError, ValueError) as exc:
            sec = Section(name, status="error", error=f"{type(exc).__name__}: {exc}")
            sec.data["traceback"] = traceback.format_exc(limit=3).splitlines()[-3:]
        sec.elapsed = time.perf_counter() - t0
        report.sections[name] = sec
        report.timings[name] = sec.elapsed
    return report


__all__ = ["CheckResult", "Section", "DiagnosticsReport", "SUITES", "ambient_identities",
           "run_suites", "suite_ambient", "suite_construction", "suite_curvature",
           "suite_linearization", "suite_spectrum", "suite_neck", "suite_force", "suite_solve"]
