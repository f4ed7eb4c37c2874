"""Outer fixed-point loop, embeddedness check and the diagnostics report.

One outer iteration of :func:`run_newton` does a few chord steps on the
normal graph function phi at fixed zeta, then measures the vertical force and
moves zeta once (Jacobi style).  The chord operator is assembled on the
current initial surface M_zeta and reused until zeta changes.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .ambient import phi_inverse
from .balance import boundary_force, zeta_update
from .geomq import (PerturbationError, PerturbedMesh, discrete_H, jacobi_potential,
                    perturb_normal)
from .initsurf import (CHART_CATENOID, CHART_LOWER, CHART_UPPER, ConstructionError,
                       ConstructionParams, SurfaceMesh, build_mesh, rebuild_for_zeta)
from .meshops import edge_topology
from .specsolve import (ScalarField, assemble_operator, eigen_low,
                        solve_mod_kernel, substitute_w, symmetry_project, weighted_norm)

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"

CONVERGED = "converged"
MAX_ITER = "max-iterations"
DIVERGED = "diverged"
ZETA_ESCAPED = "zeta-escaped"
PERTURBATION_TOO_LARGE = "perturbation-too-large"
STATUSES = (CONVERGED, MAX_ITER, DIVERGED, ZETA_ESCAPED, PERTURBATION_TOO_LARGE)


@dataclass
class Tolerances:
    tol_H: float = 1e-8
    tol_F: float = 1e-12
    max_iter: int = 10
    inner_steps: int = 3
    max_halvings: int = 5
    diverge_after: int = 3

    @classmethod
    def from_dict(cls, d: dict | None) -> "Tolerances":
        d = dict(d or {})
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class LinearContext:
    """Everything the chord step needs on one initial surface M_zeta."""

    mesh: SurfaceMesh
    op: object
    f0: np.ndarray
    h_mass: np.ndarray
    w: ScalarField
    eigenvalues: np.ndarray
    f0_index: int

    @property
    def gap(self) -> float:
        lam = self.eigenvalues
        others = np.delete(lam, self.f0_index)
        return float(np.min(np.abs(others - lam[self.f0_index]))) if len(others) else float("inf")


def linear_context(mesh: SurfaceMesh, k: int = 4) -> LinearContext:
    """Chord operator in the chi gauge and the approximate kernel f0 of L_h.

    The potential is the discrete Jacobi potential, so the operator is the
    linearization of the same discrete H the loop drives to zero.  f0 is the
    low eigenfunction (|lambda| <= 1) closest to the constants in the h metric.
    """
    A2 = jacobi_potential(mesh) - 2.0
    oh = assemble_operator(mesh, gauge="h", A2=A2)
    ev = eigen_low(oh, k=k)
    hm = oh.mass.diagonal()
    overlap = np.abs(ev.vectors.T @ hm) / math.sqrt(hm.sum())
    low = np.abs(ev.values) <= 1.0
    i = int(np.argmax(np.where(low, overlap, -1.0))) if low.any() else int(np.argmin(np.abs(ev.values)))
    f0 = ev.vectors[:, i] * np.sign(ev.vectors[:, i] @ hm)
    return LinearContext(mesh, assemble_operator(mesh, gauge="chi", A2=A2), f0, hm,
                         substitute_w(mesh), ev.values, i)


@dataclass
class SolveState:
    iteration: int
    zeta: float
    phi: ScalarField
    residual_H: float
    F: float
    mu: float
    history: list = field(default_factory=list)
    status: str = MAX_ITER
    params: ConstructionParams | None = None
    initial_residual: float = float("nan")
    mu_fit: float = float("nan")
    phi_over_tau: float = float("nan")
    gap: float = float("nan")
    timings: dict = field(default_factory=dict)
    perturbed: PerturbedMesh | None = field(default=None, repr=False)

    @property
    def mesh(self) -> SurfaceMesh:
        return self.phi.mesh

    @property
    def reduction(self) -> float:
        return self.initial_residual / self.residual_H if self.residual_H > 0 else float("inf")

    def to_dict(self) -> dict:
        return {
            "status": self.status, "iteration": self.iteration, "zeta": self.zeta,
            "residual_H": self.residual_H, "initial_residual": self.initial_residual,
            "reduction": self.reduction, "F": self.F, "mu": self.mu, "mu_fit": self.mu_fit,
            "phi_over_tau": self.phi_over_tau, "gap": self.gap,
            "history": [{"residual_H": r, "F": f, "zeta": z, "mu": u} for r, f, z, u in self.history],
            "timings": dict(self.timings),
        }


def _residual(mesh: SurfaceMesh, phi: np.ndarray, gamma: float):
    pm = perturb_normal(mesh, phi)
    H = discrete_H(pm).H
    E = symmetry_project(-H / mesh.rho**2, "sym", mesh)
    return weighted_norm(E, 0, gamma, mesh=mesh), E, pm, H


def _mu_fit(ctx: LinearContext, E: np.ndarray) -> float:
    # least-squares multiplier of rho^-2 H = mu w in the chi mass
    mc = ctx.op.mass.diagonal()
    w = ctx.w.values
    return float(-(E @ (mc * w)) / (w @ (mc * w)))


def _backtrack(mesh, phi, u, res, gamma, halvings):
    """Largest step 2^-k (k < halvings) that lowers the residual, else the smallest tried."""
    step, last = 1.0, None
    for _ in range(halvings):
        try:
            trial = _residual(mesh, phi + step * u, gamma)
        except PerturbationError:
            trial = None
        if trial is not None:
            last = (step, trial)
            if trial[0] < res:
                return last
        step *= 0.5
    if last is None:
        raise PerturbationError("no admissible step along the chord direction")
    return last


def run_newton(params: ConstructionParams, tolerances: Tolerances | None = None, *,
               mesh: SurfaceMesh | None = None, phi0: np.ndarray | None = None) -> SolveState:
    """Drive rho^-2 H of the perturbed surface to zero and the force F to zero.

    Each outer iteration: chord steps L_chi u = -rho^-2 H_phi + mu w with
    backtracking on the weighted residual, then zeta <- m^2 F / (8 tau pi^2) + zeta
    and a rebuild of M_zeta on the same grid (phi is carried over vertex by
    vertex).  Terminal statuses are listed in ``STATUSES``.  ``mesh`` and
    ``phi0`` warm-start the loop from an earlier state.
    """
    tol = tolerances or Tolerances()
    t_start = time.perf_counter()
    mesh = build_mesh(params) if mesh is None else mesh
    gamma = params.gamma
    ctx = linear_context(mesh)
    phi = np.zeros(mesh.n) if phi0 is None else np.array(phi0, dtype=float)
    try:
        res, E, pm, _ = _residual(mesh, phi, gamma)
    except PerturbationError as exc:
        log.warning("stopping: %s", exc)
        return SolveState(0, params.zeta, ScalarField(phi, "sym", mesh), float("nan"), float("nan"),
                          0.0, status=PERTURBATION_TOO_LARGE, params=params, gap=ctx.gap)
    state = SolveState(0, params.zeta, ScalarField(phi, "sym", mesh), res, float("nan"), 0.0,
                       params=params, initial_residual=res, gap=ctx.gap, perturbed=pm)
    rising = 0
    prev = res
    for it in range(1, tol.max_iter + 1):
        mu = 0.0
        try:
            for _ in range(tol.inner_steps):
                sol = solve_mod_kernel(ctx.op, ScalarField(E, "sym", mesh), ctx.f0, ctx.w, ctx.h_mass)
                mu = sol.mu
                step, trial = _backtrack(mesh, phi, sol.u.values, res, gamma, tol.max_halvings)
                phi = symmetry_project(phi + step * sol.u.values, "sym", mesh)
                res, E, pm, _ = trial
            force = boundary_force(pm)
        except PerturbationError as exc:
            log.warning("stopping: %s", exc)
            state.status = PERTURBATION_TOO_LARGE
            break
        F = force.F_boundary
        state.iteration, state.residual_H, state.F, state.mu = it, res, F, mu
        state.phi = ScalarField(phi, "sym", mesh)
        state.perturbed = pm
        state.mu_fit = _mu_fit(ctx, E)
        state.history.append((res, F, state.zeta, mu))
        log.info("iteration %d: residual %.3e F %.3e zeta %.5f mu %.3e", it, res, F, state.zeta, mu)
        if res <= tol.tol_H and abs(F) <= tol.tol_F:
            state.status = CONVERGED
            break
        rising = rising + 1 if res > prev else 0
        prev = res
        if rising >= tol.diverge_after:
            state.status = DIVERGED
            break
        zeta = zeta_update(F, mesh.params)
        if abs(zeta) > params.c_bar:
            state.status = ZETA_ESCAPED
            break
        if it == tol.max_iter:
            break
        try:
            mesh = rebuild_for_zeta(mesh, zeta)
        except ConstructionError as exc:
            log.warning("stopping: %s", exc)
            state.status = ZETA_ESCAPED
            break
        state.zeta = zeta
        ctx = linear_context(mesh)
        state.gap = ctx.gap
        try:
            res, E, pm, _ = _residual(mesh, phi, gamma)
        except PerturbationError:
            state.status = PERTURBATION_TOO_LARGE
            break
    state.params = state.mesh.params
    state.phi_over_tau = weighted_norm(state.phi, 0, gamma) / state.params.tau
    state.timings["run_newton"] = time.perf_counter() - t_start
    return state


# --- embeddedness -----------------------------------------------------------------

@dataclass
class EmbeddednessReport:
    embedded: bool
    margin: float
    separation: float
    threshold: float
    bridge_monotone: bool
    monotone_defect: float
    euler_characteristic: int
    genus: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def cell_euler_characteristic(mesh: SurfaceMesh) -> float:
    """Euler characteristic per lattice cell of the closed surface.

    Face vertices and edges are shared by two cells, corner vertices by four.
    """
    mirrors = np.linalg.norm(mesh.mirror_normals, axis=2) > 0
    k = mirrors.sum(1)
    V = np.sum(np.where(k == 0, 1.0, np.where(k == 1, 0.5, 0.25)))
    edges, count = edge_topology(mesh.tri)
    n_b = int(np.sum(count == 1))
    E = (len(edges) - n_b) + 0.5 * n_b
    return float(V - E + len(mesh.tri))


def embeddedness_check(mesh) -> EmbeddednessReport:
    """Sheet separation outside the bridge and monotonicity of the bridge profile."""
    base = mesh.base if isinstance(mesh, PerturbedMesh) else mesh
    X = mesh.X
    p = base.params
    at = p.a * p.tau
    flat = base.r >= 2.0 / p.m
    up = (base.chart == CHART_UPPER)
    lo = (base.chart == CHART_LOWER)
    sep = math.inf
    for A, B in ((up & flat, lo), (lo & flat, up)):
        if A.any() and B.any():
            chord, _ = cKDTree(X[B]).query(X[A])
            sep = min(sep, float(np.min(2.0 * np.arcsin(np.minimum(chord / 2.0, 1.0)))))
    threshold = 0.5 * at
    # bridge profile: z increasing along every column, r increasing away from the waist
    dom = phi_inverse(X)
    nt = base.n_theta
    rows = np.unique(base.row[base.chart == CHART_CATENOID])
    r = np.hypot(dom[:, 0], dom[:, 1]).reshape(-1, nt)[rows]
    z = dom[:, 2].reshape(-1, nt)[rows]
    wi = int(np.searchsorted(rows, base.waist_row))
    dz = np.diff(z, axis=0)
    dr_up = np.diff(r[wi:], axis=0)
    dr_lo = -np.diff(r[: wi + 1], axis=0)
    steps = [dz / p.tau, dr_up / p.tau, dr_lo / p.tau]
    defect = float(min(s.min() for s in steps if s.size))
    monotone = defect > 0
    chi_cell = cell_euler_characteristic(base)
    chi = int(round(p.m * p.m * chi_cell))
    genus = int(round(1 - chi / 2))
    return EmbeddednessReport(bool(sep >= threshold and monotone), float(sep / at - 0.5),
                              float(sep), float(threshold), bool(monotone), defect, chi, genus)


# --- report ------------------------------------------------------------------------

EXIT_OK = 0
EXIT_CHECK_FAILED = 2
EXIT_NUMERICAL = 3
EXIT_CONFIG = 4


def run_report(params: ConstructionParams, which=None, *, options: dict | None = None):
    """Run the selected check suites; return the report and its exit code.

    Exit code 0 iff every hard check passes, 3 if a suite stopped on an error,
    2 otherwise.  ``options`` maps a suite name to keyword overrides.
    """
    from .suites import run_suites

    report = run_suites(params, which, options)
    report.schema_version = SCHEMA_VERSION
    if any(s.status == "error" for s in report.sections.values()):
        return report, EXIT_NUMERICAL
    return report, EXIT_OK if report.passed else EXIT_CHECK_FAILED


__all__ = [
    "EXIT_OK", "EXIT_CHECK_FAILED", "EXIT_NUMERICAL", "EXIT_CONFIG", "run_report",
    "SCHEMA_VERSION", "STATUSES", "Tolerances", "LinearContext", "SolveState",
    "EmbeddednessReport", "linear_context", "run_newton", "embeddedness_check",
    "cell_euler_characteristic",
]
