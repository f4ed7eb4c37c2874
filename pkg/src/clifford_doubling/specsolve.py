"""Discrete Jacobi operators, symmetric subspaces, low spectrum and the deflated solve.

Matrices are piecewise-linear finite elements on the mesh embedded in R^4 (or
R^3 for model meshes).  The Dirichlet energy of a 2D surface is conformally
invariant, so the three gauges g, chi = rho^2 g and h = ((|A|^2 + m^2)/2) g
share one stiffness matrix ``S`` and one potential matrix ``P``; only the mass
changes.  With ``K = S - P`` the operator of a gauge is ``L = -M^{-1} K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .initsurf import (CHART_CATENOID, ConstructionError, SurfaceMesh, cutoff_psi,
                       ell_values, f_tilde_values, region_labels)
from .meshops import cotan_stiffness, face_gradients, mixed_areas, triangle_areas, vertex_average

GAUGES = ("g", "chi", "h")
SYMMETRY_CLASSES = ("sym", "S", "none")
DENSE_LIMIT = 3000


class OperatorError(ValueError):
    """Missing data for the requested operator."""


class NumericalError(RuntimeError):
    """An eigen or linear solve failed."""

    def __init__(self, msg: str, trace: dict | None = None):
        super().__init__(msg)
        self.trace = trace or {}


class PreconditionError(ValueError):
    """Input data violates an operation's precondition."""


@dataclass
class ScalarField:
    values: np.ndarray
    symmetry: str
    mesh: SurfaceMesh = field(repr=False)

    def __post_init__(self):
        if self.symmetry not in SYMMETRY_CLASSES:
            raise ValueError(f"unknown symmetry class {self.symmetry!r}")
        self.values = np.asarray(self.values, dtype=float)


@dataclass
class DiscreteOperator:
    stiffness: sp.csr_matrix
    potential: sp.csr_matrix
    mass: sp.csr_matrix
    gauge: str
    mesh: SurfaceMesh = field(repr=False)

    @property
    def K(self) -> sp.csr_matrix:
        return (self.stiffness - self.potential).tocsr()

    def apply(self, u: np.ndarray) -> np.ndarray:
        """L u = -M^{-1} (S - P) u."""
        return -(self.K @ u) / self.mass.diagonal()

    def matrices(self):
        return self.stiffness, self.potential, self.mass


# --- assembly ----------------------------------------------------------------

def assemble_operator(mesh: SurfaceMesh, shape=None, gauge: str = "g", *,
                      potential: np.ndarray | None = None, m: int | None = None,
                      A2: np.ndarray | None = None) -> DiscreteOperator:
    """Finite-element pair for L = Delta + |A|^2 + 2 in gauge g, chi or h.

    ``potential`` overrides |A|^2 + 2 (model problems such as Delta + 2 on the
    round sphere or the bare Laplacian); otherwise it comes from ``shape.A2``
    or from an explicit ``A2`` array.  The h gauge always needs |A|^2 and m.
    """
    if gauge not in GAUGES:
        raise ValueError(f"unknown gauge {gauge!r}")
    if A2 is None and shape is not None:
        A2 = shape.A2
    A2 = None if A2 is None else np.asarray(A2, dtype=float)
    if potential is None:
        if A2 is None:
            raise OperatorError("curvature data needed for the potential")
        potential = A2 + 2.0
    pot = np.broadcast_to(np.asarray(potential, dtype=float), (mesh.n,))
    S = cotan_stiffness(mesh.rel, mesh.tri, mesh.n)
    mg = mixed_areas(mesh.rel, mesh.tri, mesh.n)
    if gauge == "g":
        mass = mg
    elif gauge == "chi":
        mass = mesh.rho**2 * mg
    else:
        if A2 is None:
            raise OperatorError("gauge h requires |A|^2")
        m = m if m is not None else (mesh.params.m if mesh.params is not None else None)
        if m is None:
            raise OperatorError("gauge h requires the lattice size m")
        mass = 0.5 * (A2 + m * m) * mg
    return DiscreteOperator(S, sp.diags(pot * mg).tocsr(), sp.diags(mass).tocsr(), gauge, mesh)


# --- symmetry ----------------------------------------------------------------

_CLASS_GENERATORS = {"sym": None, "S": ("reflect-x", "reflect-y"), "none": ()}


def group_permutations(mesh: SurfaceMesh, symmetry: str = "sym") -> list[np.ndarray]:
    """All elements of the group generated by the class's vertex permutations."""
    names = _CLASS_GENERATORS[symmetry]
    gens = list(mesh.symmetries.values()) if names is None else [
        mesh.symmetries[k] for k in names if k in mesh.symmetries]
    ident = np.arange(mesh.n)
    elems = {ident.tobytes(): ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = g[s]
                key = h.tobytes()
                if key not in elems:
                    elems[key] = h
                    nxt.append(h)
        frontier = nxt
    return list(elems.values())


def orbit_basis(mesh: SurfaceMesh, symmetry: str = "sym") -> sp.csr_matrix:
    """0/1 matrix Q (n x orbits); invariant fields are exactly Q c."""
    perms = group_permutations(mesh, symmetry)
    label = np.arange(mesh.n)
    for p in perms:
        label = np.minimum(label, p)
    # propagate to a fixed point so labels are orbit minima
    while True:
        new = label.copy()
        for p in perms:
            new = np.minimum(new, label[p])
        if np.array_equal(new, label):
            break
        label = new
    _, col = np.unique(label, return_inverse=True)
    return sp.csr_matrix((np.ones(mesh.n), (np.arange(mesh.n), col)), shape=(mesh.n, col.max() + 1))


@dataclass
class ReducedOperator:
    K: np.ndarray | sp.csr_matrix
    M: np.ndarray | sp.csr_matrix
    Q: sp.csr_matrix
    op: DiscreteOperator = field(repr=False)
    symmetry: str = "sym"

    def lift(self, c: np.ndarray) -> np.ndarray:
        return self.Q @ c


def symmetry_project(obj, symmetry: str = "sym", mesh: SurfaceMesh | None = None):
    """Average a field over the class's group, or restrict an operator to invariant fields.

    For a :class:`ScalarField` (or a plain array with ``mesh``) the result is
    the group average, which is idempotent.  For a :class:`DiscreteOperator` a
    :class:`ReducedOperator` on orbit-constant fields is returned.
    """
    if isinstance(obj, DiscreteOperator):
        Q = orbit_basis(obj.mesh, symmetry)
        return ReducedOperator((Q.T @ obj.K @ Q).tocsr(), (Q.T @ obj.mass @ Q).tocsr(), Q, obj, symmetry)
    if isinstance(obj, ScalarField):
        vals = _average(obj.values, obj.mesh, symmetry)
        return ScalarField(vals, symmetry, obj.mesh)
    if mesh is None:
        raise ValueError("a mesh is needed to project a plain array")
    return _average(np.asarray(obj, dtype=float), mesh, symmetry)


def _average(u: np.ndarray, mesh: SurfaceMesh, symmetry: str) -> np.ndarray:
    perms = group_permutations(mesh, symmetry)
    return sum(u[p] for p in perms) / len(perms)


def symmetry_defect(u: np.ndarray, mesh: SurfaceMesh, symmetry: str = "sym") -> float:
    return float(max(np.max(np.abs(u[p] - u)) for p in group_permutations(mesh, symmetry)))


# --- eigenproblems -------------------------------------------------------------

@dataclass
class EigenResult:
    values: np.ndarray       # eigenvalues of -L in the operator's gauge
    vectors: np.ndarray      # lifted to vertices, M-orthonormal
    method: str
    symmetry: str

    def count_in(self, lo: float, hi: float) -> int:
        return int(np.sum((self.values >= lo) & (self.values <= hi)))


def _generalized_eigh(K, M, k: int, sigma: float, dense: bool | None):
    n = K.shape[0]
    if dense is None:
        dense = n < DENSE_LIMIT
    if dense:
        Kd = K.toarray() if sp.issparse(K) else K
        Md = M.toarray() if sp.issparse(M) else M
        w, v = sla.eigh(0.5 * (Kd + Kd.T), Md)
        order = np.argsort(np.abs(w - sigma))[:k]
        order = order[np.argsort(w[order])]
        return w[order], v[:, order], "dense"
    try:
        v0 = np.random.default_rng(0).standard_normal(n)  # fixed start vector: reproducible runs
        w, v = spla.eigsh(K, k=min(k, n - 2), M=M, sigma=sigma, which="LM", tol=1e-12,
                          maxiter=5000, v0=v0)
    except spla.ArpackNoConvergence as exc:  # pragma: no cover - depends on ARPACK
        raise NumericalError("shift-invert eigensolver did not converge",
                             {"converged": len(exc.eigenvalues), "requested": k}) from exc
    order = np.argsort(w)
    return w[order], v[:, order], "shift-invert"


def eigen_low(op: DiscreteOperator, k: int = 6, subspace: str = "sym", *, sigma: float = 0.0,
              dense: bool | None = None) -> EigenResult:
    """The k eigenvalues of -L nearest ``sigma`` on the chosen symmetric subspace, sorted.

    Solves (S - P) u = lambda M u restricted to orbit-constant fields.  Dense
    LAPACK is used below 3000 unknowns, shift-invert Lanczos otherwise.
    """
    red = symmetry_project(op, subspace)
    w, v, how = _generalized_eigh(red.K, red.M, k, sigma, dense)
    return EigenResult(w, np.asarray(red.lift(v)), how, subspace)


@dataclass
class KernelReport:
    eigenvalues: np.ndarray
    count_small: int            # eigenvalues in [-eps, eps]
    count_gap: int              # eigenvalues in [-gap, gap]
    index: int                  # position of f0 among ``eigenvalues``
    deviation: float            # relative sup distance of f0 from a constant on S_x[1]
    s1_means: np.ndarray        # mean of each eigenfunction over S[1] (sup-normalized)

    def to_dict(self) -> dict:
        return {"eigenvalues": self.eigenvalues.tolist(), "count_small": self.count_small,
                "count_gap": self.count_gap, "index": self.index, "deviation": self.deviation,
                "s1_means": self.s1_means.tolist()}


def approximate_kernel(res: EigenResult, mesh: SurfaceMesh, *, eps: float = 0.2,
                       gap: float = 0.5, x: float = 5.0, b: float | None = None) -> KernelReport:
    """Count small eigenvalues and measure how close f0 is to a constant on S_x[1].

    f0 is the eigenfunction of the eigenvalue nearest 0.  Its distance from the
    constants is (max - min) / (max + min) over S_x[1] = {|t_under| >= a_bar - b - x},
    the relative sup error of the best constant fit.
    """
    p = mesh.params
    b = p.b if b is None else b
    lam = res.values
    i = int(np.argmin(np.abs(lam)))
    f0 = res.vectors[:, i]
    sx = np.abs(mesh.t_under) >= p.a_bar - b - x
    v = f0[sx] * np.sign(np.mean(f0[sx]))
    dev = float((v.max() - v.min()) / (v.max() + v.min())) if v.max() + v.min() > 0 else float("inf")
    s1 = np.abs(mesh.t_under) >= p.a_bar - b
    means = np.array([np.mean(u[s1]) / np.max(np.abs(u)) for u in res.vectors.T])
    return KernelReport(lam, res.count_in(-eps, eps), res.count_in(-gap, gap), i, dev, means)


def dirichlet_restrict(op: DiscreteOperator, interior: np.ndarray, symmetry: str = "S"):
    """Reduced (K, M, Q) for zero boundary values outside ``interior`` on invariant fields."""
    Q = orbit_basis(op.mesh, symmetry)
    mask = np.zeros(op.mesh.n, bool)
    mask[interior] = True
    cols = np.unique(Q[mask].indices)
    # orbits fully inside the region
    inside = np.asarray(Q[~mask].sum(axis=0)).ravel() == 0
    cols = cols[inside[cols]]
    Qi = Q[:, cols]
    return (Qi.T @ op.K @ Qi).tocsr(), (Qi.T @ op.mass @ Qi).tocsr(), Qi


# --- neck diagnostics ------------------------------------------------------------

def _neck_interior(mesh: SurfaceMesh, b: float, x: float, y: float):
    p = mesh.params
    if p is None:  # model cylinder: the whole tube minus its end circles
        row = mesh.row
        last = row.max()
        return np.where((row > 0) & (row < last))[0], float(mesh.meta["length"])
    labels = region_labels(mesh, b, x, y)
    if not labels.available:
        raise ConstructionError(f"region diagnostics unavailable: {labels.reason}")
    tu = mesh.t_under
    lo, hi = b + x, p.a_bar - b - y
    idx = np.where((tu > lo) & (tu < hi))[0]
    return idx, hi - lo


@dataclass
class NeckEigenReport:
    eigenvalue: float
    length: float
    scaled: float            # eigenvalue * length^2
    flat_value: float        # (pi / length)^2
    ell: float | None = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def neck_dirichlet_eig(mesh: SurfaceMesh, b: float = 2.0, x: float = 0.0, y: float = 0.0, *,
                       shape=None, potential=None) -> NeckEigenReport:
    """Lowest Dirichlet eigenvalue of -L_chi on the upper neck Lambda_{x,y}, S class.

    The neck is b + x < t_under < a_bar - b - y; its chi-length is measured in
    t_under.  On a model cylinder the whole tube is used with the bare
    Laplacian unless a potential is given.
    """
    idx, length = _neck_interior(mesh, b, x, y)
    if potential is None and shape is None:
        potential = 0.0 if mesh.params is None else None
    if potential is None:
        from .geomq import chart_shape
        shape = chart_shape(mesh) if shape is None else shape
    op = assemble_operator(mesh, shape, "chi", potential=potential)
    K, M, _ = dirichlet_restrict(op, idx, "S")
    w, _, _ = _generalized_eigh(K, M, 1, 0.0, None if K.shape[0] > 2 else True)
    lam = float(np.min(w))
    ell = None
    if mesh.params is not None:
        ell = float(ell_values(mesh.params, b, x, y)[0])
    return NeckEigenReport(lam, length, lam * length**2, (math.pi / length) ** 2, ell)


@dataclass
class DecayReport:
    rate: float
    xbar: np.ndarray
    amplitude: np.ndarray
    fit_range: tuple

    def to_dict(self) -> dict:
        return {"rate": self.rate, "fit_range": list(self.fit_range),
                "xbar": self.xbar.tolist(), "amplitude": self.amplitude.tolist()}


def neck_harmonic_decay(mesh: SurfaceMesh, b: float = 2.0, data=None, *, shape=None,
                        potential=None, fit_fraction: float = 0.5) -> DecayReport:
    """Solve L_chi V = 0 on the neck with V = u on the inner circle, 0 on the outer one.

    ``data`` is a function of theta (default cos 2 theta).  It must have zero
    mean and be invariant under theta -> -theta and theta -> pi - theta.  The
    decay rate is the least-squares slope of -log max|V| per row against the
    distance xbar from the inner circle, over the first ``fit_fraction`` of it.
    """
    data = (lambda th: np.cos(2.0 * th)) if data is None else data
    nt = mesh.n_theta
    th = 2.0 * np.pi * np.arange(nt) / nt
    u = np.asarray(data(th), dtype=float)
    scale = max(np.max(np.abs(u)), 1e-300)
    if abs(np.mean(u)) > 1e-10 * scale:
        raise PreconditionError("boundary data must have zero mean")
    if (np.max(np.abs(u[(-np.arange(nt)) % nt] - u)) > 1e-10 * scale
            or np.max(np.abs(u[(nt // 2 - np.arange(nt)) % nt] - u)) > 1e-10 * scale):
        raise PreconditionError("boundary data must be neck-symmetric")
    idx, length = _neck_interior(mesh, b, 0.0, 0.0)
    row = mesh.row
    rows = np.unique(row[idx])
    inner_row, outer_row = rows.min() - 1, rows.max() + 1
    if potential is None and shape is None:
        potential = 0.0 if mesh.params is None else None
    if potential is None:
        from .geomq import chart_shape
        shape = chart_shape(mesh) if shape is None else shape
    op = assemble_operator(mesh, shape, "chi", potential=potential)
    K = op.K.tocsr()
    g = np.zeros(mesh.n)
    inner = np.where(row == inner_row)[0]
    g[inner] = u[inner % nt]
    rhs = -(K[idx] @ g)
    V = g.copy()
    V[idx] = spla.spsolve(K[idx][:, idx].tocsc(), rhs)
    tu = mesh.t_under
    t0 = tu[inner].mean()
    rr = np.arange(inner_row, outer_row + 1)
    xbar = np.array([abs(tu[row == r_].mean() - t0) for r_ in rr])
    amp = np.array([np.max(np.abs(V[row == r_])) for r_ in rr])
    sel = (xbar > 0) & (xbar <= fit_fraction * xbar.max()) & (amp > 0)
    slope = np.polyfit(xbar[sel], np.log(amp[sel]), 1)[0]
    return DecayReport(float(-slope), xbar, amp, (float(xbar[sel].min()), float(xbar[sel].max())))


# --- substitute kernel and the deflated solve ----------------------------------------

def substitute_w(mesh: SurfaceMesh) -> ScalarField:
    """w = psi[1/m, 2/m](r) on the sheets and 0 on the bridge."""
    p = mesh.params
    w = cutoff_psi(1.0 / p.m, 2.0 / p.m, mesh.r)
    w = np.where(mesh.chart == CHART_CATENOID, 0.0, w)
    return ScalarField(w, "sym", mesh)


@dataclass
class ModSolveResult:
    u: ScalarField
    mu: float
    mu_projection: float     # multiplier from orthogonality of the right side alone
    residual: float          # relative residual of the bordered system
    pde_residual: float      # max |L_chi u - E - mu w| / max |E|
    orthogonality: float     # |<u, f0>_h| / (|u|_h |f0|_h)
    gap: float


def solve_mod_kernel(op: DiscreteOperator, E: ScalarField, f0: np.ndarray, w: ScalarField,
                     h_mass: np.ndarray, *, gap: float | None = None,
                     min_gap: float = 1e-6) -> ModSolveResult:
    """Solve L_chi u = E + mu w with <u, f0>_h = 0 on the sym subspace.

    The bordered system is
        [ K       M_chi w ] [u ]   [ -M_chi E ]
        [ f0^T M_h    0   ] [mu] = [    0     ]
    with K = S - P, restricted to orbit-constant fields.
    """
    if op.gauge != "chi":
        raise OperatorError("solve_mod_kernel needs the chi-gauge operator")
    if gap is not None and gap < min_gap:
        raise NumericalError("eigen-gap too small to separate f0", {"gap": gap})
    mesh = op.mesh
    Q = orbit_basis(mesh, "sym")
    mchi = op.mass.diagonal()
    Kr = (Q.T @ op.K @ Q).tocsr()
    b_col = Q.T @ (mchi * w.values)
    c_row = Q.T @ (h_mass * f0)
    rhs = np.concatenate([-(Q.T @ (mchi * E.values)), [0.0]])
    A = sp.bmat([[Kr, sp.csr_matrix(b_col[:, None])], [sp.csr_matrix(c_row[None, :]), None]]).tocsc()
    sol = spla.spsolve(A, rhs)
    res = float(np.linalg.norm(A @ sol - rhs) / max(np.linalg.norm(rhs), 1e-300))
    u = Q @ sol[:-1]
    mu = float(sol[-1])
    den = float(f0 @ (mchi * w.values))
    mu_proj = float(-(f0 @ (mchi * E.values)) / den) if den != 0 else float("nan")
    Lu = op.apply(u)
    emax = max(np.max(np.abs(E.values)), 1e-300)
    pde = float(np.max(np.abs(Lu - E.values - mu * w.values)) / emax)
    nu_ = math.sqrt(max(u @ (h_mass * u), 0.0))
    nf = math.sqrt(f0 @ (h_mass * f0))
    # relative to |E| as well, so a solution that is zero up to roundoff counts as orthogonal
    scale = max(nu_, 1e-12 * math.sqrt(E.values @ (h_mass * E.values)), 1e-300)
    orth = float(abs(u @ (h_mass * f0)) / (scale * nf))
    return ModSolveResult(ScalarField(u, "sym", mesh), mu, mu_proj, res, pde, orth,
                          float("nan") if gap is None else gap)


# --- weighted norms ------------------------------------------------------------

def _f_tilde(mesh: SurfaceMesh, gamma: float, b: float | None = None) -> np.ndarray:
    p = mesh.params
    if p is None:
        return np.ones(mesh.n)
    b = p.b if b is None else b
    return f_tilde_values(mesh.t_under, p.a_bar, b, gamma)


def chi_derivatives(mesh: SurfaceMesh, u: np.ndarray):
    """Per-vertex chi-gauge gradient and Hessian magnitudes (finite-difference proxy)."""
    w = triangle_areas(mesh.rel, mesh.tri)
    grad = vertex_average(mesh.tri, face_gradients(mesh.rel, mesh.tri, u), w, mesh.n)
    g1 = np.linalg.norm(grad, axis=1) / mesh.rho
    hess2 = np.zeros(mesh.n)
    for k in range(grad.shape[1]):
        gk = face_gradients(mesh.rel, mesh.tri, grad[:, k])
        hess2 += np.sum(vertex_average(mesh.tri, gk, w, mesh.n) ** 2, axis=1)
    g2 = np.sqrt(hess2) / mesh.rho**2
    return g1, g2


def weighted_norm(field, order: int = 0, gamma: float = 0.5, *, mesh: SurfaceMesh | None = None,
                  b: float | None = None) -> float:
    """max over vertices of (|u| + chi-gauge derivative magnitudes up to ``order``) / f_tilde.

    The Holder seminorm is not discretized.
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    if isinstance(field, ScalarField):
        mesh, u = field.mesh, field.values
    else:
        u = np.asarray(field, dtype=float)
    total = np.abs(u).copy()
    if order >= 1:
        g1, g2 = chi_derivatives(mesh, u)
        total += g1
        if order == 2:
            total += g2
    return float(np.max(total / _f_tilde(mesh, gamma, b)))


# --- quadratic remainder ----------------------------------------------------------

@dataclass
class QuadraticReport:
    scales: np.ndarray
    phi_norm: np.ndarray        # ||s psi||_{2,gamma} per scale
    remainder: np.ndarray       # ||rho^-2 (H_phi - H - L phi)||_{0,gamma} per scale
    slope: float
    constant: float             # max remainder / phi_norm^2

    def to_dict(self) -> dict:
        return {"scales": self.scales.tolist(), "phi_norm": self.phi_norm.tolist(),
                "remainder": self.remainder.tolist(), "slope": self.slope,
                "constant": self.constant}


def quadratic_estimate(mesh: SurfaceMesh, field, scales=(1e-2, 1e-3, 1e-4), *,
                       weight: str = "f_over_rho", collar: int = 2) -> QuadraticReport:
    """Weighted quadratic remainder of rho^-2 H along the ray s * psi.

    ``field`` is a :class:`~clifford_doubling.geomq.FourierField`; psi is that
    field times the chosen weight.  H, L psi and the perturbed H come from the
    analytic chart path, so the remainder has no discretization floor.
    """
    import jax.numpy as jnp

    from .geomq import ChartSpec, _fourier_lin_fn, _weight_fn, interior_vertices, loglog_slope

    import jax

    p = mesh.params
    s = np.asarray(sorted(scales, reverse=True), dtype=float)
    wkw = (p.m, p.rho_target, p.a_bar, p.a, p.b, p.gamma)
    idx = interior_vertices(mesh, collar)
    ft = _f_tilde(mesh, p.gamma)
    charts = []
    psi = np.zeros(mesh.n)
    for kind in np.unique(mesh.chart):
        sel = np.where(mesh.chart == kind)[0]
        spec = ChartSpec.for_mesh(mesh, int(kind))
        uv = jnp.asarray(mesh.uv[sel], dtype=jnp.float64)
        wfun = _weight_fn(spec, weight, *wkw)

        def value(q, spec=spec, wfun=wfun):
            pt = spec.point(q)
            return field(pt[0], pt[1]) * wfun(q)
        psi[sel] = np.asarray(jax.vmap(value)(uv))
        charts.append((sel, spec, uv))
    # normalize so that ||s psi||_{2,gamma} = s
    amp = s / weighted_norm(psi, 2, p.gamma, mesh=mesh)
    R = np.zeros(len(s))
    for sel, spec, uv in charts:
        fn = _fourier_lin_fn(spec, weight, wkw, int(field.m))
        H0, Lphi, Hs, _ = (np.asarray(v) for v in fn(uv, jnp.asarray(field.coeffs), jnp.asarray(amp)))
        rem = np.abs(Hs - H0[:, None] - Lphi[:, None] * amp[None, :])
        rem = rem / (mesh.rho[sel] ** 2 * ft[sel])[:, None]
        inner = np.isin(sel, idx)
        if inner.any():
            R = np.maximum(R, rem[inner].max(axis=0))
    slope, _ = loglog_slope(s, R)
    return QuadraticReport(s, s.copy(), R, slope, float(np.max(R / s**2)))


__all__ = [
    "ScalarField", "DiscreteOperator", "ReducedOperator", "EigenResult", "NeckEigenReport",
    "DecayReport", "ModSolveResult", "OperatorError", "NumericalError", "PreconditionError",
    "assemble_operator", "symmetry_project", "group_permutations", "orbit_basis",
    "symmetry_defect", "eigen_low", "dirichlet_restrict", "neck_dirichlet_eig",
    "neck_harmonic_decay", "substitute_w", "solve_mod_kernel", "weighted_norm",
    "chi_derivatives", "QuadraticReport", "quadratic_estimate", "KernelReport",
    "approximate_kernel",
]
