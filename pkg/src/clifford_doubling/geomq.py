"""Fundamental forms, normals and mean curvature of surfaces in S^3.

Two independent mean-curvature computations live here:

* ``chart_shape`` differentiates the analytic chart (catenoid, graph of the
  glued profile, or a constant graph) with jax and contracts with the metric and
  Christoffel symbols of the (x, y, z) coordinates;
* ``discrete_H`` applies the cotangent Laplacian to the R^4 position of the
  mesh and projects on the vertex normal, which works on any perturbed mesh.

Sign conventions: A_ab = <D_a X_b, nu>, H = tr_g A, and nu is chosen with
<nu, d_z> > 0 on the upper sheet, continued through the bridge.  With these,
the parallel torus z = c has H = 2 tan 2c for nu = d_z.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import jax
import jax.numpy as jnp
import numpy as np

from .ambient import SQRT2, coordinate_frame, metric_coefficients, phi_map_xp
from .initsurf import (CHART_CATENOID, CHART_FLAT, CHART_LOWER, CHART_UPPER,
                       SurfaceMesh, f_tilde_values, phi_glued, rho_of_r)
from .meshops import (cotan_stiffness, face_normals_s3, mixed_areas,
                      triangle_areas)

jax.config.update("jax_enable_x64", True)


class PerturbationError(ValueError):
    """A normal perturbation flipped at least one triangle."""


class LinearizationError(RuntimeError):
    """The linearization remainder does not decay quadratically."""


# --- analytic charts ---------------------------------------------------------

@dataclass(frozen=True)
class ChartSpec:
    """Which analytic chart a point lives on and the constants it needs."""

    kind: int
    tau: float = 0.0
    m: int = 1
    a: float = 0.0
    c: float = 0.0

    @classmethod
    def for_mesh(cls, mesh: SurfaceMesh, kind: int) -> "ChartSpec":
        p = mesh.params
        if kind == CHART_FLAT:
            return cls(kind, c=float(mesh.meta.get("c", 0.0)))
        return cls(kind, tau=p.tau, m=p.m, a=p.a)

    @property
    def sign(self) -> float:
        return -1.0 if self.kind == CHART_LOWER else 1.0

    def point(self, uv):
        u, v = uv[0], uv[1]
        if self.kind == CHART_CATENOID:
            r = self.tau * jnp.cosh(u)
            return jnp.stack([r * jnp.cos(v), r * jnp.sin(v), self.tau * u])
        if self.kind in (CHART_UPPER, CHART_LOWER):
            z = self.sign * phi_glued(u, self.m, self.tau, self.a, xp=jnp)
            return jnp.stack([u * jnp.cos(v), u * jnp.sin(v), z])
        if self.kind == CHART_FLAT:
            return jnp.stack([u, v, jnp.asarray(self.c, dtype=u.dtype)])
        raise ValueError(f"no analytic chart for kind {self.kind}")

    def radius(self, uv):
        if self.kind == CHART_CATENOID:
            return self.tau * jnp.cosh(uv[0])
        if self.kind == CHART_FLAT:
            return jnp.hypot(uv[0], uv[1])
        return uv[0]


def _coord_shape(spec: ChartSpec, uv):
    """g_ab, A_ab, coordinate normal N^k and the point, for one chart point."""
    p = spec.point(uv)
    J = jax.jacfwd(spec.point)(uv)          # (3, 2)
    Hs = jax.hessian(spec.point)(uv)        # (3, 2, 2)
    g11, g22, G113, G223, G311, G322 = metric_coefficients(p[2], jnp)
    Gd = jnp.stack([g11, g22, jnp.ones_like(g11)])
    g = J.T @ (Gd[:, None] * J)
    ncov = jnp.cross(J[:, 0], J[:, 1])
    N = ncov / Gd
    N = spec.sign * N / jnp.sqrt(jnp.sum(Gd * N * N))
    P0, P1, P2 = J[0], J[1], J[2]
    Q = jnp.stack([
        G113 * (jnp.outer(P0, P2) + jnp.outer(P2, P0)),
        G223 * (jnp.outer(P1, P2) + jnp.outer(P2, P1)),
        G311 * jnp.outer(P0, P0) + G322 * jnp.outer(P1, P1),
    ])
    A = jnp.einsum("k,kab->ab", Gd * N, Hs + Q)
    return g, A, N, p


def _invariants(g, A):
    gi = jnp.linalg.inv(g)
    H = jnp.sum(gi * A)
    M = gi @ A
    return H, jnp.trace(M @ M)


@dataclass
class ShapeData:
    """Per-point first and second fundamental forms in chart coordinates."""

    g: np.ndarray
    A: np.ndarray
    nu: np.ndarray
    H: np.ndarray
    A2: np.ndarray

    def flipped(self) -> "ShapeData":
        return ShapeData(self.g, -self.A, -self.nu, -self.H, self.A2)


@partial(jax.jit, static_argnums=0)
def _shape_batch(spec: ChartSpec, uv):
    def one(q):
        g, A, N, p = _coord_shape(spec, q)
        H, A2 = _invariants(g, A)
        return g, A, N, p, H, A2
    return jax.vmap(one)(uv)


def chart_shape_points(spec: ChartSpec, uv) -> ShapeData:
    """Exact shape data at chart points ``uv`` (shape (N, 2)) of one chart."""
    uv = jnp.asarray(np.atleast_2d(uv), dtype=jnp.float64)
    g, A, N, p, H, A2 = (np.asarray(x) for x in _shape_batch(spec, uv))
    if np.any(np.abs(p[:, 2]) >= np.pi / 4):
        from .ambient import DomainError
        raise DomainError("chart point outside the coordinate slab")
    nu = np.einsum("nk,nkj->nj", N, coordinate_frame(p))
    return ShapeData(g=g, A=A, nu=nu, H=H, A2=A2)


def chart_shape(mesh: SurfaceMesh) -> ShapeData:
    """Analytic shape data at every vertex of a mesh built from known charts."""
    n = mesh.n
    out = ShapeData(np.zeros((n, 2, 2)), np.zeros((n, 2, 2)), np.zeros((n, 4)),
                    np.zeros(n), np.zeros(n))
    for kind in np.unique(mesh.chart):
        idx = np.where(mesh.chart == kind)[0]
        sd = chart_shape_points(ChartSpec.for_mesh(mesh, int(kind)), mesh.uv[idx])
        for name in ("g", "A", "nu", "H", "A2"):
            getattr(out, name)[idx] = getattr(sd, name)
    return out


def parallel_torus_H(c: float) -> float:
    """Mean curvature of the torus z = c from the chart path (nu = d_z)."""
    sd = chart_shape_points(ChartSpec(CHART_FLAT, c=c), np.array([[0.1, 0.2]]))
    return float(sd.H[0])


# --- discrete geometry ---------------------------------------------------------

def _project_mirrors(v: np.ndarray, mirrors: np.ndarray) -> np.ndarray:
    for k in range(mirrors.shape[1]):
        n = mirrors[:, k]
        v = v - np.einsum("ij,ij->i", v, n)[:, None] * n
    return v


def vertex_normals(mesh: SurfaceMesh, X: np.ndarray | None = None,
                   rel: np.ndarray | None = None) -> np.ndarray:
    """Area-weighted unit normals, tangent to S^3 and to the lateral mirrors."""
    X = mesh.X if X is None else X
    rel = mesh.rel if rel is None else rel
    fn = face_normals_s3(X, rel, mesh.tri)
    vn = np.zeros_like(X)
    for k in range(3):
        np.add.at(vn, mesh.tri[:, k], fn)
    vn = _project_mirrors(vn, mesh.mirror_normals)
    vn -= np.einsum("ij,ij->i", vn, X)[:, None] * X
    return vn / np.linalg.norm(vn, axis=1, keepdims=True)


@dataclass
class PerturbedMesh:
    base: SurfaceMesh
    phi: np.ndarray
    X: np.ndarray
    rel: np.ndarray
    nu_base: np.ndarray

    @property
    def tri(self):
        return self.base.tri


@dataclass
class DiscreteShape:
    H: np.ndarray
    nu: np.ndarray
    mass: np.ndarray
    laplace_X: np.ndarray


def discrete_H(mesh: SurfaceMesh | PerturbedMesh) -> DiscreteShape:
    """Mean curvature H_i = <(Delta X)_i, nu_i> from the cotangent Laplacian.

    At lateral boundary vertices the half star is used; since the normal lies
    in the mirror 3-plane this equals the mirror-completed value.
    """
    base = mesh.base if isinstance(mesh, PerturbedMesh) else mesh
    X, rel = mesh.X, mesh.rel
    S = cotan_stiffness(rel, base.tri, base.n)
    Mv = mixed_areas(rel, base.tri, base.n)
    LX = -(S @ rel) / Mv[:, None]
    nu = vertex_normals(base, X, rel)
    H = np.einsum("ij,ij->i", LX, nu)
    return DiscreteShape(H=H, nu=nu, mass=Mv, laplace_X=LX)


def perturb_normal(mesh: SurfaceMesh, phi, nu: np.ndarray | None = None,
                   check: bool = True) -> PerturbedMesh:
    """Vertex-wise great-circle exponential X_phi = cos(phi) X + sin(phi) nu."""
    phi = np.broadcast_to(np.asarray(phi, dtype=float), (mesh.n,)).copy()
    nu = vertex_normals(mesh) if nu is None else nu
    c1 = -2.0 * np.sin(0.5 * phi) ** 2   # cos(phi) - 1 without cancellation
    sn = np.sin(phi)
    X = mesh.X + c1[:, None] * mesh.X + sn[:, None] * nu
    rel = mesh.rel + c1[:, None] * mesh.X + sn[:, None] * nu
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    out = PerturbedMesh(base=mesh, phi=phi, X=X, rel=rel, nu_base=nu)
    if check and np.any(phi != 0):
        f0 = face_normals_s3(mesh.X, mesh.rel, mesh.tri)
        f1 = face_normals_s3(X, rel, mesh.tri)
        if np.any(np.einsum("ij,ij->i", f0, f1) <= 0):
            raise PerturbationError("normal perturbation flipped a triangle")
    return out


def jacobi_potential(mesh: SurfaceMesh, eps: float = 1e-6) -> np.ndarray:
    """Discrete |A|^2 + 2: rate of change of the discrete H under unit normal speed.

    Moving every vertex along its normal with speed 1 changes H at the rate
    Delta(1) + |A|^2 + Ric(nu, nu) = |A|^2 + 2.  Measuring that rate on the
    discrete H (centered difference) gives the potential that makes the
    finite-element operator the linearization of ``discrete_H``.
    """
    nu = vertex_normals(mesh)
    ones = np.full(mesh.n, eps)
    hp = discrete_H(perturb_normal(mesh, ones, nu, check=False)).H
    hm = discrete_H(perturb_normal(mesh, -ones, nu, check=False)).H
    return (hp - hm) / (2.0 * eps)


def mesh_l2(mesh: SurfaceMesh, u: np.ndarray, mass: np.ndarray | None = None) -> float:
    Mv = mixed_areas(mesh.rel, mesh.tri, mesh.n) if mass is None else mass
    return float(np.sqrt(np.sum(Mv * u * u)))


def h_cross_validation(mesh: SurfaceMesh, shape: ShapeData | None = None) -> dict:
    """Relative mesh-L2 discrepancy between discrete and analytic H."""
    shape = chart_shape(mesh) if shape is None else shape
    dsh = discrete_H(mesh)
    err = mesh_l2(mesh, dsh.H - shape.H, dsh.mass)
    ref = mesh_l2(mesh, shape.H, dsh.mass)
    return {"relative_l2": err / ref if ref > 0 else err, "abs_l2": err, "ref_l2": ref,
            "normal_alignment": float(np.min(np.einsum("ij,ij->i", dsh.nu, shape.nu)))}


# --- linearization at chart level ------------------------------------------------

def _cross4_jnp(a, b, c):
    # <n, v> = det[v, a, b, c], expanded along the first row
    def d3(i, j, k):
        return (a[i] * (b[j] * c[k] - b[k] * c[j])
                - a[j] * (b[i] * c[k] - b[k] * c[i])
                + a[k] * (b[i] * c[j] - b[j] * c[i]))
    return jnp.stack([d3(1, 2, 3), -d3(0, 2, 3), d3(0, 1, 3), -d3(0, 1, 2)])


def _r4_normal(spec: ChartSpec, Xfun, uv):
    J = jax.jacfwd(Xfun)(uv)
    n = -spec.sign * _cross4_jnp(Xfun(uv), J[:, 0], J[:, 1])
    return n / jnp.linalg.norm(n)


def _r4_H(spec: ChartSpec, Yfun, uv):
    Yv = jax.jacfwd(Yfun)(uv)
    Yh = jax.jacfwd(jax.jacfwd(Yfun))(uv)
    N = -spec.sign * _cross4_jnp(Yfun(uv), Yv[:, 0], Yv[:, 1])
    N = N / jnp.linalg.norm(N)
    g = Yv.T @ Yv
    A = jnp.einsum("kab,k->ab", Yh, N)
    return _invariants(g, A)


@dataclass(frozen=True)
class FourierField:
    """F(x, y) = sum_kl c_kl cos(sqrt2 m k x) cos(sqrt2 m l y), symmetrized in x <-> y.

    Every term is invariant under the lattice reflections, so the field lies in
    the symmetric class.  ``coeffs`` is a (K, K) array.
    """

    coeffs: np.ndarray
    m: int

    @classmethod
    def random(cls, m: int, order: int = 3, seed=None) -> "FourierField":
        """Gaussian coefficients rescaled so the C^2 bound of F equals one.

        The bound is sum |c_kl| * 2 * (1 + 2 m^2 (k^2 + l^2)), which dominates
        sup |F| + sup |D^2 F| for the symmetrized sum.
        """
        rng = np.random.default_rng(seed)
        c = rng.normal(size=(order, order))
        return cls(c / cls._c2_bound(c, m), m)

    @staticmethod
    def _c2_bound(c, m):
        k = np.arange(c.shape[0])
        w = 2.0 * (1.0 + 2.0 * m * m * (k[:, None] ** 2 + k[None, :] ** 2))
        return float(np.sum(np.abs(c) * w))

    @staticmethod
    def evaluate(x, y, coeffs, m, xp=jnp):
        k = xp.arange(coeffs.shape[0]) * (SQRT2 * m)
        cx, cy = xp.cos(k * x), xp.cos(k * y)
        c = coeffs + coeffs.T
        return 0.5 * (cx @ c @ cy)

    def __call__(self, x, y):
        return self.evaluate(x, y, jnp.asarray(self.coeffs), self.m)


def _weight_fn(spec: ChartSpec, weight: str, m, rho_target, a_bar, a, b, gamma):
    if weight not in ("one", "inv_rho", "f_over_rho"):
        raise ValueError(f"unknown weight {weight!r}")

    def w(uv):
        if weight == "one":
            return 1.0
        r = spec.radius(uv)
        out = 1.0 / rho_of_r(r, m, rho_target, xp=jnp)
        if weight == "f_over_rho":
            if spec.kind == CHART_CATENOID:
                tu = (a_bar / a) * uv[0]
            else:
                tu = (a_bar / a) * jnp.arccosh(jnp.maximum(r / spec.tau, 1.0))
            out = out * f_tilde_values(tu, a_bar, b, gamma, xp=jnp)
        return out
    return w


def make_field(spec: ChartSpec, F, weight: str = "inv_rho", *, m: int = 1, rho_target: str = "2m",
               a_bar: float = 1.0, a: float = 1.0, b: float = 1.0, gamma: float = 0.5):
    """Chart-level field phi(uv) = F(x, y) * weight, with weight 1, 1/rho or f_tilde/rho."""
    w = _weight_fn(spec, weight, m, rho_target, a_bar, a, b, gamma)

    def phi(uv):
        p = spec.point(uv)
        return F(p[0], p[1]) * w(uv)
    return phi


def _lin_terms(spec: ChartSpec, phi_fun, uv, eps):
    Xfun = lambda q: phi_map_xp(spec.point(q), jnp)
    nufun = lambda q: _r4_normal(spec, Xfun, q)

    def H_of(e):
        def Y(q):
            f = e * phi_fun(q)
            return jnp.cos(f) * Xfun(q) + jnp.sin(f) * nufun(q)
        return _r4_H(spec, Y, uv)[0]

    H0, A2 = _r4_H(spec, Xfun, uv)
    # L phi = Delta_g phi + (|A|^2 + 2) phi
    def flux(q):
        J = jax.jacfwd(Xfun)(q)
        g = J.T @ J
        sq = jnp.sqrt(jnp.linalg.det(g))
        return sq * jnp.linalg.solve(g, jax.grad(phi_fun)(q))
    J = jax.jacfwd(Xfun)(uv)
    sq = jnp.sqrt(jnp.linalg.det(J.T @ J))
    lap = jnp.trace(jax.jacfwd(flux)(uv)) / sq
    Lphi = lap + (A2 + 2.0) * phi_fun(uv)
    Hs = jax.vmap(H_of)(eps)
    return H0, Lphi, Hs, spec.radius(uv)


_LIN_CACHE: dict = {}


def _fourier_lin_fn(spec: ChartSpec, weight: str, wkw: tuple, m: int):
    key = (spec, weight, wkw, m)
    if key not in _LIN_CACHE:
        w = _weight_fn(spec, weight, *wkw)

        def one(q, coeffs, eps):
            def phi(u):
                p = spec.point(u)
                return FourierField.evaluate(p[0], p[1], coeffs, m) * w(u)
            return _lin_terms(spec, phi, q, eps)
        _LIN_CACHE[key] = jax.jit(jax.vmap(one, in_axes=(0, None, None)))
    return _LIN_CACHE[key]


def chart_linearization(spec: ChartSpec, phi_fun, uv, eps_list):
    """Per point: H, L phi and H of the eps phi perturbations (all analytic)."""
    eps = jnp.asarray(eps_list, dtype=jnp.float64)
    fn = jax.jit(jax.vmap(lambda q: _lin_terms(spec, phi_fun, q, eps)))
    H0, Lphi, Hs, r = fn(jnp.asarray(uv, dtype=jnp.float64))
    return np.asarray(H0), np.asarray(Lphi), np.asarray(Hs), np.asarray(r)


@dataclass
class OrderReport:
    eps: np.ndarray
    remainder: np.ndarray
    slope: float
    slopes: np.ndarray
    ok: bool

    def to_dict(self) -> dict:
        return {"eps": self.eps.tolist(), "remainder": self.remainder.tolist(),
                "slope": self.slope, "slopes": self.slopes.tolist(), "ok": self.ok}


def loglog_slope(x, y) -> tuple[float, np.ndarray]:
    lx, ly = np.log(np.asarray(x)), np.log(np.asarray(y))
    local = np.diff(ly) / np.diff(lx)
    return float(np.polyfit(lx, ly, 1)[0]), local


def interior_vertices(mesh: SurfaceMesh, collar: int = 2) -> np.ndarray:
    """Vertices at least ``collar`` rows away from the lateral boundary."""
    if mesh.n_theta:
        row = mesh.row
        nr = mesh.n // mesh.n_theta
        return np.where((row >= collar) & (row <= nr - 1 - collar))[0]
    bd = np.zeros(mesh.n, bool)
    bd[mesh.boundary_vertices()] = True
    for _ in range(collar - 1):
        nb = np.zeros(mesh.n, bool)
        for k in range(3):
            hit = bd[mesh.tri].any(axis=1)
            nb[mesh.tri[hit, k]] = True
        bd |= nb
    return np.where(~bd)[0]


def linearization_check(mesh: SurfaceMesh, F, epsilons=(1e-2, 1e-3, 1e-4), *,
                        weight: str = "inv_rho", tol: float = 0.1, raise_on_fail: bool = False,
                        collar: int = 2) -> OrderReport:
    """Remainder of H_{eps phi} - H - eps L phi over an eps ladder.

    ``F(x, y)`` is evaluated in domain coordinates (jax-traceable); the field is
    F times the chosen weight.  The remainder is the max over vertices away
    from the lateral boundary collar.
    """
    eps = np.asarray(sorted(epsilons, reverse=True), dtype=float)
    idx = interior_vertices(mesh, collar)
    R = np.zeros(len(eps))
    p = mesh.params
    wkw = ((1, "2m", 1.0, 1.0, 1.0, 0.5) if p is None else
           (p.m, p.rho_target, p.a_bar, p.a, p.b, p.gamma))
    for kind in np.unique(mesh.chart[idx]):
        sel = idx[mesh.chart[idx] == kind]
        spec = ChartSpec.for_mesh(mesh, int(kind))
        uv = jnp.asarray(mesh.uv[sel], dtype=jnp.float64)
        if isinstance(F, FourierField):
            fn = _fourier_lin_fn(spec, weight, wkw, int(F.m))
            H0, Lphi, Hs, _ = (np.asarray(v) for v in fn(uv, jnp.asarray(F.coeffs), jnp.asarray(eps)))
        else:
            phi_fun = make_field(spec, F, weight, m=wkw[0], rho_target=wkw[1], a_bar=wkw[2],
                                 a=wkw[3], b=wkw[4], gamma=wkw[5])
            H0, Lphi, Hs, _ = chart_linearization(spec, phi_fun, uv, eps)
        rem = np.abs(Hs - H0[:, None] - Lphi[:, None] * eps[None, :])
        R = np.maximum(R, rem.max(axis=0))
    if np.all(R == 0):
        return OrderReport(eps, R, float("nan"), np.full(len(eps) - 1, np.nan), True)
    slope, local = loglog_slope(eps, R)
    ok = abs(slope - 2.0) <= tol
    if raise_on_fail and not 1.5 <= slope <= 2.5:
        raise LinearizationError(f"remainder slope {slope:.3f} is not quadratic")
    return OrderReport(eps, R, slope, local, ok)


# --- estimate diagnostics --------------------------------------------------------

def verify_estimates(mesh: SurfaceMesh, shape: ShapeData | None = None) -> dict:
    """Discrete sups of the weighted quantities controlling the initial surface."""
    shape = chart_shape(mesh) if shape is None else shape
    p = mesh.params
    tau, m = p.tau, p.m
    rho = mesh.rho
    z = np.abs(mesh.domain[:, 2])
    H, A2 = shape.H, shape.A2
    out = {}
    out["H_weighted"] = float(np.max(np.abs(H / rho**2) / ((tau + rho**-2) * (z + tau))))
    out["A2_weighted"] = float(np.max(np.abs(A2 - 2 * tau**2 * rho**4) / (1 + tau * rho**2)))
    ft = f_tilde_values(mesh.t_under, p.a_bar, p.b, p.gamma)
    out["EH_ratio"] = float(np.max(np.abs(H / rho**2) / ft) / tau)
    # h against the Gauss-map metric on S_0[0] (catenoid chart (t, theta))
    s0 = (mesh.chart == CHART_CATENOID) & (np.abs(mesh.t_under) <= p.b)
    r = mesh.r[s0]
    h = 0.5 * (A2[s0] + m * m)[:, None, None] * shape.g[s0]
    model = (tau**2 / r**2)[:, None, None] * np.eye(2)
    rel = np.linalg.norm((h - model) / (tau**2 / r**2)[:, None, None], ord=2, axis=(1, 2))
    out["h_vs_gauss_over_tau"] = float(np.max(rel) / tau) if rel.size else float("nan")
    # h against the flat metric on S_0[1] (graph chart (r, theta))
    s1 = np.isin(mesh.chart, (CHART_UPPER, CHART_LOWER)) & (np.abs(mesh.t_under) >= p.a_bar - p.b)
    rr = mesh.uv[s1, 0]
    h1 = 0.5 * (A2[s1] + m * m)[:, None, None] * shape.g[s1]
    flat = 0.5 * m * m * np.stack([np.ones_like(rr), np.zeros_like(rr), np.zeros_like(rr), rr**2], 1).reshape(-1, 2, 2)
    scale = np.stack([np.ones_like(rr), rr], 1)
    dev = (h1 - flat) / (0.5 * m * m * scale[:, :, None] * scale[:, None, :])
    out["h_vs_flat_times_m2"] = float(np.max(np.abs(dev)) * m * m) if dev.size else float("nan")
    # transition region smallness
    lam = (np.abs(mesh.t_under) > p.b) & (np.abs(mesh.t_under) < p.a_bar - p.b)
    if np.any(lam):
        at = np.abs(mesh.t_under[lam])
        xmin = np.minimum(at - p.b, p.a_bar - p.b - at)
        wt = np.exp(1.5 * xmin)
        out["Lambda_A2"] = float(np.max(A2[lam] / rho[lam] ** 2 * wt))
        out["Lambda_m2"] = float(np.max(m * m / rho[lam] ** 2 * wt))
        out["Lambda_reference"] = float(np.exp(-1.5 * p.b))
    return out


__all__ = [
    "ChartSpec", "ShapeData", "PerturbedMesh", "DiscreteShape", "OrderReport",
    "PerturbationError", "LinearizationError", "chart_shape", "chart_shape_points",
    "parallel_torus_H", "vertex_normals", "discrete_H", "jacobi_potential", "perturb_normal", "mesh_l2",
    "h_cross_validation", "make_field", "FourierField", "chart_linearization", "linearization_check",
    "loglog_slope", "interior_vertices", "verify_estimates", "triangle_areas",
]
