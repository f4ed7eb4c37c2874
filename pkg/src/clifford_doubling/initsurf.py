"""Initial surfaces: two parallel Clifford tori joined by a catenoidal bridge.

One lattice cell is meshed as a single structured tube.  Rows run from the
outer square boundary of the lower sheet, inward along the lower sheet, through
the bridge (uniform in the rescaled axial coordinate t_under), and back out
along the upper sheet.  Columns are the polar angle theta.  Because the grid is
shared by the catenoid chart and both graph charts, the seams are watertight by
construction and the lattice symmetries act as index permutations.

Profile helpers accept an ``xp`` namespace so the same formulas can be traced
by jax in :mod:`clifford_doubling.geomq`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ambient import SQRT2, phi_map, phi_offset

# chart codes stored per vertex
CHART_CATENOID = 0
CHART_UPPER = 1
CHART_LOWER = -1
CHART_FLAT = 2       # graph z = const over the square (model meshes)
CHART_EUCLID = 3     # plain R^3 model surfaces

REGION_CODES = {"S0": 0, "S1-upper": 1, "S1-lower": -1, "Lambda-upper": 2, "Lambda-lower": -2}
REGION_NAMES = {v: k for k, v in REGION_CODES.items()}

# radial breakpoints of the gluing annulus, in units of 1/m; the cut-off
# psi[1/m, 2/m] only varies on [4/3, 5/3]
_BAND_LO, _BAND_HI, _ANNULUS_OUT = 4.0 / 3.0, 5.0 / 3.0, 1.8
_BAND_REFINE = 6.0


class ConstructionError(ValueError):
    """Parameters do not define a valid initial surface."""


# --- cut-off and profile ---------------------------------------------------

def Psi(s, xp=np):
    """C^2 quintic step: 0 below -1, 1 above 1, Psi - 1/2 odd."""
    s = xp.clip(s, -1.0, 1.0)
    return 0.5 + (15.0 * s - 10.0 * s**3 + 3.0 * s**5) / 16.0


def cutoff_psi(a: float, b: float, s, xp=np):
    """psi[a, b](s): Psi composed with the affine map sending a to -3 and b to 3."""
    if a == b:
        raise ValueError("cut-off endpoints must differ")
    L = -3.0 + 6.0 * (s - a) / (b - a)
    return Psi(L, xp)


def phi_cat(r, tau: float, xp=np):
    """Height of the catenoid over radius r, tau * arccosh(r / tau), in log form."""
    return tau * (xp.log(r) - math.log(tau) + xp.log1p(xp.sqrt(1.0 - (tau / r) ** 2)))


def phi_glued(r, m: int, tau: float, a: float, xp=np):
    """Catenoid height blended into the constant tau * a on [1/m, 2/m]."""
    pc = phi_cat(r, tau, xp)
    return pc + cutoff_psi(1.0 / m, 2.0 / m, r, xp) * (tau * a - pc)


def profile_phi(r, params: "ConstructionParams"):
    """Return ``(phi_cat, phi_glued)`` at radii ``r >= tau``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < params.tau):
        raise ConstructionError("radius below the catenoid waist")
    return (phi_cat(r, params.tau),
            phi_glued(r, params.m, params.tau, params.a))


def rho_of_r(r, m: int, target: str = "2m", xp=np):
    """Weight rho: 1/r on the bridge side, the constant target past 2/m."""
    T = 2.0 * m if target == "2m" else 2.0 / m
    return 1.0 / r + cutoff_psi(1.0 / m, 2.0 / m, r, xp) * (T - 1.0 / r)


# --- parameters ------------------------------------------------------------

@dataclass(frozen=True)
class ConstructionParams:
    m: int
    zeta: float
    b: float
    gamma: float
    n_theta: int
    n_axial: int
    n_square: int
    tau_bar: float
    tau: float
    a: float
    a_bar: float
    c_bar: float = 10.0
    rho_target: str = "2m"
    ea_error: float = 0.0

    @property
    def d(self) -> float:
        """Half side of the square cell, pi / (sqrt2 m)."""
        return math.pi / (SQRT2 * self.m)

    @property
    def ea_holds(self) -> bool:
        return self.ea_error < self.tau_bar

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["d"] = self.d
        out["ea_holds"] = self.ea_holds
        return out


def _tau_bar(m: int) -> float:
    return math.exp(-m * m / (4.0 * math.pi)) / m


def _acosh_inv(mt: float) -> float:
    # a with tau cosh a = 1/m, i.e. a = arccosh(1/(m tau))
    q = 1.0 / mt
    return math.log(q) + math.log1p(math.sqrt(1.0 - 1.0 / (q * q)))


def default_b(m: int) -> float:
    return min(2.0, (_acosh_inv(m * _tau_bar(m))) / 4.0)


def derive_params(m: int, zeta: float = 0.0, b: float | None = None, gamma: float = 0.5,
                  n_theta: int = 64, n_axial: int | None = None, n_square: int | None = None,
                  *, c_bar: float = 10.0, rho_target: str = "2m") -> ConstructionParams:
    """Derive tau, a and the mesh resolution for lattice size ``m``.

    The axial and radial resolutions default to a grid whose cells are close
    to square in the chi metric; both depend only on m and n_theta so that the
    grid is reused verbatim when zeta changes.
    """
    if int(m) != m or m < 3:
        raise ConstructionError("m must be an integer >= 3")
    m = int(m)
    if abs(zeta) > c_bar:
        raise ConstructionError(f"|zeta| = {abs(zeta)} exceeds the bound {c_bar}")
    if not 0.0 < gamma < 1.0:
        raise ConstructionError("gamma must lie in (0, 1)")
    if rho_target not in ("2m", "2/m"):
        raise ConstructionError("rho_target must be '2m' or '2/m'")
    if n_theta < 8 or n_theta % 8:
        raise ConstructionError("n_theta must be a positive multiple of 8 and at least 8")
    tau_bar = _tau_bar(m)
    tau = math.exp(zeta) * tau_bar
    if m * tau >= 1.0:
        raise ConstructionError(f"m tau = {m * tau:.3g} >= 1: no bridge fits for this zeta")
    a = _acosh_inv(m * tau)
    a_bar = _acosh_inv(m * tau_bar)
    if b is None:
        b = min(2.0, a_bar / 4.0)
    if b <= 0:
        raise ConstructionError("b must be positive")
    h = 2.0 * math.pi / n_theta
    if n_axial is None:
        n_axial = 2 * math.ceil(a_bar / h)
    if n_axial % 2 or n_axial < 2:
        raise ConstructionError("n_axial must be even so the waist is a grid row")
    if n_square is None:
        n_square = default_sheet_rows(n_theta)
    if n_square < 4:
        raise ConstructionError("n_square must be at least 4")
    ea_error = abs(a + zeta - m * m / (4.0 * math.pi) - math.log(2.0))
    return ConstructionParams(
        m=m, zeta=float(zeta), b=float(b), gamma=float(gamma), n_theta=int(n_theta),
        n_axial=int(n_axial), n_square=int(n_square), tau_bar=tau_bar, tau=tau, a=a,
        a_bar=a_bar, c_bar=float(c_bar), rho_target=rho_target, ea_error=ea_error,
    )


def with_zeta(params: ConstructionParams, zeta: float) -> ConstructionParams:
    """Same lattice and grid, new displacement parameter."""
    return derive_params(params.m, zeta, params.b, params.gamma, params.n_theta,
                         params.n_axial, params.n_square, c_bar=params.c_bar,
                         rho_target=params.rho_target)


# --- radial rows of the sheets ---------------------------------------------
#
# Sheet rows are uniform in an index xi in (0, 1].  In u = log(m r) the rows
# follow a smooth density that is _BAND_REFINE times higher on the cut-off
# band, and past the annulus they are stretched smoothly (in xi) to reach the
# square boundary.  Smooth grading keeps the cotangent Laplacian consistent;
# abrupt spacing jumps do not.

_MARGIN = 0.3


def _ramp(s):
    return Psi(2.0 * np.asarray(s, dtype=float) - 1.0)


def _row_density(u):
    u1, u2 = math.log(_BAND_LO), math.log(_BAND_HI)
    rise = _ramp((u - (u1 - _MARGIN)) / _MARGIN)
    fall = _ramp(((u2 + _MARGIN) - u) / _MARGIN)
    return 1.0 + (_BAND_REFINE - 1.0) * rise * fall


def _u_side() -> float:
    return math.log(math.pi / SQRT2)   # log(m d), the same for every m


def _density_integral(n_fine: int = 4001):
    u = np.linspace(0.0, _u_side(), n_fine)
    w = _row_density(u)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(u))])
    return u, cum


def default_sheet_rows(n_theta: int) -> int:
    _, cum = _density_integral()
    return max(4, math.ceil(cum[-1] / (2.0 * math.pi / n_theta)))


def _sheet_profile(xi):
    """Base log-radius G and stretch weight beta at sheet row parameter xi in (0, 1]."""
    u, cum = _density_integral()
    xi = np.asarray(xi, dtype=float)
    G = np.interp(xi * cum[-1], cum, u)
    xi_a = np.interp(math.log(_ANNULUS_OUT), u, cum) / cum[-1]
    beta = _ramp(np.clip((xi - xi_a) / (1.0 - xi_a), 0.0, 1.0))
    return G, beta, xi_a


def sheet_rows(params: ConstructionParams) -> tuple[np.ndarray, np.ndarray]:
    """Row parameters of a sheet: base log-radius G(xi) and stretch weight beta(xi).

    Along a ray the log-radius of row i at angle theta is
    G * (1 + beta * (log(m r_max(theta)) / log(m d) - 1)).
    """
    xi = np.arange(1, params.n_square + 1) / params.n_square
    G, beta, _ = _sheet_profile(xi)
    return G, beta


def _ray_points(xi, theta, m: int, d: float):
    G, beta, _ = _sheet_profile(xi)
    stretch = np.log(m * square_radius(theta, d)) / _u_side() - 1.0
    r = np.exp(G * (1.0 + beta * stretch)) / m
    return r * np.cos(theta), r * np.sin(theta)


def _bend(s, w):
    # s + w (s^3 - s^4): identity near s = 0, flat at s = 1 when w = 1
    return s + w * (s ** 3 - s ** 4)


def sheet_points(params: ConstructionParams, theta: np.ndarray):
    """Planar (x, y) of the sheet vertices, shape (n_square, n_theta) each.

    Inside the annulus the columns are rays.  Beyond it each coordinate is
    re-timed separately so that columns reach the square boundary at a right
    angle; the weights cos^2 and sin^2 of theta keep every lattice reflection.
    """
    xi = (np.arange(1, params.n_square + 1) / params.n_square)[:, None]
    _, _, xi_a = _sheet_profile(0.0)
    s = np.clip((xi - xi_a) / (1.0 - xi_a), 0.0, 1.0)
    th = theta[None, :]
    xi_x = xi_a + (1.0 - xi_a) * _bend(s, np.sin(th) ** 2)
    xi_y = xi_a + (1.0 - xi_a) * _bend(s, np.cos(th) ** 2)
    xi_x = np.where(xi > xi_a, xi_x, xi)
    xi_y = np.where(xi > xi_a, xi_y, xi)
    x, _ = _ray_points(xi_x, th, params.m, params.d)
    _, y = _ray_points(xi_y, th, params.m, params.d)
    return x, y


def square_radius(theta, d: float):
    """Distance from the cell center to the square boundary along angle theta."""
    return d / np.maximum(np.abs(np.cos(theta)), np.abs(np.sin(theta)))


# --- the mesh ----------------------------------------------------------------

@dataclass
class SurfaceMesh:
    """Triangulated surface on S^3 (or a model surface in R^3).

    ``rel`` holds positions relative to ``base`` and is what all difference
    computations use, so bridges of width 1e-8 keep full precision.
    """

    X: np.ndarray
    rel: np.ndarray
    base: np.ndarray
    tri: np.ndarray
    domain: np.ndarray
    chart: np.ndarray
    uv: np.ndarray
    r: np.ndarray
    t_under: np.ndarray
    rho: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: np.ndarray
    mirror_normals: np.ndarray
    symmetries: dict
    params: ConstructionParams | None = None
    region: np.ndarray | None = None
    f_tilde: np.ndarray | None = None
    n_theta: int = 0
    waist_row: int = -1
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def on_sphere(self) -> bool:
        return self.X.shape[1] == 4

    @property
    def row(self) -> np.ndarray:
        return np.arange(self.n) // self.n_theta if self.n_theta else np.full(self.n, -1)

    def boundary_vertices(self) -> np.ndarray:
        return np.unique(self.boundary_edges)


def _mirror_normal(axis: int, side: float, d: float) -> np.ndarray:
    # fixed 3-plane of the reflection about x = side*d (axis 0) or y = side*d (axis 1)
    ang = SQRT2 * side * d
    n = np.zeros(4)
    if axis == 0:
        n[2], n[3] = -math.sin(ang), math.cos(ang)
    else:
        n[0], n[1] = -math.sin(ang), math.cos(ang)
    return n


def _angle(p, q, r):
    # interior angle at p of the triangle (p, q, r); rows of vectors in R^k
    u, v = q - p, r - p
    c = np.einsum("ij,ij->i", u, v)
    return np.arctan2(np.sqrt(np.maximum(np.einsum("ij,ij->i", u, u) * np.einsum("ij,ij->i", v, v) - c * c, 0.0)), c)


def tube_triangles(n_rows: int, n_theta: int, pos: np.ndarray | None = None,
                   margin: float = 1e-1) -> np.ndarray:
    """Quad grid on (row, theta) split into two triangles per cell.

    By default the diagonal alternates by quadrant, a choice invariant under
    theta -> -theta, theta -> pi - theta and (row, theta) -> (last - row,
    pi/2 - theta).  With vertex positions ``pos`` a cell takes the other
    diagonal whenever that one is clearly more Delaunay (sum of opposite
    angles smaller by more than ``margin``).  Cells where neither diagonal
    wins by ``margin`` copy the choice of the outermost cell in their column,
    which keeps the pattern constant along a column.  The test is geometric,
    so on a symmetric vertex set the result keeps every lattice reflection.
    """
    n = n_theta
    ri, j = np.meshgrid(np.arange(n_rows - 1), np.arange(n), indexing="ij")
    ri, j = ri.ravel(), j.ravel()
    jn = (j + 1) % n
    v00, v01 = ri * n + j, ri * n + jn
    v10, v11 = (ri + 1) * n + j, (ri + 1) * n + jn
    main = ((4 * j + 2) // n) % 2 == 0  # floor of theta_mid / (pi/2) is even
    if pos is not None:
        P = lambda v: pos[v]
        # diagonal v00-v11 is opposite v01 and v10; v01-v10 opposite v00 and v11
        s_main = _angle(P(v01), P(v00), P(v11)) + _angle(P(v10), P(v00), P(v11))
        s_anti = _angle(P(v00), P(v01), P(v10)) + _angle(P(v11), P(v01), P(v10))
        tie = np.abs(s_main - s_anti) <= margin
        strict = np.where(main, ~(s_main > s_anti + margin), s_anti > s_main + margin)
        # a tied cell follows the outermost cell of its column on the same
        # side of the middle row, so the diagonal pattern does not switch
        # from one row to the next inside a column
        flip = (strict != main).reshape(n_rows - 1, n)
        half = (n_rows - 1) // 2
        col_flip = np.empty_like(flip)
        col_flip[:half] = flip[0]
        col_flip[half:] = flip[-1]
        main = np.where(tie, main ^ col_flip.ravel(), strict)
    t1 = np.where(main[:, None], np.stack([v00, v01, v11], 1), np.stack([v00, v01, v10], 1))
    t2 = np.where(main[:, None], np.stack([v00, v11, v10], 1), np.stack([v01, v11, v10], 1))
    return np.stack([t1, t2], 1).reshape(-1, 3).astype(np.int64)


def _boundary_sector(theta_mid) -> np.ndarray:
    sector = np.floor((np.asarray(theta_mid) + np.pi / 4) / (np.pi / 2)).astype(int) % 4
    return np.array([1, 2, -1, -2])[sector]


def build_mesh(params: ConstructionParams) -> SurfaceMesh:
    """Mesh of one lattice cell of the initial surface (both sheets and the bridge)."""
    m, tau, a, a_bar = params.m, params.tau, params.a, params.a_bar
    n = params.n_theta
    if n < 8:
        raise ConstructionError("fewer than 8 vertices across the waist")
    d = params.d
    theta = 2.0 * np.pi * np.arange(n) / n
    n_sq = params.n_square
    t_rows = (a / a_bar) * np.linspace(-a_bar, a_bar, params.n_axial + 1)
    t_rows[params.n_axial // 2] = 0.0

    # sheet radii, shape (n_sq, n)
    xs, ys = sheet_points(params, theta)
    # snap the last row onto the square exactly
    c, s = np.cos(theta), np.sin(theta)
    onx = np.abs(c) >= np.abs(s) - 1e-15
    ony = np.abs(s) >= np.abs(c) - 1e-15
    xs[-1, onx] = np.sign(c[onx]) * d
    ys[-1, ony] = np.sign(s[ony]) * d
    r_sheet = np.hypot(xs, ys)
    z_sheet = phi_glued(r_sheet, m, tau, a)

    # catenoid rows
    rc = tau * np.cosh(t_rows)[:, None] * np.ones((1, n))
    xc, yc = rc * c, rc * s
    zc = tau * t_rows[:, None] * np.ones((1, n))

    dom = np.concatenate([
        np.stack([xs[::-1], ys[::-1], -z_sheet[::-1]], axis=-1),
        np.stack([xc, yc, zc], axis=-1),
        np.stack([xs, ys, z_sheet], axis=-1),
    ]).reshape(-1, 3)
    n_rows = 2 * n_sq + params.n_axial + 1
    chart = np.concatenate([
        np.full((n_sq, n), CHART_LOWER), np.full((params.n_axial + 1, n), CHART_CATENOID),
        np.full((n_sq, n), CHART_UPPER)]).ravel()
    th = np.broadcast_to(theta, (n_rows, n)).ravel()
    first = np.concatenate([r_sheet[::-1], np.broadcast_to(t_rows[:, None], rc.shape), r_sheet]).ravel()
    uv = np.stack([first, th], axis=1)
    r = np.concatenate([r_sheet[::-1], rc, r_sheet]).ravel()

    t_sheet = (a_bar / a) * np.arccosh(np.maximum(r_sheet / tau, 1.0))
    t_under = np.concatenate([-t_sheet[::-1], (a_bar / a) * np.broadcast_to(t_rows[:, None], rc.shape),
                              t_sheet]).ravel()

    rel = phi_offset(dom)
    base = phi_map(np.zeros(3))
    X = phi_map(dom)

    tri = tube_triangles(n_rows, n, pos=rel)

    # boundary: first and last rows
    j = np.arange(n)
    jn = (j + 1) % n
    tags = _boundary_sector(2.0 * np.pi * (j + 0.5) / n)
    last = (n_rows - 1) * n
    bedges = np.concatenate([np.stack([j, jn], 1), np.stack([last + j, last + jn], 1)])
    btags = np.concatenate([tags, tags])

    mirrors = np.zeros((dom.shape[0], 2, 4))
    for row0 in (0, n_rows - 1):
        idx = row0 * n + j
        px, py = dom[idx, 0], dom[idx, 1]
        for k, v in enumerate(idx):
            if abs(abs(px[k]) - d) < 1e-15:
                mirrors[v, 0] = _mirror_normal(0, np.sign(px[k]), d)
            if abs(abs(py[k]) - d) < 1e-15:
                mirrors[v, 1] = _mirror_normal(1, np.sign(py[k]), d)

    rows = np.arange(n_rows)[:, None]
    cols = np.arange(n)[None, :]
    sym = {
        "reflect-x": (rows * n + (n // 2 - cols) % n).ravel(),
        "reflect-y": (rows * n + (-cols) % n).ravel(),
        "reflect-z": ((n_rows - 1 - rows) * n + (n // 4 - cols) % n).ravel(),
    }

    mesh = SurfaceMesh(
        X=X, rel=rel, base=base, tri=tri, domain=dom, chart=chart, uv=uv, r=r,
        t_under=t_under, rho=rho_of_r(r, m, params.rho_target),
        boundary_edges=bedges, boundary_tags=btags, mirror_normals=mirrors,
        symmetries=sym, params=params, n_theta=n, waist_row=n_sq + params.n_axial // 2,
        meta={"n_sheet_rows": n_sq, "n_rows": n_rows},
    )
    _orient(mesh)
    labels = region_labels(mesh, params.b)
    if labels.available:
        mesh.region = labels.region
        mesh.f_tilde = field_weights(mesh, params.gamma).f_tilde
    return mesh


def _orient(mesh: SurfaceMesh) -> None:
    """Flip all triangles if needed so face normals satisfy <nu, d_z> > 0 upstairs."""
    from .meshops import face_normals_s3
    from .ambient import coordinate_frame

    up = np.where(mesh.chart[mesh.tri[:, 0]] == CHART_UPPER)[0]
    if len(up) == 0:
        up = np.arange(len(mesh.tri))
    f = up[len(up) // 2]
    fn = face_normals_s3(mesh.X, mesh.rel, mesh.tri[f:f + 1])[0]
    dz = coordinate_frame(mesh.domain[mesh.tri[f, 0]])[2]
    if fn @ dz < 0:
        mesh.tri = mesh.tri[:, [0, 2, 1]].copy()


def expected_vertex_count(params: ConstructionParams) -> int:
    return params.n_theta * (params.n_axial + 1 + 2 * params.n_square)


def seam_mismatch(mesh: SurfaceMesh) -> float:
    """Max R^4 distance between the catenoid chart at t = +-a and the graph chart at r = 1/m."""
    p = mesh.params
    theta = 2.0 * np.pi * np.arange(p.n_theta) / p.n_theta
    worst = 0.0
    for sgn in (1.0, -1.0):
        rc = p.tau * np.cosh(p.a)
        cat = np.stack([rc * np.cos(theta), rc * np.sin(theta), sgn * p.tau * p.a * np.ones_like(theta)], 1)
        r = np.full_like(theta, 1.0 / p.m)
        gr = np.stack([r * np.cos(theta), r * np.sin(theta), sgn * phi_glued(r, p.m, p.tau, p.a)], 1)
        worst = max(worst, float(np.max(np.linalg.norm(phi_offset(cat) - phi_offset(gr), axis=1))))
    return worst


def symmetry_error(mesh: SurfaceMesh, name: str) -> float:
    """Max R^4 error of the vertex permutation against the ambient action."""
    from .ambient import SymmetryElement

    if name == "reflect-z":
        g = SymmetryElement.generator("reflect-z")
    else:
        g = SymmetryElement.generator(name, 0.0)
    perm = mesh.symmetries[name]
    return float(np.max(np.abs(g.on_ambient(mesh.X) - mesh.X[perm])))


# --- regions and weights -----------------------------------------------------

@dataclass(frozen=True)
class RegionLabel:
    region: str
    x_under: float
    x_over: float
    x_min: float


@dataclass
class RegionDiagnostics:
    available: bool
    reason: str = ""
    region: np.ndarray | None = None
    x_under: np.ndarray | None = None
    x_over: np.ndarray | None = None
    x_min: np.ndarray | None = None
    ell_under: float = float("nan")
    ell: float = float("nan")
    eellm_error: float = float("nan")

    @property
    def eellm_holds(self) -> bool:
        return self.eellm_error < 10.0


def ell_values(params: ConstructionParams, b: float, x: float = 0.0, y: float = 0.0):
    ell_under = params.a_bar - 2 * b - x - y
    ell = params.a - (2 * b + x + y) * params.a / params.a_bar
    err = abs(ell + 2 * b + params.zeta - params.m ** 2 / (4 * math.pi))
    return ell_under, ell, err


def _label_arrays(tu, a_bar, b, x, y):
    at = np.abs(tu)
    up = np.sign(tu)
    region = np.zeros(np.shape(tu), dtype=int)
    s1 = at >= a_bar - b - x
    lam = (~s1) & (at > b + x)
    region[s1] = np.where(up[s1] >= 0, 1, -1)
    region[lam] = np.where(up[lam] >= 0, 2, -2)
    x_under = at - b - x
    x_over = a_bar - b - y - at
    return region, x_under, x_over, np.minimum(x_under, x_over)


def region_label(t_under: float, params: ConstructionParams, b: float,
                 x: float = 0.0, y: float = 0.0) -> RegionLabel:
    """Region and coordinate distances for a single vertex with rescaled axial coordinate t_under."""
    region, xu, xo, xm = _label_arrays(np.asarray(t_under, float), params.a_bar, b, x, y)
    return RegionLabel(REGION_NAMES[int(region)], float(xu), float(xo), float(xm))


def region_labels(mesh: SurfaceMesh, b: float, x: float = 0.0, y: float = 0.0) -> RegionDiagnostics:
    p = mesh.params
    ell_under, ell, err = ell_values(p, b, x, y)
    if not b + max(x, y) < p.a_bar / 3.0:
        return RegionDiagnostics(False, reason=f"b + max(x, y) = {b + max(x, y):.3g} "
                                 f"is not below a_bar / 3 = {p.a_bar / 3:.3g}",
                                 ell_under=ell_under, ell=ell, eellm_error=err)
    region, xu, xo, xm = _label_arrays(mesh.t_under, p.a_bar, b, x, y)
    return RegionDiagnostics(True, region=region, x_under=xu, x_over=xo, x_min=xm,
                             ell_under=ell_under, ell=ell, eellm_error=err)


@dataclass
class FieldWeights:
    f_tilde: np.ndarray
    rho: np.ndarray
    chi_factor: np.ndarray
    h_factor: np.ndarray | None
    lower_bound: float
    upper_bound: float
    lower_ok: bool
    upper_ok: bool


def f_tilde_values(t_under, a_bar: float, b: float, gamma: float, xp=np):
    """Weight 1 on S[1], exp(-gamma x_over) on Lambda, constant on S[0]."""
    at = xp.abs(t_under)
    x_over = xp.clip(a_bar - b - at, 0.0, a_bar - 2.0 * b)
    return xp.exp(-gamma * x_over)


def field_weights(mesh: SurfaceMesh, gamma: float, A2: np.ndarray | None = None) -> FieldWeights:
    p = mesh.params
    f = f_tilde_values(mesh.t_under, p.a_bar, p.b, gamma)
    lo = p.tau_bar ** (8 * gamma / 9 + 1 / 9)
    hi = p.tau_bar ** (8 * gamma / 9 - 1)
    h = None if A2 is None else 0.5 * (A2 + p.m ** 2)
    return FieldWeights(
        f_tilde=f, rho=mesh.rho, chi_factor=mesh.rho ** 2, h_factor=h,
        lower_bound=lo, upper_bound=hi,
        lower_ok=bool(np.all(f >= lo)), upper_ok=bool(np.all(mesh.rho * f <= hi)),
    )


@dataclass
class ModelMaps:
    varpi: np.ndarray
    gauss: np.ndarray
    on_sheet: np.ndarray
    on_bridge: np.ndarray

    def R_check(self, params: ConstructionParams, b: float, x: float = 0.0) -> float:
        return 1.0 / math.cosh((b + x) * params.a / params.a_bar)

    def R_tilde(self, params: ConstructionParams, b: float, x: float = 0.0) -> float:
        t = params.a - (b + x) * params.a / params.a_bar
        return params.m / SQRT2 * params.tau * math.cosh(t)


def model_maps(mesh: SurfaceMesh) -> ModelMaps:
    """Flat-torus coordinates on the sheets and the catenoid Gauss map on the bridge."""
    p = mesh.params
    sheet = mesh.chart != CHART_CATENOID
    bridge = ~sheet
    varpi = p.m / SQRT2 * mesh.domain[:, :2]
    t, th = mesh.uv[:, 0], mesh.uv[:, 1]
    ch = np.cosh(np.where(bridge, t, 0.0))
    gauss = np.stack([-np.cos(th) / ch, -np.sin(th) / ch, np.tanh(np.where(bridge, t, 0.0))], 1)
    gauss[sheet] = np.nan
    varpi[bridge] = np.nan
    return ModelMaps(varpi=varpi, gauss=gauss, on_sheet=sheet, on_bridge=bridge)


def rebuild_for_zeta(mesh: SurfaceMesh, zeta: float) -> SurfaceMesh:
    """Rebuild the surface for a new zeta on the same (t_under, theta) and radial grid."""
    return build_mesh(with_zeta(mesh.params, zeta))


__all__ = [
    "ConstructionError", "ConstructionParams", "SurfaceMesh", "RegionLabel",
    "RegionDiagnostics", "FieldWeights", "ModelMaps", "Psi", "cutoff_psi", "phi_cat",
    "phi_glued", "profile_phi", "rho_of_r", "derive_params", "with_zeta", "build_mesh",
    "region_label", "region_labels", "field_weights", "f_tilde_values", "model_maps",
    "rebuild_for_zeta", "seam_mismatch", "symmetry_error", "expected_vertex_count",
    "ell_values", "square_radius", "tube_triangles"
]
