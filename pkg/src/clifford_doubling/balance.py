"""Vertical force of a perturbed initial surface and the zeta update.

The force is the flux of the Killing field K through the boundary of the upper
half cell, computed two ways: as a boundary line integral of <eta, K> and as
the surface integral of H <nu, K>.  The first variation formula makes them
equal, which is the cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ambient import SQRT2, killing_ambient
from .geomq import PerturbedMesh, vertex_normals
from .initsurf import ConstructionParams, SurfaceMesh
from .meshops import cross4, mixed_areas

PIECES = ("+1", "-1", "+2", "-2", "0")
_TAG_NAMES = {1: "+1", -1: "-1", 2: "+2", -2: "-2"}


class TopologyError(RuntimeError):
    """The half-cell boundary does not split into the expected five pieces."""


@dataclass
class ForceReport:
    F_boundary: float
    F_interior: float
    pieces: dict
    zeta: float
    tau: float
    m: int
    balance_ratio: float
    closed_form: dict = field(default_factory=dict)

    @property
    def relative_gap(self) -> float:
        return abs(self.F_interior - self.F_boundary) / abs(self.F_boundary)

    def to_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "pieces"}
        out["pieces"] = dict(self.pieces)
        out["relative_gap"] = self.relative_gap if self.F_boundary != 0 else float("nan")
        return out


def _geometry(mesh):
    base = mesh.base if isinstance(mesh, PerturbedMesh) else mesh
    return base, mesh.X, mesh.rel


def upper_half(base: SurfaceMesh):
    """Triangles of the half cell z >= 0: rows from the waist to the upper boundary."""
    row = base.row
    keep = np.all(row[base.tri] >= base.waist_row, axis=1)
    return base.tri[keep]


def _half_boundary(base: SurfaceMesh):
    nt = base.n_theta
    j = np.arange(nt)
    w0 = base.waist_row * nt
    waist = np.stack([w0 + j, w0 + (j + 1) % nt], 1)
    last = base.row.max()
    sel = base.row[base.boundary_edges[:, 0]] == last
    lateral = base.boundary_edges[sel]
    tags = base.boundary_tags[sel]
    return waist, lateral, tags


def _edge_flux(X, rel, nu, edges, tri):
    """Per-edge <eta, K> |edge| with eta the outward conormal of the half-cell."""
    i, j = edges[:, 0], edges[:, 1]
    T = rel[j] - rel[i]
    Xm = X[i] + X[j]
    Xm /= np.linalg.norm(Xm, axis=1, keepdims=True)
    nm = nu[i] + nu[j]
    eta = cross4(Xm, T, nm)
    eta /= np.linalg.norm(eta, axis=1, keepdims=True)
    # orient away from the third vertex of the adjacent half-cell triangle
    third = _third_vertex(tri, edges)
    inward = rel[third] - 0.5 * (rel[i] + rel[j])
    eta *= -np.sign(np.einsum("ij,ij->i", eta, inward))[:, None]
    K = 0.5 * (killing_ambient(X[i]) + killing_ambient(X[j]))
    return np.einsum("ij,ij->i", eta, K) * np.linalg.norm(T, axis=1)


def _third_vertex(tri, edges):
    lookup = {}
    for t in tri:
        for k in range(3):
            a, b = t[(k + 1) % 3], t[(k + 2) % 3]
            lookup[(min(a, b), max(a, b))] = t[k]
    return np.array([lookup[(min(a, b), max(a, b))] for a, b in edges])


def lateral_closed_form(params: ConstructionParams, n: int = 4001) -> dict:
    """Closed-form lateral pieces on the unperturbed surface (z = tau a on the faces)."""
    d = params.d
    z = params.tau * params.a
    y = np.linspace(-d, d, n)
    base = np.trapezoid(np.cos(SQRT2 * y), y) * math.sin(SQRT2 * d) / SQRT2
    p1 = -(1.0 - math.sin(2 * z)) * base
    p2 = (1.0 + math.sin(2 * z)) * base
    return {"+1": p1, "-1": p1, "+2": p2, "-2": p2,
            "lateral_total": 2 * (p1 + p2), "leading": 16 * params.a * params.tau * d * d,
            "waist_leading": -2 * math.pi * params.tau}


def _vertex_flux(base: SurfaceMesh, X, rel):
    """Discrete outward conormal flux at the boundary vertices of the half cell.

    With S the cotangent matrix of the half cell and Delta X the Laplacian of
    the complete surface (mirror-completed on the faces, full star at the
    waist), phi_i = (S X)_i + M_i (Delta X)_i approximates the integral of
    hat_i times eta over the boundary.  Summed against a linear Killing field
    this is the exact discrete counterpart of the divergence theorem.
    """
    from .meshops import cotan_stiffness

    tri = upper_half(base)
    S = cotan_stiffness(rel, tri, base.n)
    Mh = mixed_areas(rel, tri, base.n)
    SX = S @ rel
    flux = np.zeros_like(rel)
    waist, lateral, tags = _half_boundary(base)
    lat_v = np.unique(lateral)
    for k in range(base.mirror_normals.shape[1]):
        n = base.mirror_normals[lat_v, k]
        flux[lat_v] += np.einsum("ij,ij->i", SX[lat_v], n)[:, None] * n
    wv = np.unique(waist)
    S_full = cotan_stiffness(rel, base.tri, base.n)
    M_full = mixed_areas(rel, base.tri, base.n)
    flux[wv] = SX[wv] - (Mh[wv] / M_full[wv])[:, None] * (S_full[wv] @ rel)
    return flux, waist, lateral, tags


def boundary_force(mesh, nu: np.ndarray | None = None, *, form: str = "flux") -> ForceReport:
    """Boundary form of the force: sum over the five pieces of the half-cell boundary.

    ``form="flux"`` uses the cotangent conormal flux at boundary vertices,
    ``form="edge"`` the midpoint rule on edges with eta = edge x nu in T S^3.
    A corner vertex is split evenly between its two faces.
    """
    base, X, rel = _geometry(mesh)
    nu = vertex_normals(base, X, rel) if nu is None else nu
    tri = upper_half(base)
    waist, lateral, tags = _half_boundary(base)
    found = set(_TAG_NAMES[t] for t in np.unique(tags)) | ({"0"} if len(waist) else set())
    if found != set(PIECES):
        raise TopologyError(f"expected five boundary pieces, found {sorted(found)}")
    pieces = {}
    if form == "edge":
        flux_w = _edge_flux(X, rel, nu, waist, tri)
        flux_l = _edge_flux(X, rel, nu, lateral, tri)
        for tag, name in _TAG_NAMES.items():
            pieces[name] = float(np.sum(flux_l[tags == tag]))
        pieces["0"] = float(np.sum(flux_w))
    elif form == "flux":
        flux, *_ = _vertex_flux(base, X, rel)
        val = np.einsum("ij,ij->i", flux, killing_ambient(X))
        # split each lateral vertex value evenly among its incident boundary edges' faces
        share = {name: np.zeros(base.n) for name in _TAG_NAMES.values()}
        deg = np.zeros(base.n)
        for (a, b), tag in zip(lateral, tags):
            share[_TAG_NAMES[tag]][[a, b]] += 1.0
            deg[[a, b]] += 1.0
        for name in _TAG_NAMES.values():
            w = np.divide(share[name], deg, out=np.zeros(base.n), where=deg > 0)
            pieces[name] = float(np.sum(w * val))
        pieces["0"] = float(np.sum(val[np.unique(waist)]))
    else:
        raise ValueError(f"unknown form {form!r}")
    total = 0.0
    for name in PIECES:
        total += pieces[name]
    p = base.params
    return ForceReport(total, float("nan"), pieces, p.zeta, p.tau, p.m,
                       zeta_update(total, p), lateral_closed_form(p))


def interior_force(mesh, H: np.ndarray, nu: np.ndarray | None = None) -> float:
    """Surface form: sum over half-cell vertices of H <nu, K> times the vertex area."""
    base, X, rel = _geometry(mesh)
    nu = vertex_normals(base, X, rel) if nu is None else nu
    tri = upper_half(base) if base.n_theta else base.tri
    area = mixed_areas(rel, tri, base.n)
    integrand = np.asarray(H) * np.einsum("ij,ij->i", nu, killing_ambient(X))
    return float(np.sum(area * integrand))


def force_report(mesh, H: np.ndarray, nu: np.ndarray | None = None) -> ForceReport:
    base, X, rel = _geometry(mesh)
    nu = vertex_normals(base, X, rel) if nu is None else nu
    rep = boundary_force(mesh, nu)
    rep.F_interior = interior_force(mesh, H, nu)
    return rep


def zeta_update(F: float, params: ConstructionParams) -> float:
    """zeta' = m^2 F / (8 tau pi^2) + zeta; a fixed point iff F = 0."""
    return params.m ** 2 * F / (8.0 * params.tau * math.pi ** 2) + params.zeta


def force_slope_target(params: ConstructionParams) -> float:
    """Leading-order dF/dzeta = -8 pi^2 tau / m^2."""
    return -8.0 * math.pi ** 2 * params.tau / params.m ** 2


def parallel_torus_interior(c: float, d: float) -> float:
    """Exact integral of 2 tan 2c <d_z, K> over the half cell of the torus z = c, |x|, |y| <= d.

    On z = c, <d_z, K> = cos(sqrt2 x) cos(sqrt2 y) and dg = cos 2c dx dy.
    """
    s = 2.0 * math.sin(SQRT2 * d) / SQRT2
    return 2.0 * math.tan(2.0 * c) * math.cos(2.0 * c) * s * s


def torus_boundary_force(mesh: SurfaceMesh, nu: np.ndarray | None = None) -> dict:
    """Lateral conormal flux of a torus-cell model (its boundary is the four faces)."""
    nu = vertex_normals(mesh) if nu is None else nu
    flux = _edge_flux(mesh.X, mesh.rel, nu, mesh.boundary_edges, mesh.tri)
    pieces = {name: float(np.sum(flux[mesh.boundary_tags == tag])) for tag, name in _TAG_NAMES.items()}
    pieces["total"] = float(sum(pieces[k] for k in ("+1", "-1", "+2", "-2")))
    return pieces


__all__ = ["ForceReport", "TopologyError", "boundary_force", "interior_force", "force_report",
           "zeta_update", "force_slope_target", "lateral_closed_form", "parallel_torus_interior",
           "torus_boundary_force", "upper_half", "PIECES"]
