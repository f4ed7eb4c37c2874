"""Model meshes used as oracles: a torus cell in S^3 and three flat-space surfaces.

All of them are returned as :class:`~clifford_doubling.initsurf.SurfaceMesh`
objects with symmetry permutations, so the spectral code treats them exactly
like the initial surface.
"""

from __future__ import annotations

import math

import numpy as np

from .ambient import SQRT2, phi_map, phi_offset
from .initsurf import (CHART_EUCLID, CHART_FLAT, SurfaceMesh, _mirror_normal,
                       tube_triangles)


def _grid_triangles(n: int) -> np.ndarray:
    """Triangles of an (n+1) x (n+1) vertex grid, diagonals pointing away from the center.

    Vertex (i, j) has index i * (n + 1) + j with i along x.  The diagonal of a
    cell runs through the corner nearest the grid center, so the pattern is
    invariant under both axis reflections and the transpose.
    """
    k = n + 1
    tris = []
    for i in range(n):
        for j in range(n):
            v00, v10 = i * k + j, (i + 1) * k + j
            v01, v11 = i * k + j + 1, (i + 1) * k + j + 1
            cx, cy = i + 0.5 - n / 2, j + 0.5 - n / 2
            if cx * cy > 0:
                tris += [(v00, v10, v11), (v00, v11, v01)]
            else:
                tris += [(v00, v10, v01), (v10, v11, v01)]
    return np.asarray(tris, dtype=np.int64)


def _grid_symmetries(n: int) -> dict:
    k = n + 1
    i, j = np.meshgrid(np.arange(k), np.arange(k), indexing="ij")
    return {
        "reflect-x": ((n - i) * k + j).ravel(),
        "reflect-y": (i * k + (n - j)).ravel(),
        "transpose": (j * k + i).ravel(),
    }


def _grid_boundary(n: int):
    k = n + 1
    e, tags = [], []
    for s in range(n):
        e += [(n * k + s, n * k + s + 1), (s, s + 1), (s * k + n, (s + 1) * k + n), (s * k, (s + 1) * k)]
        tags += [1, -1, 2, -2]
    return np.asarray(e, dtype=np.int64), np.asarray(tags)


def torus_cell(m: int, n: int = 32, c: float = 0.0) -> SurfaceMesh:
    """Cartesian mesh of the torus z = c over the lattice cell |x|, |y| <= pi/(sqrt2 m).

    ``c = 0`` is the Clifford torus.  Reflect-z (x <-> y, z -> -z) is a
    symmetry only for ``c = 0``.
    """
    if n % 2:
        raise ValueError("n must be even so the cell center is a vertex")
    d = math.pi / (SQRT2 * m)
    s = np.linspace(-d, d, n + 1)
    x, y = np.meshgrid(s, s, indexing="ij")
    dom = np.stack([x.ravel(), y.ravel(), np.full(x.size, c)], 1)
    base_pt = np.array([0.0, 0.0, c])
    X = phi_map(dom)
    rel = phi_offset(dom, base_pt)
    tri = _grid_triangles(n)
    bedges, btags = _grid_boundary(n)
    mirrors = np.zeros((X.shape[0], 2, 4))
    for v in range(X.shape[0]):
        if abs(abs(dom[v, 0]) - d) < 1e-15:
            mirrors[v, 0] = _mirror_normal(0, np.sign(dom[v, 0]), d)
        if abs(abs(dom[v, 1]) - d) < 1e-15:
            mirrors[v, 1] = _mirror_normal(1, np.sign(dom[v, 1]), d)
    grid_sym = _grid_symmetries(n)
    sym = {"reflect-x": grid_sym["reflect-x"], "reflect-y": grid_sym["reflect-y"]}
    if c == 0.0:
        sym["reflect-z"] = grid_sym["transpose"]
    npts = X.shape[0]
    mesh = SurfaceMesh(
        X=X, rel=rel, base=phi_map(base_pt), tri=tri, domain=dom,
        chart=np.full(npts, CHART_FLAT), uv=dom[:, :2].copy(), r=np.hypot(dom[:, 0], dom[:, 1]),
        t_under=np.zeros(npts), rho=np.ones(npts), boundary_edges=bedges, boundary_tags=btags,
        mirror_normals=mirrors, symmetries=sym, meta={"c": float(c), "m": int(m), "d": d, "model": "torus"},
    )
    _orient_up(mesh)
    return mesh


def _orient_up(mesh: SurfaceMesh) -> None:
    from .ambient import coordinate_frame
    from .meshops import face_normals_s3

    fn = face_normals_s3(mesh.X, mesh.rel, mesh.tri[:1])[0]
    if fn @ coordinate_frame(mesh.domain[mesh.tri[0, 0]])[2] < 0:
        mesh.tri = mesh.tri[:, [0, 2, 1]].copy()


def _euclid_mesh(pos, tri, sym, meta, bedges=None, btags=None) -> SurfaceMesh:
    npts = pos.shape[0]
    empty = np.zeros((0, 2), dtype=np.int64)
    return SurfaceMesh(
        X=pos, rel=pos, base=np.zeros(3), tri=tri, domain=pos, chart=np.full(npts, CHART_EUCLID),
        uv=pos[:, :2].copy(), r=np.linalg.norm(pos[:, :2], axis=1), t_under=np.zeros(npts),
        rho=np.ones(npts), boundary_edges=empty if bedges is None else bedges,
        boundary_tags=np.zeros(0, int) if btags is None else btags,
        mirror_normals=np.zeros((npts, 2, 3)), symmetries=sym, meta=meta,
    )


def flat_square(n: int = 32, side: float = 1.0) -> SurfaceMesh:
    """The square [0, side]^2 in the plane z = 0 of R^3."""
    s = np.linspace(0.0, side, n + 1)
    x, y = np.meshgrid(s, s, indexing="ij")
    pos = np.stack([x.ravel(), y.ravel(), np.zeros(x.size)], 1)
    bedges, btags = _grid_boundary(n)
    return _euclid_mesh(pos, _grid_triangles(n), _grid_symmetries(n),
                        {"model": "square", "side": side}, bedges, btags)


def octahedral_sphere(level: int = 4) -> SurfaceMesh:
    """Unit sphere from a regular octahedron, each face split into level^2 triangles.

    The octahedron's reflections in the coordinate planes act on the vertices;
    they are recorded as permutations.
    """
    if level < 1:
        raise ValueError("level must be positive")
    corners = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]], float)
    faces = [(0, 1, 2), (1, 3, 2), (3, 4, 2), (4, 0, 2), (1, 0, 5), (3, 1, 5), (4, 3, 5), (0, 4, 5)]
    key = {}
    pts, tris = [], []

    def vid(p):
        k = tuple(np.round(p * level).astype(int))
        if k not in key:
            key[k] = len(pts)
            pts.append(p)
        return key[k]

    for a, b, c in faces:
        A, B, C = corners[a], corners[b], corners[c]
        idx = {}
        for i in range(level + 1):
            for j in range(level + 1 - i):
                idx[i, j] = vid(A + (B - A) * i / level + (C - A) * j / level)
        for i in range(level):
            for j in range(level - i):
                tris.append((idx[i, j], idx[i + 1, j], idx[i, j + 1]))
                if i + j < level - 1:
                    tris.append((idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1]))
    P = np.asarray(pts)
    pos = P / np.linalg.norm(P, axis=1, keepdims=True)
    sym = {}
    for ax, name in enumerate(("reflect-x", "reflect-y", "reflect-z")):
        flip = np.ones(3)
        flip[ax] = -1.0
        sym[name] = np.array([key[tuple(np.round(p * flip * level).astype(int))] for p in P])
    return _euclid_mesh(pos, np.asarray(tris, dtype=np.int64), sym, {"model": "sphere", "level": level})


def flat_cylinder(length: float, n_axial: int = 200, n_theta: int = 16) -> SurfaceMesh:
    """Unit-radius cylinder of axial length ``length`` in R^3, built as a tube grid.

    Rows are axial positions, so the first and last rows are the two boundary
    circles.  The neck reflections theta -> -theta and theta -> pi - theta are
    recorded as permutations.
    """
    if n_theta % 4:
        raise ValueError("n_theta must be divisible by 4")
    t = np.linspace(0.0, length, n_axial + 1)
    th = 2.0 * np.pi * np.arange(n_theta) / n_theta
    T, TH = np.meshgrid(t, th, indexing="ij")
    pos = np.stack([np.cos(TH).ravel(), np.sin(TH).ravel(), T.ravel()], 1)
    rows = np.arange(n_axial + 1)[:, None]
    cols = np.arange(n_theta)[None, :]
    sym = {
        "reflect-x": (rows * n_theta + (n_theta // 2 - cols) % n_theta).ravel(),
        "reflect-y": (rows * n_theta + (-cols) % n_theta).ravel(),
    }
    mesh = _euclid_mesh(pos, tube_triangles(n_axial + 1, n_theta, pos=pos), sym,
                        {"model": "cylinder", "length": length})
    mesh.n_theta = n_theta
    mesh.uv = np.stack([T.ravel(), TH.ravel()], 1)
    mesh.t_under = T.ravel()
    return mesh


__all__ = ["torus_cell", "flat_square", "octahedral_sphere", "flat_cylinder"]
