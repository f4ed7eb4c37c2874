"""JSON reports, OBJ surfaces and CSV tables."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .ambient import SymmetryElement, compose
from .geomq import PerturbedMesh
from .initsurf import SurfaceMesh


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def dumps_report(report: dict) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, non-finite floats as strings."""
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


def write_json(report: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_report(report))
    return path


def stereographic(X: np.ndarray) -> np.ndarray:
    """Projection of S^3 from the pole -e2 onto R^3: (v0, v1, v3) / (1 + v2)."""
    X = np.asarray(X, dtype=float)
    den = 1.0 + X[:, 2]
    if np.any(den <= 1e-12):
        raise ValueError("a vertex sits at the projection pole -e2")
    return X[:, [0, 1, 3]] / den[:, None]


def tile_cells(X: np.ndarray, tri: np.ndarray, m: int, d: float, *, merge_tol: float = 1e-10):
    """Copies of one cell under the m x m lattice translations, with seam vertices merged.

    The cell is the square |x|, |y| <= d, so translations by 2d in x and y
    generate the whole closed surface.
    """
    Xs, Ts = [], []
    for i in range(m):
        for j in range(m):
            g = compose(SymmetryElement.generator("translate-x", 2 * d * i),
                        SymmetryElement.generator("translate-y", 2 * d * j))
            Ts.append(tri + len(X) * len(Xs))
            Xs.append(g.on_ambient(X))
    Xa = np.concatenate(Xs)
    Ta = np.concatenate(Ts)
    pairs = cKDTree(Xa).query_pairs(merge_tol, output_type="ndarray")
    n = len(Xa)
    adj = sp.coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, label = connected_components(adj, directed=False)
    _, first, inverse = np.unique(label, return_index=True, return_inverse=True)
    return Xa[first], inverse.ravel()[Ta]


def write_obj(mesh, path, *, tile: bool = False, project: bool = True) -> Path:
    """Write the surface as OBJ.

    Meshes on S^3 are projected stereographically; model meshes in R^3 are
    written as they are.  ``tile=True`` writes all m^2 cells of a construction mesh.
    """
    base = mesh.base if isinstance(mesh, PerturbedMesh) else mesh
    X = np.asarray(mesh.X)
    tri = np.asarray(base.tri)
    if tile:
        if base.params is None:
            raise ValueError("tiling needs a construction mesh")
        X, tri = tile_cells(X, tri, base.params.m, base.params.d)
    P = stereographic(X) if (X.shape[1] == 4 and project) else X[:, :3]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        fh.write(f"# {len(P)} vertices, {len(tri)} faces\n")
        for v in P:
            fh.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in tri + 1:
            fh.write(f"f {t[0]} {t[1]} {t[2]}\n")
    return path


def write_csv(rows: list, path, columns=None) -> Path:
    """Rows of dicts to CSV; ``columns`` defaults to the keys of the first row."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = list(columns or (rows[0].keys() if rows else []))
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: _jsonable(r.get(k)) for k in columns})
    return path


def mesh_rows(mesh: SurfaceMesh, phi: np.ndarray | None = None) -> list:
    """Per-vertex table: ambient position, domain point, chart and scale data."""
    base = mesh.base if isinstance(mesh, PerturbedMesh) else mesh
    X = np.asarray(mesh.X)
    rows = []
    for i in range(base.n):
        r = {f"X{k}": float(X[i, k]) for k in range(X.shape[1])}
        r.update(x=float(base.domain[i, 0]), y=float(base.domain[i, 1]), z=float(base.domain[i, 2]),
                 chart=int(base.chart[i]), r=float(base.r[i]), t_under=float(base.t_under[i]),
                 rho=float(base.rho[i]))
        if phi is not None:
            r["phi"] = float(phi[i])
        rows.append(r)
    return rows


def force_rows(force: dict) -> list:
    pieces = force.get("pieces", {})
    rows = [{"piece": k, "value": v} for k, v in pieces.items()]
    for k in ("F_boundary", "F_interior", "relative_gap", "balance_ratio"):
        if k in force:
            rows.append({"piece": k, "value": force[k]})
    return rows


def history_rows(history: list) -> list:
    return [{"iteration": i, **h} for i, h in enumerate(history)]


__all__ = ["dumps_report", "write_json", "stereographic", "tile_cells", "write_obj", "write_csv",
           "mesh_rows", "force_rows", "history_rows"]
