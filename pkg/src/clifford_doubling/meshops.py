"""Piecewise-linear geometry on triangle meshes embedded in R^k.

Everything here works for any ambient dimension (the surfaces live in R^4,
the model meshes in R^3).  Functions take raw arrays so they can be reused on
perturbed vertex positions without rebuilding mesh objects.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp


class MeshQualityError(ValueError):
    """Raised for degenerate triangles."""


def triangle_edges(pos: np.ndarray, tri: np.ndarray):
    """Edge vectors e0 = p2 - p1, e1 = p0 - p2, e2 = p1 - p0 (opposite each corner)."""
    p0, p1, p2 = pos[tri[:, 0]], pos[tri[:, 1]], pos[tri[:, 2]]
    return p2 - p1, p0 - p2, p1 - p0


def triangle_areas(pos: np.ndarray, tri: np.ndarray) -> np.ndarray:
    _, e1, e2 = triangle_edges(pos, tri)
    # Gram determinant works in any dimension
    a = np.einsum("ij,ij->i", e1, e1)
    b = np.einsum("ij,ij->i", e2, e2)
    c = np.einsum("ij,ij->i", e1, e2)
    return 0.5 * np.sqrt(np.maximum(a * b - c * c, 0.0))


def cotangents(pos: np.ndarray, tri: np.ndarray, *, check: bool = True) -> np.ndarray:
    """Cotangent of the interior angle at each corner; shape (T, 3)."""
    e0, e1, e2 = triangle_edges(pos, tri)
    area2 = 2.0 * triangle_areas(pos, tri)
    if check:
        scale = np.maximum.reduce([np.einsum("ij,ij->i", e, e) for e in (e0, e1, e2)])
        if np.any(area2 <= 1e-14 * scale):
            raise MeshQualityError("degenerate triangle in mesh")
    # angle at corner k is between the two edges adjacent to it
    cot0 = -np.einsum("ij,ij->i", e1, e2) / area2
    cot1 = -np.einsum("ij,ij->i", e2, e0) / area2
    cot2 = -np.einsum("ij,ij->i", e0, e1) / area2
    return np.stack([cot0, cot1, cot2], axis=1)


def cotan_stiffness(pos: np.ndarray, tri: np.ndarray, n: int | None = None) -> sp.csr_matrix:
    """Dirichlet-energy matrix S with u^T S u = int |grad u|^2 (positive semidefinite)."""
    n = pos.shape[0] if n is None else n
    cot = cotangents(pos, tri)
    rows, cols, vals = [], [], []
    for k in range(3):
        i = tri[:, (k + 1) % 3]
        j = tri[:, (k + 2) % 3]
        w = 0.5 * cot[:, k]
        rows += [i, j, i, j]
        cols += [j, i, i, j]
        vals += [-w, -w, w, w]
    S = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    ).tocsr()
    S.sum_duplicates()
    return S


def lumped_areas(pos: np.ndarray, tri: np.ndarray, n: int | None = None) -> np.ndarray:
    """Barycentric vertex areas (one third of each incident triangle)."""
    n = pos.shape[0] if n is None else n
    A = triangle_areas(pos, tri) / 3.0
    out = np.zeros(n)
    for k in range(3):
        np.add.at(out, tri[:, k], A)
    return out


def mixed_areas(pos: np.ndarray, tri: np.ndarray, n: int | None = None) -> np.ndarray:
    """Mixed Voronoi vertex areas (Meyer, Desbrun, Schroeder, Barr 2003).

    Unlike barycentric lumping these equal the dual-cell area on any
    non-obtuse star regardless of valence, which keeps the cotangent
    Laplacian pointwise consistent on structured grids with mixed diagonals.
    """
    n = pos.shape[0] if n is None else n
    e0, e1, e2 = triangle_edges(pos, tri)
    l2 = [np.einsum("ij,ij->i", e, e) for e in (e0, e1, e2)]
    cot = cotangents(pos, tri)
    area = triangle_areas(pos, tri)
    out = np.zeros(n)
    obtuse = cot < 0
    any_obtuse = obtuse.any(axis=1)
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        # Voronoi part at corner k: edges k-i (opposite j) and k-j (opposite i)
        vor = (l2[j] * cot[:, j] + l2[i] * cot[:, i]) / 8.0
        val = np.where(any_obtuse, np.where(obtuse[:, k], area / 2.0, area / 4.0), vor)
        np.add.at(out, tri[:, k], val)
    return out


def cross4(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Vector n in R^4 with <n, v> = det[v, a, b, c] for all v (rows of 4-vectors)."""
    m = np.stack([a, b, c], axis=-2)
    out = np.empty(a.shape[:-1] + (4,))
    cols = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]]
    for k in range(4):
        out[..., k] = (-1) ** k * np.linalg.det(m[..., :, cols[k]])
    return out


def face_normals_s3(X: np.ndarray, rel: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Unnormalized face normals tangent to S^3, weighted by twice the area.

    ``X`` are the absolute unit vectors, ``rel`` the same points relative to a
    fixed base (used for accurate edge vectors).
    """
    _, e1, e2 = triangle_edges(rel, tri)
    c = (X[tri[:, 0]] + X[tri[:, 1]] + X[tri[:, 2]]) / 3.0
    c /= np.linalg.norm(c, axis=1, keepdims=True)
    return cross4(c, e2, -e1)


def vertex_normals_s3(X: np.ndarray, rel: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Area-weighted vertex normals projected to T_X S^3 and normalized."""
    fn = face_normals_s3(X, rel, tri)
    vn = np.zeros_like(X)
    for k in range(3):
        np.add.at(vn, tri[:, k], fn)
    vn -= np.einsum("ij,ij->i", vn, X)[:, None] * X
    return vn / np.linalg.norm(vn, axis=1, keepdims=True)


def face_gradients(pos: np.ndarray, tri: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Gradient (as an ambient vector) of the P1 interpolant of ``u`` on each face."""
    a = pos[tri[:, 1]] - pos[tri[:, 0]]
    b = pos[tri[:, 2]] - pos[tri[:, 0]]
    du1 = u[tri[:, 1]] - u[tri[:, 0]]
    du2 = u[tri[:, 2]] - u[tri[:, 0]]
    # solve the 2x2 Gram system for grad = c1 a + c2 b
    aa = np.einsum("ij,ij->i", a, a)
    bb = np.einsum("ij,ij->i", b, b)
    ab = np.einsum("ij,ij->i", a, b)
    det = aa * bb - ab * ab
    c1 = (bb * du1 - ab * du2) / det
    c2 = (aa * du2 - ab * du1) / det
    return c1[:, None] * a + c2[:, None] * b


def vertex_average(tri: np.ndarray, face_vals: np.ndarray, weights: np.ndarray, n: int) -> np.ndarray:
    """Weighted average of per-face values onto vertices."""
    shape = (n,) + face_vals.shape[1:]
    acc = np.zeros(shape)
    wsum = np.zeros(n)
    wv = weights.reshape((-1,) + (1,) * (face_vals.ndim - 1))
    for k in range(3):
        np.add.at(acc, tri[:, k], wv * face_vals)
        np.add.at(wsum, tri[:, k], weights)
    return acc / wsum.reshape((-1,) + (1,) * (face_vals.ndim - 1))


def vertex_max(tri: np.ndarray, face_vals: np.ndarray, n: int) -> np.ndarray:
    out = np.full(n, -np.inf)
    for k in range(3):
        np.maximum.at(out, tri[:, k], face_vals)
    return out


def edge_topology(tri: np.ndarray):
    """Unique undirected edges and the number of incident triangles of each."""
    e = np.concatenate([tri[:, [1, 2]], tri[:, [2, 0]], tri[:, [0, 1]]])
    e = np.sort(e, axis=1)
    uniq, counts = np.unique(e, axis=0, return_counts=True)
    return uniq, counts
