"""Coordinates (x, y, z) on the round unit 3-sphere adapted to the Clifford torus.

The parametrization is

    Phi(x, y, z) = cos(z + pi/4) e^{i sqrt2 y} e1 + sin(z + pi/4) e^{i sqrt2 x} e2

with C^2 identified with R^4 as (Re z1, Im z1, Re z2, Im z2).  Every formula of
the coordinate system is written out once in this module and reused everywhere
else; other modules never re-derive metric or frame components.

All functions are vectorized over leading axes: domain points have trailing
shape (3,), ambient points trailing shape (4,).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SQRT2 = np.sqrt(2.0)
QUARTER_PI = np.pi / 4.0
PERIOD = SQRT2 * np.pi


class DomainError(ValueError):
    """A point lies outside the slab |z| < pi/4 where the coordinates are valid."""


def _check_z(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) >= QUARTER_PI):
        raise DomainError("coordinate z must satisfy |z| < pi/4")
    return z


def phi_map(p) -> np.ndarray:
    """Map domain points (..., 3) to unit vectors in R^4 (..., 4)."""
    p = np.asarray(p, dtype=float)
    x, y, z = p[..., 0], p[..., 1], _check_z(p[..., 2])
    c = np.cos(z + QUARTER_PI)
    s = np.sin(z + QUARTER_PI)
    return np.stack(
        [c * np.cos(SQRT2 * y), c * np.sin(SQRT2 * y),
         s * np.cos(SQRT2 * x), s * np.sin(SQRT2 * x)],
        axis=-1,
    )


def phi_map_xp(p, xp=np):
    """Unchecked Phi for a single point or batch, in any numpy-like namespace."""
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    c = xp.cos(z + QUARTER_PI)
    s = xp.sin(z + QUARTER_PI)
    return xp.stack([c * xp.cos(SQRT2 * y), c * xp.sin(SQRT2 * y),
                     s * xp.cos(SQRT2 * x), s * xp.sin(SQRT2 * x)], axis=-1)


def phi_offset(p, base=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Phi(p) - Phi(base) evaluated without cancellation.

    Uses cos(u) - cos(v) = -2 sin((u+v)/2) sin((u-v)/2) and the analogous
    identities, so points within 1e-9 of the base keep full relative precision.
    """
    p = np.asarray(p, dtype=float)
    q = np.broadcast_to(np.asarray(base, dtype=float), p.shape)
    u1, v1 = p[..., 2] + QUARTER_PI, q[..., 2] + QUARTER_PI
    dc = -2.0 * np.sin(0.5 * (u1 + v1)) * np.sin(0.5 * (u1 - v1))  # cos u1 - cos v1
    ds = 2.0 * np.cos(0.5 * (u1 + v1)) * np.sin(0.5 * (u1 - v1))   # sin u1 - sin v1
    ay, by = SQRT2 * p[..., 1], SQRT2 * q[..., 1]
    ax, bx = SQRT2 * p[..., 0], SQRT2 * q[..., 0]
    dcy = -2.0 * np.sin(0.5 * (ay + by)) * np.sin(0.5 * (ay - by))
    dsy = 2.0 * np.cos(0.5 * (ay + by)) * np.sin(0.5 * (ay - by))
    dcx = -2.0 * np.sin(0.5 * (ax + bx)) * np.sin(0.5 * (ax - bx))
    dsx = 2.0 * np.cos(0.5 * (ax + bx)) * np.sin(0.5 * (ax - bx))
    cv, sv = np.cos(v1), np.sin(v1)
    # a*b - c*d = (a - c)*b + c*(b - d)
    return np.stack(
        [dc * np.cos(ay) + cv * dcy,
         dc * np.sin(ay) + cv * dsy,
         ds * np.cos(ax) + sv * dcx,
         ds * np.sin(ax) + sv * dsx],
        axis=-1,
    )


def phi_inverse(X) -> np.ndarray:
    """Domain coordinates of unit vectors X, with x and y in (-pi/sqrt2, pi/sqrt2]."""
    X = np.asarray(X, dtype=float)
    u = np.arctan2(np.hypot(X[..., 2], X[..., 3]), np.hypot(X[..., 0], X[..., 1]))
    x = np.arctan2(X[..., 3], X[..., 2]) / SQRT2
    y = np.arctan2(X[..., 1], X[..., 0]) / SQRT2
    return np.stack([x, y, u - QUARTER_PI], axis=-1)


def coordinate_frame(p) -> np.ndarray:
    """Pushforwards of d/dx, d/dy, d/dz; shape (..., 3, 4)."""
    p = np.asarray(p, dtype=float)
    x, y, z = p[..., 0], p[..., 1], _check_z(p[..., 2])
    c = np.cos(z + QUARTER_PI)
    s = np.sin(z + QUARTER_PI)
    cx, sx = np.cos(SQRT2 * x), np.sin(SQRT2 * x)
    cy, sy = np.cos(SQRT2 * y), np.sin(SQRT2 * y)
    zero = np.zeros_like(x)
    dx = np.stack([zero, zero, -SQRT2 * s * sx, SQRT2 * s * cx], axis=-1)
    dy = np.stack([-SQRT2 * c * sy, SQRT2 * c * cy, zero, zero], axis=-1)
    dz = np.stack([-s * cy, -s * sy, c * cx, c * sx], axis=-1)
    return np.stack([dx, dy, dz], axis=-2)


def metric_coefficients(z, xp=np):
    """Nonzero metric entries and Christoffel symbols as a plain tuple.

    Returns ``(g11, g22, G1_13, G2_23, G3_11, G3_22)``; ``g33 = 1``.  Works with
    any numpy-like namespace ``xp`` (numpy or jax.numpy), without domain checks.
    """
    s2, c2 = xp.sin(2.0 * z), xp.cos(2.0 * z)
    return 1.0 + s2, 1.0 - s2, c2 / (1.0 + s2), -c2 / (1.0 - s2), -c2, c2


@dataclass(frozen=True)
class AmbientMetric:
    """Diagonal metric, Christoffel symbols and frame determinant at given z.

    ``christoffel[..., k, i, j]`` is Gamma^k_ij (indices 0, 1, 2 for x, y, z).
    """

    diag: np.ndarray
    christoffel: np.ndarray
    det: np.ndarray


def ambient_metric(z) -> AmbientMetric:
    z = _check_z(z)
    g11, g22, g113, g223, g311, g322 = metric_coefficients(z)
    diag = np.stack([g11, g22, np.ones_like(z)], axis=-1)
    gam = np.zeros(np.shape(z) + (3, 3, 3))
    gam[..., 0, 0, 2] = g113
    gam[..., 0, 2, 0] = g113
    gam[..., 1, 1, 2] = g223
    gam[..., 1, 2, 1] = g223
    gam[..., 2, 0, 0] = g311
    gam[..., 2, 1, 1] = g322
    return AmbientMetric(diag=diag, christoffel=gam, det=np.cos(2.0 * z))


def killing_ambient(X) -> np.ndarray:
    """Killing field rotating the <e1, e2> real plane: -Re z2 e1 + Re z1 e2."""
    X = np.asarray(X, dtype=float)
    zero = np.zeros_like(X[..., 0])
    return np.stack([-X[..., 2], zero, X[..., 0], zero], axis=-1)


def killing_matrix() -> np.ndarray:
    """Antisymmetric B with K(X) = B X."""
    B = np.zeros((4, 4))
    B[0, 2] = -1.0
    B[2, 0] = 1.0
    return B


def killing_coords(p) -> np.ndarray:
    """Coefficients of the same Killing field in the (d/dx, d/dy, d/dz) frame."""
    p = np.asarray(p, dtype=float)
    x, y, z = p[..., 0], p[..., 1], _check_z(p[..., 2])
    u = z + QUARTER_PI
    cx, sx = np.cos(SQRT2 * x), np.sin(SQRT2 * x)
    cy, sy = np.cos(SQRT2 * y), np.sin(SQRT2 * y)
    return np.stack(
        [-np.cos(u) / np.sin(u) * sx * cy / SQRT2,
         np.tan(u) * cx * sy / SQRT2,
         cx * cy],
        axis=-1,
    )


def killing_field(p, *, form: str = "ambient") -> np.ndarray:
    """Killing field K as an R^4 vector at domain points ``p``.

    ``form="ambient"`` evaluates the linear formula on Phi(p); ``form="coords"``
    pushes the coordinate expression forward through the frame.  The two agree
    to roundoff; the coordinate form loses accuracy near |z| = pi/4.
    """
    p = np.asarray(p, dtype=float)
    if form == "ambient":
        return killing_ambient(phi_map(p))
    if form == "coords":
        k = killing_coords(p)
        return np.einsum("...i,...ij->...j", k, coordinate_frame(p))
    raise ValueError(f"unknown form {form!r}")


def metric_norm2(p, v) -> np.ndarray:
    """g(v, v) for coordinate vectors ``v`` at domain points ``p``."""
    d = ambient_metric(np.asarray(p)[..., 2]).diag
    v = np.asarray(v, dtype=float)
    return np.sum(d * v * v, axis=-1)


# --- symmetries ----------------------------------------------------------

def _rot(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class SymmetryElement:
    """An element of the reflection/translation group acting on both spaces.

    Generators are built with :meth:`generator`; products with :func:`compose`.
    The domain action is affine, ``p -> A p + b``; the ambient action is the
    orthogonal matrix ``M`` on R^4.
    """

    kind: str
    c: float = 0.0
    A: np.ndarray = field(default=None, repr=False, compare=False)
    b: np.ndarray = field(default=None, repr=False, compare=False)
    M: np.ndarray = field(default=None, repr=False, compare=False)

    @classmethod
    def generator(cls, kind: str, c: float = 0.0) -> "SymmetryElement":
        A = np.eye(3)
        b = np.zeros(3)
        M = np.eye(4)
        if kind == "translate-x":
            b[0] = c
            M[2:, 2:] = _rot(SQRT2 * c)
        elif kind == "translate-y":
            b[1] = c
            M[:2, :2] = _rot(SQRT2 * c)
        elif kind == "reflect-x":
            A[0, 0] = -1.0
            b[0] = 2.0 * c
            conj = np.diag([1.0, -1.0])
            M[2:, 2:] = _rot(2.0 * SQRT2 * c) @ conj
        elif kind == "reflect-y":
            A[1, 1] = -1.0
            b[1] = 2.0 * c
            conj = np.diag([1.0, -1.0])
            M[:2, :2] = _rot(2.0 * SQRT2 * c) @ conj
        elif kind == "reflect-z":
            A = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]])
            M = np.zeros((4, 4))
            M[0, 2] = M[1, 3] = M[2, 0] = M[3, 1] = 1.0
        else:
            raise ValueError(f"unknown symmetry kind {kind!r}")
        return cls(kind=kind, c=float(c), A=A, b=b, M=M)

    def on_domain(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return p @ self.A.T + self.b

    def on_ambient(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.M.T


def compose(s: SymmetryElement, t: SymmetryElement) -> SymmetryElement:
    """The element ``s o t`` (apply ``t`` first)."""
    return SymmetryElement(
        kind=f"({s.kind})o({t.kind})", c=0.0,
        A=s.A @ t.A, b=s.A @ t.b + s.b, M=s.M @ t.M,
    )


def apply_symmetry(s: SymmetryElement, p, *, space: str = "domain") -> np.ndarray:
    if space == "domain":
        return s.on_domain(p)
    if space == "ambient":
        return s.on_ambient(p)
    raise ValueError(f"unknown space {space!r}")


def geodesic_exp(p, v) -> np.ndarray:
    """Great-circle exponential map of S^3 at ``p`` applied to tangent ``v``."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    # sin(n)/n with the removable singularity at 0
    sinc = np.sinc(n / np.pi)
    return np.cos(n) * p + sinc * v
