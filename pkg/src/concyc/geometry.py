"""Geometry of closed circuits with one vertex on each of n concentric circles.

Conventions used throughout the package:

* circle j (j = 1..n) has radius r_j > 0 and is centred at the origin;
* a circuit visits the circles in index order, vertex j sitting at polar
  angle a_j, so p_j = r_j (cos a_j, sin a_j);
* the last vertex is pinned at angle 0, which removes the rotational
  symmetry.  A *configuration* is the free angle vector (a_1, ..., a_{n-1}),
  always reduced mod 2*pi.

Side j joins vertex j to vertex j+1 (cyclically) and has length

    l_j = sqrt(r_j^2 + r_{j+1}^2 - 2 r_j r_{j+1} cos(a_{j+1} - a_j)).

The perimeter, its gradient and its Hessian are smooth wherever no two
consecutive vertices coincide (l_j > 0 everywhere).

Most functions accept a single configuration of shape (n-1,) or a batch of
shape (B, n-1); batched calls vectorise over the leading axis.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .validation import check_config, check_radii

TWO_PI = 2.0 * np.pi

SINGULAR_REL_TOL = 1e-12


class SingularConfigurationError(ValueError):
    """Two consecutive vertices coincide, so a side has zero length."""


class ShapeClass(str, enum.Enum):
    PARADE = "parade"
    CONVEX = "convex"
    SPEAR = "spear"
    PARTIALLY_ALIGNED = "partially-aligned"
    SELF_INTERSECTING = "self-intersecting"
    OTHER = "other"


class VertexKind(str, enum.Enum):
    REFLECTION = "reflection"
    REFRACTION = "refraction"
    NON_STATIONARY = "non-stationary"


@dataclass
class VertexEvent:
    """Classification of one vertex of a circuit against the Fermat rules."""

    kind: VertexKind
    residual: float


# ---------------------------------------------------------------------------
# angle arithmetic on the torus


def reduce_angles(angles) -> np.ndarray:
    """Reduce angles into [0, 2*pi)."""
    return np.mod(np.asarray(angles, dtype=float), TWO_PI)


def torus_distance(a, b) -> float:
    """Max-norm distance between two configurations on the torus."""
    d = np.abs(reduce_angles(a) - reduce_angles(b))
    d = np.minimum(d, TWO_PI - d)
    return float(np.max(d))


def mirror_config(config) -> np.ndarray:
    """Reflect a configuration in the line through the pinned vertex."""
    return reduce_angles(-np.asarray(config, dtype=float))


# ---------------------------------------------------------------------------
# internal batch plumbing


def _as_batch(radii, config):
    """Return (radii, full angles (B, n), single_flag) without validation."""
    r = np.asarray(radii, dtype=float)
    c = np.asarray(config, dtype=float)
    single = c.ndim == 1
    c = np.atleast_2d(c)
    if c.shape[-1] != r.size - 1:
        raise ValueError(
            f"configuration needs {r.size - 1} angles for n={r.size}, got {c.shape[-1]}"
        )
    a = np.concatenate([c, np.zeros((c.shape[0], 1))], axis=1)
    return r, a, single


def _sides_full(r, a):
    rn = np.roll(r, -1)
    theta = np.roll(a, -1, axis=1) - a
    return np.sqrt(r**2 + rn**2 - 2.0 * r * rn * np.cos(theta))


def _gradient_full_raw(r, a):
    """Full-torus gradient, no singularity checks (may return non-finite)."""
    l = _sides_full(r, a)
    with np.errstate(divide="ignore", invalid="ignore"):
        prev = np.roll(r, 1) * r * np.sin(a - np.roll(a, 1, axis=1)) / np.roll(l, 1, axis=1)
        fwd = np.roll(r, -1) * r * np.sin(a - np.roll(a, -1, axis=1)) / l
    return prev + fwd


def _side_curvatures_raw(r, a):
    """Second derivative of each side length in its own angle gap."""
    rn = np.roll(r, -1)
    theta = np.roll(a, -1, axis=1) - a
    l = _sides_full(r, a)
    prod = r * rn
    with np.errstate(divide="ignore", invalid="ignore"):
        return prod * np.cos(theta) / l - (prod * np.sin(theta)) ** 2 / l**3


def _hessian_full_raw(r, a):
    n = r.size
    c = _side_curvatures_raw(r, a)
    H = np.zeros((a.shape[0], n, n))
    idx = np.arange(n)
    H[:, idx, idx] = np.roll(c, 1, axis=1) + c
    H[:, idx, (idx + 1) % n] = -c
    H[:, (idx + 1) % n, idx] = -c
    return H


def _check_sides(r, l):
    if np.any(l < SINGULAR_REL_TOL * np.max(r)):
        raise SingularConfigurationError(
            "coincident consecutive vertices (a side has zero length)"
        )


def _unbatch(x, single):
    return x[0] if single else x


# ---------------------------------------------------------------------------
# perimeter, gradient, Hessian


def side_lengths(radii, config):
    """Lengths of the n sides; side j joins vertex j to vertex j+1."""
    r, a, single = _as_batch(radii, config)
    return _unbatch(_sides_full(r, a), single)


def perimeter(radii, config):
    """Perimeter of the circuit by the law of cosines."""
    r, a, single = _as_batch(radii, config)
    return _unbatch(_sides_full(r, a).sum(axis=1), single)


def vertices(radii, config):
    """Cartesian vertices, shape (n, 2) (or (B, n, 2) for batches)."""
    r, a, single = _as_batch(radii, config)
    p = np.stack([r * np.cos(a), r * np.sin(a)], axis=-1)
    return _unbatch(p, single)


def gradient_full(radii, config):
    """Gradient of the perimeter with respect to all n angles.

    Component j is

        r_{j-1} r_j sin(a_j - a_{j-1}) / l_{j-1}
          + r_{j+1} r_j sin(a_j - a_{j+1}) / l_j.

    The components sum to zero by rotational invariance.
    """
    r, a, single = _as_batch(radii, config)
    _check_sides(r, _sides_full(r, a))
    return _unbatch(_gradient_full_raw(r, a), single)


def gradient(radii, config):
    """Gradient on the reduced torus (last angle pinned): first n-1 components."""
    g = gradient_full(radii, config)
    return g[..., :-1]


def hessian_full(radii, config):
    """Full-torus Hessian: cyclic tridiagonal with weights c_j = d^2 l_j / d theta^2."""
    r, a, single = _as_batch(radii, config)
    _check_sides(r, _sides_full(r, a))
    return _unbatch(_hessian_full_raw(r, a), single)


def hessian(radii, config):
    """Reduced Hessian: the full matrix with the pinned row and column removed."""
    H = hessian_full(radii, config)
    return H[..., :-1, :-1]


# ---------------------------------------------------------------------------
# geometric classification


def tangential_distances(radii, config):
    """Distance from the centre to each side's supporting line.

    At a stationary circuit all of these agree (the tangential radius);
    for parades they vanish.
    """
    r, a, single = _as_batch(radii, config)
    l = _sides_full(r, a)
    _check_sides(r, l)
    p = np.stack([r * np.cos(a), r * np.sin(a)], axis=-1)
    q = np.roll(p, -1, axis=1)
    cross = p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0]
    return _unbatch(np.abs(cross) / l, single)


def vertex_turns(radii, config):
    """Signed sine of the turn angle at each vertex (cross of unit edges).

    Zero at a vertex whose two adjacent sides are collinear; the sign
    distinguishes convex from reflex turns.
    """
    r, a, single = _as_batch(radii, config)
    l = _sides_full(r, a)
    _check_sides(r, l)
    p = np.stack([r * np.cos(a), r * np.sin(a)], axis=-1)
    e = (np.roll(p, -1, axis=1) - p) / l[..., None]
    ep = np.roll(e, 1, axis=1)
    return _unbatch(ep[..., 0] * e[..., 1] - ep[..., 1] * e[..., 0], single)


def classify_vertices(radii, config, tol: float = 1e-8) -> list[VertexEvent]:
    """Tag every vertex as reflection, refraction, or non-stationary.

    A vertex is stationary when the sum of the unit vectors toward its two
    neighbours has no tangential component.  Stationary vertices with
    collinear adjacent sides are refractions; the rest are reflections, for
    which the radius bisects the angle between the sides.
    """
    r = check_radii(radii)
    c = check_config(config, r.size)
    rr, a, _ = _as_batch(r, c)
    l = _sides_full(rr, a)[0]
    _check_sides(rr, l)
    p = vertices(r, c)
    e = (np.roll(p, -1, axis=0) - p) / l[:, None]
    toward_prev = -np.roll(e, 1, axis=0)
    toward_next = e
    s = toward_prev + toward_next
    rho = p / r[:, None]
    tang = np.stack([-rho[:, 1], rho[:, 0]], axis=1)
    stat_res = np.abs(np.einsum("ij,ij->i", s, tang))
    coll_res = np.abs(
        toward_prev[:, 0] * toward_next[:, 1] - toward_prev[:, 1] * toward_next[:, 0]
    )
    mirrored = 2.0 * np.einsum("ij,ij->i", toward_prev, rho)[:, None] * rho - toward_prev
    refl_res = np.linalg.norm(mirrored - toward_next, axis=1)

    events = []
    for j in range(r.size):
        if stat_res[j] < tol and coll_res[j] < tol:
            events.append(VertexEvent(VertexKind.REFRACTION, float(max(stat_res[j], coll_res[j]))))
        elif stat_res[j] < tol:
            events.append(VertexEvent(VertexKind.REFLECTION, float(refl_res[j])))
        else:
            events.append(VertexEvent(VertexKind.NON_STATIONARY, float(stat_res[j])))
    return events


@dataclass
class Circuit:
    """A concrete circuit: Cartesian vertices plus side lengths."""

    vertices: np.ndarray
    side_lengths: np.ndarray

    @classmethod
    def from_config(cls, radii, config) -> "Circuit":
        r = check_radii(radii)
        c = check_config(config, r.size)
        return cls(vertices=vertices(r, c), side_lengths=side_lengths(r, c))


def _segments_cross(p1, p2, p3, p4) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(p3, p4, p1)
    d2 = orient(p3, p4, p2)
    d3 = orient(p1, p2, p3)
    d4 = orient(p1, p2, p4)
    return (d1 * d2 < 0.0) and (d3 * d4 < 0.0)


def _is_self_intersecting(p: np.ndarray) -> bool:
    n = p.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j - i) % n in (0, 1, n - 1):
                continue
            if _segments_cross(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n]):
                return True
    return False


def shape_of(circuit: Circuit, tol: float = 1e-8) -> ShapeClass:
    """Classify a circuit: parade, partially aligned, convex, spear, or self-intersecting.

    Parades have every vertex on one line through the centre.  Partially
    aligned circuits have some but not all vertices with collinear adjacent
    sides.  The remaining circuits are split by simplicity and convexity.
    """
    p = np.asarray(circuit.vertices, dtype=float)
    l = np.asarray(circuit.side_lengths, dtype=float)
    radii_like = np.hypot(p[:, 0], p[:, 1])

    axis = p[np.argmax(radii_like)]
    axis = axis / np.linalg.norm(axis)
    on_diameter = np.abs(p[:, 0] * axis[1] - p[:, 1] * axis[0]) <= tol * np.maximum(radii_like, 1.0)
    if np.all(on_diameter):
        return ShapeClass.PARADE

    e = (np.roll(p, -1, axis=0) - p) / l[:, None]
    ep = np.roll(e, 1, axis=0)
    turns = ep[:, 0] * e[:, 1] - ep[:, 1] * e[:, 0]
    aligned = np.abs(turns) < tol
    if np.all(aligned):
        return ShapeClass.OTHER  # collinear but not through the centre
    if np.any(aligned):
        return ShapeClass.PARTIALLY_ALIGNED
    if _is_self_intersecting(p):
        return ShapeClass.SELF_INTERSECTING
    if np.all(turns > 0) or np.all(turns < 0):
        return ShapeClass.CONVEX
    return ShapeClass.SPEAR


def shape_of_config(radii, config, tol: float = 1e-8) -> ShapeClass:
    """Shape classification straight from a reduced configuration."""
    return shape_of(Circuit.from_config(radii, config), tol=tol)
