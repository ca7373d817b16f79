"""Closed-form stationary circuits: parades, socle equations, and inradius cubics.

Parades are the circuits whose vertices all sit on the horizontal diameter
(angles 0 or pi); they are stationary for every choice of radii.  Writing
x_i = +-r_i for the signed abscissa of vertex i (the last vertex always at
+r_n), the reduced Hessian at a parade is the symmetric tridiagonal matrix
with diagonal b_i + b_{i+1} and off-diagonal -b_{i+1}, where

    b_i = x_{i-1} x_i / |x_{i-1} - x_i|   (indices cyclic).

Snellius circuits (reflections only) circumscribe a concentric "socle"
circle of radius sigma < min r_i.  With A_i = arccos(sigma / r_i) and a sign
eps_i = +-1 per vertex, the closure condition is

    sum_i eps_i * A_i = pi,

the angular gap between consecutive vertices is eps_j A_j + eps_{j+1} A_{j+1},
and the perimeter equals 2 * sum_i eps_i * sqrt(r_i^2 - sigma^2).  The
all-positive pattern gives convex circuits; mixed signs give spear-type
wrappings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .geometry import reduce_angles
from .validation import check_radii, is_generic

BISECT_XTOL = 1e-14


class DegenerateParadeError(ValueError):
    """Two consecutive parade vertices coincide (equal adjacent |x_i|)."""


class InconsistentSocleError(ValueError):
    """The given socle radius does not satisfy the closure condition."""


# ---------------------------------------------------------------------------
# parades


def parade_sign_patterns(n: int):
    """All 2^(n-1) sign patterns for the free vertices (last vertex fixed at +)."""
    return [tuple(s) for s in itertools.product((1, -1), repeat=n - 1)]


def parade_config(signs) -> np.ndarray:
    """Configuration of the parade with the given signs: angle 0 for +, pi for -."""
    s = np.asarray(signs)
    return np.where(s > 0, 0.0, np.pi)


def parade_axis_coords(radii, signs) -> np.ndarray:
    """Signed abscissas x_i = sign_i * r_i, with x_n = +r_n."""
    r = check_radii(radii)
    s = np.asarray(signs, dtype=float)
    if s.size != r.size - 1:
        raise ValueError(f"expected {r.size - 1} signs, got {s.size}")
    return np.append(s, 1.0) * r


def parade_perimeter(radii, signs) -> float:
    """Perimeter of a parade: sum of |x_i - x_{i+1}| around the cycle."""
    x = parade_axis_coords(radii, signs)
    return float(np.abs(x - np.roll(x, -1)).sum())


@dataclass
class ParadeHessianReport:
    """Reduced Hessian of the perimeter at a parade, with its exact factorisation."""

    signs: tuple[int, ...]
    matrix: np.ndarray
    b_values: np.ndarray
    determinant: float
    morse_index: int
    degenerate: bool
    s_value: float | None = None      # n = 4 only
    epsilons: tuple[int, ...] | None = None  # n = 4 only


def parade_hessian(radii, signs, degeneracy_threshold: float = 1e-8) -> ParadeHessianReport:
    """Closed-form reduced Hessian at a parade.

    For n = 4 the determinant factors as a positive function times
    S = sum_i eps_i / r_i with eps_i in {-2, 0, 2}; the epsilons follow
    from expanding the determinant and come out as

        eps_k = sign(x_k) * (u_k - u_{k+1}),   u_k = sign(x_{k-1} - x_k).
    """
    r = check_radii(radii)
    n = r.size
    x = parade_axis_coords(r, signs)
    gaps = x - np.roll(x, 1)  # x_i - x_{i-1}
    if np.any(np.abs(gaps) < 1e-12 * r.max()):
        raise DegenerateParadeError(
            "equal adjacent |x_i|: two parade vertices coincide"
        )
    b = np.roll(x, 1) * x / np.abs(gaps)  # b_i = x_{i-1} x_i / |x_{i-1} - x_i|
    m = n - 1
    H = np.zeros((m, m))
    for k in range(m):
        H[k, k] = b[k] + b[k + 1]
        if k + 1 < m:
            H[k, k + 1] = H[k + 1, k] = -b[k + 1]
    # spanning trees of the weighted cycle: exact determinant
    det = float(sum(np.prod(np.delete(b, i)) for i in range(n)))

    eigvals = np.linalg.eigvalsh(H)
    degenerate = bool(np.min(np.abs(eigvals)) < degeneracy_threshold * r.max())
    index = int(np.sum(eigvals < 0))

    s_value = None
    epsilons = None
    if n == 4:
        sigma = np.sign(x)
        u = np.sign(np.roll(x, 1) - x)  # u_k = sign(x_{k-1} - x_k)
        eps = sigma * (u - np.roll(u, -1))
        epsilons = tuple(int(e) for e in eps)
        s_value = float(np.sum(eps / r))

    return ParadeHessianReport(
        signs=tuple(int(s) for s in np.asarray(signs)),
        matrix=H,
        b_values=b,
        determinant=det,
        morse_index=index,
        degenerate=degenerate,
        s_value=s_value,
        epsilons=epsilons,
    )


# ---------------------------------------------------------------------------
# inradius cubics and the 3CC catalogue


def fermat_triangle_inradius(a: float, b: float, c: float) -> float:
    """Socle radius of the stationary triangle on circles of radii a, b, c.

    Unique root in (0, min(a, b, c)) of

        2abc r^3 + (a^2 b^2 + b^2 c^2 + c^2 a^2) r^2 - a^2 b^2 c^2 = 0,

    found by bisection on the guaranteed sign change.
    """
    if a <= 0 or b <= 0 or c <= 0:
        raise ValueError("radii must be strictly positive")
    q = a * a * b * b + b * b * c * c + c * c * a * a
    lead = 2.0 * a * b * c
    free = a * a * b * b * c * c

    def poly(t):
        return lead * t**3 + q * t**2 - free

    hi = min(a, b, c)
    if not (poly(0.0) < 0.0 < poly(hi)):
        raise ArithmeticError("cubic bracket failed; no sign change on (0, min radius)")
    return float(bisect(poly, 0.0, hi, xtol=BISECT_XTOL))


@dataclass
class ThreeCCValue:
    value: float
    morse_index: int
    label: str


def three_cc_catalogue(radii) -> tuple[list[ThreeCCValue], list[str]]:
    """The six critical perimeter values for three circles, in increasing order.

    With sorted radii s1 < s2 < s3 the values are 2(s3-s1) (the minimum),
    2(s1+s3), twice 2(s2+s3) (saddles), and twice the triangle maximum

        L_M = sum over pairs sqrt(s_i^2 + s_j^2 + 2 t s_i s_j / s_k)

    where t is the triangle socle radius.  Returns (values, warnings); equal
    radii are accepted as a limit and flagged as non-generic.
    """
    r = check_radii(radii, n=3)
    warnings = []
    if not is_generic(r):
        warnings.append("non-generic radii: catalogue multiplicities are limit values")
    s1, s2, s3 = np.sort(r)
    t = fermat_triangle_inradius(s1, s2, s3)
    l_max = float(
        np.sqrt(s1 * s1 + s2 * s2 + 2.0 * t * s1 * s2 / s3)
        + np.sqrt(s1 * s1 + s3 * s3 + 2.0 * t * s1 * s3 / s2)
        + np.sqrt(s2 * s2 + s3 * s3 + 2.0 * t * s2 * s3 / s1)
    )
    values = [
        ThreeCCValue(float(2.0 * (s3 - s1)), 0, "shortest parade"),
        ThreeCCValue(float(2.0 * (s1 + s3)), 1, "parade saddle"),
        ThreeCCValue(float(2.0 * (s2 + s3)), 1, "parade saddle"),
        ThreeCCValue(float(2.0 * (s2 + s3)), 1, "parade saddle"),
        ThreeCCValue(l_max, 2, "triangle maximum"),
        ThreeCCValue(l_max, 2, "triangle maximum"),
    ]
    return values, warnings


def convex_quad_inradius(a: float, b: float, c: float, d: float) -> float | None:
    """Socle radius of the strictly convex stationary quadrilateral, or None.

    The closed form is

        r = 2 sqrt[ (Q-abc)(Q-abd)(Q-bcd)(Q-acd)
                    / (abcd (ab+cd)(ac+bd)(ad+bc)) ],   2Q = abc+abd+acd+bcd.

    A positive radicand alone does not guarantee that the convex circuit
    exists, so the result is additionally gated on the socle closure
    condition; None means no strictly convex stationary quadrilateral.
    """
    r = check_radii([a, b, c, d], n=4)
    a, b, c, d = (float(v) for v in r)
    q = (a * b * c + a * b * d + a * c * d + b * c * d) / 2.0
    num = (q - a * b * c) * (q - a * b * d) * (q - b * c * d) * (q - a * c * d)
    den = a * b * c * d * (a * b + c * d) * (a * c + b * d) * (a * d + b * c)
    radicand = num / den
    if radicand <= 0.0:
        return None
    rho = 2.0 * float(np.sqrt(radicand))
    if rho >= min(a, b, c, d):
        return None
    if abs(socle_residual(r, rho, (1, 1, 1, 1))) > 1e-9:
        return None
    return rho


# ---------------------------------------------------------------------------
# socle equation and Snellius circuits


def socle_residual(radii, sigma: float, eps_signs) -> float:
    """Closure residual sum_i eps_i arccos(sigma / r_i) - pi."""
    r = check_radii(radii)
    eps = np.asarray(eps_signs, dtype=float)
    if eps.size != r.size:
        raise ValueError(f"expected {r.size} signs, got {eps.size}")
    if not (0.0 < sigma < r.min()):
        raise ValueError(f"socle radius must lie in (0, {r.min()}), got {sigma}")
    return float(np.dot(eps, np.arccos(sigma / r)) - np.pi)


def socle_roots(radii, eps_signs, *, scan_points: int = 512) -> list[float]:
    """All socle radii satisfying the closure condition for one sign pattern.

    Scans (0, min r) for sign changes of the residual and bisects each
    bracket.  The residual can vanish identically at sigma -> 0 for some
    mixed patterns (the parade limit), so the scan starts strictly inside.
    """
    r = check_radii(radii)
    hi = float(r.min())
    eps = np.asarray(eps_signs, dtype=float)
    lo = 1e-9 * hi
    grid = np.linspace(lo, hi * (1.0 - 1e-12), scan_points)
    vals = np.dot(eps, np.arccos(np.minimum(grid[None, :] / r[:, None], 1.0))) - np.pi
    roots = []
    for k in range(scan_points - 1):
        v0, v1 = vals[k], vals[k + 1]
        if not (np.isfinite(v0) and np.isfinite(v1)):
            continue
        if v0 == 0.0:
            roots.append(float(grid[k]))
        elif v0 * v1 < 0.0:
            roots.append(
                float(
                    bisect(
                        lambda s: socle_residual(r, s, eps),
                        grid[k],
                        grid[k + 1],
                        xtol=BISECT_XTOL * max(1.0, hi),
                    )
                )
            )
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def snellius_from_socle(radii, sigma: float, eps_signs, orientation: int = 1) -> np.ndarray:
    """Reconstruct the Snellius configuration circumscribing a given socle.

    Accumulates the signed angular gaps eps_j A_j + eps_{j+1} A_{j+1} around
    the circuit, then rotates so the last vertex sits at angle 0.
    Orientation -1 produces the mirror circuit.
    """
    r = check_radii(radii)
    residual = socle_residual(r, sigma, eps_signs)
    if abs(residual) > 1e-8:
        raise InconsistentSocleError(
            f"closure residual {residual:.3e} too large for a stationary circuit"
        )
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    eps = np.asarray(eps_signs, dtype=float)
    A = np.arccos(sigma / r)
    gaps = orientation * (eps * A + np.roll(eps * A, -1))  # gap j: vertex j -> j+1
    beta = np.concatenate([[0.0], np.cumsum(gaps[:-1])])
    return reduce_angles(beta - beta[-1])[:-1]


def snellius_perimeter(radii, sigma: float, eps_signs) -> float:
    """Perimeter of a Snellius circuit: 2 * sum_i eps_i sqrt(r_i^2 - sigma^2)."""
    r = check_radii(radii)
    eps = np.asarray(eps_signs, dtype=float)
    return float(2.0 * np.sum(eps * np.sqrt(r**2 - sigma**2)))


# ---------------------------------------------------------------------------
# partially aligned circuits (n = 4)


@dataclass
class PartiallyAlignedResult:
    """Stationary circuits obtained by inserting a refraction vertex on a triangle side."""

    skip_index: int
    solutions: list[np.ndarray]
    crossings: int          # intersection points per orientation: 0, 1 or 2
    tangent: bool
    triangle_socle: float


def partially_aligned_circuits(radii, skip_index: int) -> PartiallyAlignedResult:
    """Partially aligned stationary quadrilaterals with vertex ``skip_index`` refracted.

    Solves the stationary triangle on the other three circles (in cyclic
    order), intersects the skipped circle with the triangle side joining
    that vertex's cyclic neighbours, and inserts a refraction vertex at each
    intersection point.  ``skip_index`` is 1-based.  Both mirror copies are
    returned; a tangency (double intersection point) is flagged.
    """
    r = check_radii(radii, n=4)
    if not 1 <= skip_index <= 4:
        raise ValueError(f"skip index must be in 1..4, got {skip_index}")
    s = skip_index - 1
    others = [(s + 1) % 4, (s + 2) % 4, (s + 3) % 4]
    tri_r = r[others]
    sigma = fermat_triangle_inradius(*tri_r)

    solutions: list[np.ndarray] = []
    crossings = 0
    tangent = False
    for orientation in (1, -1):
        tri_cfg = snellius_from_socle(tri_r, sigma, (1, 1, 1), orientation)
        tri_full = np.append(tri_cfg, 0.0)
        p = np.stack([tri_r * np.cos(tri_full), tri_r * np.sin(tri_full)], axis=1)
        # side from the previous neighbour (tri vertex 2) to the next (tri vertex 0)
        pa, pb = p[2], p[0]
        dvec = pb - pa
        aa = float(dvec @ dvec)
        bb = float(pa @ dvec)
        cc = float(pa @ pa) - float(r[s]) ** 2
        disc = bb * bb - aa * cc
        disc_rel = disc / (aa * float(r[s]) ** 2)
        if abs(disc_rel) < 1e-10:
            t_candidates = [-bb / aa]
            if orientation == 1:
                tangent = True
        elif disc < 0.0:
            t_candidates = []
        else:
            root = float(np.sqrt(disc))
            t_candidates = [(-bb - root) / aa, (-bb + root) / aa]
        margin = 1e-12
        t_inside = [t for t in t_candidates if margin < t < 1.0 - margin]
        if orientation == 1:
            crossings = len(t_inside)
        for t in t_inside:
            qpt = pa + t * dvec
            angles = np.empty(4)
            for tri_idx, circle in enumerate(others):
                angles[circle] = tri_full[tri_idx]
            angles[s] = np.arctan2(qpt[1], qpt[0])
            solutions.append(reduce_angles(angles - angles[3])[:3])
    return PartiallyAlignedResult(
        skip_index=skip_index,
        solutions=solutions,
        crossings=crossings,
        tangent=tangent,
        triangle_socle=sigma,
    )


# ---------------------------------------------------------------------------
# special configurations


def pentagram_config() -> np.ndarray:
    """The regular pentagram on five equal circles: vertex j at angle 4*pi*j/5."""
    return reduce_angles(4.0 * np.pi / 5.0 * np.arange(1, 5))
