"""Critical-point solver: Newton refinement, multistart catalogue, grid oracle.

The catalogue builder seeds Newton's method from every closed-form circuit
(parades, Snellius sign-pattern roots, partially aligned insertions) plus a
uniform grid on the reduced torus, refines all seeds in vectorised batches,
deduplicates on the torus metric, classifies each survivor, and pairs mirror
twins.  A brute-force grid oracle provides an independent completeness check
for n <= 4.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from . import closedform, geometry
from .geometry import TWO_PI, ShapeClass, SingularConfigurationError
from .validation import check_config, check_radii, is_generic

_MAX_NEWTON_STEP = np.pi  # cap on the infinity norm of one Newton update
_CHUNK = 1 << 16


class NoConvergenceError(RuntimeError):
    """Newton refinement failed to reach the stationarity tolerance."""


@dataclass
class SolverSettings:
    """Tunables for the catalogue builder."""

    grid_density: int = 48
    newton_tol: float = 1e-12
    max_iter: int = 100
    dedupe_radius: float = 1e-6
    degeneracy_threshold: float = 1e-8

    def __post_init__(self):
        for name in ("grid_density", "newton_tol", "max_iter", "dedupe_radius",
                     "degeneracy_threshold"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class CriticalPoint:
    """A stationary circuit with its local classification."""

    config: np.ndarray
    perimeter: float
    gradient_norm: float
    morse_index: int
    degenerate: bool
    shape: ShapeClass
    tangential_radius: float
    vertex_events: list[geometry.VertexEvent]
    mirror_of: int | None = None
    hessian_det: float = 0.0
    newton_iterations: int = 0


@dataclass
class CriticalCatalogue:
    """All critical points found for one radius vector."""

    radii: np.ndarray
    points: list[CriticalPoint]
    mirror_pairs: list[tuple[int, int]]
    morse_counts: dict[int, int]
    euler_sum: int
    warnings: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)


def morse_index(matrix, threshold: float = 1e-8, scale: float = 1.0) -> tuple[int, bool]:
    """Morse index (count of negative eigenvalues) and a degeneracy flag.

    The flag is set when the smallest absolute eigenvalue falls below
    ``threshold * scale``; the index is only meaningful when it is clear.
    """
    w = np.linalg.eigvalsh(np.asarray(matrix, dtype=float))
    degenerate = bool(np.min(np.abs(w)) < threshold * scale)
    return int(np.sum(w < 0.0)), degenerate


def sylvester_index(matrix) -> int | None:
    """Morse index from the signs of leading principal minors.

    Returns None when a minor is numerically zero (the rule does not apply).
    """
    H = np.asarray(matrix, dtype=float)
    minors = [1.0]
    for k in range(1, H.shape[0] + 1):
        minors.append(float(np.linalg.det(H[:k, :k])))
    scale = max(1.0, float(np.abs(H).max()))
    changes = 0
    for a, b in zip(minors, minors[1:]):
        if abs(b) < 1e-12 * scale ** H.shape[0]:
            return None
        if a * b < 0:
            changes += 1
    return changes


# ---------------------------------------------------------------------------
# batched Newton engine


def _grad_norms(r, configs):
    a = np.concatenate([configs, np.zeros((configs.shape[0], 1))], axis=1)
    with np.errstate(all="ignore"):
        g = geometry._gradient_full_raw(r, a)[:, :-1]
    gn = np.linalg.norm(g, axis=1)
    return np.where(np.isfinite(gn), gn, np.inf)


def _newton_steps(r, configs, grads):
    """One Newton step per row, with pseudo-descent fallback for singular Hessians."""
    m = configs.shape[1]
    a = np.concatenate([configs, np.zeros((configs.shape[0], 1))], axis=1)
    with np.errstate(all="ignore"):
        H = geometry._hessian_full_raw(r, a)[:, :m, :m]
        det = np.linalg.det(H)
        hscale = np.abs(H).max(axis=(1, 2)) + 1e-300
    ok = np.isfinite(det) & (np.abs(det) > 1e-13 * hscale**m) & np.isfinite(H).all(axis=(1, 2))
    step = np.zeros_like(configs)
    if ok.any():
        try:
            step[ok] = np.linalg.solve(H[ok], -grads[ok][..., None])[..., 0]
        except np.linalg.LinAlgError:
            ok = np.zeros_like(ok)
    if (~ok).any():
        g = grads[~ok]
        gn = np.linalg.norm(g, axis=1, keepdims=True) + 1e-300
        step[~ok] = -0.1 * g / gn
    nrm = np.abs(step).max(axis=1, keepdims=True)
    big = nrm[:, 0] > _MAX_NEWTON_STEP
    if big.any():
        step[big] *= _MAX_NEWTON_STEP / nrm[big]
    return step


def _newton_polish_batch(radii, starts, settings: SolverSettings):
    """Damped Newton on a batch of starts; returns (configs, converged, iterations)."""
    r = np.asarray(radii, dtype=float)
    cfg = np.mod(np.atleast_2d(np.asarray(starts, dtype=float)), TWO_PI).copy()
    B = cfg.shape[0]
    tol = settings.newton_tol * (1.0 + r.max())

    gn = _grad_norms(r, cfg)
    iters = np.zeros(B, dtype=int)
    converged = gn <= tol
    active = np.isfinite(gn) & ~converged

    for _ in range(settings.max_iter):
        ai = np.flatnonzero(active)
        if ai.size == 0:
            break
        sub = cfg[ai]
        a_full = np.concatenate([sub, np.zeros((ai.size, 1))], axis=1)
        with np.errstate(all="ignore"):
            g = geometry._gradient_full_raw(r, a_full)[:, :-1]
        step = _newton_steps(r, sub, g)

        lam = np.ones((ai.size, 1))
        trial = np.mod(sub + step, TWO_PI)
        tgn = _grad_norms(r, trial)
        cur = gn[ai]
        for _ in range(10):
            worse = tgn > cur
            if not worse.any():
                break
            lam[worse] *= 0.5
            trial[worse] = np.mod(sub[worse] + lam[worse] * step[worse], TWO_PI)
            tgn[worse] = _grad_norms(r, trial[worse])
        stalled = tgn > cur

        cfg[ai] = np.where(stalled[:, None], sub, trial)
        gn[ai] = np.where(stalled, cur, tgn)
        iters[ai] += 1
        done = gn[ai] <= tol
        active[ai[stalled | done]] = False
        converged[ai[done]] = True

    return cfg, converged, iters


# ---------------------------------------------------------------------------
# classification of a converged configuration


def _classify(radii, config, settings: SolverSettings, iterations: int = 0) -> CriticalPoint:
    r = np.asarray(radii, dtype=float)
    cfg = geometry.reduce_angles(config)
    H = geometry.hessian(r, cfg)
    index, degenerate = morse_index(H, settings.degeneracy_threshold, scale=r.max())
    shape = geometry.shape_of_config(r, cfg)
    tangential = 0.0 if shape is ShapeClass.PARADE else float(
        np.mean(geometry.tangential_distances(r, cfg))
    )
    return CriticalPoint(
        config=cfg,
        perimeter=float(geometry.perimeter(r, cfg)),
        gradient_norm=float(np.linalg.norm(geometry.gradient(r, cfg))),
        morse_index=index,
        degenerate=degenerate,
        shape=shape,
        tangential_radius=tangential,
        vertex_events=geometry.classify_vertices(r, cfg),
        hessian_det=float(np.linalg.det(H)),
        newton_iterations=iterations,
    )


def newton_refine(radii, start, settings: SolverSettings | None = None) -> CriticalPoint:
    """Refine one starting configuration to a fully classified critical point.

    Raises NoConvergenceError if the damped iteration does not reach
    ``newton_tol * (1 + max r)`` within ``max_iter`` steps.
    """
    settings = settings or SolverSettings()
    r = check_radii(radii)
    cfg0 = check_config(start, r.size)
    cfgs, conv, iters = _newton_polish_batch(r, cfg0[None, :], settings)
    if not conv[0]:
        raise NoConvergenceError(
            f"no convergence from {np.array2string(cfg0, precision=6)} "
            f"after {int(iters[0])} iterations"
        )
    return _classify(r, cfgs[0], settings, iterations=int(iters[0]))


# ---------------------------------------------------------------------------
# seeding


def _grid_chunks(n: int, density: int):
    """Yield uniform-grid configurations in chunks of at most _CHUNK rows."""
    m = n - 1
    total = density**m
    step = TWO_PI / density
    for lo in range(0, total, _CHUNK):
        idx = np.arange(lo, min(lo + _CHUNK, total))
        coords = np.empty((idx.size, m))
        rem = idx
        for k in range(m - 1, -1, -1):
            coords[:, k] = (rem % density) * step
            rem = rem // density
        yield coords


def _closed_form_seeds(radii) -> np.ndarray:
    """Parades, Snellius sign-pattern roots, and partially aligned insertions."""
    r = np.asarray(radii, dtype=float)
    n = r.size
    seeds = [closedform.parade_config(s) for s in closedform.parade_sign_patterns(n)]
    for eps in itertools.product((1, -1), repeat=n):
        if all(e < 0 for e in eps):
            continue
        try:
            roots = closedform.socle_roots(r, eps)
        except ValueError:
            continue
        for sigma in roots:
            for orientation in (1, -1):
                try:
                    seeds.append(closedform.snellius_from_socle(r, sigma, eps, orientation))
                except (ValueError, closedform.InconsistentSocleError):
                    continue
    if n == 4:
        for skip in range(1, 5):
            try:
                seeds.extend(closedform.partially_aligned_circuits(r, skip).solutions)
            except (ValueError, ArithmeticError):
                continue
    return np.array(seeds)


def _dedupe(configs, perims, dedupe_radius, perim_tol=1e-8):
    """Greedy torus-metric deduplication; keeps first hit in perimeter order."""
    order = np.argsort(perims, kind="stable")
    reps: list[np.ndarray] = []
    rep_perims: list[float] = []
    for i in order:
        c = configs[i]
        duplicate = False
        if reps:
            d = np.abs(np.asarray(reps) - c)
            d = np.minimum(d, TWO_PI - d)
            close = d.max(axis=1) < dedupe_radius
            close &= np.abs(np.asarray(rep_perims) - perims[i]) < perim_tol * (1.0 + perims[i])
            duplicate = bool(close.any())
        if not duplicate:
            reps.append(c)
            rep_perims.append(perims[i])
    return np.array(reps), np.array(rep_perims)


def _sorted_points(points: list[CriticalPoint]) -> list[CriticalPoint]:
    return sorted(points, key=lambda p: (p.perimeter, tuple(p.config)))


def _pair_mirrors(points: list[CriticalPoint], tol: float) -> tuple[list[tuple[int, int]], list[str]]:
    pairs = []
    warnings = []
    for i, pt in enumerate(points):
        if pt.shape is ShapeClass.PARADE:
            continue
        if pt.mirror_of is not None:
            continue
        target = geometry.mirror_config(pt.config)
        partner = None
        for j, other in enumerate(points):
            if j == i:
                continue
            if geometry.torus_distance(other.config, target) < tol:
                partner = j
                break
        if partner is None:
            warnings.append(
                f"no mirror partner found for critical point with perimeter {pt.perimeter:.12g}"
            )
            continue
        pt.mirror_of = partner
        points[partner].mirror_of = i
        pairs.append((min(i, partner), max(i, partner)))
    return sorted(set(pairs)), warnings


def _assemble_catalogue(radii, configs, settings, extra_warnings=()) -> CriticalCatalogue:
    r = np.asarray(radii, dtype=float)
    points = []
    for cfg in configs:
        try:
            points.append(_classify(r, cfg, settings))
        except SingularConfigurationError:
            continue
    points = _sorted_points(points)
    pairs, pair_warnings = _pair_mirrors(points, max(settings.dedupe_radius, 1e-7))
    counts = Counter(p.morse_index for p in points if not p.degenerate)
    euler = int(sum((-1) ** p.morse_index for p in points if not p.degenerate))
    warnings = list(extra_warnings) + pair_warnings
    if not is_generic(r):
        warnings.insert(0, "non-generic radii: some radii coincide; no completeness claim")
    notes = []
    if points:
        longest = max(points, key=lambda p: p.perimeter)
        notes.append(f"global maximum attained by a {longest.shape.value} circuit")
    return CriticalCatalogue(
        radii=r,
        points=points,
        mirror_pairs=pairs,
        morse_counts=dict(sorted(counts.items())),
        euler_sum=euler,
        warnings=warnings,
        notes=notes,
    )


def find_all(radii, settings: SolverSettings | None = None) -> CriticalCatalogue:
    """Catalogue of all critical points of the perimeter on the reduced torus.

    Seeds every closed-form circuit plus a uniform grid, refines in batches,
    deduplicates, classifies, and pairs mirror twins.  The catalogue is
    sorted by perimeter.
    """
    settings = settings or SolverSettings()
    r = check_radii(radii)

    found_cfgs = []
    found_perims = []

    def _absorb(starts):
        if len(starts) == 0:
            return
        cfgs, conv, _ = _newton_polish_batch(r, starts, settings)
        if conv.any():
            good = cfgs[conv]
            found_cfgs.append(good)
            found_perims.append(geometry.perimeter(r, good))

    _absorb(_closed_form_seeds(r))
    for chunk in _grid_chunks(r.size, settings.grid_density):
        _absorb(chunk)

    if found_cfgs:
        all_cfgs = np.concatenate(found_cfgs, axis=0)
        all_perims = np.concatenate(found_perims, axis=0)
        uniq, _ = _dedupe(all_cfgs, all_perims, settings.dedupe_radius)
    else:
        uniq = np.empty((0, r.size - 1))
    return _assemble_catalogue(r, uniq, settings)


def brute_force_oracle(radii, density: int, settings: SolverSettings | None = None) -> CriticalCatalogue:
    """Independent completeness oracle: grid scan for local minima of |grad L|^2.

    Scans the full (density)^(n-1) grid, takes every local minimum of the
    squared gradient norm as a candidate, polishes by Newton, and assembles
    the same catalogue structure as find_all.  Only candidate generation is
    shared with nothing: the scan never consults the closed forms.  Refuses
    n > 4 on cost grounds.
    """
    settings = settings or SolverSettings()
    r = check_radii(radii)
    n = r.size
    if n > 4:
        raise ValueError(f"brute-force oracle is limited to n <= 4, got n={n}")
    m = n - 1

    values = np.concatenate([_grad_norms(r, chunk) for chunk in _grid_chunks(n, density)])
    G = values.reshape((density,) * m)
    # axis-neighbour local minima: deliberately weak, so narrow basins whose
    # discrete ridge is thinner than one cell still produce a seed
    is_min = np.ones_like(G, dtype=bool)
    for axis in range(m):
        is_min &= G <= np.roll(G, 1, axis=axis)
        is_min &= G <= np.roll(G, -1, axis=axis)
    flat_idx = np.flatnonzero(is_min.ravel())

    step = TWO_PI / density
    seeds = np.empty((flat_idx.size, m))
    rem = flat_idx
    for k in range(m - 1, -1, -1):
        seeds[:, k] = (rem % density) * step
        rem = rem // density

    cfgs, conv, _ = _newton_polish_batch(r, seeds, settings)
    warnings = []
    n_fail = int((~conv).sum())
    if n_fail:
        warnings.append(f"{n_fail} grid minima did not polish to critical points")
    good = cfgs[conv]
    if good.size:
        uniq, _ = _dedupe(good, geometry.perimeter(r, good), settings.dedupe_radius)
    else:
        uniq = np.empty((0, m))
    return _assemble_catalogue(r, uniq, settings, extra_warnings=warnings)


def catalogues_match(a: CriticalCatalogue, b: CriticalCatalogue, tol: float = 1e-6) -> bool:
    """True when two catalogues contain the same points within a torus tolerance."""
    if len(a) != len(b):
        return False
    used = set()
    for p in a.points:
        hit = None
        for j, q in enumerate(b.points):
            if j in used:
                continue
            if geometry.torus_distance(p.config, q.config) < tol:
                hit = j
                break
        if hit is None:
            return False
        used.add(hit)
    return True


# ---------------------------------------------------------------------------
# estimator front end


class CriticalPointFinder(BaseEstimator):
    """Estimator-style front end for the critical-point catalogue.

    Configure the solver once, then ``fit`` on a radius vector; the fitted
    catalogue is exposed through the ``catalogue_``, ``points_`` and
    ``euler_sum_`` attributes.
    """

    def __init__(self, grid_density=48, newton_tol=1e-12, max_iter=100,
                 dedupe_radius=1e-6, degeneracy_threshold=1e-8):
        self.grid_density = grid_density
        self.newton_tol = newton_tol
        self.max_iter = max_iter
        self.dedupe_radius = dedupe_radius
        self.degeneracy_threshold = degeneracy_threshold

    def _settings(self) -> SolverSettings:
        return SolverSettings(
            grid_density=self.grid_density,
            newton_tol=self.newton_tol,
            max_iter=self.max_iter,
            dedupe_radius=self.dedupe_radius,
            degeneracy_threshold=self.degeneracy_threshold,
        )

    def fit(self, radii, y=None):
        radii = check_radii(radii)
        self.radii_ = radii
        self.catalogue_ = find_all(radii, self._settings())
        self.points_ = self.catalogue_.points
        self.euler_sum_ = self.catalogue_.euler_sum
        return self
