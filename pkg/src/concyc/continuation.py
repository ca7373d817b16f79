"""Branch tracking under radius variation, with bifurcation-event detection.

One radius is swept over an interval.  Every critical point at the start
parameter opens a branch; branches are continued by natural-parameter
predictor-corrector steps (previous point as predictor, damped Newton as
corrector) with adaptive sub-stepping.  Three scalar indicators are watched
for sign changes along each branch and localised by bisection:

* the determinant of the reduced Hessian (fold / pitchfork / index change),
* the signed turn at each vertex (tangency: a vertex passing through
  alignment, which is where convex circuits turn into spears),
* coincidence with another branch (merge, i.e. branch death).

Parades exist for every parameter value, so a Hessian-determinant zero on a
parade branch that absorbs dying side branches is a pitchfork.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from . import closedform, geometry, solver
from .geometry import ShapeClass
from .solver import CriticalPoint, SolverSettings
from .validation import check_radii

EVENT_PARAM_TOL = 1e-5


class EventKind(str, enum.Enum):
    FOLD = "fold"
    PITCHFORK = "pitchfork"
    TANGENCY = "tangency"
    INDEX_CHANGE = "index-change"


@dataclass
class SweepPlan:
    """A one-parameter family: vary ``radii[vary_index - 1]`` from start to stop."""

    radii: np.ndarray
    vary_index: int          # 1-based circle index
    start: float
    stop: float
    steps: int = 200
    min_step_fraction: float = 1.0 / 64.0  # sub-stepping floor, as a fraction of one step

    def __post_init__(self):
        self.radii = check_radii(self.radii)
        if not 1 <= self.vary_index <= self.radii.size:
            raise ValueError(f"vary index must be in 1..{self.radii.size}")
        if self.start <= 0 or self.stop <= 0:
            raise ValueError("swept radius must stay positive")
        if self.steps < 1:
            raise ValueError("need at least one step")

    def radii_at(self, value: float) -> np.ndarray:
        r = self.radii.copy()
        r[self.vary_index - 1] = value
        return r


@dataclass
class BranchSample:
    param: float
    point: CriticalPoint


@dataclass
class SweepBranch:
    branch_id: int
    samples: list[BranchSample]
    born_at: float
    died_at: float | None = None
    death_reason: str | None = None

    @property
    def alive(self) -> bool:
        return self.died_at is None

    def last(self) -> BranchSample:
        return self.samples[-1]

    def is_parade(self) -> bool:
        return self.samples[0].point.shape is ShapeClass.PARADE

    def alignment_gap(self) -> list[tuple[float, float]]:
        """Descriptive "mouth" metric: largest vertex distance from the diameter."""
        out = []
        for s in self.samples:
            gap = float(np.max(np.abs(np.sin(s.point.config))))
            out.append((s.param, gap))
        return out


@dataclass
class SweepEvent:
    kind: EventKind
    param: float
    branches: list[int]
    hessian_min_eig: float
    detail: str = ""


@dataclass
class SweepResult:
    plan: SweepPlan
    branches: list[SweepBranch]
    events: list[SweepEvent]


# ---------------------------------------------------------------------------
# correction helpers


def _correct(plan: SweepPlan, param: float, config, settings: SolverSettings) -> CriticalPoint | None:
    try:
        return solver.newton_refine(plan.radii_at(param), config, settings)
    except (solver.NoConvergenceError, geometry.SingularConfigurationError, ValueError):
        return None


def _advance(plan, branch: SweepBranch, p_from: float, p_to: float,
             settings, min_step: float, max_jump: float):
    """March one branch from p_from to p_to with adaptive sub-stepping.

    Returns (point, None) on success or (None, death_bracket) when the
    corrector fails even at the sub-step floor.
    """
    q0 = p_from
    cfg = branch.last().point.config
    while True:
        q1 = p_to
        while True:
            pt = _correct(plan, q1, cfg, settings)
            ok = pt is not None and geometry.torus_distance(pt.config, cfg) <= max_jump
            if ok:
                break
            if abs(q1 - q0) <= min_step:
                return None, (q0, q1)
            q1 = 0.5 * (q0 + q1)
        q0, cfg = q1, pt.config
        if q0 == p_to:
            return pt, None


def _bisect_param(plan, lo_param, hi_param, lo_cfg, f_lo, indicator, settings,
                  tol=EVENT_PARAM_TOL, max_iter=60):
    """Bisect a sign change of ``indicator(param, point)`` along a branch segment."""
    cfg = lo_cfg
    lo, hi = lo_param, hi_param
    for _ in range(max_iter):
        if abs(hi - lo) < tol:
            break
        mid = 0.5 * (lo + hi)
        pt = _correct(plan, mid, cfg, settings)
        if pt is None:
            break
        val = indicator(mid, pt)
        if abs(val) < 1e-12:
            lo = hi = mid
            break
        if val * f_lo < 0:
            hi = mid
        else:
            lo, f_lo, cfg = mid, val, pt.config
    return 0.5 * (lo + hi)


def _parade_det_zero(plan, signs, lo, hi) -> float | None:
    """Exact bisection of det(parade Hessian) = 0 in the swept parameter."""

    def det_at(v):
        try:
            return closedform.parade_hessian(plan.radii_at(v), signs).determinant
        except closedform.DegenerateParadeError:
            return np.nan

    d_lo, d_hi = det_at(lo), det_at(hi)
    if not (np.isfinite(d_lo) and np.isfinite(d_hi)) or d_lo * d_hi > 0:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        d_mid = det_at(mid)
        if not np.isfinite(d_mid):
            return None
        if d_mid == 0.0 or abs(hi - lo) < 1e-12 * max(1.0, abs(mid)):
            return mid
        if d_mid * d_lo < 0:
            hi = mid
        else:
            lo, d_lo = mid, d_mid
    return 0.5 * (lo + hi)


def _parade_signs_of(config) -> tuple[int, ...]:
    return tuple(1 if min(a, 2 * np.pi - a) < np.pi / 2 else -1 for a in config)


# ---------------------------------------------------------------------------
# the sweep itself


def sweep(plan: SweepPlan, settings: SolverSettings | None = None, *,
          checkpoint_every: int | None = None, checkpoint_grid: int = 12,
          max_jump: float = 0.5) -> SweepResult:
    """Track every critical-point branch across the plan's parameter range."""
    settings = settings or SolverSettings()
    params = np.linspace(plan.start, plan.stop, plan.steps + 1)
    macro_step = abs(params[1] - params[0]) if plan.steps else 0.0
    min_step = max(macro_step * plan.min_step_fraction, 1e-12)
    if checkpoint_every is None:
        checkpoint_every = max(1, plan.steps // 10)
    checkpoint_settings = SolverSettings(
        grid_density=checkpoint_grid,
        newton_tol=settings.newton_tol,
        max_iter=settings.max_iter,
        dedupe_radius=settings.dedupe_radius,
        degeneracy_threshold=settings.degeneracy_threshold,
    )

    start_cat = solver.find_all(plan.radii_at(params[0]), settings)
    branches = [
        SweepBranch(branch_id=i, samples=[BranchSample(float(params[0]), pt)],
                    born_at=float(params[0]))
        for i, pt in enumerate(start_cat.points)
    ]
    events: list[SweepEvent] = []
    deaths: list[tuple[SweepBranch, float]] = []

    merge_radius = max(10.0 * settings.dedupe_radius, 1e-5)

    for step_no, (p_prev, p) in enumerate(zip(params[:-1], params[1:]), start=1):
        arrived: dict[int, CriticalPoint] = {}
        for br in branches:
            if not br.alive:
                continue
            pt, bracket = _advance(plan, br, float(p_prev), float(p), settings,
                                   min_step, max_jump)
            if pt is None:
                br.died_at = float(np.mean(bracket))
                br.death_reason = "corrector diverged"
                deaths.append((br, br.died_at))
            else:
                arrived[br.branch_id] = pt

        # merge detection: two branches landing on the same point
        ids = sorted(arrived)
        for i, bid in enumerate(ids):
            for other in ids[i + 1:]:
                if bid not in arrived or other not in arrived:
                    continue
                if geometry.torus_distance(arrived[bid].config,
                                           arrived[other].config) < merge_radius:
                    b1 = branches[bid]
                    b2 = branches[other]
                    m1 = geometry.torus_distance(arrived[bid].config, b1.last().point.config)
                    m2 = geometry.torus_distance(arrived[other].config, b2.last().point.config)
                    loser, winner = (b2, b1) if m2 >= m1 else (b1, b2)
                    death_param = _locate_merge(plan, loser, winner, float(p_prev),
                                                float(p), settings, merge_radius)
                    loser.died_at = death_param
                    loser.death_reason = f"merged with branch {winner.branch_id}"
                    deaths.append((loser, death_param))
                    arrived.pop(loser.branch_id, None)

        for bid, pt in arrived.items():
            branches[bid].samples.append(BranchSample(float(p), pt))

        if step_no % checkpoint_every == 0 or step_no == plan.steps:
            cat = solver.find_all(plan.radii_at(float(p)), checkpoint_settings)
            for pt in cat.points:
                known = any(
                    br.alive and geometry.torus_distance(br.last().point.config, pt.config)
                    < merge_radius
                    for br in branches
                    if br.last().param == float(p)
                )
                if not known:
                    branches.append(SweepBranch(
                        branch_id=len(branches),
                        samples=[BranchSample(float(p), pt)],
                        born_at=float(p),
                    ))

    events.extend(_detect_indicator_events(plan, branches, settings, macro_step))
    _reconcile_deaths(events, deaths, macro_step)
    events.sort(key=lambda e: (e.param, e.kind.value))
    return SweepResult(plan=plan, branches=branches, events=events)


def _locate_merge(plan, loser: SweepBranch, winner: SweepBranch, p_lo, p_hi,
                  settings, merge_radius) -> float:
    """Bisect the parameter at which the losing branch collapses onto the winner."""
    loser_cfg = loser.last().point.config
    winner_cfg = winner.last().point.config

    def distinct(q) -> bool:
        lp = _correct(plan, q, loser_cfg, settings)
        if lp is None:
            return False
        wp = _correct(plan, q, winner_cfg, settings)
        if wp is None:
            return True
        return geometry.torus_distance(lp.config, wp.config) > merge_radius

    lo, hi = p_lo, p_hi  # distinct at lo, merged/dead at hi
    for _ in range(40):
        if abs(hi - lo) < EVENT_PARAM_TOL:
            break
        mid = 0.5 * (lo + hi)
        if distinct(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _detect_indicator_events(plan, branches, settings, macro_step):
    events = []
    for br in branches:
        samples = br.samples
        if len(samples) < 2:
            continue
        parade = br.is_parade()
        turns = None
        if not parade:
            turns = [
                geometry.vertex_turns(plan.radii_at(s.param), s.point.config)
                for s in samples
            ]
        for k in range(len(samples) - 1):
            s0, s1 = samples[k], samples[k + 1]
            det0, det1 = s0.point.hessian_det, s1.point.hessian_det

            tangency_param = None
            if turns is not None:
                t0, t1 = turns[k], turns[k + 1]
                crossing = (t0 * t1 < 0) & (np.abs(t0) > 1e-11) & (np.abs(t1) > 1e-11)
                if crossing.any():
                    v = int(np.flatnonzero(crossing)[0])
                    tangency_param = _bisect_param(
                        plan, s0.param, s1.param, s0.point.config, float(t0[v]),
                        lambda q, pt, v=v: float(
                            geometry.vertex_turns(plan.radii_at(q), pt.config)[v]
                        ),
                        settings,
                    )
                    events.append(SweepEvent(
                        kind=EventKind.TANGENCY,
                        param=float(tangency_param),
                        branches=[br.branch_id],
                        hessian_min_eig=_min_eig(plan, tangency_param, s0.point.config, settings),
                        detail=f"vertex {v + 1} passes through alignment",
                    ))

            if det0 * det1 < 0:
                if parade:
                    signs = _parade_signs_of(s0.point.config)
                    param = _parade_det_zero(plan, signs, s0.param, s1.param)
                    if param is None:
                        param = 0.5 * (s0.param + s1.param)
                    events.append(SweepEvent(
                        kind=EventKind.PITCHFORK,
                        param=float(param),
                        branches=[br.branch_id],
                        hessian_min_eig=_min_eig(plan, param, s0.point.config, settings),
                        detail=(
                            f"parade {signs} degenerates; index "
                            f"{s0.point.morse_index} -> {s1.point.morse_index}"
                        ),
                    ))
                elif tangency_param is None:
                    param = _bisect_param(
                        plan, s0.param, s1.param, s0.point.config, det0,
                        lambda q, pt: pt.hessian_det, settings,
                    )
                    events.append(SweepEvent(
                        kind=EventKind.INDEX_CHANGE,
                        param=float(param),
                        branches=[br.branch_id],
                        hessian_min_eig=_min_eig(plan, param, s0.point.config, settings),
                        detail=(
                            f"index {s0.point.morse_index} -> {s1.point.morse_index}"
                        ),
                    ))
            elif s0.point.morse_index != s1.point.morse_index and tangency_param is None:
                events.append(SweepEvent(
                    kind=EventKind.INDEX_CHANGE,
                    param=float(0.5 * (s0.param + s1.param)),
                    branches=[br.branch_id],
                    hessian_min_eig=_min_eig(plan, 0.5 * (s0.param + s1.param),
                                             s0.point.config, settings),
                    detail=f"index {s0.point.morse_index} -> {s1.point.morse_index}",
                ))
    return _merge_events(events)


def _min_eig(plan, param, config, settings) -> float:
    pt = _correct(plan, float(param), config, settings)
    if pt is None:
        return float("nan")
    H = geometry.hessian(plan.radii_at(float(param)), pt.config)
    w = np.linalg.eigvalsh(H)
    return float(w[np.argmin(np.abs(w))])


def _merge_events(events: list[SweepEvent], tol: float = 5e-4) -> list[SweepEvent]:
    merged: list[SweepEvent] = []
    for ev in sorted(events, key=lambda e: e.param):
        hit = None
        for m in merged:
            if m.kind is ev.kind and abs(m.param - ev.param) < tol:
                hit = m
                break
        if hit is None:
            merged.append(ev)
        else:
            hit.branches = sorted(set(hit.branches) | set(ev.branches))
    return merged


def _reconcile_deaths(events, deaths, macro_step):
    """Attach dying branches to nearby events; orphan deaths become folds."""
    window = max(3.0 * macro_step, 1e-3)
    for br, param in deaths:
        attached = None
        for ev in events:
            if abs(ev.param - param) <= window:
                if attached is None or abs(ev.param - param) < abs(attached.param - param):
                    attached = ev
        if attached is not None:
            if br.branch_id not in attached.branches:
                attached.branches.append(br.branch_id)
                attached.branches.sort()
            br.died_at = attached.param
        else:
            events.append(SweepEvent(
                kind=EventKind.FOLD,
                param=float(param),
                branches=[br.branch_id],
                hessian_min_eig=float("nan"),
                detail="branch died without a matching indicator event",
            ))


# ---------------------------------------------------------------------------
# closed-form degeneracy locus for parade branches (n = 4)


@dataclass
class DegeneracyRoot:
    signs: tuple[int, ...]
    value: float


def parade_degeneracy_locus(radii, vary_index: int, lo: float, hi: float,
                            *, samples: int = 2048) -> list[DegeneracyRoot]:
    """Parameter values where a parade Hessian determinant vanishes (n = 4).

    Uses the exact factorisation det = C * S with S = sum eps_i / r_i and
    scans S for sign changes in the varying radius.  The epsilon pattern can
    switch when radius orderings change, so brackets spanning a switch are
    discarded unless the root still verifies.
    """
    r = check_radii(radii, n=4)
    if not 1 <= vary_index <= 4:
        raise ValueError("vary index must be in 1..4")
    if not (0 < lo < hi):
        raise ValueError("need 0 < lo < hi")
    k = vary_index - 1

    roots: list[DegeneracyRoot] = []
    grid = np.linspace(lo, hi, samples)
    for signs in closedform.parade_sign_patterns(4):

        def s_at(v):
            rr = r.copy()
            rr[k] = v
            try:
                return closedform.parade_hessian(rr, signs).s_value
            except closedform.DegenerateParadeError:
                return np.nan

        vals = np.array([s_at(v) for v in grid])
        for i in range(samples - 1):
            v0, v1 = vals[i], vals[i + 1]
            if not (np.isfinite(v0) and np.isfinite(v1)) or v0 * v1 >= 0:
                continue
            a, b = grid[i], grid[i + 1]
            fa = v0
            for _ in range(100):
                midv = 0.5 * (a + b)
                fm = s_at(midv)
                if not np.isfinite(fm):
                    break
                if fm == 0.0 or (b - a) < 1e-12 * max(1.0, midv):
                    break
                if fm * fa < 0:
                    b = midv
                else:
                    a, fa = midv, fm
            root = 0.5 * (a + b)
            s_root = s_at(root)
            if np.isfinite(s_root) and abs(s_root) < 1e-6:
                roots.append(DegeneracyRoot(signs=signs, value=float(root)))
    roots.sort(key=lambda d: d.value)
    return roots


# ---------------------------------------------------------------------------
# estimator front end


class RadiusSweep(BaseEstimator):
    """Estimator-style front end for a one-radius sweep.

    ``fit`` expects the radius vector at the start parameter; the swept
    radius runs from its current value (or ``start``) to ``stop``.
    """

    def __init__(self, vary_index=1, start=None, stop=1.0, steps=200,
                 grid_density=48, newton_tol=1e-12, max_iter=100,
                 dedupe_radius=1e-6, degeneracy_threshold=1e-8,
                 checkpoint_grid=12):
        self.vary_index = vary_index
        self.start = start
        self.stop = stop
        self.steps = steps
        self.grid_density = grid_density
        self.newton_tol = newton_tol
        self.max_iter = max_iter
        self.dedupe_radius = dedupe_radius
        self.degeneracy_threshold = degeneracy_threshold
        self.checkpoint_grid = checkpoint_grid

    def fit(self, radii, y=None):
        radii = check_radii(radii)
        start = self.start if self.start is not None else float(radii[self.vary_index - 1])
        plan = SweepPlan(radii=radii, vary_index=self.vary_index,
                         start=start, stop=self.stop, steps=self.steps)
        settings = SolverSettings(
            grid_density=self.grid_density,
            newton_tol=self.newton_tol,
            max_iter=self.max_iter,
            dedupe_radius=self.dedupe_radius,
            degeneracy_threshold=self.degeneracy_threshold,
        )
        result = sweep(plan, settings, checkpoint_grid=self.checkpoint_grid)
        self.plan_ = plan
        self.result_ = result
        self.branches_ = result.branches
        self.events_ = result.events
        return self
