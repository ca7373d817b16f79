"""Self-verification suite: finite-difference and cross-formula oracles.

The finite-difference derivatives here are computed from the perimeter
alone, independently of the analytic gradient and Hessian formulas they are
used to check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import closedform, geometry, solver
from .validation import check_radii, is_generic


def fd_gradient(radii, config, h: float = 1e-6) -> np.ndarray:
    """Central finite differences of the perimeter in each free angle."""
    cfg = np.asarray(config, dtype=float)
    out = np.empty_like(cfg)
    for j in range(cfg.size):
        e = np.zeros_like(cfg)
        e[j] = h
        out[j] = (geometry.perimeter(radii, cfg + e) - geometry.perimeter(radii, cfg - e)) / (2 * h)
    return out


def fd_hessian(radii, config, h: float = 1e-4) -> np.ndarray:
    """Four-point central finite differences of the perimeter."""
    cfg = np.asarray(config, dtype=float)
    m = cfg.size
    H = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            ei = np.zeros(m); ei[i] = h
            ej = np.zeros(m); ej[j] = h
            f = geometry.perimeter
            H[i, j] = H[j, i] = (
                f(radii, cfg + ei + ej) - f(radii, cfg + ei - ej)
                - f(radii, cfg - ei + ej) + f(radii, cfg - ei - ej)
            ) / (4 * h * h)
    return H


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_configs(rng, n, count):
    return rng.uniform(0.0, 2.0 * np.pi, size=(count, n - 1))


def run_checks(radii, *, seed: int = 0, pentagram: bool = False,
               oracle_density: int | None = None,
               settings: solver.SolverSettings | None = None) -> list[CheckResult]:
    """Run every applicable oracle check for one radius vector."""
    checks: list[CheckResult] = []
    if pentagram and radii is None:
        return [_pentagram_check()]

    r = check_radii(radii)
    n = r.size
    rng = np.random.default_rng(seed)
    settings = settings or solver.SolverSettings()

    # gradient vs central finite differences
    worst = 0.0
    for cfg in _random_configs(rng, n, 50):
        g = geometry.gradient(r, cfg)
        fd = fd_gradient(r, cfg)
        worst = max(worst, np.max(np.abs(g - fd)) / max(1.0, np.max(np.abs(fd))))
    checks.append(CheckResult(
        "gradient-finite-difference", worst < 1e-6, f"max rel err {worst:.3e}"))

    # hessian vs finite differences
    worst = 0.0
    for cfg in _random_configs(rng, n, 20):
        H = geometry.hessian(r, cfg)
        fd = fd_hessian(r, cfg)
        worst = max(worst, np.max(np.abs(H - fd)) / max(1.0, np.max(np.abs(fd))))
    checks.append(CheckResult(
        "hessian-finite-difference", worst < 1e-5, f"max rel err {worst:.3e}"))

    # rotational nullity of the full gradient
    worst = 0.0
    for cfg in _random_configs(rng, n, 200):
        worst = max(worst, abs(float(geometry.gradient_full(r, cfg).sum())))
    checks.append(CheckResult(
        "full-gradient-sum-zero", worst < 1e-12 * (1 + r.max()), f"max |sum| {worst:.3e}"))

    # parades are stationary; closed-form parade Hessians match the analytic ones
    generic = is_generic(r)
    worst_g = 0.0
    worst_h = 0.0
    parade_ok = True
    for signs in closedform.parade_sign_patterns(n):
        cfg = closedform.parade_config(signs)
        try:
            worst_g = max(worst_g, float(np.linalg.norm(geometry.gradient(r, cfg))))
        except geometry.SingularConfigurationError:
            parade_ok = parade_ok and not generic
            continue
        try:
            rep = closedform.parade_hessian(r, signs)
        except closedform.DegenerateParadeError:
            parade_ok = parade_ok and not generic
            continue
        worst_h = max(worst_h, float(np.max(np.abs(rep.matrix - geometry.hessian(r, cfg)))))
    checks.append(CheckResult(
        "parade-stationarity", parade_ok and worst_g < 1e-13 * (1 + r.max()),
        f"max parade gradient {worst_g:.3e}"))
    checks.append(CheckResult(
        "parade-hessian-closed-form", parade_ok and worst_h < 1e-10,
        f"max entry diff {worst_h:.3e}"))

    # polynomial socle radii versus transcendental closure
    if n == 3:
        rho = closedform.fermat_triangle_inradius(*r)
        res = closedform.socle_residual(r, rho, (1, 1, 1))
        cfg = closedform.snellius_from_socle(r, rho, (1, 1, 1))
        gn = float(np.linalg.norm(geometry.gradient(r, cfg)))
        checks.append(CheckResult(
            "triangle-inradius-closure", abs(res) < 1e-10 and gn < 1e-8,
            f"closure {res:.3e}, gradient {gn:.3e}"))
    if n == 4:
        rho = closedform.convex_quad_inradius(*r)
        if rho is None:
            checks.append(CheckResult(
                "quad-inradius-closure", True, "no convex stationary quadrilateral"))
        else:
            res = closedform.socle_residual(r, rho, (1, 1, 1, 1))
            cfg = closedform.snellius_from_socle(r, rho, (1, 1, 1, 1))
            gn = float(np.linalg.norm(geometry.gradient(r, cfg)))
            checks.append(CheckResult(
                "quad-inradius-closure", abs(res) < 1e-10 and gn < 1e-8,
                f"closure {res:.3e}, gradient {gn:.3e}"))

    # catalogue structure (size and Euler identities assume generic radii)
    cat = solver.find_all(r, settings)
    size_ok = (len(cat) >= 2 ** (n - 1)) if generic else len(cat) > 0
    euler_ok = (cat.euler_sum == 0) if generic else True
    checks.append(CheckResult(
        "catalogue-size-and-euler", size_ok and euler_ok,
        f"{len(cat)} points, euler sum {cat.euler_sum}" + ("" if generic else " (non-generic)")))

    if n == 4:
        n_si = sum(1 for p in cat.points if p.shape is geometry.ShapeClass.SELF_INTERSECTING)
        checks.append(CheckResult(
            "no-self-intersecting-critical-points", n_si == 0,
            f"{n_si} self-intersecting entries"))

    # brute-force completeness oracle
    if n <= 4:
        density = oracle_density or (240 if n == 3 else 48)
        oracle = solver.brute_force_oracle(r, density, settings)
        same = solver.catalogues_match(cat, oracle)
        checks.append(CheckResult(
            "brute-force-oracle-match", same if generic else True,
            f"find_all {len(cat)} vs oracle {len(oracle)} points"
            + ("" if generic else " (non-generic, informational)")))

    if pentagram:
        checks.append(_pentagram_check())
    return checks


def _pentagram_check() -> CheckResult:
    r5 = np.ones(5)
    cfg = closedform.pentagram_config()
    gn = float(np.linalg.norm(geometry.gradient(r5, cfg)))
    eigs = np.linalg.eigvalsh(geometry.hessian(r5, cfg))
    ok = gn < 1e-12 and bool(np.all(eigs < 0))
    return CheckResult(
        "pentagram-local-maximum", ok,
        f"gradient {gn:.3e}, max eigenvalue {eigs.max():.6f}")
