"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys

import numpy as np

from . import closedform, continuation, geometry, serialize, solver
from .validation import check_radii, is_generic


def _parse_radii(text: str) -> np.ndarray:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValueError(f"could not parse radii {text!r}: {exc}") from None
    return check_radii(values)


def _radii_from(args) -> np.ndarray | None:
    if args.radii and args.radius_list:
        raise ValueError("give either --radii or repeated --radius flags, not both")
    if args.radii:
        return _parse_radii(args.radii)
    if args.radius_list:
        return check_radii(args.radius_list)
    return None


def _parse_angles(text: str, n: int) -> np.ndarray:
    values = [float(tok) for tok in text.split(",") if tok.strip()]
    if len(values) == n:  # full angle list: require pinned last vertex
        if values[-1] != 0.0:
            raise ValueError("the last vertex is pinned at angle 0")
        values = values[:-1]
    if len(values) != n - 1:
        raise ValueError(f"expected {n - 1} angles for n={n}, got {len(values)}")
    return geometry.reduce_angles(values)


def _emit(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _settings_from(args) -> solver.SolverSettings:
    return solver.SolverSettings(
        grid_density=args.grid,
        newton_tol=args.tol,
    )


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--radii", default=None,
                   help="comma-separated circle radii in circuit order")
    p.add_argument("--radius", dest="radius_list", action="append", type=float,
                   default=None, help="one radius (repeatable alternative to --radii)")
    p.add_argument("--grid", type=int, default=48, help="multistart grid density per angle")
    p.add_argument("--tol", type=float, default=1e-12, help="Newton stationarity tolerance")
    p.add_argument("--json", dest="json_path", default=None, help="write JSON output here")


def cmd_critical(args) -> int:
    radii = _radii_from(args)
    if radii is None:
        raise ValueError("radii are required (--radii or --radius)")
    cat = solver.find_all(radii, _settings_from(args))
    _emit(serialize.catalogue_to_dict(cat), args.json_path)
    return 0


def cmd_parades(args) -> int:
    radii = _radii_from(args)
    if radii is None:
        raise ValueError("radii are required (--radii or --radius)")
    rows = []
    for signs in closedform.parade_sign_patterns(radii.size):
        entry = {
            "signs": list(signs),
            "angles": [float(a) for a in closedform.parade_config(signs)],
            "perimeter": closedform.parade_perimeter(radii, signs),
        }
        try:
            rep = closedform.parade_hessian(radii, signs)
            entry.update({
                "b_values": [float(b) for b in rep.b_values],
                "determinant": rep.determinant,
                "index": rep.morse_index,
                "degenerate": rep.degenerate,
                "s_value": rep.s_value,
                "epsilons": list(rep.epsilons) if rep.epsilons is not None else None,
            })
        except closedform.DegenerateParadeError as exc:
            entry["error"] = str(exc)
        rows.append(entry)
    _emit({"radii": [float(r) for r in radii], "parades": rows}, args.json_path)
    return 0


def cmd_closed_form(args) -> int:
    radii = _radii_from(args)
    if radii is None:
        raise ValueError("radii are required (--radii or --radius)")
    n = radii.size
    out: dict = {"radii": [float(r) for r in radii]}
    if n == 3:
        out["triangle_inradius"] = closedform.fermat_triangle_inradius(*radii)
        values, warnings = closedform.three_cc_catalogue(radii)
        out["critical_values"] = [
            {"value": v.value, "index": v.morse_index, "label": v.label} for v in values
        ]
        if warnings:
            out["warnings"] = warnings
    if n == 4:
        rho = closedform.convex_quad_inradius(*radii)
        out["quad_inradius"] = rho
        out["quad_exists"] = rho is not None
        aligned = {}
        for skip in range(1, 5):
            res = closedform.partially_aligned_circuits(radii, skip)
            aligned[str(skip)] = {
                "count": res.crossings,
                "tangent": res.tangent,
                "triangle_socle": res.triangle_socle,
            }
        out["partially_aligned"] = aligned
    roots = []
    for eps in itertools.product((1, -1), repeat=n):
        if all(e < 0 for e in eps):
            continue
        for sigma in closedform.socle_roots(radii, eps):
            roots.append({
                "signs": list(eps),
                "sigma": sigma,
                "perimeter": closedform.snellius_perimeter(radii, sigma, eps),
            })
    out["socle_roots"] = roots
    _emit(out, args.json_path)
    return 0




def cmd_sweep(args) -> int:
    radii = _radii_from(args)
    if radii is None:
        raise ValueError("radii are required (--radii or --radius)")
    plan = continuation.SweepPlan(
        radii=radii,
        vary_index=args.vary,
        start=args.start if args.start is not None else float(radii[args.vary - 1]),
        stop=args.stop,
        steps=args.steps,
    )
    result = continuation.sweep(plan, _settings_from(args))
    csv_text = serialize.sweep_to_csv(result)
    if args.csv_path:
        with open(args.csv_path, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    events = serialize.events_to_dict(result)
    if args.json_path:
        _emit(events, args.json_path)
    elif args.csv_path:
        _emit(events, None)
    else:
        sys.stderr.write("note: pass --json PATH to capture the events record\n")
    return 0


def cmd_verify(args) -> int:
    from . import verify as verify_mod

    radii = _radii_from(args)
    if radii is None and not args.pentagram:
        raise ValueError("verify needs --radii and/or --pentagram")
    checks = verify_mod.run_checks(radii, pentagram=args.pentagram) if radii is not None \
        else [verify_mod._pentagram_check()]
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status}  {c.name}: {c.detail}")
    payload = {
        "radii": [float(r) for r in radii] if radii is not None else None,
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
        "all_passed": all(c.passed for c in checks),
    }
    if args.json_path:
        _emit(payload, args.json_path)
    return 0 if payload["all_passed"] else 1


def cmd_check_config(args) -> int:
    radii = _radii_from(args)
    if radii is None:
        raise ValueError("radii are required (--radii or --radius)")
    cfg = _parse_angles(args.angles, radii.size)
    events = geometry.classify_vertices(radii, cfg)
    dists = geometry.tangential_distances(radii, cfg)
    gn = float(np.linalg.norm(geometry.gradient(radii, cfg)))
    payload = {
        "radii": [float(r) for r in radii],
        "angles": [float(a) for a in cfg],
        "perimeter": float(geometry.perimeter(radii, cfg)),
        "gradient_norm": gn,
        "stationary": gn < 1e-10 * (1 + float(radii.max())),
        "vertex_events": [
            {"kind": ev.kind.value, "residual": ev.residual} for ev in events
        ],
        "tangential_distances": [float(d) for d in dists],
        "tangential_spread": float(np.max(dists) - np.min(dists)),
        "shape": geometry.shape_of_config(radii, cfg).value,
        "generic_radii": is_generic(radii),
    }
    _emit(payload, args.json_path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="concyc",
        description="Stationary connecting cycles for concentric circles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("critical", help="catalogue all critical points")
    _add_common(p)
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("parades", help="closed-form parade report")
    _add_common(p)
    p.set_defaults(func=cmd_parades)

    p = sub.add_parser("closed-form", help="inradius cubics, socle roots, aligned circuits")
    _add_common(p)
    p.set_defaults(func=cmd_closed_form)

    p = sub.add_parser("sweep", help="track branches while one radius varies")
    _add_common(p)
    p.add_argument("--vary", type=int, required=True, help="1-based index of the swept radius")
    p.add_argument("--from", dest="start", type=float, default=None,
                   help="start value (default: the current radius)")
    p.add_argument("--to", dest="stop", type=float, required=True, help="end value")
    p.add_argument("--steps", type=int, default=200, help="number of sweep steps")
    p.add_argument("--csv", dest="csv_path", default=None, help="write branch samples here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the self-verification oracle suite")
    _add_common(p)
    p.add_argument("--pentagram", action="store_true",
                   help="check the five-circle pentagram stationarity")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check-config", help="report stationarity data for given angles")
    _add_common(p)
    p.add_argument("--angles", required=True,
                   help="comma-separated free angles (radians)")
    p.set_defaults(func=cmd_check_config)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
