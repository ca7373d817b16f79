"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import numpy as np

from concyc import (
    EventKind,
    ShapeClass,
    SolverSettings,
    SweepPlan,
    brute_force_oracle,
    catalogues_match,
    convex_quad_inradius,
    fermat_triangle_inradius,
    find_all,
    gradient,
    gradient_full,
    hessian,
    parade_config,
    parade_hessian,
    parade_sign_patterns,
    pentagram_config,
    snellius_from_socle,
    sweep,
    three_cc_catalogue,
)
from concyc.verify import fd_gradient, fd_hessian

from conftest import random_radii


def report(criterion: int, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    print(f"\n[criterion {criterion}] {status}: {detail}")
    assert passed, f"criterion {criterion}: {detail}"


def test_criterion_1_gradient_formula():
    # analytic gradient vs central finite differences (h = 1e-6), and the
    # rotational-nullity sum, on 1000 random configurations per n in 3..6
    rng = np.random.default_rng(1)
    worst_rel = 0.0
    worst_sum = 0.0
    for n in (3, 4, 5, 6):
        r = random_radii(rng, n)
        for _ in range(1000):
            cfg = rng.uniform(0, 2 * np.pi, n - 1)
            g = gradient(r, cfg)
            fd = fd_gradient(r, cfg, h=1e-6)
            worst_rel = max(worst_rel, float(
                np.max(np.abs(g - fd)) / np.max(np.abs(fd))))
            worst_sum = max(worst_sum, abs(float(gradient_full(r, cfg).sum())))
    report(1, worst_rel < 1e-6 and worst_sum < 1e-12,
           f"max FD relative error {worst_rel:.2e}, max gradient-sum {worst_sum:.2e}")


def test_criterion_2_three_circle_catalogues():
    rng = np.random.default_rng(2)
    for trial in range(50):
        r = random_radii(rng, 3)
        cat = find_all(r)
        indices = sorted(p.morse_index for p in cat.points)
        if len(cat) != 6 or indices != [0, 1, 1, 1, 2, 2]:
            report(2, False,
                   f"tuple {r}: {len(cat)} points with indices {indices}")
        s1, s2, s3 = np.sort(r)
        expected4 = [2 * (s3 - s1), 2 * (s1 + s3), 2 * (s2 + s3), 2 * (s2 + s3)]
        got = [p.perimeter for p in cat.points]
        if np.max(np.abs(np.array(got[:4]) - expected4)) > 1e-8:
            report(2, False, f"tuple {r}: low critical values {got[:4]}")
        values, _ = three_cc_catalogue(r)
        l_max = values[-1].value
        if abs(got[4] - l_max) > 1e-8 or abs(got[5] - l_max) > 1e-8:
            report(2, False, f"tuple {r}: maxima {got[4:]} vs closed form {l_max}")
    report(2, True, "50 random triples: exactly 6 points, indices {0,1,1,1,2,2}, "
                    "values match the closed forms within 1e-8")


def test_criterion_3_inradius_cross_oracles():
    ok_eq = (abs(fermat_triangle_inradius(1, 1, 1) - 0.5) < 1e-12
             and abs(convex_quad_inradius(1, 1, 1, 1) - np.sqrt(2) / 2) < 1e-12)
    if not ok_eq:
        report(3, False, "equal-radius special values off")
    rng = np.random.default_rng(3)
    checked3 = checked4 = 0
    worst_closure = 0.0
    worst_grad = 0.0
    for _ in range(100):
        r3 = random_radii(rng, 3)
        rho = fermat_triangle_inradius(*r3)
        worst_closure = max(worst_closure, abs(float(
            np.sum(np.arccos(rho / r3)) - np.pi)))
        cfg = snellius_from_socle(r3, rho, (1, 1, 1))
        worst_grad = max(worst_grad, float(np.linalg.norm(gradient(r3, cfg))))
        checked3 += 1

        r4 = random_radii(rng, 4)
        rho4 = convex_quad_inradius(*r4)
        if rho4 is not None:
            worst_closure = max(worst_closure, abs(float(
                np.sum(np.arccos(rho4 / r4)) - np.pi)))
            cfg4 = snellius_from_socle(r4, rho4, (1, 1, 1, 1))
            worst_grad = max(worst_grad, float(np.linalg.norm(gradient(r4, cfg4))))
            checked4 += 1
    report(3, worst_closure < 1e-10 and worst_grad < 1e-8 and checked4 > 10,
           f"{checked3} triangles + {checked4} quadrilaterals: "
           f"max closure residual {worst_closure:.2e}, max gradient {worst_grad:.2e}")


def test_criterion_4_parade_hessians():
    rng = np.random.default_rng(4)
    # closed form vs finite differences (relative, matching the gradient
    # criterion's error measure)
    worst_fd = 0.0
    for n in (3, 4, 5, 6):
        r = random_radii(rng, n, min_rel_gap=0.1)
        for signs in parade_sign_patterns(n):
            rep = parade_hessian(r, signs)
            fd = fd_hessian(r, parade_config(signs))
            worst_fd = max(worst_fd, float(
                np.max(np.abs(rep.matrix - fd)) / max(1.0, np.max(np.abs(fd)))))
    if worst_fd >= 1e-5:
        report(4, False, f"FD relative mismatch {worst_fd:.2e}")
    # non-degeneracy on 100 random generic tuples
    for k in range(100):
        n = 3 + k % 4
        r = random_radii(rng, n)
        for signs in parade_sign_patterns(n):
            rep = parade_hessian(r, signs)
            if rep.degenerate:
                report(4, False, f"degenerate parade {signs} at {r}")
    # the sorted-radii minimum and maximum cases
    r = [1.0, 2.2, 3.1, 4.6]
    rep_a = parade_hessian(r, (1, 1, 1))
    rep_b = parade_hessian(r, (-1, 1, -1))
    ok = (rep_a.morse_index == 0 and rep_b.morse_index == 3
          and np.all(np.linalg.eigvalsh(rep_b.matrix) < 0))
    report(4, ok, f"FD match {worst_fd:.2e}; 100 generic tuples non-degenerate; "
                  f"sorted-radii cases give indices {rep_a.morse_index} and "
                  f"{rep_b.morse_index}")


def test_criterion_5_euler_and_morse_identities():
    rng = np.random.default_rng(5)
    settings4 = SolverSettings(grid_density=24)
    for n, count, settings in ((3, 10, None), (4, 5, settings4)):
        for _ in range(count):
            r = random_radii(rng, n)
            cat = find_all(r, settings)
            if cat.euler_sum != 0:
                report(5, False, f"euler sum {cat.euler_sum} at {r}")
            if len(cat) < 2 ** (n - 1):
                report(5, False, f"only {len(cat)} points at {r}")
            if n == 3 and len(cat) != 6:
                report(5, False, f"{len(cat)} points for a triple {r}")
    report(5, True, "euler sum 0 and size >= 2^(n-1) on all generic catalogues; "
                    "n=3 count 6 exceeds the Betti sum 4")


def test_criterion_6_bifurcation_movie():
    plan = SweepPlan(radii=np.array([3.0, 2.53, 3.0, 4.6]), vary_index=2,
                     start=2.53, stop=1.0, steps=100)
    res = sweep(plan, SolverSettings(grid_density=24))
    tangencies = [e for e in res.events if e.kind is EventKind.TANGENCY]
    pitchforks = [e for e in res.events if e.kind is EventKind.PITCHFORK]
    if len(tangencies) != 1 or len(pitchforks) != 1:
        report(6, False, f"events found: {[ (e.kind.value, e.param) for e in res.events ]}")
    t_param = tangencies[0].param
    p_param = pitchforks[0].param
    locus = 1.0 / (1.0 / 3.0 + 1.0 / 3.0 + 1.0 / 4.6)
    parade_branch = next(br for br in (res.branches[b] for b in pitchforks[0].branches)
                         if br.is_parade())
    idx_before = parade_branch.samples[0].point.morse_index
    idx_after = parade_branch.samples[-1].point.morse_index
    ok = (abs(t_param - 1.7) <= 0.05
          and abs(p_param - 1.13) <= 0.02
          and abs(p_param - locus) <= 1e-3
          and idx_before == 1 and idx_after == 2)
    report(6, ok, f"tangency at {t_param:.4f} (1.7 +- 0.05), pitchfork at "
                  f"{p_param:.6f} (closed form {locus:.6f}); parade index "
                  f"{idx_before} -> {idx_after}")


def test_criterion_7_no_self_intersecting_4cc():
    rng = np.random.default_rng(7)
    settings = SolverSettings(grid_density=16)
    total = 0
    for _ in range(50):
        r = random_radii(rng, 4)
        cat = find_all(r, settings)
        total += len(cat)
        bad = [p for p in cat.points if p.shape is ShapeClass.SELF_INTERSECTING]
        if bad:
            report(7, False, f"self-intersecting critical point at {r}")
    report(7, True, f"50 random generic 4-tuples, {total} critical points, "
                    "none self-intersecting")


def test_criterion_8_pentagram():
    r = np.ones(5)
    cfg = pentagram_config()
    gn = float(np.linalg.norm(gradient(r, cfg)))
    eigs = np.linalg.eigvalsh(hessian(r, cfg))
    ok = gn < 1e-12 and bool(np.all(eigs < 0))
    report(8, ok, f"gradient norm {gn:.2e}, eigenvalues "
                  f"{np.array2string(eigs, precision=4)}")


def test_criterion_9_oracle_completeness():
    rng = np.random.default_rng(9)
    for _ in range(20):
        r = random_radii(rng, 3)
        if not catalogues_match(find_all(r), brute_force_oracle(r, 360), tol=1e-6):
            report(9, False, f"n=3 mismatch at {r}")
    for _ in range(20):
        r = random_radii(rng, 4)
        if not catalogues_match(find_all(r), brute_force_oracle(r, 72), tol=1e-6):
            report(9, False, f"n=4 mismatch at {r}")
    report(9, True, "find_all matches the brute-force oracle on 20 random "
                    "triples (grid 360^2) and 20 random 4-tuples (grid 72^3)")
