"""Acceptance criteria, each at its stated tolerance.

Every test prints one ``PASS`` or ``FAIL`` line (shown with ``pytest -s`` or
in ``-v`` output) before asserting.
"""

import math
import time

import numpy as np
import pytest

from hypersc.analyzer import (
    BallBarrierFamily, SqdistFamily, barrier_parameter_check, barrier_sigma, certify, dikin_step_check, omega,
    probe_directions, sc_probe_angles, sc_probe_value, sc_ratio, tightness_scan, transport_comparison,
)
from hypersc.cli import bundled_points_path, main
from hypersc.fields import (
    AffineField, LogBarrierField, SquaredDistanceField, WeightedSumField, curvature_defect, local_norm, phi,
)
from hypersc.io import dumps, points_document, read_points
from hypersc.manifolds import Euclidean, Hyperboloid
from hypersc.meb import MebInstance, accuracy_target, build_problem, oracle_solve, solve as meb_solve
from hypersc.newton import QUADRATIC_ENTRY, damped_step, newton_direction, newton_step, quadratic_bound
from hypersc.oracles import derivative_check
from hypersc.pathfollow import PathParams

from conftest import random_point, random_tangent, unit_tangent

SLACK = 1e-9


def verdict(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def sqdist_reports():
    return {k: certify(SqdistFamily(2, k), samples=100_000, seed=0) for k in (1.0, 4.0)}


def test_01_derivative_exactness(capsys):
    start = time.perf_counter()
    worst = 0.0
    for dim in (2, 3):
        for kappa in (1.0, 4.0):
            res = derivative_check(dim, kappa, samples=1000, seed=dim * 10 + int(kappa))
            worst = max(worst, max(r["error"] for r in res.values()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed <= 10.0
    verdict(capsys, 1, ok, f"max relative error {worst:.2e} (<= 1e-6), runtime {elapsed:.1f} s (<= 10 s)")


def test_02_curvature_identity(capsys):
    rng = np.random.default_rng(2)
    H = Hyperboloid(2)
    R = 4.0
    worst = {"sqdist": 0.0, "log barrier": 0.0}
    for _ in range(1000):
        pole = random_point(H, rng, 2.0)
        f = SquaredDistanceField(H, pole)
        F = LogBarrierField(f, R * R / 2)
        x = random_point(H, rng, 2.0)
        u, v, w = (unit_tangent(H, x, rng) for _ in range(3))
        worst["sqdist"] = max(worst["sqdist"], abs(curvature_defect(f, x, u, v, w)))
        if F.domain_contains(x):
            worst["log barrier"] = max(worst["log barrier"], abs(curvature_defect(F, x, u, v, w)))
    ok = max(worst.values()) <= 1e-6
    verdict(capsys, 2, ok, ", ".join(f"{k} defect {v:.2e}" for k, v in worst.items()) + " (<= 1e-6)")


def test_03_tight_sc_constant(capsys, sqdist_reports):
    rep = sqdist_reports[1.0]
    l = 20.0
    H = Hyperboloid(2)
    x = H.origin()
    f = SquaredDistanceField(H, H.exp(x, np.array([0.0, l, 0.0])))
    probe = sc_ratio(f, x, *probe_directions(f, x, *sc_probe_angles(l)))
    formula = (l - phi(l)) * math.tanh(l) / (2 * l)
    ok = (0.49 <= rep.max_sc_ratio <= 0.5 + SLACK and abs(probe - formula) <= 1e-9
          and abs(sc_probe_value(l) - formula) <= 1e-9 and abs(formula - 0.475) < 5e-5)
    verdict(capsys, 3, ok, f"max SC ratio {rep.max_sc_ratio:.9f} in [0.49, 0.5], probe at l=20 {probe:.12f} "
                           f"vs {formula:.12f}")


def test_04_tight_wsc_constant(capsys, sqdist_reports):
    rep = sqdist_reports[1.0]
    ok = 0.38 <= rep.max_wsc_ratio <= 2 / math.sqrt(27) + SLACK
    verdict(capsys, 4, ok, f"max WSC ratio {rep.max_wsc_ratio:.9f} in [0.38, {2 / math.sqrt(27):.9f}]")


def test_05_curvature_scaling(capsys, sqdist_reports):
    a, b = sqdist_reports[1.0], sqdist_reports[4.0]
    diffs = [abs(b.sc_bound - 2 * a.sc_bound), abs(b.wsc_bound - 2 * a.wsc_bound),
             abs(b.max_sc_ratio - 2 * a.max_sc_ratio), abs(b.max_wsc_ratio - 2 * a.max_wsc_ratio)]
    ok = max(diffs) <= 1e-9 and b.within_bounds()
    verdict(capsys, 5, ok, f"kappa=4 bounds ({b.sc_bound}, {b.wsc_bound:.9f}) and maxima are twice kappa=1, "
                           f"largest deviation {max(diffs):.1e}")


def test_06_dikin_and_transport(capsys):
    rng = np.random.default_rng(6)
    H = Hyperboloid(2)
    R = 5.0
    F = LogBarrierField(SquaredDistanceField(H, H.origin()), R * R / 2)
    sig = barrier_sigma(0.5, R * R / 2)
    dikin_bad = transport_bad = 0
    n = 10_000
    for _ in range(n):
        x = random_point(H, rng, R * 0.99)
        u = random_tangent(H, x, rng)
        u *= rng.uniform(0.0, 0.999) / (sig * local_norm(F, x, u))
        dikin_bad += not dikin_step_check(F, sig, x, u, slack=SLACK).ok
        transport_bad += not transport_comparison(F, sig, x, u, slack=SLACK).ok
    ok = dikin_bad == 0 and transport_bad == 0
    verdict(capsys, 6, ok, f"{n} geodesics: {dikin_bad} Dikin/value-bound violations, "
                           f"{transport_bad} eigenvalue-interval violations")


def test_07_newton_quadratic_convergence(capsys):
    rng = np.random.default_rng(7)
    R = 5.0
    H = Hyperboloid(2)
    F = LogBarrierField(SquaredDistanceField(H, H.origin()), R * R / 2)
    sig = barrier_sigma(0.5, R * R / 2)
    full_bad = damped_bad = full = damped = starts = 0
    while starts < 100:
        # starts inside the quadratic region: sigma * lambda < 0.38
        d = rng.normal(size=2)
        x = H.exp(H.origin(), np.r_[0.0, d / np.linalg.norm(d) * rng.uniform(0.0, 1.0)])
        st = newton_direction(F, x)
        if not sig * st.decrement < QUADRATIC_ENTRY:
            continue
        starts += 1
        while st.decrement > 1e-12:
            bound = quadratic_bound(sig, st.decrement)
            x = newton_step(F, x, sigma=sig, state=st)
            st = newton_direction(F, x)
            full += 1
            full_bad += st.decrement > bound + SLACK
    for _ in range(100):
        # damped steps from anywhere in the ball
        x = random_point(H, rng, R * 0.999)
        st = newton_direction(F, x)
        if sig * st.decrement < QUADRATIC_ENTRY:
            continue
        y = damped_step(F, x, sig, state=st)
        damped += 1
        damped_bad += F.value(y) > F.value(x) - omega(sig * st.decrement) / sig**2 + SLACK
    ok = full_bad == 0 and damped_bad == 0 and full > 100 and damped > 0
    verdict(capsys, 7, ok, f"{starts} starts, {full} full steps ({full_bad} above the quadratic bound), "
                           f"{damped} damped steps ({damped_bad} short of the omega descent)")


def test_08_path_following_invariants(capsys):
    pts, kappa, _ = read_points(bundled_points_path())
    inst = MebInstance(pts, kappa, 1e-5)
    params = PathParams()
    start = time.perf_counter()
    sol = meb_solve(inst, params)
    elapsed = time.perf_counter() - start
    problem, _ = build_problem(inst)
    trace = sol.trace
    path = [r for r in trace.records if r.phase == "path"]
    growth = 1 + params.alpha / (params.beta + math.sqrt(problem.nu))
    dec_bad = sum(r.decrement > params.beta + SLACK for r in path)
    ratios = [b.t / a.t for a, b in zip(path, path[1:])]
    growth_bad = sum(q < growth - SLACK for q in ratios)
    d = inst.pairwise()
    eps1 = accuracy_target(1e-5, float(d.min()), float(d.max()))
    bound = 50 * math.sqrt(problem.nu) * math.log(problem.nu * trace.dl_dual0 / eps1) + 50
    ok = (len(path) > 0 and dec_bad == 0 and growth_bad == 0 and trace.path_iterations <= bound
          and elapsed <= 60.0 and sol.gap_certificate <= sol.target_gap)
    verdict(capsys, 8, ok, f"{len(path)} path steps (bound {bound:.0f}), min t growth {min(ratios):.6f} "
                           f">= {growth:.6f}, max decrement {max(r.decrement for r in path):.4f} <= 1/9, "
                           f"runtime {elapsed:.1f} s")


def _polar(H, r, a):
    return H.exp(H.origin(), np.array([0.0, r * math.cos(a), r * math.sin(a)]))


def test_09_meb_end_to_end(capsys):
    H = Hyperboloid(2)
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(10):
        inst = MebInstance(np.array([_polar(H, rng.uniform(0.0, 1.5), rng.uniform(0, 2 * math.pi))
                                     for _ in range(5)]))
        worst = max(worst, abs(meb_solve(inst).radius - oracle_solve(inst, 1_000_000).radius))
    pair = MebInstance(np.array([_polar(H, 1.0, 0.0), _polar(H, 1.0, math.pi)]))
    tri = MebInstance(np.array([_polar(H, 0.8, 2 * math.pi * k / 3) for k in range(3)]))
    sp, st = meb_solve(pair), meb_solve(tri)
    sym = max(abs(sp.radius - 1.0), H.distance(sp.center, H.origin()),
              abs(st.radius - 0.8), H.distance(st.center, H.origin()))
    ok = worst <= 1e-3 and sym <= 1e-4
    verdict(capsys, 9, ok, f"random instances differ from the oracle by at most {worst:.2e} (<= 1e-3), "
                           f"symmetric cases off by {sym:.2e} (<= 1e-4)")


def test_10_barrier_parameter_and_tightness(capsys):
    rng = np.random.default_rng(10)
    E = Euclidean(1)
    R = 3.0
    G = LogBarrierField(AffineField(E, [1.0]), R * R)
    res1 = barrier_parameter_check(G, 1.0, [np.array([v]) for v in np.linspace(-50.0, R * R - 1e-6, 500)])
    H = Hyperboloid(2)
    Rb = 4.0
    F = LogBarrierField(SquaredDistanceField(H, H.origin()), Rb * Rb / 2)
    sig = barrier_sigma(0.5, Rb * Rb / 2)
    S = WeightedSumField([(sig**2, F)])
    pts = [random_point(H, rng, Rb * 0.999) for _ in range(500)]
    res2 = barrier_parameter_check(S, sig**2, pts)
    sc = certify(BallBarrierFamily(Rb), samples=2000, seed=10)
    scan = {p.R: p for p in tightness_scan([20.0, 40.0])}
    q = scan[40.0].ratio / scan[20.0].ratio
    ok = res1.ok and res2.ok and sc.within_bounds() and q >= 1.6
    verdict(capsys, 10, ok, f"nu=1 check worst {res1.worst:.9f}, scaled ball barrier worst {res2.worst:.4f} <= "
                            f"{sig**2:.4f}, sampled SC {sc.max_sc_ratio:.4f} <= {sig:.4f}, "
                            f"wsc_ratio(40)/wsc_ratio(20) = {q:.3f} >= 1.6")


def test_11_determinism(capsys, tmp_path):
    a = dumps(certify(SqdistFamily(2, 1.0), samples=3000, seed=11).to_dict())
    b = dumps(certify(SqdistFamily(2, 1.0), samples=3000, seed=11).to_dict())
    same = [a == b]
    src = tmp_path / "pts.json"
    H = Hyperboloid(2)
    src.write_text(dumps(points_document([_polar(H, 0.9, k) for k in range(4)], 1.0)), encoding="utf-8")
    outs = []
    for k in range(2):
        r, t = tmp_path / f"r{k}.json", tmp_path / f"t{k}.csv"
        main(["meb", "--points", str(src), "--out", str(r), "--trace", str(t)])
        outs.append((r.read_bytes(), t.read_bytes()))
    same.append(outs[0] == outs[1])
    checks = []
    for _ in range(2):
        main(["check-derivatives", "--samples", "100", "--seed", "3"])
        checks.append(capsys.readouterr().out)
    same.append(checks[0] == checks[1])
    verdict(capsys, 11, all(same), f"certify report, meb result and trace, derivative report identical: {same}")
