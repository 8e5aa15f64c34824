"""End-to-end acceptance gates, one per library-level contract.

Each test checks one contract at its stated tolerance and prints a single
PASS/FAIL line; together they exercise the algebra kernels, the three
independent area computations, the deformation experiment, the
representation equivalence, the random-line census, the equal-area
spanning family, the blow-down classifier, the competitor construction,
and the byte-level reproducibility of every CLI command.
"""
import json
import math
import os
import time

import numpy as np
import pytest

import heisurf.cli as cli
from heisurf.core import dilate_arr, inv_arr, mul_arr, norm_arr
from heisurf.families import (
    RuledEntireGraph,
    broken_plane_area,
    build_competitor,
    chord_obstruction_check,
    competitor_compare,
    hyperbola_intercept,
    scaling_limit,
    sigma_rho_area,
    sigma_rho_area_quadrature,
    tangent_bisection_residual,
    wedge_area,
)
from heisurf.graphs import ScalarField, graph_area, zgraph_area
from heisurf.lines import calibrate_ratio, crossings, monotonicity_check
from heisurf.quadrature import VRegion
from heisurf.strips import (
    CallableProfile,
    GraphicalStrip,
    PwlProfile,
    alpha_to_sigma,
    broken_plane,
    is_area_minimizing,
    sigma_to_alpha,
    strip_surface,
)
from heisurf.variation import second_variation_experiment

WEDGE_ONE = (math.sqrt(2.0) + math.asinh(1.0)) / 3.0
AREA_ID = (2.0 / 3.0) * (2.0 * math.sqrt(5.0) + math.asinh(2.0))
TENT = PwlProfile.from_knots([(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)])


def gate(number: int, failures: list, detail: str):
    verdict = "PASS" if not failures else "FAIL"
    extra = "" if not failures else " | " + "; ".join(failures)
    print(f"{verdict} criterion {number}: {detail}{extra}")
    assert not failures, f"criterion {number}: {failures}"


def check(failures: list, ok: bool, message: str):
    if not ok:
        failures.append(message)


# ---------------------------------------------------------------------------
# 1. group algebra and metric kernels


def test_01_group_axioms_metric_invariance_and_dilations():
    start = time.perf_counter()
    n = 10_000
    rng = np.random.default_rng(1)
    failures = []
    p, q, r = (rng.uniform(-2.0, 2.0, size=(n, 3)) for _ in range(3))

    assoc = np.abs(mul_arr(mul_arr(p, q), r) - mul_arr(p, mul_arr(q, r)))
    check(failures, float(assoc.max()) <= 1e-12,
          f"associativity defect {assoc.max():.2e}")

    unit = np.abs(mul_arr(p, inv_arr(p)))
    check(failures, float(unit.max()) <= 1e-12,
          f"inverse defect {unit.max():.2e}")

    dist_pq = norm_arr(mul_arr(inv_arr(p), q))
    g = rng.uniform(-2.0, 2.0, size=(n, 3))
    dist_gpgq = norm_arr(mul_arr(inv_arr(mul_arr(g, p)), mul_arr(g, q)))
    shift = np.abs(dist_gpgq - dist_pq)
    check(failures, float(shift.max()) <= 1e-12,
          f"left-invariance defect {shift.max():.2e}")

    worst = 0.0
    for t in rng.uniform(0.25, 4.0, size=8):
        homo = np.abs(norm_arr(dilate_arr(t, t, p)) - t * norm_arr(p))
        worst = max(worst, float(homo.max()))
    check(failures, worst <= 1e-12,
          f"dilation homogeneity defect {worst:.2e}")

    elapsed = time.perf_counter() - start
    check(failures, elapsed < 5.0, f"took {elapsed:.1f}s >= 5s")
    gate(1, failures,
         f"group/metric suite, {n} cases each at 1e-12 ({elapsed:.2f}s)")


# ---------------------------------------------------------------------------
# 2. one area, three computations


def test_02_wedge_area_three_independent_ways():
    start = time.perf_counter()
    failures = []

    def fan(x, z):
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        safe = np.where(x != 0.0, x, 1.0)
        return np.where(z > 0.5 * x * x, -x,
                        np.where(z < -0.5 * x * x, x, -2.0 * z / safe))

    field = ScalarField.from_function(fan, (-1.0, 1.0, -1.0, 1.0),
                                      entire=True, name="fan")
    footprint = VRegion(-1.0, 1.0,
                        lambda x: -0.5 * np.asarray(x, dtype=float) ** 2,
                        lambda x: 0.5 * np.asarray(x, dtype=float) ** 2)
    via_graph = graph_area(field, footprint)

    sector = VRegion(-1.0, 1.0,
                     lambda x: -np.abs(np.asarray(x, dtype=float)),
                     lambda x: np.abs(np.asarray(x, dtype=float)))
    via_zgraph = zgraph_area(lambda x, y: 0.0 * np.asarray(x), sector)

    closed = wedge_area(1.0)
    check(failures, closed == pytest.approx(WEDGE_ONE, abs=1e-15),
          "closed form drifted from (sqrt(2)+asinh 1)/3")
    for name, value in (("intrinsic graph", via_graph),
                        ("flat z-graph", via_zgraph)):
        rel = abs(value - closed) / closed
        check(failures, rel <= 1e-4, f"{name} off by rel {rel:.2e}")
    rel_pair = abs(via_graph - via_zgraph) / closed
    check(failures, rel_pair <= 1e-4,
          f"quadratures disagree by rel {rel_pair:.2e}")

    elapsed = time.perf_counter() - start
    check(failures, elapsed < 60.0, f"took {elapsed:.1f}s >= 60s")
    gate(2, failures,
         f"wedge area three ways agrees to 1e-4 "
         f"({closed:.6f}, {elapsed:.2f}s)")


# ---------------------------------------------------------------------------
# 3. the second-variation law


def test_03_second_variation_fits_and_instability_of_the_broken_plane():
    start = time.perf_counter()
    failures = []

    flat = second_variation_experiment(PwlProfile.constant(0.0), TENT)
    rel = abs(flat.quadratic_fit - 2.0 / 3.0) / (2.0 / 3.0)
    check(failures, rel <= 0.02, f"flat fit off by {rel:.2%}")
    check(failures, flat.residual_order >= 2.7,
          f"flat residual order {flat.residual_order:.2f}")

    fan_alpha = PwlProfile.from_knots([(-0.5, 1.0), (0.5, -1.0)])
    ref = -1.0 / math.sqrt(2.0) + (2.0 / 3.0) / 2.0 ** 1.5
    check(failures, abs(ref - (-0.471405)) < 5e-7,
          "analytic value drifted from -0.471405")
    unstable = second_variation_experiment(fan_alpha, TENT)
    rel = abs(unstable.quadratic_fit - ref) / abs(ref)
    check(failures, rel <= 0.05, f"fan-edge fit off by {rel:.2%}")
    check(failures, all(d < 0.0 for d in unstable.delta_areas),
          "a deformed area failed to decrease")
    check(failures, unstable.residual_order >= 2.7,
          f"fan-edge residual order {unstable.residual_order:.2f}")

    elapsed = time.perf_counter() - start
    check(failures, elapsed < 120.0, f"took {elapsed:.1f}s >= 2min")
    gate(3, failures,
         f"second-variation fits: flat {flat.quadratic_fit:.4f} (2% of 2/3), "
         f"fan edge {unstable.quadratic_fit:.4f} (5% of {ref:.6f}), "
         f"all deformed areas negative ({elapsed:.2f}s)")


# ---------------------------------------------------------------------------
# 4. the two slope representations agree


def _random_alpha(rng) -> PwlProfile:
    n_knots = int(rng.integers(1, 6))
    w = np.cumsum(rng.uniform(0.05, 1.0, size=n_knots)) - 1.5
    slopes = rng.uniform(-1.99, 4.0, size=n_knots + 1)
    v = np.empty(n_knots)
    v[0] = rng.uniform(-2.0, 2.0)
    for i in range(1, n_knots):
        v[i] = v[i - 1] + slopes[i] * (w[i] - w[i - 1])
    return PwlProfile(w, v, float(slopes[0]), float(slopes[-1]))


def test_04_alpha_sigma_round_trip_and_verdict_equivalence():
    rng = np.random.default_rng(2024)
    failures = []
    verdicts = {True: 0, False: 0}
    grid = np.linspace(-4.0, 4.0, 81)
    for case in range(100):
        alpha = _random_alpha(rng)
        sigma = alpha_to_sigma(alpha)
        back = sigma_to_alpha(sigma)
        err = max(float(np.max(np.abs(back.w - alpha.w))),
                  float(np.max(np.abs(back.v - alpha.v))),
                  abs(back.slope_left - alpha.slope_left),
                  abs(back.slope_right - alpha.slope_right),
                  float(np.max(np.abs(back(grid) - alpha(grid)))))
        check(failures, err <= 1e-9, f"case {case}: round trip err {err:.2e}")
        verdict_alpha = alpha.slope_bounds()[0] >= -1.0
        verdict_sigma = is_area_minimizing(GraphicalStrip(sigma))
        check(failures, verdict_alpha == verdict_sigma,
              f"case {case}: verdicts disagree "
              f"({verdict_alpha} vs {verdict_sigma})")
        verdicts[verdict_alpha] += 1
    check(failures, verdicts[True] >= 5 and verdicts[False] >= 5,
          f"degenerate sample: verdict counts {verdicts}")
    gate(4, failures,
         f"100 alpha<->sigma round trips at 1e-9, verdicts agree "
         f"({verdicts[True]} minimizing / {verdicts[False]} not)")


# ---------------------------------------------------------------------------
# 5. random-line monotonicity census


def _random_admissible_sigma(rng) -> PwlProfile:
    n_knots = int(rng.integers(1, 5))
    z = np.cumsum(rng.uniform(0.1, 1.0, size=n_knots)) - 1.0
    slopes = rng.uniform(-1.9, 1.9, size=n_knots + 1)
    v = np.empty(n_knots)
    v[0] = rng.uniform(-1.5, 1.5)
    for i in range(1, n_knots):
        v[i] = v[i - 1] + slopes[i] * (z[i] - z[i - 1])
    return PwlProfile(z, v, float(slopes[0]), float(slopes[-1]))


def test_05_monotone_census_and_line_measure_calibration():
    start = time.perf_counter()
    failures = []
    rng = np.random.default_rng(7)
    for case in range(20):
        sigma = _random_admissible_sigma(rng)
        report = monotonicity_check(sigma, n=100_000, seed=1000 + case)
        check(failures, report.max_crossings <= 1 and not report.violations,
              f"strip {case}: {len(report.violations)} violations, "
              f"max {report.max_crossings}")

    for u in (0.5, 1.0, 2.0):
        bp = broken_plane(u)
        report = monotonicity_check(bp, n=2000, seed=0)
        check(failures, len(report.violations) >= 1,
              f"no violation found for opening {u}")
        for line, roots in report.violations[:2]:
            check(failures, len(roots) >= 2,
                  f"opening {u}: witness has {len(roots)} roots")
            refined = crossings(bp, line, n_scan=3200)
            check(failures, refined.count >= 2,
                  f"opening {u}: witness failed dense re-scan")

    cal = calibrate_ratio(n=1_000_000, seed=0)
    check(failures, abs(cal.zscore) <= 3.0,
          f"ball-measure ratio {cal.ratio:.4f} is {cal.zscore:.1f} sigma "
          f"from 8")

    elapsed = time.perf_counter() - start
    check(failures, elapsed < 300.0, f"took {elapsed:.1f}s >= 5min")
    gate(5, failures,
         f"20 strips x 1e5 lines clean, violations for all three openings, "
         f"ratio {cal.ratio:.3f} = 8 within {abs(cal.zscore):.1f} sigma "
         f"({elapsed:.1f}s)")


# ---------------------------------------------------------------------------
# 6. the equal-area spanning family


def _rho_family() -> list:
    def smooth(fn, dfn, name):
        return CallableProfile(fn, dfn=dfn, name=name)

    fams = [
        PwlProfile.line(1.0),
        smooth(lambda z: z ** 2, lambda z: 2.0 * z, "square"),
        smooth(lambda z: z ** 3, lambda z: 3.0 * z ** 2, "cube"),
        smooth(lambda z: 3.0 * z ** 2 - 2.0 * z ** 3,
               lambda z: 6.0 * z - 6.0 * z ** 2, "smoothstep"),
        smooth(lambda z: np.sin(0.5 * math.pi * z),
               lambda z: 0.5 * math.pi * np.cos(0.5 * math.pi * z), "sine"),
        smooth(lambda z: z / (2.0 - z), lambda z: 2.0 / (2.0 - z) ** 2,
               "rational"),
    ]
    for k in (-2.0, -1.0, 1.0, 2.0):
        den = math.expm1(k)
        fams.append(smooth(lambda z, k=k, den=den: np.expm1(k * z) / den,
                           lambda z, k=k, den=den: k * np.exp(k * z) / den,
                           f"exp({k})"))
    return fams


def test_06_spanning_areas_agree_and_chords_are_obstructed():
    failures = []
    family = _rho_family()
    check(failures, len(family) == 10, "family must have 10 members")
    areas = [sigma_rho_area_quadrature(rho, 0.0, 1.0) for rho in family]
    closed = [sigma_rho_area(rho, 0.0, 1.0) for rho in family]
    for i in range(10):
        check(failures, closed[i] == pytest.approx(AREA_ID, rel=1e-12),
              f"closed form {i} drifted")
        rel = abs(areas[i] - AREA_ID) / AREA_ID
        check(failures, rel <= 1e-6, f"member {i}: area off by rel {rel:.1e}")
        for j in range(i):
            rel = abs(areas[i] - areas[j]) / AREA_ID
            check(failures, rel <= 1e-6,
                  f"members {i},{j} disagree by rel {rel:.1e}")

    for idx, rho in enumerate(family):
        report = chord_obstruction_check(rho, 0.25, 0.75, n=10_000, seed=idx)
        check(failures, report.ok and report.n_pairs == 10_000,
              f"member {idx}: interior chord at offset "
              f"{report.min_abs_offset:.1e}")
        check(failures, abs(report.corner_offset) <= 1e-9,
              f"member {idx}: corner chord not horizontal")
    gate(6, failures,
         f"10 spanning areas pairwise within 1e-6 of "
         f"{AREA_ID:.6f}; no interior horizontal chords in 1e4 pairs each")


# ---------------------------------------------------------------------------
# 7. blow-down classification


def test_07_scaling_limits_recover_the_three_regimes():
    failures = []
    plane = scaling_limit(RuledEntireGraph(PwlProfile.constant(0.7)))
    check(failures, plane.kind == "plane" and plane.u == 0.0,
          f"constant profile classified as {plane.kind}, u={plane.u}")

    step = CallableProfile(
        lambda z: np.where(np.asarray(z) < 0.0, 1.0,
                           np.where(np.asarray(z) > 0.0, -1.0, 0.0)),
        name="step")
    bp = scaling_limit(RuledEntireGraph(step))
    check(failures, bp.kind == "broken-plane", f"step gave {bp.kind}")
    check(failures, abs(bp.u - 1.0) <= 1e-9, f"step opening {bp.u!r}")
    check(failures, abs(bp.theta) <= 1e-9, f"step angle {bp.theta!r}")

    smooth = scaling_limit(
        RuledEntireGraph(CallableProfile(lambda z: -np.arctan(z))),
        window=1.0e3)
    check(failures, smooth.kind == "broken-plane",
          f"arctan gave {smooth.kind}")
    check(failures, abs(smooth.u - 0.5 * math.pi) <= 1e-3,
          f"arctan opening off by {abs(smooth.u - 0.5 * math.pi):.1e}")
    gate(7, failures,
         f"blow-downs: plane u=0, step (u=1, theta=0), arctan u="
         f"{smooth.u:.6f} within 1e-3 of pi/2")


# ---------------------------------------------------------------------------
# 8. the competitor beats the broken plane


def test_08_competitor_construction_and_area_comparison():
    start = time.perf_counter()
    failures = []
    a_axis = math.hypot(1.0, 1.0) - 1.0
    b2 = 1.0 - a_axis * a_axis
    closed_a = -a_axis * math.sqrt(1.0 / b2 + 1.0)
    check(failures, abs(hyperbola_intercept(1.0) - closed_a) <= 1e-6,
          "intercept drifted from its closed form")
    check(failures, abs(closed_a - (-0.6153695283651586)) <= 1e-12,
          "frozen intercept value drifted")

    minimal = build_competitor("minimal", 1.0)
    check(failures, minimal.apex_y == pytest.approx(closed_a, abs=1e-12),
          "sweep apex is not the hyperbola intercept")
    b = minimal.exit_height
    check(failures, 0.5 < b < 1.0, f"exit height {b!r} outside (0.5, 1)")

    harmonic = build_competitor("harmonic", 1.0)
    slope_resid = harmonic.nexus_slope_residual()
    check(failures, slope_resid <= 1e-12,
          f"harmonic slope identity residual {slope_resid:.1e}")

    bisect = tangent_bisection_residual(1.0, n=100)
    check(failures, bisect <= 1e-8,
          f"tangent bisection residual {bisect:.1e}")

    report = competitor_compare(1.0)
    check(failures, report.area_margin > 0.0,
          f"competitor area {report.area_competitor!r} does not beat "
          f"{report.area_reference!r}")
    check(failures,
          report.area_reference == pytest.approx(broken_plane_area(1.0, 2.0),
                                                 rel=1e-12),
          "reference is not the broken plane on the default window")

    elapsed = time.perf_counter() - start
    check(failures, elapsed < 300.0, f"took {elapsed:.1f}s >= 5min")
    gate(8, failures,
         f"competitor: a={closed_a:.9f} (1e-6), b={b:.6f} in (0.5,1), "
         f"slope identity {slope_resid:.1e}, bisection {bisect:.1e}, "
         f"area margin {report.area_margin:.6f} > 0 ({elapsed:.2f}s)")


# ---------------------------------------------------------------------------
# 9. CLI byte-level reproducibility


_CLI_COMMANDS = (
    ("check-strip", "--profile", "arctan(-1)"),
    ("check-minimal", "--profile", "broken-plane-alpha(1)"),
    ("area", "--surface", "sigma-rho", "--rho", "id", "--window", "0,1"),
    ("energy", "--surface", "broken-plane", "--u", "1", "--z-cap", "2"),
    ("second-variation", "--alpha", "broken-plane-alpha(1)",
     "--tau", "triangle-bump(1,1)"),
    ("monotonicity", "--surface", "broken-plane", "--u", "1", "--seed", "3"),
    ("scaling-limit", "--profile", "arctan(-1)"),
    ("sigma-rho", "--rho", "id", "--window", "0,1",
     "--check-chords", "100", "--seed", "5"),
    ("competitor", "--u", "1"),
    ("export-obj", "--surface", "competitor", "--u", "1",
     "--competitor-kind", "minimal", "--res", "10"),
    ("calibrate-lines", "--lines", "20000", "--seed", "2"),
)


def _run_all(outdir: str) -> dict:
    codes = {}
    for argv in _CLI_COMMANDS:
        codes[argv[0]] = cli.main([*argv, "--output-dir", outdir])
    return codes


def test_09_every_cli_command_is_byte_reproducible(tmp_path):
    failures = []
    outdir = str(tmp_path)
    first_codes = _run_all(outdir)
    snapshot = {}
    for name in sorted(os.listdir(outdir)):
        with open(os.path.join(outdir, name), "rb") as fh:
            snapshot[name] = fh.read()
    check(failures, len(snapshot) >= len(_CLI_COMMANDS),
          f"only {len(snapshot)} artifacts for {len(_CLI_COMMANDS)} commands")

    second_codes = _run_all(outdir)
    check(failures, first_codes == second_codes,
          f"exit codes changed between runs: {first_codes} vs {second_codes}")
    for name in sorted(os.listdir(outdir)):
        with open(os.path.join(outdir, name), "rb") as fh:
            data = fh.read()
        if name not in snapshot:
            failures.append(f"new artifact {name} appeared on re-run")
        elif data != snapshot[name]:
            failures.append(f"artifact {name} changed between runs")
    for name, data in snapshot.items():
        if name.endswith(".json"):
            json.loads(data.decode("ascii"))
    gate(9, failures,
         f"all {len(_CLI_COMMANDS)} commands re-ran byte-identically "
         f"({len(snapshot)} artifacts)")
