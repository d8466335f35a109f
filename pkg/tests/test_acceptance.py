"""Acceptance gate: ten numbered criteria, one recorded pass/fail line each.

Expensive intermediates (spectra, oracle decompositions, path ensembles)
are cached in-module so each criterion pays only for what it introduces;
the wall-clock deadline of every criterion covers exactly the work it
first triggers.

Criterion 1 compares against an externally required reference tabulation
of the first five sine-case roots.  Our independent recomputation of the
same roots (50-digit bisection of the same equation, confirmed by the
matrix oracle and by the trace identity) disagrees with that tabulation
by 3e-6 to 1.8e-5 per root, far beyond its 1e-7 tolerance, so criterion 1
fails honestly and is expected to stay red.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest
import scipy.special

from conftest import record_acceptance
from klspec import (
    build,
    build_rule,
    char_fn,
    char_fn_sine,
    characteristic_function,
    closed_form_bridge,
    closed_form_sine,
    compare,
    eigs,
    empirical_covariance,
    find_eigenvalues,
    make_preset,
    null_check,
    ode_residual,
    product_polynomial,
    sample_direct,
    sample_kl,
    trace_check,
)

PI = math.pi

# the required reference tabulation for criterion 1 (single tolerance 1e-7)
REFERENCE_ROOTS = (0.338650021, 0.101330775, 0.021632817, 0.010325434, 0.006001452)

# reference Laplace product coefficients for criterion 3, ascending powers
REFERENCE_COEFFS = (0.95588099, 0.20572949, 0.0118929, 0.00023738, 0.00000147)

_cache = {}


def cached(key, factory):
    if key not in _cache:
        _cache[key] = factory()
    return _cache[key]


def spectrum_for(preset, K):
    def factory():
        if preset == "sine-bridge":
            return closed_form_sine(K)
        if preset in ("identity", "neg-identity"):
            return closed_form_bridge(K)
        cf = characteristic_function(make_preset(preset))
        return find_eigenvalues(cf, K)
    return cached(("spectrum", preset, K), factory)


def oracle_values(preset, n):
    def factory():
        matrix_preset = "identity" if preset == "neg-identity" else preset
        disc = cached(("disc", matrix_preset, n), lambda: build(make_preset(matrix_preset), n))
        if preset == "neg-identity":
            own = build(make_preset(preset), n)
            assert np.array_equal(own.matrix, disc.matrix)
        return eigs(disc, vectors=False)
    return cached(("oracle", "identity" if preset == "neg-identity" else preset, n), factory)


def paths_for(preset, method, K=50):
    def factory():
        g = make_preset(preset)
        if method == "direct":
            return sample_direct(g, 64, 100_000, seed=2024)
        return sample_kl(spectrum_for(preset, K), 64, 100_000, seed=2025)
    return cached(("paths", preset, method), factory)


# ---------------------------------------------------------------------------


def test_criterion_01_sine_root_tabulation():
    start = time.perf_counter()
    cp = subprocess.run(
        [sys.executable, "-m", "klspec.cli", "spectrum",
         "--generator", "sine-bridge", "--K", "5", "--out-dir", "."],
        capture_output=True, text=True, cwd="/tmp",
    )
    elapsed = time.perf_counter() - start
    assert cp.returncode == 0, cp.stderr
    rows = open("/tmp/spectrum.csv").read().splitlines()[1:]
    roots = [float(r.split(",")[2]) for r in rows][:5]
    errors = [abs(found - ref) for found, ref in zip(roots, REFERENCE_ROOTS)]
    ok = len(roots) == 5 and max(errors) <= 1e-7 and elapsed <= 5.0
    record_acceptance(
        1, ok,
        f"root list vs reference tabulation: max |delta| = {max(errors):.2e} "
        f"(tolerance 1e-07), {elapsed:.2f}s",
    )
    assert elapsed <= 5.0
    assert max(errors) <= 1e-7, (
        "computed roots disagree with the reference tabulation: "
        + ", ".join(f"{f:.9f} vs {r:.9f} (|delta| {e:.2e})"
                    for f, r, e in zip(roots, REFERENCE_ROOTS, errors))
        + "; the computed values are confirmed independently by 50-digit "
          "bisection, the matrix oracle, and the trace identity"
    )


def test_criterion_02_bridge_spectrum_closed_form():
    start = time.perf_counter()
    spec = spectrum_for("identity", 10)
    t = np.linspace(0.0, 1.0, 101)
    lam_err = max(abs(p.lam - 1.0 / (k * PI) ** 2)
                  for k, p in enumerate(spec.pairs, start=1))
    fn_err = 0.0
    for k, pair in enumerate(spec.pairs, start=1):
        ref = math.sqrt(2.0) * np.sin(k * PI * t)
        values = pair.e(t)
        fn_err = max(fn_err, min(np.abs(values - ref).max(),
                                 np.abs(values + ref).max()))
    elapsed = time.perf_counter() - start
    ok = lam_err <= 1e-12 and fn_err <= 1e-8 and elapsed <= 1.0
    record_acceptance(
        2, ok,
        f"bridge lambda err {lam_err:.1e} (<=1e-12), eigenfunction err "
        f"{fn_err:.1e} (<=1e-8) at 101 points, {elapsed:.2f}s",
    )
    assert lam_err <= 1e-12
    assert fn_err <= 1e-8
    assert elapsed <= 1.0


def test_criterion_03_laplace_polynomial_coefficients():
    start = time.perf_counter()
    coeffs = product_polynomial(REFERENCE_ROOTS)
    elapsed = time.perf_counter() - start
    assert coeffs[0] == 1.0
    errors = [abs(c - ref) for c, ref in zip(coeffs[1:], REFERENCE_COEFFS)]
    ok = max(errors) <= 1e-6 and elapsed < 1.0
    record_acceptance(
        3, ok,
        f"product polynomial coefficients: max err {max(errors):.1e} "
        f"(<=1e-06), {elapsed:.3f}s",
    )
    assert max(errors) <= 1e-6
    assert elapsed < 1.0


def test_criterion_04_zero_eigenvalue_example():
    start = time.perf_counter()
    g = make_preset("half-sine")

    def e0(s):
        return PI / math.sqrt(2.0) * np.sin(PI * s / 2.0)

    rule = build_rule(40, 4)

    def segment(f, a, b):
        s = a + (b - a) * rule.nodes
        return (b - a) * float(rule.weights @ f(s))

    inner = segment(lambda s: np.asarray(g(s)) * e0(s), 0.0, 1.0)
    residuals = []
    for t in np.linspace(0.0, 1.0, 20):
        lower = segment(lambda s: s * e0(s), 0.0, t) if t > 0.0 else 0.0
        upper = segment(e0, t, 1.0) if t < 1.0 else 0.0
        integral = lower + t * upper - float(g(t)) * inner
        residuals.append(abs(integral))
    quad_resid = max(residuals)

    check = null_check(g, 400)
    elapsed = time.perf_counter() - start
    ok = quad_resid <= 1e-9 and check.min_eig <= 1e-6 and elapsed <= 10.0
    record_acceptance(
        4, ok,
        f"null direction quadrature residual {quad_resid:.1e} (<=1e-09) at 20 "
        f"points, oracle min eig {check.min_eig:.1e} (<=1e-06) at n=400, "
        f"{elapsed:.2f}s",
    )
    assert quad_resid <= 1e-9
    assert check.min_eig <= 1e-6
    assert elapsed <= 10.0


def test_criterion_05_interlacement_brackets():
    start = time.perf_counter()
    spec = spectrum_for("sine-bridge", 6)
    roots = [p.lam for p in spec.root_list()]
    ceiling_ok = all(lam <= 4.0 / PI ** 2 for lam in roots)
    bracket_hits = []
    for k in range(1, 6):
        lo, hi = 1.0 / ((k + 1) * PI) ** 2, 1.0 / (k * PI) ** 2
        bracket_hits.append(any(lo < lam < hi for lam in roots))
    elapsed = time.perf_counter() - start
    ok = ceiling_ok and all(bracket_hits) and elapsed <= 5.0
    record_acceptance(
        5, ok,
        f"all roots <= 4/pi^2: {ceiling_ok}; brackets k=1..5 hit: "
        f"{sum(bracket_hits)}/5, {elapsed:.2f}s",
    )
    assert ceiling_ok
    assert all(bracket_hits), bracket_hits
    assert elapsed <= 5.0


def test_criterion_06_general_vs_closed_roots():
    start = time.perf_counter()
    closed = spectrum_for("sine-bridge", 5)
    cf = characteristic_function(make_preset("sine-bridge"))
    general = cached(("spectrum-general", "sine-bridge", 5),
                     lambda: find_eigenvalues(cf, 5))
    deltas = [abs(a.lam - b.lam) for a, b in zip(general.pairs, closed.pairs)]
    # sanity: both characteristic functions change sign at the same places
    for pair in closed.pairs:
        assert char_fn(cf, pair.lam * (1 - 1e-9)) * char_fn(cf, pair.lam * (1 + 1e-9)) < 0
        assert char_fn_sine(pair.lam * (1 - 1e-9)) * char_fn_sine(pair.lam * (1 + 1e-9)) < 0
    elapsed = time.perf_counter() - start
    ok = len(deltas) == 5 and max(deltas) <= 1e-8 and elapsed <= 30.0
    record_acceptance(
        6, ok,
        f"first 5 genuine roots, general vs closed: max |delta| = "
        f"{max(deltas):.1e} (<=1e-08), {elapsed:.1f}s",
    )
    assert max(deltas) <= 1e-8
    assert elapsed <= 30.0


def test_criterion_07_oracle_agreement_all_presets():
    start = time.perf_counter()
    worst = {}
    improved = {}
    verdict_ok = False
    for preset in ("sine-bridge", "identity", "neg-identity", "half-sine"):
        spec = spectrum_for(preset, 5)
        report_800 = compare(spec, oracle_values(preset, 800))
        report_400 = compare(spec, oracle_values(preset, 400))
        assert len(report_800.matches) == 5, preset
        err_800 = max(m["rel_err"] for m in report_800.matches)
        err_400 = max(m["rel_err"] for m in report_400.matches)
        worst[preset] = err_800
        improved[preset] = err_800 < err_400
        if preset == "sine-bridge":
            verdicts = report_800.verdicts
            verdict_ok = (len(verdicts) == 1
                          and verdicts[0]["verdict"] == "confirmed-spurious"
                          and abs(verdicts[0]["lambda"] - 1.0 / PI ** 2) <= 1e-9)
    elapsed = time.perf_counter() - start
    ok = (max(worst.values()) <= 1e-3 and all(improved.values())
          and verdict_ok and elapsed <= 60.0)
    record_acceptance(
        7, ok,
        f"n=800 worst rel err {max(worst.values()):.1e} (<=1e-03) over 4 "
        f"presets, all improved on doubling: {all(improved.values())}, "
        f"contested-root verdict: {'confirmed-spurious' if verdict_ok else 'missing'}, "
        f"{elapsed:.1f}s",
    )
    assert max(worst.values()) <= 1e-3, worst
    assert all(improved.values()), improved
    assert verdict_ok
    assert elapsed <= 60.0


def test_criterion_08_residual_suite_all_presets():
    start = time.perf_counter()
    worst_fred = 0.0
    worst_ode = 0.0
    for preset in ("sine-bridge", "identity", "neg-identity", "half-sine"):
        g = make_preset(preset)
        spec = spectrum_for(preset, 5)
        assert len(spec.pairs) == 5, preset
        for pair in spec.pairs:
            worst_fred = max(worst_fred, pair.fredholm_residual)
            worst_ode = max(worst_ode, ode_residual(g, pair).interior)
    elapsed = time.perf_counter() - start
    ok = worst_fred <= 1e-6 and worst_ode <= 1e-4 and elapsed <= 30.0
    record_acceptance(
        8, ok,
        f"worst Fredholm residual {worst_fred:.1e} (<=1e-06), worst interior "
        f"ODE residual {worst_ode:.1e} (<=1e-04) over 4 presets x 5 pairs, "
        f"{elapsed:.1f}s",
    )
    assert worst_fred <= 1e-6
    assert worst_ode <= 1e-4
    assert elapsed <= 30.0


def test_criterion_09_monte_carlo_covariance():
    start = time.perf_counter()
    devs = {}
    kl_vs_direct = {}
    kl_band = {}
    for preset in ("sine-bridge", "identity"):
        g = make_preset(preset)
        direct = paths_for(preset, "direct")
        report = empirical_covariance(direct, g)
        devs[preset] = report.max_abs_deviation

        kl = paths_for(preset, "kl")
        kl_report = empirical_covariance(kl, g)
        # the K=50 truncation biases the KL covariance low by at most
        # 2 * (trace gap), since sup |e_k|^2 <= 2 for these bases
        gap = trace_check(g, spectrum_for(preset, 50)).gap
        kl_band[preset] = kl_report.max_abs_deviation <= 0.01 + 2.0 * gap
        cross = np.abs(kl_report.matrix - report.matrix).max()
        kl_vs_direct[preset] = cross <= 0.02 + 2.0 * gap
    elapsed = time.perf_counter() - start
    ok = (max(devs.values()) <= 0.01 and all(kl_band.values())
          and all(kl_vs_direct.values()) and elapsed <= 120.0)
    record_acceptance(
        9, ok,
        f"direct-sampler covariance deviation {max(devs.values()):.2e} "
        f"(<=0.01) on 65-node grid, 1e5 paths; KL(K=50) within combined "
        f"bands: {all(kl_band.values()) and all(kl_vs_direct.values())}, "
        f"{elapsed:.1f}s",
    )
    assert max(devs.values()) <= 0.01, devs
    assert all(kl_band.values())
    assert all(kl_vs_direct.values())
    assert elapsed <= 120.0


def test_criterion_10_trace_parseval():
    start = time.perf_counter()
    gap_ok = {}
    for preset in ("sine-bridge", "identity", "neg-identity", "half-sine"):
        g = make_preset(preset)
        spec = spectrum_for(preset, 5)
        lams = spec.lambdas
        trace = trace_check(g, spec).trace
        partials = np.cumsum(lams)
        gap_ok[preset] = bool(np.all(partials <= trace + 1e-8))
    bridge = closed_form_bridge(100)
    gap = trace_check(make_preset("identity"), bridge).gap
    # analytic tail: sum_{k>100} 1/(k pi)^2 = polygamma(1, 101) / pi^2
    tail = float(scipy.special.polygamma(1, 101)) / PI ** 2
    tail_err = abs(gap - tail)
    elapsed = time.perf_counter() - start
    ok = all(gap_ok.values()) and tail_err <= 1e-5 and elapsed <= 10.0
    record_acceptance(
        10, ok,
        f"partial sums below trace+1e-8 for 4 presets: {all(gap_ok.values())}; "
        f"K=100 bridge gap vs analytic tail: |delta| = {tail_err:.1e} "
        f"(<=1e-05), {elapsed:.2f}s",
    )
    assert all(gap_ok.values()), gap_ok
    assert tail_err <= 1e-5
    assert elapsed <= 10.0
