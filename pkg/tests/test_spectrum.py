"""Characteristic functions, eigenvalue search, eigenfunctions, residuals.

Frozen roots were computed independently by 50-digit bisection on the
nonsingular multiple pi^2 (pi^2 - u^2) cos(u) / u^3 + 2 sin(u) of the
reduced sine-case characteristic function and are trusted to every digit
shown.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klspec import (
    BracketingFailure,
    NonPositiveLambda,
    Spectrum,
    char_fn,
    char_fn_sine,
    characteristic_function,
    closed_form_bridge,
    closed_form_sine,
    eigenfunction,
    find_eigenvalues,
    fredholm_residual,
    make_preset,
    ode_residual,
    rule_for_lambda,
    sine_normalization,
    system_rows,
)

PI = math.pi

# true roots of the reduced sine-case equation, 50-digit bisection, frozen
TRUE_SINE_ROOTS = (
    0.3386627527232844783097556,
    0.02161477673090715685710106,
    0.01031165044396524169879676,
    0.005998509449725909089654069,
    0.003908059405485621929824311,
    0.002742336425680965650177984,
)
SPURIOUS_SINE_ROOT = 1.0 / PI ** 2
# value of the general-path characteristic function at the spurious point
GENERAL_AT_SPURIOUS = -5.0 / (4.0 * PI ** 3)     # = -0.040314418041499361


@pytest.fixture(scope="module")
def sine_cf():
    return characteristic_function(make_preset("sine-bridge"))


@pytest.fixture(scope="module")
def sine_closed():
    return closed_form_sine(6)


@pytest.fixture(scope="module")
def half_spec():
    cf = characteristic_function(make_preset("half-sine"))
    return find_eigenvalues(cf, 3)


# ---------------------------------------------------------------------------
# characteristic functions


def test_char_fn_rejects_nonpositive_lambda(sine_cf):
    for bad in (0.0, -0.5):
        with pytest.raises(NonPositiveLambda):
            char_fn(sine_cf, bad)
        with pytest.raises(NonPositiveLambda):
            char_fn_sine(bad)


def test_char_fn_sine_changes_sign_across_frozen_roots():
    for lam in TRUE_SINE_ROOTS:
        assert char_fn_sine(lam * (1.0 - 1e-9)) * char_fn_sine(lam * (1.0 + 1e-9)) < 0.0


def test_char_fn_sine_is_finite_through_removable_singularity():
    # the 0/0 at lambda = 1/pi^2 is removable with limit value 0
    assert abs(char_fn_sine(SPURIOUS_SINE_ROOT)) <= 1e-16
    for eps in (1e-12, 1e-9, 1e-6):
        assert abs(char_fn_sine(SPURIOUS_SINE_ROOT * (1.0 + eps))) <= 1e-5
        assert abs(char_fn_sine(SPURIOUS_SINE_ROOT * (1.0 - eps))) <= 1e-5


def test_general_path_has_no_root_at_spurious_point(sine_cf):
    value = char_fn(sine_cf, SPURIOUS_SINE_ROOT)
    assert abs(value - GENERAL_AT_SPURIOUS) <= 1e-13


def test_general_equals_sine_form_times_rational_factor(sine_cf):
    # for the sine generator, F_general(lam) = pi^2 / (pi^2 - 1/lam) * F_sine(lam)
    for lam in (0.9, 0.35, 0.2, 0.05, 0.013):
        factor = PI ** 2 / (PI ** 2 - 1.0 / lam)
        general = char_fn(sine_cf, lam)
        reduced = char_fn_sine(lam)
        assert abs(general - factor * reduced) <= 1e-13 * max(1.0, abs(general))


def test_identity_char_fn_is_lambda_sq_sine():
    cf = characteristic_function(make_preset("identity"))
    for lam in (1.3, 0.61, 0.101325, 0.02533, 0.009):
        u = 1.0 / math.sqrt(lam)
        expected = lam ** 2 * math.sin(u)
        assert abs(char_fn(cf, lam) - expected) <= 1e-14


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-5, 10.0, allow_nan=False))
def test_char_fn_sine_always_finite(lam):
    assert math.isfinite(char_fn_sine(lam))


# ---------------------------------------------------------------------------
# sine-case spectrum, closed route


def test_closed_sine_matches_frozen_roots(sine_closed):
    assert len(sine_closed.pairs) == 6
    for pair, ref in zip(sine_closed.pairs, TRUE_SINE_ROOTS):
        assert abs(pair.lam - ref) <= 1e-12
        assert pair.classification == "genuine"
        assert pair.is_genuine


def test_closed_sine_rejects_exactly_the_spurious_root(sine_closed):
    assert len(sine_closed.rejected) == 1
    spurious = sine_closed.rejected[0]
    assert spurious.classification == "spurious"
    assert not spurious.is_genuine
    assert abs(spurious.lam - SPURIOUS_SINE_ROOT) <= 1e-9
    assert spurious.C == 0.0
    assert spurious.fredholm_residual == math.inf
    # the rejected root is visible in the merged list, second from the top
    roots = [p.lam for p in sine_closed.root_list()]
    assert np.all(np.diff(roots) < 0)
    assert abs(roots[1] - SPURIOUS_SINE_ROOT) <= 1e-9


def test_sine_bracket_indices(sine_closed):
    assert [p.k_bracket for p in sine_closed.root_list()] == [0, 1, 2, 3, 4, 5, 6]


def test_sine_eigenfunctions_are_orthonormal(sine_closed):
    rule = rule_for_lambda(0.002, 16)
    values = np.stack([p.e(rule.nodes) for p in sine_closed.pairs])
    gram = (values * rule.weights) @ values.T
    assert np.abs(gram - np.eye(len(sine_closed.pairs))).max() <= 1e-10


def test_sine_normalization_closed_form_matches_quadrature(sine_closed):
    for pair in sine_closed.pairs:
        assert abs(sine_normalization(pair.lam) - pair.C) <= 1e-11 * pair.C


def test_sine_pairs_satisfy_both_residual_checks(sine_closed):
    g = make_preset("sine-bridge")
    for pair in sine_closed.pairs:
        assert pair.fredholm_residual <= 1e-9
        recomputed = fredholm_residual(g, pair)
        assert abs(recomputed - pair.fredholm_residual) <= 1e-10
        res = ode_residual(g, pair)
        assert res.interior <= 1e-5
        assert res.bc0 == 0.0
        assert res.bc1 <= 1e-6


def test_sign_convention_first_lobe_positive(sine_closed):
    t = np.linspace(0.0, 0.08, 9)[1:]
    for pair in sine_closed.pairs:
        assert pair.e(t[0]) > 0.0
        assert np.all(pair.e(t) > 0.0)


def test_eigenfunctions_vanish_at_zero(sine_closed):
    for pair in sine_closed.pairs:
        assert pair.e(0.0) == 0.0


# ---------------------------------------------------------------------------
# sine-case spectrum, general route


def test_general_route_agrees_with_closed_route(sine_cf, sine_closed):
    spec = find_eigenvalues(sine_cf, 2)
    t = np.linspace(0.0, 1.0, 101)
    for general, closed in zip(spec.pairs, sine_closed.pairs):
        assert abs(general.lam - closed.lam) <= 1e-10
        assert np.abs(general.e(t) - closed.e(t)).max() <= 1e-9
    # the reduced form's removable-singularity root does not exist on the
    # general path (the rational prefactor's pole cancels it), so nothing
    # is rejected here
    assert spec.rejected == ()


def test_system_determinant_vanishes_at_roots(sine_cf):
    for lam in TRUE_SINE_ROOTS[:3]:
        row1, row2, scale1, scale2, cc, rule = system_rows(sine_cf, lam)
        det = row1[0] * row2[1] - row1[1] * row2[0]
        assert abs(det) <= 1e-11 * scale1 * scale2


def test_eigenfunction_at_non_root_is_spurious(sine_cf):
    pair = eigenfunction(sine_cf, 0.2)
    assert pair.classification == "spurious"
    assert not pair.is_genuine


def test_bracketing_failure_carries_partial_spectrum(sine_cf):
    with pytest.raises(BracketingFailure) as excinfo:
        find_eigenvalues(sine_cf, 5, u_max=5.0)
    partial = excinfo.value.partial
    assert isinstance(partial, Spectrum)
    assert len(partial.pairs) == 1
    assert abs(partial.pairs[0].lam - TRUE_SINE_ROOTS[0]) <= 1e-12


# ---------------------------------------------------------------------------
# bridge spectrum (identity generator), closed route


def test_bridge_eigenvalues_are_exact():
    spec = closed_form_bridge(10)
    for k, pair in enumerate(spec.pairs, start=1):
        assert pair.lam == 1.0 / (k * PI) ** 2
        assert pair.k_bracket == k
        assert pair.classification == "genuine"
    assert len(spec.rejected) == 0


def test_bridge_eigenfunctions_are_scaled_sines():
    spec = closed_form_bridge(10)
    t = np.linspace(0.0, 1.0, 101)
    for k, pair in enumerate(spec.pairs, start=1):
        ref = math.sqrt(2.0) * np.sin(k * PI * t)
        assert np.abs(pair.e(t) - ref).max() <= 1e-12
        assert abs(pair.coeffs.A - math.sqrt(2.0)) <= 1e-15
        # int t e_k dt = sqrt(2) (-1)^(k+1) / (k pi)
        ref_K = math.sqrt(2.0) * (-1.0) ** (k + 1) / (k * PI)
        assert abs(pair.coeffs.K - ref_K) <= 1e-15
        assert pair.fredholm_residual <= 1e-9


def test_bridge_general_route_finds_the_same_spectrum():
    cf = characteristic_function(make_preset("identity"))
    spec = find_eigenvalues(cf, 2)
    closed = closed_form_bridge(2)
    for general, exact in zip(spec.pairs, closed.pairs):
        assert abs(general.lam - exact.lam) <= 1e-12
        t = np.linspace(0.0, 1.0, 101)
        assert np.abs(general.e(t) - exact.e(t)).max() <= 1e-8


# ---------------------------------------------------------------------------
# half-sine spectrum: the boundary row of the 2x2 system vanishes identically


def test_half_sine_eigenvalues_are_exact(half_spec):
    # lambda_k = 4 / ((2k+1)^2 pi^2): u_k = (2k+1) pi / 2, where both the
    # sine projection b_g and cos(u) vanish
    for k, pair in enumerate(half_spec.pairs, start=1):
        ref = 4.0 / ((2 * k + 1) ** 2 * PI ** 2)
        assert abs(pair.lam - ref) <= 1e-12
        assert pair.classification == "degenerate"
        assert pair.is_genuine


def test_half_sine_eigenfunctions_are_odd_half_sines(half_spec):
    t = np.linspace(0.0, 1.0, 101)
    for k, pair in enumerate(half_spec.pairs, start=1):
        ref = math.sqrt(2.0) * np.sin((2 * k + 1) * PI * t / 2.0)
        assert np.abs(pair.e(t) - ref).max() <= 1e-9
        # these eigenfunctions are orthogonal to g itself
        assert abs(pair.coeffs.K) <= 1e-9


def test_half_sine_residuals(half_spec):
    g = make_preset("half-sine")
    for pair in half_spec.pairs:
        assert pair.fredholm_residual <= 1e-9
        assert ode_residual(g, pair).interior <= 1e-5


# ---------------------------------------------------------------------------
# Spectrum container invariants


def test_spectrum_requires_strict_decrease(sine_closed):
    pairs = sine_closed.pairs
    with pytest.raises(ValueError):
        Spectrum(pairs=(pairs[1], pairs[0]), g=sine_closed.g)
    with pytest.raises(ValueError):
        Spectrum(pairs=(pairs[0], pairs[0]), g=sine_closed.g)


def test_lambdas_property_matches_pairs(sine_closed):
    assert np.array_equal(sine_closed.lambdas,
                          np.array([p.lam for p in sine_closed.pairs]))
