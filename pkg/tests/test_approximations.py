import math

import pytest
from hypothesis import given, settings, strategies as st

from wordcollector.approximations import (
    HARMONIC_CUTOFF,
    BoundUndefinedError,
    check_bounds,
    harmonic,
    harmonic_diff,
    log_harmonic_diff,
    log_u2,
    u2,
    u2_naive,
)
from wordcollector.approximations import _harmonic_expansion
from wordcollector.exact import coupon_probabilities, log_waiting_time_exact, waiting_time_exact
from wordcollector.languages import LanguageModel, spectrum
from wordcollector.spectrum import spectrum_from_weights, uniform_spectrum


def direct_harmonic(x):
    return math.fsum(1.0 / i for i in range(1, x + 1))


def test_uniform_u2_is_exact_value():
    assert u2(uniform_spectrum(3)) == pytest.approx(5.5, rel=1e-14)
    assert u2(uniform_spectrum(1000)) == pytest.approx(1000 * direct_harmonic(1000), rel=1e-13)


def test_two_coupons_increasing_order():
    # p = (1/3, 2/3): 1/(1 * 1/3) + 1/(2 * 2/3) = 3.75
    assert u2(spectrum_from_weights({1.0: 1, 2.0: 1})) == pytest.approx(3.75, rel=1e-14)


def test_motzkin_grouped_equals_naive():
    sp = spectrum(LanguageModel.motzkin(1.2, 1.5, 1), 8)
    assert u2(sp) == pytest.approx(u2_naive(coupon_probabilities(sp)), rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(1.0, 50.0), st.integers(1, 3000)), min_size=1, max_size=6))
def test_grouped_equals_naive(cs):
    if len({round(w, 6) for w, _ in cs}) != len(cs):
        return
    sp = spectrum_from_weights(cs)
    assert u2(sp) == pytest.approx(u2_naive(coupon_probabilities(sp)), rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(1.0, 50.0), st.integers(1, 100)), min_size=1, max_size=6), st.floats(1e-3, 1e3))
def test_scale_invariance(cs, c):
    if len({round(w, 6) for w, _ in cs}) != len(cs):
        return
    a = u2(spectrum_from_weights(cs))
    b = u2(spectrum_from_weights([(w * c, M) for w, M in cs]))
    assert b == pytest.approx(a, rel=1e-10)


def test_harmonic_branches_overlap():
    assert harmonic(HARMONIC_CUTOFF) == pytest.approx(_harmonic_expansion(HARMONIC_CUTOFF), abs=1e-12)
    assert harmonic(HARMONIC_CUTOFF + 1) - harmonic(HARMONIC_CUTOFF) == pytest.approx(
        1 / (HARMONIC_CUTOFF + 1), rel=1e-6)
    assert harmonic(0) == 0.0 and harmonic(1) == 1.0


def test_harmonic_diff_forms_agree():
    for a, b in [(0, 10), (5, 200_000), (10**6 - 3, 10**6 + 10**5 + 7), (10**7, 10**7 + 3 * 10**5)]:
        direct = math.fsum(1.0 / i for i in range(a + 1, b + 1))
        assert harmonic_diff(a, b) == pytest.approx(direct, rel=1e-12)


def test_harmonic_diff_huge_arguments():
    a = 10**400
    assert harmonic_diff(a, a + a // 10) == pytest.approx(math.log(1.1), rel=1e-13)
    assert log_harmonic_diff(a, a + 5) == pytest.approx(math.log(5) - 400 * math.log(10), rel=1e-14)


def test_u2_of_huge_spectrum_is_finite_in_log_domain():
    sp = spectrum(LanguageModel.motzkin(1.2, 1.5, 1), 2000)
    lu = log_u2(sp)
    assert math.isfinite(lu)
    rep = check_bounds(sp, log_exact=log_waiting_time_exact(sp))
    assert rep.satisfied and rep.u2 == math.inf


def test_bounds_uniform_m1000():
    sp = uniform_spectrum(1000)
    exact = 1000 * direct_harmonic(1000)
    rep = check_bounds(sp, exact)
    assert rep.upper == pytest.approx(2 * exact, rel=1e-12)
    assert rep.lower == pytest.approx(rep.u2 / (3 * math.e * math.log(math.log(1000))), rel=1e-12)
    assert rep.satisfied


def test_bounds_need_m_at_least_16():
    with pytest.raises(BoundUndefinedError):
        check_bounds(uniform_spectrum(15), 50.0)


@pytest.mark.parametrize(
    "model, n",
    [
        (LanguageModel.motzkin(1.2, 1.5, 1), 12),
        (LanguageModel.sigma_star({"a": 1, "b": 1.5}), 12),
        (LanguageModel.rna(1.2, 1.5, 1, theta=3), 20),
        (LanguageModel.non_connected(1, 2, 1), 16),
        (LanguageModel.motzkin(1, 1, 1.7), 20),
    ],
)
def test_sandwich_on_languages(model, n):
    sp = spectrum(model, n)
    assert check_bounds(sp, waiting_time_exact(sp)).satisfied
