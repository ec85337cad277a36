"""Continued fractions, beta estimates and synthetic Liouville frequencies."""

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qplab.arith import (
    FrequencyOverflow,
    beta_estimate,
    continued_fraction,
    evaluate_quotients,
    frequency_profile,
    liouville_frequency,
    parse_alpha,
)
from qplab.errors import RationalDetected


def fibonacci(n):
    out, a, b = [], 1, 1
    for _ in range(n):
        out.append(a)
        a, b = b, a + b
    return out


def test_golden_quotients_are_ones_and_denominators_fibonacci():
    prof = continued_fraction(parse_alpha("golden"), 10)
    assert prof.partial_quotients == (1,) * 10
    # q_0 = 1 precedes the stored q_1..q_K
    assert [1, *prof.convergent_denominators] == fibonacci(11)


def test_rational_is_detected():
    with pytest.raises(RationalDetected):
        continued_fraction(0.5, 4)


def test_pi_minus_three_against_exact_rational_oracle():
    # Gauss map on a 60-digit rational approximation, in exact arithmetic
    with mpmath.workdps(80):
        x = Fraction(str(mpmath.pi - 3))
    oracle = []
    for _ in range(4):
        y = 1 / x
        a = y.numerator // y.denominator
        oracle.append(a)
        x = y - a
    assert oracle == [7, 15, 1, 292]
    with mpmath.workdps(200):
        prof = continued_fraction(mpmath.pi - 3, 4)
    assert list(prof.partial_quotients) == oracle


def test_golden_beta_is_zero():
    assert beta_estimate(continued_fraction(parse_alpha("golden"), 20)) < 1e-3


def test_liouville_beta_in_window_at_depth_three():
    prof = liouville_frequency(0.5, 3)
    assert prof.partial_quotients == (2, 3, 33)
    expected = max(math.log(3) / 2, math.log(33) / 7)
    assert prof.beta_estimate == pytest.approx(expected, rel=1e-12)
    assert 0.45 <= prof.beta_estimate <= 0.55


def test_liouville_overflow():
    with pytest.raises(FrequencyOverflow):
        liouville_frequency(0.5, 4)
    with pytest.raises(FrequencyOverflow):
        liouville_frequency(5.0, 20)


def test_polynomial_quotients_terms_vanish():
    # the running max keeps the k = 1 term ln 2; the individual terms decay
    K = 15
    alpha = evaluate_quotients(list(range(1, K + 2)), tail=parse_alpha("golden"))
    prof = continued_fraction(alpha, K)
    a, q = prof.partial_quotients, prof.convergent_denominators
    terms = [math.log(a[k + 1]) / q[k] for k in range(K - 1)]
    assert terms[-1] < 1e-8
    assert all(t2 < t1 for t1, t2 in zip(terms[1:], terms[2:]))
    assert beta_estimate(prof) == pytest.approx(max(terms))


def test_small_c_limit_is_golden():
    prof = liouville_frequency(1e-6, 10)
    assert prof.partial_quotients == (1,) * 10
    assert prof.alpha == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-4)


def test_reconstruction_within_q_squared():
    prof = continued_fraction(parse_alpha("golden"), 12)
    approx = float(evaluate_quotients(prof.partial_quotients))
    assert abs(approx - prof.alpha) < prof.convergent_denominators[-1] ** -2.0


def test_liouville_round_trip_at_depth():
    prof = liouville_frequency(0.5, 3)
    again = continued_fraction(prof.alpha_mp, 3)
    assert again.partial_quotients == prof.partial_quotients


def test_frequency_profile_tokens():
    assert frequency_profile("silver", 6).partial_quotients == (2,) * 6
    assert frequency_profile("liouville:0.5", 3).partial_quotients == (2, 3, 33)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 50), min_size=3, max_size=12))
def test_recursion_and_round_trip(quotients):
    alpha = evaluate_quotients(quotients, tail=parse_alpha("golden"))
    prof = continued_fraction(alpha, len(quotients))
    assert list(prof.partial_quotients) == quotients
    q = prof.convergent_denominators
    assert q[0] == quotients[0]
    q_prev = 1
    for k in range(1, len(q)):
        assert q[k] == quotients[k] * q[k - 1] + q_prev
        q_prev = q[k - 1]
    assert prof.beta_estimate >= 0
    assert all(a >= 1 for a in prof.partial_quotients)
