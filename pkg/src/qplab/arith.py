"""Continued fractions and the irrationality exponent of a rotation number.

All Gauss-map arithmetic runs in mpmath at ``WORKING_DPS`` decimal digits so
that partial quotients stay exact to depth ~40 for generic inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath

from .errors import FrequencyOverflow, RationalDetected

WORKING_DPS = 200
RATIONAL_TOL = 1e-15
INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class FrequencyProfile:
    """Rotation number together with its first convergents.

    ``partial_quotients[k-1]`` is a_k and ``convergent_denominators[k-1]`` is
    q_k, so both tuples are 1-based in the mathematical sense.
    """

    alpha: float
    partial_quotients: tuple
    convergent_denominators: tuple
    beta_estimate: float
    alpha_mp: mpmath.mpf = field(default=None, repr=False, compare=False)

    @property
    def depth(self) -> int:
        return len(self.partial_quotients)


def _denominators(quotients):
    q_prev, q = 1, quotients[0]
    out = [q]
    for a in quotients[1:]:
        q_prev, q = q, a * q + q_prev
        out.append(q)
    return out


def _beta_from(quotients, denominators) -> float:
    # running max of ln(a_{k+1}) / q_k over k >= 1
    best = 0.0
    for k in range(len(quotients) - 1):
        best = max(best, math.log(quotients[k + 1]) / denominators[k])
    return best


def continued_fraction(alpha, K: int) -> FrequencyProfile:
    """First ``K`` partial quotients of ``alpha`` in (0, 1).

    ``alpha`` may be a float, a decimal string or an mpmath number. Strings
    and mpmath values keep their full precision.

    Raises
    ------
    RationalDetected
        If the Gauss-map remainder drops below 1e-15 before K quotients
        have been produced.
    """
    if K < 1:
        raise ValueError("K must be positive")
    with mpmath.workdps(WORKING_DPS):
        x = mpmath.mpf(alpha)
        x = x - mpmath.floor(x)
        x0 = x
        if x < RATIONAL_TOL:
            raise RationalDetected(f"alpha={alpha} is an integer")
        quotients = []
        for _ in range(K):
            y = 1 / x
            a = int(mpmath.floor(y))
            quotients.append(a)
            x = y - a
            if len(quotients) < K and x < RATIONAL_TOL:
                raise RationalDetected(
                    f"Gauss map remainder {mpmath.nstr(x, 5)} after "
                    f"{len(quotients)} steps; alpha looks rational"
                )
        dens = _denominators(quotients)
        return FrequencyProfile(
            alpha=float(x0),
            partial_quotients=tuple(quotients),
            convergent_denominators=tuple(dens),
            beta_estimate=_beta_from(quotients, dens) if K >= 2 else 0.0,
            alpha_mp=x0,
        )


def beta_estimate(profile: FrequencyProfile) -> float:
    """Finite-depth surrogate for beta(alpha).

    Returns max_k ln(a_{k+1}) / q_k over the available convergents. Since the
    true quantity is a limsup, this is biased low whenever the large
    quotients lie beyond the computed depth.
    """
    if profile.depth < 3:
        raise ValueError("need at least 3 convergents")
    return _beta_from(profile.partial_quotients, profile.convergent_denominators)


def evaluate_quotients(quotients, tail=None):
    """Value of [0; a_1, ..., a_K] (optionally followed by ``tail`` in (0,1))."""
    with mpmath.workdps(WORKING_DPS):
        x = mpmath.mpf(0) if tail is None else mpmath.mpf(tail)
        for a in reversed(quotients):
            x = 1 / (a + x)
        return x


def liouville_frequency(c: float, K: int) -> FrequencyProfile:
    """Synthesize alpha with a_{k+1} = round(exp(c q_k)) and q_0 = 1.

    The expansion continues with the next prescribed quotient a_{K+1} when
    it is representable at working precision and with all ones afterwards,
    so the result is irrational, its first K quotients round-trip, and at
    scales below q_{K+1} it is as close to rational as the rule demands.
    """
    if not 0 < c <= 5:
        raise ValueError("c must lie in (0, 5]")
    quotients = []
    q_prev, q = 0, 1
    with mpmath.workdps(WORKING_DPS):
        for _ in range(K):
            a = max(1, int(mpmath.nint(mpmath.exp(c * q))))
            q_prev, q = q, a * q + q_prev
            if q > INT64_MAX:
                raise FrequencyOverflow(
                    f"q_{len(quotients) + 1} exceeds 64-bit range for c={c}"
                )
            quotients.append(a)
        tail = (mpmath.sqrt(5) - 1) / 2
        # a_{K+1} must stay well inside the working precision
        if c * q < 0.4 * WORKING_DPS * math.log(10):
            a_next = max(1, int(mpmath.nint(mpmath.exp(c * q))))
            tail = 1 / (a_next + tail)
        alpha = evaluate_quotients(quotients, tail=tail)
    dens = _denominators(quotients)
    return FrequencyProfile(
        alpha=float(alpha),
        partial_quotients=tuple(quotients),
        convergent_denominators=tuple(dens),
        beta_estimate=_beta_from(quotients, dens) if K >= 2 else 0.0,
        alpha_mp=alpha,
    )


GOLDEN = "golden"
SILVER = "silver"


def parse_alpha(expr, depth: int = 30):
    """Resolve a frequency expression to an mpmath number.

    Accepts numbers, decimal strings and the tokens ``golden``,
    ``silver`` and ``liouville:<c>``.
    """
    if isinstance(expr, (int, float)):
        return mpmath.mpf(expr)
    s = str(expr).strip().lower()
    with mpmath.workdps(WORKING_DPS):
        if s == GOLDEN:
            return (mpmath.sqrt(5) - 1) / 2
        if s == SILVER:
            return mpmath.sqrt(2) - 1
        if s.startswith("liouville:"):
            c = float(s.split(":", 1)[1])
            k = depth
            # largest depth that still fits, so the token never overflows
            while k > 1:
                try:
                    return liouville_frequency(c, k).alpha_mp
                except FrequencyOverflow:
                    k -= 1
            return liouville_frequency(c, 1).alpha_mp
        return mpmath.mpf(s)


def frequency_profile(expr, depth: int) -> FrequencyProfile:
    """Profile for a CLI/config frequency expression."""
    s = str(expr).strip().lower()
    if s.startswith("liouville:"):
        c = float(s.split(":", 1)[1])
        return liouville_frequency(c, depth)
    return continued_fraction(parse_alpha(expr, depth), depth)


def convergent_denominator_near(alpha, n: int) -> int:
    """Largest convergent denominator q_k of ``alpha`` not exceeding ``n``.

    Orbit averages over q_k steps obey the Denjoy-Koksma bound, so
    horizons are snapped to these values.
    """
    with mpmath.workdps(WORKING_DPS):
        x = mpmath.mpf(alpha)
        x = x - mpmath.floor(x)
        q_prev, q = 0, 1
        best = 1
        for _ in range(200):
            if x < RATIONAL_TOL:
                break
            y = 1 / x
            a = int(mpmath.floor(y))
            x = y - a
            q_prev, q = q, a * q + q_prev
            if q > n:
                break
            best = q
        return best
