"""Dual finite-range cocycles, their symplectic spectra, Jensen profiles and domination."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qplab.cocycle import Companion, companion_cocycle, lyapunov_spectrum
from qplab.dual import (
    domination_check,
    dual_cocycle,
    dual_companion,
    dual_lyapunov_spectrum,
    haro_puig_check,
    jensen_inner_flatness,
    jensen_profile,
    pairing_defect,
    symplectic_defect,
)
from qplab.potential import amo, stock_non_even_d2, trig_from_terms
from qplab.schrodinger import GOLDEN, energy_at_ids
from qplab.schrodinger import schrodinger_cocycle

LN2 = math.log(2)
STOCK = stock_non_even_d2()


@pytest.fixture(scope="module")
def amo_mid():
    return energy_at_ids(amo(2.0), GOLDEN, 0.5)


@pytest.fixture(scope="module")
def stock_E():
    return energy_at_ids(STOCK, GOLDEN, 0.5)


def test_amo_dual_is_coupling_inverse_schrodinger():
    lam, E = 2.0, 0.7
    th = np.linspace(0, 1, 7)
    A = dual_cocycle(amo(lam), E).cocycle(th)
    oracle = np.zeros((th.size, 2, 2))
    oracle[:, 0, 0] = (E - 2 * np.cos(2 * np.pi * th)) / lam
    oracle[:, 0, 1] = -1
    oracle[:, 1, 0] = 1
    assert np.max(np.abs(A - oracle)) < 1e-14


def test_determinant_modulus_one():
    A = dual_cocycle(STOCK, 0.3).cocycle(np.linspace(0, 1, 50))
    assert np.max(np.abs(np.abs(np.linalg.det(A)) - 1)) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(-0.3, 0.3), st.floats(-6, 6), st.floats(-1, 1))
def test_twisted_symplectic_identity(theta, eps, re, im):
    assert symplectic_defect(STOCK, theta, eps, complex(re, im)) < 1e-10


def test_amo_dual_spectrum_vanishes(amo_mid):
    s = dual_lyapunov_spectrum(dual_cocycle(amo(2.0), amo_mid), 200_000)
    assert np.max(np.abs(s.exponents)) < 1e-2


def test_uniformly_hyperbolic_d2_spectrum_is_paired():
    v = trig_from_terms({1: 2.0, 2: 0.6})
    s = dual_lyapunov_spectrum(dual_cocycle(v, 10.0), 200_000)
    assert np.min(np.abs(s.exponents)) > 0.05
    defect, tol = pairing_defect(s)
    assert np.all(defect < tol + 1e-9)


def test_constant_companion_against_polynomial_roots():
    # at E = 10 no root is unimodular, so the rates converge geometrically
    comp = dual_companion(STOCK, 10.0)
    const = Companion(comp.row0, comp.index, np.zeros(3, dtype=complex))
    s = lyapunov_spectrum(companion_cocycle(GOLDEN, const), 4000)
    # char poly lambda^4 - r_0 lambda^3 - ... - r_3
    roots = np.roots(np.concatenate([[1.0], -comp.row0]))
    oracle = np.sort(np.log(np.abs(roots)))[::-1]
    assert s.exponents == pytest.approx(oracle, abs=1e-8)


def test_jensen_amo(amo_mid):
    eps = np.linspace(0, 0.3, 31)
    jp = jensen_profile(amo(2.0), amo_mid, eps, N=100_000)
    r = LN2 / (2 * math.pi)
    assert jp.flat_radius_fit == pytest.approx(r, rel=0.1)
    assert jp.post_slope_fit / (2 * math.pi) == pytest.approx(1.0, abs=0.05)
    assert jp.asymptote_offset == pytest.approx(-LN2, abs=0.05)
    assert np.max(np.abs(jp.L_hat_d[eps <= 0.9 * r])) < 1e-2


def test_jensen_stock_breakpoint_is_L_over_2pi(stock_E):
    L = lyapunov_spectrum(schrodinger_cocycle(STOCK, stock_E), 200_000, k=1).exponents[0]
    jp = jensen_profile(STOCK, stock_E, np.linspace(0, 0.3, 31), N=100_000)
    assert jp.flat_radius_fit == pytest.approx(L / (2 * math.pi), rel=0.1)
    assert jp.asymptote_offset == pytest.approx(-math.log(abs(STOCK.coeff(2))), abs=0.05)


def test_jensen_off_spectrum():
    E = 10.0
    L = lyapunov_spectrum(schrodinger_cocycle(amo(2.0), E), 100_000, k=1).exponents[0]
    jp = jensen_profile(amo(2.0), E, np.linspace(0, 0.6, 31), N=50_000)
    assert jp.flat_radius_fit == pytest.approx(L / (2 * math.pi), rel=0.1)


def test_inner_flatness(amo_mid, stock_E):
    r = LN2 / (2 * math.pi)
    assert jensen_inner_flatness(amo(2.0), amo_mid, 1, np.linspace(0.02, 0.9 * r, 5), N=100_000) < 1e-2
    assert jensen_inner_flatness(STOCK, stock_E, 1, np.linspace(0.02, 0.09, 4), N=100_000) < 2e-2


def test_haro_puig(amo_mid):
    assert haro_puig_check(amo(2.0), amo_mid, N=200_000) < 1e-2


def test_domination(stock_E):
    dc = dual_cocycle(STOCK, stock_E)
    assert domination_check(dc, 1).dominated
    assert domination_check(dc, 3).dominated
    assert domination_check(dual_cocycle(STOCK, 10.0), 2).dominated
    crit = domination_check(dual_cocycle(amo(1.0), 0.0), 1)
    assert crit.margin < 0.05
