"""Schrodinger cocycles, complexified profiles, regimes, IDS and localization."""

import math

import numpy as np
import pytest

from qplab.errors import DegenerateWindow
from qplab.potential import amo, free, geometric, non_even_example, trig_from_terms
from qplab.schrodinger import (
    GOLDEN,
    acceleration,
    classify,
    energy_at_ids,
    holder_exponent,
    ids_rotation_check,
    ids_sweep,
    localization_probe,
    lyapunov_profile,
    schrodinger_cocycle,
    t_acceleration,
)
from qplab.schrodinger.ids import ids, thouless_check

LN2 = math.log(2)


def test_matrix_entries():
    assert np.allclose(schrodinger_cocycle(free(), 0.0)(np.array([0.3]))[0], [[0, -1], [1, 0]])
    two_cos = trig_from_terms({1: 2.0})
    assert np.allclose(schrodinger_cocycle(two_cos, 1.0)(np.array([0.0]))[0], [[-1, -1], [1, 0]])


def test_determinant_one_on_samples():
    c = schrodinger_cocycle(non_even_example(), 0.4)
    z = (np.arange(1000) * GOLDEN) % 1.0
    assert np.max(np.abs(np.linalg.det(c(z)) - 1)) < 1e-12


@pytest.fixture(scope="module")
def amo_mid():
    return energy_at_ids(amo(2.0), GOLDEN, 0.5)


def test_supercritical_amo_profile(amo_mid):
    prof = lyapunov_profile(amo(2.0), amo_mid, N=100_000)
    assert acceleration(prof) == 1
    assert t_acceleration(prof) == 1
    assert prof.L0 == pytest.approx(LN2, abs=1e-2)
    assert prof.snap_deviation < 0.15
    # even and convex
    L = prof.L_values
    assert np.max(np.abs(L - L[::-1])) < 2 * np.max(prof.stderr) + 1e-9
    assert np.all(np.diff(L, 2) > -4 * np.max(prof.stderr) - 1e-6)


def test_free_profile_is_flat():
    prof = lyapunov_profile(free(), 1.0, eps_max=0.2, N=20_000)
    assert np.max(np.abs(prof.L_values)) < 1e-3
    assert prof.breakpoints.size == 0
    assert acceleration(prof) == 0


def test_uniformly_hyperbolic_far_energy():
    lab = classify(amo(1.0), GOLDEN, 10.0, N=50_000)
    assert lab.label == "uniformly_hyperbolic"
    assert lab.omega == 0
    assert lab.t_omega == 1
    # E = 10 profile: flat until L/2pi then slope 2pi
    assert lab.profile.breakpoints[0] == pytest.approx(lab.L / (2 * math.pi), rel=0.05)


def test_regimes(amo_mid):
    sup = classify(amo(2.0), GOLDEN, amo_mid, N=100_000)
    assert sup.label == "supercritical" and sup.type_one
    E_sub = energy_at_ids(amo(0.5), GOLDEN, 0.45)
    assert classify(amo(0.5), GOLDEN, E_sub, N=100_000).label == "subcritical"


def test_type_one_is_open():
    v = non_even_example()
    E = energy_at_ids(v, GOLDEN, 0.5)
    assert classify(v, GOLDEN, E, N=100_000).t_omega == 1


def test_analytic_potential_profile():
    v = geometric(2.0, 0.5)
    E = energy_at_ids(v, GOLDEN, 0.85)
    lab = classify(v, GOLDEN, E, N=100_000)
    assert lab.label == "supercritical" and lab.t_omega == 1


def test_free_ids_closed_form():
    Es = np.array([-1.5, 0.0, math.sqrt(2), 1.9])
    sw = ids_sweep(free(), GOLDEN, Es, size=2000, theta_samples=2)
    oracle = 1 - np.arccos(Es / 2) / math.pi
    assert np.max(np.abs(sw.N - oracle)) < 2 / 2000
    assert ids(free(), GOLDEN, 0.0).N == pytest.approx(0.5, abs=1e-12)


def test_ids_outside_spectrum():
    assert ids(amo(2.0), GOLDEN, -10.0).N == 0.0
    assert ids(amo(2.0), GOLDEN, 10.0).N == 1.0


def test_ids_rotation_relation():
    assert ids_rotation_check(free(), GOLDEN, 0.0, N_rot=100_000) < 1e-3
    for E in (-2.0, 0.3, 1.5):
        assert ids_rotation_check(amo(2.0), GOLDEN, E, N_rot=200_000) < 1e-2
    # inside a gap the rotation number locks
    assert ids_rotation_check(amo(2.0), GOLDEN, 1.5, N_rot=200_000) < 2 / 2000


def test_thouless_formula(amo_mid):
    assert thouless_check(amo(2.0), GOLDEN, amo_mid) < 5e-2
    assert thouless_check(free(), GOLDEN, 3.0) < 5e-2
    assert thouless_check(amo(2.0), GOLDEN, 100.0) < 1e-2


def test_aubry_self_duality_of_ids():
    Es = np.linspace(-3.5, 3.5, 15)
    a = ids_sweep(amo(2.0), GOLDEN, Es, size=2000)
    b = ids_sweep(amo(0.5), GOLDEN, Es / 2.0, size=2000)
    assert np.max(np.abs(a.N - b.N)) < 2 * (a.stderr + b.stderr)


def test_holder_free_is_lipschitz_and_gap_degenerate():
    Es = np.arange(-0.5, 0.5, 1e-4)
    sw = ids_sweep(free(), GOLDEN, Es, size=4000, theta_samples=2)
    fit = holder_exponent(sw, 0.0, 2.0 ** -np.arange(3, 9))
    assert fit.exponent == pytest.approx(1.0, abs=0.05)
    Eg = np.arange(0.9, 1.3, 1e-4)
    gap = ids_sweep(amo(2.0), GOLDEN, Eg, size=2000)
    with pytest.raises(DegenerateWindow):
        holder_exponent(gap, 1.1, 2.0 ** -np.arange(6, 12))


def test_localization_probe():
    rep = localization_probe(amo(2.0), GOLDEN, 0.0, (-1.0, 1.0), size=1000)
    assert 0.8 * LN2 <= rep.median_rate <= 1.1 * LN2
    ext = localization_probe(free(), GOLDEN, 0.0, (-1.0, 1.0), size=1000)
    # extended states: participation of order the size
    assert np.median(ext.participation) > 1000 / 3
