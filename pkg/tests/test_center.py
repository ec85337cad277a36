"""Center extraction, symplectic normalization, rotation numbers, cohomology and Bloch waves."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qplab.arith import liouville_frequency
from qplab.center import (
    DiophantineWindow,
    bloch_reconstruct,
    center_frame,
    center_invariance_check,
    center_L1,
    center_rotation,
    center_subspace,
    cohomological_solve,
    cosine_similarity,
    direct_eigenvector,
    duality_ids_sweep,
    reflection_defect,
    truncation_convergence,
)
from qplab.center.frame import J
from qplab.center.rotation import circ_diff
from qplab.dual import dual_cocycle
from qplab.errors import SmallDivisorOverflow, WindowRejected
from qplab.fourier import torus_grid
from qplab.potential import amo, stock_non_even_d2
from qplab.schrodinger import GOLDEN, energy_at_ids

LN2 = math.log(2)
STOCK = stock_non_even_d2()


@pytest.fixture(scope="module")
def amo_E():
    return energy_at_ids(amo(2.0), GOLDEN, 0.45)


@pytest.fixture(scope="module")
def stock_E():
    return energy_at_ids(STOCK, GOLDEN, 0.5)


@pytest.fixture(scope="module")
def amo_frame(amo_E):
    return center_frame(amo(2.0), amo_E, GOLDEN, grid_size=512)


@pytest.fixture(scope="module")
def stock_frame(stock_E):
    return center_frame(STOCK, stock_E, GOLDEN, grid_size=512)


def test_d1_center_is_everything(amo_E):
    sub = center_subspace(dual_cocycle(amo(2.0), amo_E), grid_size=8)
    assert np.allclose(sub.bases, np.eye(2))


@pytest.mark.parametrize("E", [None, 10.0])
def test_stock_center_is_two_dimensional_and_invariant(stock_E, E):
    E = stock_E if E is None else E
    dc = dual_cocycle(STOCK, E)
    sub = center_subspace(dc, grid_size=64)
    assert sub.bases.shape == (64, 4, 2)
    assert np.min(sub.angles) > 1e-4
    assert sub.margin > 0
    # A(theta) E_c(theta) = E_c(theta + alpha): compare orthogonal projectors
    nxt = center_subspace(dc, thetas=(torus_grid(64) + GOLDEN) % 1.0, check=False, margin=sub.margin)
    img, _ = np.linalg.qr(dc.cocycle(sub.thetas) @ sub.bases)
    P = img @ np.conj(np.swapaxes(img, 1, 2))
    Q = nxt.bases @ np.conj(np.swapaxes(nxt.bases, 1, 2))
    assert np.max(np.abs(P - Q)) < 1e-8


def test_stock_frame_invariants(stock_frame):
    fr = stock_frame
    assert fr.frame_residual < 1e-6
    assert fr.realness < 1e-6
    assert fr.det_defect < 1e-8
    assert np.min(np.abs(fr.c_values)) > 1e-8
    S = fr.dual.symplectic_form
    F = fr.frames
    gram = np.conj(np.swapaxes(F, 1, 2)) @ S @ F
    assert np.max(np.abs(gram - J)) < 1e-8
    # non-even: phi is not constant, C real
    assert np.ptp(fr.phi) > 1e-3
    assert fr.winding == 0


def test_even_potential_phase_is_trivial(amo_frame):
    d = np.abs(((2 * amo_frame.phi) + 0.5) % 1.0 - 0.5)
    assert np.max(d) < 1e-6


def test_amo_center_is_subcritical(amo_E):
    assert abs(center_L1(amo(2.0), amo_E, 0.0, GOLDEN, N=200_000)) < 1e-2


def test_invariance_under_complexification(amo_frame):
    assert center_invariance_check(amo_frame, [0.0]) == 0.0
    dev = center_invariance_check(amo_frame, [0.5 * LN2 / (2 * math.pi)], N=200_000)
    assert dev < 2e-2
    with pytest.raises(ValueError):
        center_invariance_check(amo_frame, [1.01 * amo_frame.strip_radius])


def test_rotation_numbers(amo_frame, stock_frame):
    a = center_rotation(amo_frame, 100_000)
    assert abs(circ_diff(a.rho1, -a.rho2)) < 1e-4
    assert circ_diff(a.rho1 - a.rho2, 2 * a.rho_hat) == pytest.approx(0.0, abs=1e-12)
    s = center_rotation(stock_frame, 100_000)
    assert abs(circ_diff(s.rho1, -s.rho2)) > 1e-3


def test_single_point_sweep(amo_E):
    sw = duality_ids_sweep(amo(2.0), GOLDEN, [amo_E], grid_size=256, rot_N=50_000)
    assert sw.residual == 0.0
    assert sw.k == pytest.approx(sw.s[0])


def test_polynomial_truncations_coincide(stock_E):
    st_ = truncation_convergence(STOCK, GOLDEN, stock_E, n_range=range(2, 4), grid_size=128)
    assert np.all(st_.distances == 0.0)


def test_limit_record_matches_last_truncation():
    from qplab.potential import geometric, truncate

    v = geometric(2.0, 0.5)
    E = energy_at_ids(v, GOLDEN, 0.85)
    rho8 = center_rotation(center_frame(truncate(v, 8), E, GOLDEN, grid_size=256), 100_000).rho_hat
    rho_lim = center_rotation(center_frame(truncate(v, 14), E, GOLDEN, grid_size=256), 100_000).rho_hat
    assert abs(circ_diff(rho8, rho_lim)) < 1e-3


def test_cohomology_single_mode():
    n = 64
    t = torus_grid(n)
    sol = cohomological_solve(np.cos(2 * np.pi * t), GOLDEN)
    assert sol.residual < 1e-10
    c = np.fft.fft(sol.psi) / n
    assert c[1] == pytest.approx(0.5 / (np.exp(2j * np.pi * GOLDEN) - 1), abs=1e-14)
    assert c[-1] == pytest.approx(0.5 / (np.exp(-2j * np.pi * GOLDEN) - 1), abs=1e-14)


def test_cohomology_constant():
    sol = cohomological_solve(np.full(32, 0.3), GOLDEN)
    assert np.all(sol.psi == 0)
    assert sol.mean == pytest.approx(0.3)


def test_cohomology_liouville_overflow():
    alpha = liouville_frequency(1.0, 2).alpha
    n = 512
    k = np.fft.fftfreq(n, 1 / n)
    phi = np.fft.ifft(n / (1 + k**2)).real
    with pytest.raises(SmallDivisorOverflow):
        cohomological_solve(phi, alpha)


def test_cohomology_strip_precondition():
    with pytest.raises(ValueError):
        cohomological_solve(np.zeros(8), GOLDEN, h=0.01, beta=1.0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=6), st.floats(0.0, 1.0))
def test_cohomology_residual_property(amps, phase):
    t = torus_grid(64)
    phi = sum(a * np.cos(2 * np.pi * (j + 1) * (t + phase)) for j, a in enumerate(amps))
    assert cohomological_solve(phi, GOLDEN).residual < 1e-9


def test_window():
    w = DiophantineWindow()
    assert w.contains(0.25, GOLDEN)
    assert not w.contains(0.0, GOLDEN)
    with pytest.raises(ValueError):
        DiophantineWindow(tau=1.0)


def test_bloch_wave(amo_frame):
    pair = bloch_reconstruct(amo_frame)
    assert pair.u.residual < 1e-2
    assert 0.8 * LN2 <= pair.u.decay_rate <= 1.1 * LN2
    Ed, idx, vec = direct_eigenvector(amo(2.0), GOLDEN, pair.u.phase, float(amo_frame.E))
    assert Ed == pytest.approx(float(amo_frame.E), abs=1e-6)
    assert cosine_similarity(pair.u, idx, vec) > 0.9
    assert reflection_defect(pair.u, pair.v) < 1e-3


def test_bloch_window_rejection(amo_frame):
    with pytest.raises(WindowRejected):
        bloch_reconstruct(amo_frame, window=DiophantineWindow(gamma=10.0))
