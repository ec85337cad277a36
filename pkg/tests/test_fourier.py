"""Trigonometric interpolation on torus grids."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qplab.fourier import FourierSampler, shift, torus_grid


def band_limited(theta, coeffs):
    return sum(c * np.exp(2j * np.pi * k * theta) for k, c in coeffs.items())


COEFFS = {0: 0.5, 1: 1.0 - 0.5j, -1: 0.25, 3: 0.1j, -5: -0.2}


@pytest.mark.parametrize("n", [32, 33])
def test_shift_is_exact_for_band_limited(n):
    t = torus_grid(n)
    s = 0.3183
    got = shift(band_limited(t, COEFFS), s)
    assert np.max(np.abs(got - band_limited(t + s, COEFFS))) < 1e-13


def test_shift_keeps_real_data_real():
    t = torus_grid(16)
    x = np.cos(2 * np.pi * 8 * t) + np.sin(2 * np.pi * t)
    y = shift(x, 0.1)
    assert np.isrealobj(y)


def test_sampler_matrix_valued():
    t = torus_grid(64)
    M = np.stack([np.stack([band_limited(t, COEFFS), t * 0 + 1], -1),
                  np.stack([t * 0, np.conj(band_limited(t, COEFFS))], -1)], -2)
    f = FourierSampler(M)
    z = np.array([0.123, 0.77 + 0.01j])
    out = f(z)
    assert out.shape == (2, 2, 2)
    assert out[0, 0, 0] == pytest.approx(band_limited(0.123, COEFFS), abs=1e-13)
    assert f.bandwidth == 5


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 2), st.integers(28, 40))
def test_shift_composes(s, n):
    # exp(cos) is band-limited to rounding above 28 points, so the Nyquist split is harmless
    t = torus_grid(n)
    x = np.exp(np.cos(2 * np.pi * t))
    a = shift(shift(x, s / 2), s / 2)
    b = shift(x, s)
    assert np.max(np.abs(a - b)) < 1e-12
