"""Trigonometric interpolation on uniform torus grids theta_j = j/n."""

from __future__ import annotations

import numpy as np


def torus_grid(n: int) -> np.ndarray:
    return np.arange(n) / n


def modes(n: int) -> np.ndarray:
    """Integer frequencies in FFT order."""
    return np.fft.fftfreq(n, 1.0 / n).astype(int)


def coefficients(samples, axis: int = 0) -> np.ndarray:
    """Fourier coefficients (FFT order) of samples on the grid j/n."""
    samples = np.asarray(samples)
    return np.fft.fft(samples, axis=axis) / samples.shape[axis]


def _nyquist_split(c, axis):
    # the Nyquist mode is split evenly between +n/2 and -n/2, which keeps
    # interpolants of real data real
    n = c.shape[axis]
    if n % 2:
        return c, modes(n)
    c = np.moveaxis(c, axis, 0).copy()
    k = modes(n)
    half = c[n // 2] / 2
    c[n // 2] = half
    c = np.concatenate([c, half[None]], axis=0)
    k = np.concatenate([k, [n // 2]])
    return np.moveaxis(c, 0, axis), k


def shift(samples, s: float, axis: int = 0) -> np.ndarray:
    """Samples of the trigonometric interpolant at theta_j + s."""
    samples = np.asarray(samples)
    c = coefficients(samples, axis)
    c, k = _nyquist_split(c, axis)
    n = samples.shape[axis]
    phase = np.exp(2j * np.pi * k * s)
    shape = [1] * c.ndim
    shape[axis] = -1
    c = c * phase.reshape(shape)
    # fold the duplicated Nyquist column back
    c = np.moveaxis(c, axis, 0)
    if n % 2 == 0:
        c[n // 2] = c[n // 2] + c[-1]
        c = c[:-1]
    out = np.fft.ifft(np.moveaxis(c, 0, axis) * n, axis=axis)
    return out.real if np.isrealobj(samples) else out


class FourierSampler:
    """Vectorised evaluation of a band-limited periodic (matrix) function.

    Modes whose magnitude falls below ``tol`` times the largest one are
    dropped, which keeps long-orbit evaluation cheap for analytic data.
    """

    def __init__(self, samples, tol: float = 1e-15, chunk: int = 8192):
        samples = np.asarray(samples)
        self.shape = samples.shape[1:]
        self.real = np.isrealobj(samples)
        c, k = _nyquist_split(coefficients(samples.reshape(samples.shape[0], -1), 0), 0)
        size = np.max(np.abs(c), axis=1)
        keep = size > tol * size.max() if size.max() > 0 else np.zeros(k.size, bool)
        keep[k == 0] = True
        self.k = k[keep]
        self.c = c[keep]
        self.chunk = chunk

    @property
    def bandwidth(self) -> int:
        return int(np.max(np.abs(self.k)))

    def __call__(self, z):
        z = np.asarray(z)
        flat = z.reshape(-1)
        out = np.empty((flat.size, self.c.shape[1]), dtype=complex)
        for s in range(0, flat.size, self.chunk):
            e = np.exp(2j * np.pi * np.outer(flat[s : s + self.chunk], self.k))
            out[s : s + self.chunk] = e @ self.c
        if self.real and np.isrealobj(z):
            out = out.real
        return out.reshape(z.shape + self.shape)
