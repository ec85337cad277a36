"""Exponential-decay and participation diagnostics for box eigenvectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg, stats

from .ids import diagonal

FLOOR = 1e-13
EDGE_FRACTION = 0.05


@dataclass(frozen=True)
class DecayReport:
    """Per-eigenvector decay rates and inverse participation ratios.

    ``boundary`` marks eigenvectors centred within EDGE_FRACTION of a box
    end; these are surface states of the truncation and are left out of
    ``median_rate`` and ``bulk_rates``.
    """

    energies: np.ndarray
    rates: np.ndarray
    ipr: np.ndarray
    centers: np.ndarray
    boundary: np.ndarray
    size: int

    @property
    def bulk_rates(self) -> np.ndarray:
        return self.rates[~self.boundary]

    @property
    def median_rate(self) -> float:
        r = self.bulk_rates
        return float(np.median(r)) if r.size else float("nan")

    @property
    def participation(self) -> np.ndarray:
        return 1.0 / self.ipr


def decay_rate(u, floor: float = FLOOR) -> tuple[float, int]:
    """Exponential decay rate of |u| away from its maximum.

    Uses the tail envelope M(r) = max{|u(n)| : |n - c| >= r} around the
    centre c, so that an extended state whose amplitude recurs far away
    does not read as decaying. log M(r) is regressed on r over the range
    where M stays above ``floor`` (relative to the peak). Returns
    (rate, centre).
    """
    a = np.abs(np.asarray(u))
    c = int(np.argmax(a))
    a = a / a[c]
    dist = np.abs(np.arange(a.size) - c)
    M = np.zeros(dist.max() + 1)
    np.maximum.at(M, dist, a)
    M = np.maximum.accumulate(M[::-1])[::-1]
    r = np.nonzero(M > floor)[0]
    if r.size < 3:
        return float("inf"), c
    fit = stats.linregress(r, np.log(M[r]))
    return float(-fit.slope), c


def localization_probe(v, alpha, theta, E_window, size: int = 2000) -> DecayReport:
    """Decay rates and inverse participation ratios of eigenvectors with E in the window."""
    if size < 500:
        raise ValueError("size must be >= 500")
    lo, hi = E_window
    d = diagonal(v, alpha, theta, size)
    w, U = linalg.eigh_tridiagonal(d, np.ones(size - 1), select="v", select_range=(lo, hi))
    rates, centers = [], []
    for j in range(w.size):
        r, c = decay_rate(U[:, j])
        rates.append(r)
        centers.append(c)
    ipr = np.sum(np.abs(U) ** 4, axis=0)
    centers = np.array(centers, dtype=int)
    edge = EDGE_FRACTION * size
    boundary = (centers < edge) | (centers >= size - edge)
    return DecayReport(w, np.array(rates), ipr, centers, boundary, size)
