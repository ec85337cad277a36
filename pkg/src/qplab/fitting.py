"""Continuous piecewise-affine regression with BIC model selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize


@dataclass(frozen=True)
class PiecewiseFit:
    breakpoints: np.ndarray   # interior breakpoints, increasing
    slopes: np.ndarray        # one slope per segment
    intercept: float          # value at x[0]
    x0: float
    rss: float
    bic: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return _design(x, self.x0, self.breakpoints) @ self._coef()

    def _coef(self):
        return np.concatenate([[self.intercept, self.slopes[0]], np.diff(self.slopes)])


def _design(x, x0, bps):
    cols = [np.ones_like(x), x - x0]
    cols += [np.maximum(0.0, x - b) for b in bps]
    return np.column_stack(cols)


def _solve(x, y, w, x0, bps):
    X = _design(x, x0, bps)
    coef, *_ = np.linalg.lstsq(X * w[:, None], y * w, rcond=None)
    r = (X @ coef - y) * w
    return coef, float(r @ r)


def _fit_k(x, y, w, nbreak, min_pts):
    x0 = x[0]
    if nbreak == 0:
        coef, rss = _solve(x, y, w, x0, [])
        return np.array([]), coef, rss
    # coarse search over breakpoints at data midpoints, then continuous refinement
    mids = 0.5 * (x[1:] + x[:-1])
    best = None
    from itertools import combinations

    for combo in combinations(range(len(mids)), nbreak):
        idx = np.array(combo)
        # every segment needs enough points to pin its slope
        cuts = np.concatenate([[0], idx + 1, [len(x)]])
        if np.any(np.diff(cuts) < min_pts):
            continue
        _, rss = _solve(x, y, w, x0, mids[idx])
        if best is None or rss < best[0]:
            best = (rss, mids[idx])
    if best is None:
        return None
    lo, hi = x[0], x[-1]

    def resid(b):
        b = np.sort(np.clip(b, lo, hi))
        X = _design(x, x0, b)
        coef, *_ = np.linalg.lstsq(X * w[:, None], y * w, rcond=None)
        return (X @ coef - y) * w

    res = optimize.least_squares(resid, best[1], bounds=(lo, hi), method="trf", xtol=1e-12)
    bps = np.sort(res.x)
    coef, rss = _solve(x, y, w, x0, bps)
    if rss > best[0]:
        bps = best[1]
        coef, rss = _solve(x, y, w, x0, bps)
    return bps, coef, rss


def segmented_fit(x, y, max_segments=4, noise=0.0, weights=None, min_pts=2) -> PiecewiseFit:
    """Best continuous piecewise-affine fit with 1..max_segments pieces.

    The number of pieces minimises BIC, with the residual sum of squares
    floored at the noise level ``n * noise**2`` so that pieces are never
    added to chase noise. Ties go to the simpler model.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    order = np.argsort(x)
    x, y = x[order], y[order]
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=float)[order]
    n = x.size
    best = None
    for k in range(1, max_segments + 1):
        out = _fit_k(x, y, w, k - 1, min_pts)
        if out is None:
            break
        bps, coef, rss = out
        eff = max(rss, n * noise**2, 1e-300)
        bic = n * np.log(eff / n) + 2 * k * np.log(n)
        if best is None or bic < best.bic - 1e-9:
            slopes = np.cumsum(coef[1:])
            best = PiecewiseFit(np.asarray(bps), slopes, float(coef[0]), float(x[0]), rss, float(bic))
    return best
