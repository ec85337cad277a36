"""Complexified Lyapunov profiles, accelerations and regime classification."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..cocycle import complexify, lyapunov_spectrum
from ..errors import GridTooShort, SnapFailure
from ..fitting import segmented_fit
from .transfer import GOLDEN, schrodinger_cocycle

TWO_PI = 2.0 * math.pi
SNAP_TOL = 0.15
ZERO_FLOOR = 1e-3


@dataclass(frozen=True)
class LyapunovProfile:
    """Samples of eps -> L_eps(E) and their piecewise-affine fit on eps >= 0.

    ``raw_slopes`` are in units of 2 pi before snapping; ``slopes`` are the
    snapped integers. ``breakpoints`` are interior turning points in
    (0, eps_max).
    """

    energy: float
    eps_grid: np.ndarray
    L_values: np.ndarray
    stderr: np.ndarray
    breakpoints: np.ndarray
    slopes: np.ndarray
    raw_slopes: np.ndarray
    fit_residual: float

    @property
    def L0(self) -> float:
        i = int(np.argmin(np.abs(self.eps_grid)))
        return float(self.L_values[i])

    @property
    def L0_stderr(self) -> float:
        i = int(np.argmin(np.abs(self.eps_grid)))
        return float(self.stderr[i])

    @property
    def snap_deviation(self) -> float:
        return float(np.max(np.abs(self.raw_slopes - np.round(self.raw_slopes))))


def default_eps_max(L: float) -> float:
    return 1.5 * L / TWO_PI + 0.05


def fold_profile(eps, L, err):
    """Average the +eps and -eps samples; returns eps >= 0 data."""
    eps = np.asarray(eps)
    # +eps and -eps from linspace can differ in the last bit
    pos = np.unique(np.round(np.abs(eps), 12))
    vals = np.array([np.mean(L[np.isclose(np.abs(eps), e)]) for e in pos])
    errs = np.array([np.max(err[np.isclose(np.abs(eps), e)]) for e in pos])
    return pos, vals, errs


def segment_slopes(x, y, bps, slopes):
    """Per-segment slopes re-estimated away from the breakpoints.

    Several kinks can fall inside one grid cell (turning points closer than
    the eps spacing); the sample in that cell then bends the neighbouring
    segments. Each segment slope is re-fitted on the points at least one
    grid step from every breakpoint when two or more remain. Returns the
    slopes and the number of supporting points per segment.
    """
    x, y = np.asarray(x), np.asarray(y)
    step = float(np.min(np.diff(x))) if x.size > 1 else 0.0
    edges = np.concatenate([[-np.inf], bps, [np.inf]])
    out = np.array(slopes, dtype=float)
    support = np.zeros(out.size, dtype=int)
    for i in range(len(edges) - 1):
        lo = x[0] if i == 0 else edges[i] + step
        inside = (x >= lo - 1e-12) & (x <= edges[i + 1] - step + 1e-12)
        support[i] = int(inside.sum())
        if support[i] >= 2:
            out[i] = np.polyfit(x[inside], y[inside], 1)[0]
    return out, support


def fit_slopes(eps_pos, vals, errs, snap_tol=SNAP_TOL, max_segments=4):
    """Piecewise-affine fit; returns (breakpoints, raw slopes in 2 pi units, rss).

    Interior segments without supporting samples (a cell holding a bunch of
    kinks) are collapsed into a single breakpoint, and neighbouring segments
    that snap to the same integer are merged, keeping the better supported
    slope.
    """
    noise = max(float(np.max(errs)) if errs.size else 0.0, 1e-7)
    fit = segmented_fit(eps_pos, vals, max_segments=max_segments, noise=3 * noise)
    sl, sup = segment_slopes(eps_pos, vals, fit.breakpoints, fit.slopes)
    raw = list(sl / TWO_PI)
    sup = list(sup)
    bps = list(fit.breakpoints)
    i = 1
    while i < len(raw) - 1:
        if sup[i] == 0 and len(raw) > 2:
            mid = 0.5 * (bps[i - 1] + bps[i])
            del raw[i], sup[i]
            bps[i - 1 : i + 1] = [mid]
        else:
            i += 1
    keep_s, keep_n, keep_b = [raw[0]], [sup[0]], []
    for b, s, n in zip(bps, raw[1:], sup[1:]):
        if round(s) == round(keep_s[-1]):
            if n > keep_n[-1]:
                keep_s[-1], keep_n[-1] = s, n
        else:
            keep_b.append(b)
            keep_s.append(s)
            keep_n.append(n)
    return np.array(keep_b), np.array(keep_s), fit.rss


def lyapunov_profile(
    v,
    E: float,
    eps_max: float | None = None,
    n_eps: int = 17,
    tol: float = SNAP_TOL,
    alpha: float = GOLDEN,
    N: int = 200_000,
    segments: int = 8,
    strict: bool = True,
) -> LyapunovProfile:
    """L_eps(E) on a symmetric eps grid with a snapped piecewise-affine fit.

    ``eps_max`` defaults to 1.5 L(E)/2 pi + 0.05. With ``strict`` a slope
    farther than ``tol`` from an integer raises SnapFailure; otherwise the
    raw slopes are kept and only reported.
    """
    if n_eps < 9:
        raise ValueError("n_eps must be >= 9")
    base = schrodinger_cocycle(v, E, alpha)
    if eps_max is None:
        L0 = lyapunov_spectrum(base, N, segments, k=1).exponents[0]
        eps_max = default_eps_max(max(L0, 0.0))
    if eps_max >= base.strip_radius:
        eps_max = 0.95 * base.strip_radius
    half = n_eps // 2
    eps = np.linspace(-eps_max, eps_max, 2 * half + 1)
    L = np.empty_like(eps)
    err = np.empty_like(eps)
    for i, e in enumerate(eps):
        s = lyapunov_spectrum(complexify(base, e), N, segments, k=1)
        L[i], err[i] = s.exponents[0], s.stderr[0]
    pos, vals, errs = fold_profile(eps, L, err)
    bps, raw, rss = fit_slopes(pos, vals, errs)
    dev = np.abs(raw - np.round(raw))
    if strict and np.any(dev > tol):
        raise SnapFailure(f"fitted slopes {raw} are not within {tol} of integers", raw)
    return LyapunovProfile(
        energy=float(E),
        eps_grid=eps,
        L_values=L,
        stderr=err,
        breakpoints=bps,
        slopes=np.round(raw).astype(int),
        raw_slopes=raw,
        fit_residual=rss,
    )


def acceleration(profile: LyapunovProfile) -> int:
    """Right slope of L_eps at eps = 0 in units of 2 pi."""
    if abs(profile.raw_slopes[0] - profile.slopes[0]) > SNAP_TOL:
        raise SnapFailure("initial slope does not snap", profile.raw_slopes)
    return int(profile.slopes[0])


def t_acceleration(profile: LyapunovProfile) -> int:
    """Slope after the first turning point eps_1 >= 0 (0 when there is none).

    When the acceleration is positive, eps = 0 itself is a turning point of
    the even function L_eps, so the answer is the acceleration.
    """
    w = acceleration(profile)
    if w > 0:
        return w
    if profile.breakpoints.size == 0:
        return 0
    pos = profile.eps_grid[profile.eps_grid >= 0]
    after = np.sum(pos > profile.breakpoints[0])
    if after < 2:
        raise GridTooShort("first turning point sits at the edge of the eps grid")
    s = profile.slopes[1]
    if abs(profile.raw_slopes[1] - s) > SNAP_TOL:
        raise SnapFailure("slope after the first turning point does not snap", profile.raw_slopes)
    return int(s)


REGIMES = ("uniformly_hyperbolic", "subcritical", "critical", "supercritical")


@dataclass(frozen=True)
class RegimeLabel:
    label: str
    omega: int
    t_omega: int
    type_one: bool
    L: float
    threshold: float
    profile: LyapunovProfile = None


def classify(v, alpha: float, E: float, eps_max: float | None = None, N: int = 200_000, **kw) -> RegimeLabel:
    """Global-theory regime of E from L(E), the acceleration and the T-acceleration.

    L(E) counts as zero below max(1e-3, 3 stderr).
    """
    kw.setdefault("strict", False)
    prof = lyapunov_profile(v, E, eps_max=eps_max, alpha=alpha, N=N, **kw)
    L = prof.L0
    thr = max(ZERO_FLOOR, 3 * prof.L0_stderr)
    w = acceleration(prof)
    try:
        tw = t_acceleration(prof)
    except GridTooShort:
        tw = 0
    positive = L > thr
    if positive and w == 0:
        label = "uniformly_hyperbolic"
    elif positive:
        label = "supercritical"
    elif w > 0:
        label = "critical"
    else:
        label = "subcritical"
    return RegimeLabel(label, w, tw, tw == 1, L, thr, prof)
