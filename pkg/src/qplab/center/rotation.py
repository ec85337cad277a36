"""Fibered rotation numbers of the center, the duality-IDS sweep and truncation convergence."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..cocycle import CocycleMap, rotation_number
from ..errors import FrameAlignmentFailure, NotHomotopicToIdentity, QPLabError, WindowViolation
from ..fourier import FourierSampler
from ..potential import truncate
from ..schrodinger.ids import ids
from ..schrodinger.profile import classify
from .frame import CenterFrame, center_frame

ROT_N = 200_000


@dataclass(frozen=True)
class RotationIdsRecord:
    E: float
    rho_hat: float
    rho1: float
    rho2: float
    mean_phi: float
    N: float
    L: float
    omega: int
    winding_correction: int = 0
    lift_drift: float = 0.0


REFLECT = np.diag([1.0, -1.0])


def center_cocycle(frame: CenterFrame, reflect: bool = False) -> CocycleMap:
    """(alpha, C) with C sampled off-grid by trigonometric interpolation.

    With ``reflect`` the cocycle P C P, P = diag(1, -1), is returned; its
    rotation number is that of C with the orientation reversed.
    """
    if frame.realness > 1e-6:
        raise ValueError(f"C is not real on the grid (max imaginary part {frame.realness:.2e})")
    if frame.winding % 2:
        raise ValueError("odd winding of det M: C is anti-periodic and has no rotation number on the circle")
    C = frame.C_values
    if reflect:
        C = REFLECT @ C @ REFLECT
    return CocycleMap(frame.alpha, 2, FourierSampler(C), name="center C")


def center_rotation(frame: CenterFrame, N: int = ROT_N, L: float = float("nan"), omega: int = 1,
                    N_ids: float = float("nan")) -> RotationIdsRecord:
    """rho_hat of (alpha, C) and rho_{1,2} = mean(phi) +- rho_hat (mod 1).

    With the normalization u*Sv = 1 the frame (u, v) is negatively oriented
    relative to the Schrodinger picture, so rho_hat is measured clockwise:
    it is the rotation number of P C P. This is the orientation in which
    rho_1 is non-increasing and rho_2 non-decreasing in E.
    """
    coc = center_cocycle(frame, reflect=True)
    try:
        res = rotation_number(coc, N)
    except NotHomotopicToIdentity:
        res = rotation_number(coc, N, allow_winding=True)
    rh = res.rho
    mp = frame.mean_phi
    return RotationIdsRecord(
        E=float(np.real(frame.E)),
        rho_hat=rh,
        rho1=float((mp + rh) % 1.0),
        rho2=float((mp - rh) % 1.0),
        mean_phi=mp,
        N=float(N_ids),
        L=float(L),
        omega=int(omega),
        winding_correction=res.winding_correction,
        lift_drift=res.lift_drift,
    )


def circ_diff(a, b):
    """(a - b) reduced to [-1/2, 1/2)."""
    return (np.asarray(a) - np.asarray(b) + 0.5) % 1.0 - 0.5


@dataclass(frozen=True)
class DualitySweep:
    """s(E) = (rho2 - rho1) - N(E) mod 1 along an energy grid.

    ``k`` is the circular mean of s and ``residual`` its circular standard
    deviation. ``drho1``/``drho2`` are consecutive differences (reduced to
    [-1/2, 1/2)), expected non-positive and non-negative respectively.
    """

    records: list
    s: np.ndarray
    k: float
    residual: float
    drho1: np.ndarray
    drho2: np.ndarray

    def monotone(self, tol: float = 1e-3) -> bool:
        return bool(np.all(self.drho1 <= tol) and np.all(self.drho2 >= -tol))


def duality_ids_sweep(v, alpha, E_grid, grid_size: int = 1024, ids_size: int = 2000,
                      theta_samples: int = 8, rot_N: int = ROT_N, classify_N: int = 100_000) -> DualitySweep:
    """Check rho2 - rho1 = N(E) - k with k estimated as a circular mean.

    Each energy must be a type I supercritical energy (L > 0 with
    T-acceleration 1); otherwise WindowViolation is raised.
    """
    recs = []
    for E in np.atleast_1d(np.asarray(E_grid, dtype=float)):
        lab = classify(v, alpha, float(E), N=classify_N)
        if lab.label != "supercritical" or lab.t_omega != 1:
            raise WindowViolation(f"E={E} is {lab.label} with T-acceleration {lab.t_omega}")
        fr = center_frame(v, float(E), alpha, grid_size=grid_size)
        Nv = ids(v, alpha, float(E), ids_size, theta_samples).N
        recs.append(center_rotation(fr, rot_N, lab.L, lab.omega, Nv))
    rho1 = np.array([r.rho1 for r in recs])
    rho2 = np.array([r.rho2 for r in recs])
    Ns = np.array([r.N for r in recs])
    s = np.mod(rho2 - rho1 - Ns, 1.0)
    k = float(stats.circmean(s, high=1.0, low=0.0))
    resid = float(stats.circstd(s, high=1.0, low=0.0)) if s.size > 1 else 0.0
    return DualitySweep(recs, s, k, resid, circ_diff(rho1[1:], rho1[:-1]), circ_diff(rho2[1:], rho2[:-1]))


@dataclass(frozen=True)
class TruncationStudy:
    """Successive frame distances d_n between truncations n and n+1 and their log-linear fit."""

    n: np.ndarray
    distances: np.ndarray
    slope: float
    r_squared: float
    frames: dict
    skipped: list


def grid_norm(x) -> float:
    """Root mean square over the theta grid of the pointwise Frobenius norm."""
    x = np.asarray(x)
    return float(np.sqrt(np.mean(np.sum(np.abs(x.reshape(x.shape[0], -1)) ** 2, axis=1))))


def align(prev: CenterFrame, cur: CenterFrame):
    """Distance from ``cur`` to ``prev`` over the representatives of (phi, C).

    (phi, C) is defined up to (phi + 1/2, -C); the canonical site gauge
    fixes everything else. Returns (distance, phi part, C part).
    """
    best = None
    for s, sign in ((0.0, 1.0), (0.5, -1.0), (-0.5, -1.0)):
        dphi = grid_norm(cur.phi + s - prev.phi)
        dC = grid_norm(sign * cur.C_values - prev.C_values)
        cand = (max(dphi, dC), dphi, dC)
        if best is None or cand[0] < best[0]:
            best = cand
    if not np.isfinite(best[0]):
        raise FrameAlignmentFailure("frames could not be compared")
    return best


def truncation_convergence(v, alpha, E: float, n_range=range(2, 9), grid_size: int = 512,
                           classify_N: int = 100_000) -> TruncationStudy:
    """Frames of the truncations v_n and the decay of d_n = |(phi, C)_n - (phi, C)_{n+1}|.

    d_n is taken for every n in ``n_range`` (so frames up to max(n_range) + 1
    are built), in the grid root-mean-square norm. Truncations that are not
    type I supercritical at E are skipped with a warning. The slope of
    ln d_n against n is the decay estimate -delta.
    """
    frames, skipped = {}, []
    n_range = list(n_range)
    for n in n_range + [max(n_range) + 1]:
        vn = truncate(v, n)
        try:
            lab = classify(vn, alpha, E, N=classify_N)
            if lab.label != "supercritical" or lab.t_omega != 1:
                raise WindowViolation(f"truncation {n} is {lab.label} at E={E}")
            frames[n] = center_frame(vn, E, alpha, grid_size=grid_size)
        except QPLabError as exc:
            warnings.warn(f"skipping truncation n={n}: {exc}")
            skipped.append((n, str(exc)))
    ns = sorted(frames)
    pts, dist = [], []
    for a, b in zip(ns[:-1], ns[1:]):
        if b != a + 1:
            continue
        pts.append(a)
        dist.append(align(frames[a], frames[b])[0])
    pts, dist = np.array(pts), np.array(dist)
    ok = dist > 0
    if ok.sum() >= 2:
        fit = stats.linregress(pts[ok], np.log(dist[ok]))
        slope, r2 = float(fit.slope), float(fit.rvalue**2)
    else:
        slope, r2 = float("nan"), float("nan")
    return TruncationStudy(pts, dist, slope, r2, frames, skipped)
