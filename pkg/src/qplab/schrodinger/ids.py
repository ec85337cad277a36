"""Integrated density of states and its cross-checks."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, stats

from ..cocycle import lyapunov_spectrum, rotation_number
from ..errors import DegenerateWindow
from .transfer import GOLDEN, as_trig, schrodinger_cocycle


@dataclass(frozen=True)
class IdsRecord:
    E: float
    N: float
    truncation_size: int
    theta_samples: int
    stderr: float


def theta_grid(theta_samples: int) -> np.ndarray:
    return (np.arange(theta_samples) + 0.5) / theta_samples


def diagonal(v, alpha, theta, size):
    """Potential values v(theta + n alpha), n = 0..size-1."""
    tv, _ = as_trig(v)
    n = np.arange(size)
    return tv(np.mod(theta + np.mod(n * alpha, 1.0), 1.0)).real


def sturm_count(diag, E, periodic=False):
    """Number of eigenvalues below E of the tridiagonal matrix with unit off-diagonal.

    Uses the LDL^T pivot recursion d_i = (a_i - E) - 1/d_{i-1}; the count of
    negative pivots equals the count of eigenvalues below E (Sylvester).
    Works on a batch: ``diag`` of shape (..., size).
    """
    if periodic:
        raise NotImplementedError("periodic counts go through eigenvalues_box")
    a = np.asarray(diag, dtype=float) - E
    d = a[..., 0].copy()
    tiny = 1e-300
    d[d == 0] = tiny
    count = (d < 0).astype(int)
    for i in range(1, a.shape[-1]):
        d = a[..., i] - 1.0 / d
        d[d == 0] = tiny
        count += d < 0
    return count


def eigenvalues_box(v, alpha, theta, size, periodic=False):
    """Sorted eigenvalues of the truncated operator (Dirichlet or periodic boundary)."""
    diag = diagonal(v, alpha, theta, size)
    if not periodic:
        return linalg.eigvalsh_tridiagonal(diag, np.ones(size - 1))
    H = np.diag(diag) + np.diag(np.ones(size - 1), 1) + np.diag(np.ones(size - 1), -1)
    H[0, -1] = H[-1, 0] = 1.0
    return np.linalg.eigvalsh(H)


def ids(v, alpha: float, E: float, size: int = 2000, theta_samples: int = 8) -> IdsRecord:
    """Phase-averaged eigenvalue counting function N(E) of size x size boxes.

    Dirichlet boundaries shift counts by at most 2 (rank-two interlacing), so
    2/size is added to the sampling error in ``stderr``.
    """
    if size < 50:
        raise ValueError("size must be >= 50")
    th = theta_grid(theta_samples)
    diags = np.stack([diagonal(v, alpha, t, size) for t in th])
    counts = sturm_count(diags, E) / size
    se = counts.std(ddof=1) / math.sqrt(theta_samples) if theta_samples > 1 else 0.0
    return IdsRecord(float(E), float(counts.mean()), size, theta_samples, float(se + 2.0 / size))


@dataclass(frozen=True)
class IdsSweep:
    E: np.ndarray
    N: np.ndarray
    size: int
    theta_samples: int
    eigenvalues: np.ndarray  # pooled, sorted

    @property
    def stderr(self) -> float:
        return 2.0 / self.size


def ids_sweep(v, alpha, E_grid, size=2000, theta_samples=8, periodic=False) -> IdsSweep:
    """N on a whole energy grid from pooled box eigenvalues."""
    th = theta_grid(theta_samples)
    ev = np.sort(np.concatenate([eigenvalues_box(v, alpha, t, size, periodic) for t in th]))
    E_grid = np.asarray(E_grid, dtype=float)
    N = np.searchsorted(ev, E_grid, side="left") / ev.size
    return IdsSweep(E_grid, N, size, theta_samples, ev)


def ids_rotation_check(v, alpha, E, size=2000, theta_samples=8, N_rot=1_000_000) -> float:
    """|N(E) - (1 - 2 rho(E))| with rho the rotation number of the Schrodinger cocycle."""
    rec = ids(v, alpha, E, size, theta_samples)
    res = rotation_number(schrodinger_cocycle(v, E, alpha), N_rot)
    rho = res.rho if res.rho < 0.75 else res.rho - 1.0
    return abs(rec.N - (1.0 - 2.0 * rho))


def stieltjes_log(sweep: IdsSweep, E: float, use_grid: bool = False) -> float:
    """Integral of ln|E - E'| dN(E').

    By default the pooled eigenvalues are used, which is the Stieltjes sum
    at the finest resolution available. With ``use_grid`` the sum runs over
    cell midpoints of the sweep grid.
    """
    if not use_grid:
        d = np.abs(E - sweep.eigenvalues)
        d = np.maximum(d, 1e-300)
        return float(np.mean(np.log(d)))
    mids = 0.5 * (sweep.E[1:] + sweep.E[:-1])
    dN = np.diff(sweep.N)
    mass = dN > 0
    return float(np.sum(np.log(np.abs(E - mids[mass]) + 1e-300) * dN[mass]))


def thouless_check(v, alpha, E, sweep: IdsSweep | None = None, N_lyap=400_000, size=2000, theta_samples=8):
    """|L(E) - integral ln|E-E'| dN(E')|."""
    if sweep is None:
        sweep = ids_sweep(v, alpha, np.array([E]), size, theta_samples)
    L = lyapunov_spectrum(schrodinger_cocycle(v, E, alpha), N_lyap, 8, k=1).exponents[0]
    return abs(L - stieltjes_log(sweep, E))


@dataclass(frozen=True)
class HolderFit:
    exponent: float
    r_squared: float
    scales: np.ndarray
    oscillations: np.ndarray


def oscillation(sweep: IdsSweep, E0: float, s: float) -> float:
    Nf = np.interp(E0 + s, sweep.E, sweep.N)
    Nb = np.interp(E0 - s, sweep.E, sweep.N)
    return float(Nf - Nb)


def holder_exponent(sweep: IdsSweep, E0: float, scales) -> HolderFit:
    """Slope of ln osc(N, [E0 - s, E0 + s]) against ln s."""
    scales = np.asarray(scales, dtype=float)
    dE = float(np.min(np.diff(sweep.E)))
    if scales.min() < dE:
        raise ValueError("sweep resolution is coarser than the smallest scale")
    osc = np.array([oscillation(sweep, E0, s) for s in scales])
    if np.all(osc <= 0):
        raise DegenerateWindow(f"N is constant around E0={E0} at every scale")
    ok = osc > 0
    if ok.sum() < 2:
        raise DegenerateWindow("fewer than two scales with positive oscillation")
    fit = stats.linregress(np.log(scales[ok]), np.log(osc[ok]))
    return HolderFit(float(fit.slope), float(fit.rvalue**2), scales, osc)


def gap_label_values(alpha: float, kmax: int) -> dict:
    """IDS values {k alpha} of the labelled gaps, |k| <= kmax, k != 0."""
    return {k: float(np.mod(k * alpha, 1.0)) for k in range(-kmax, kmax + 1) if k}


def labelled_gap(sweep: IdsSweep, n_label: float, slack: float | None = None) -> tuple[float, float]:
    """Band edges (below, above) of the gap where N = ``n_label``.

    Box eigenvalues whose counting value lies within ``slack`` (default
    2/size, the Dirichlet surface-state allowance) of the label are treated
    as gap states, so surface states inside the gap do not split it.
    """
    s = 2.0 / sweep.size if slack is None else slack
    ev = sweep.eigenvalues
    M = ev.size
    lo = max(0, int(math.floor((n_label - s) * M)) - 1)
    hi = min(M - 1, int(math.ceil((n_label + s) * M)))
    E_lo, E_hi = float(ev[lo]), float(ev[hi])
    if E_hi - E_lo < 10 * float(np.min(np.diff(sweep.E))):
        raise DegenerateWindow(f"no resolved gap at N={n_label:.6f}")
    return E_lo, E_hi


def edge_scales(width: float, smallest: float = 2.0**-12, largest: float = 2.0**-3) -> np.ndarray:
    """Dyadic scales from ``smallest`` up to min(``largest``, width/2)."""
    top = min(largest, 0.5 * width)
    n = int(math.floor(math.log2(top / smallest))) + 1
    if n < 2:
        raise DegenerateWindow("gap too narrow for two dyadic scales")
    return smallest * 2.0 ** np.arange(n)


def energy_at_ids(v, alpha, target: float, size=2000, theta_samples=4) -> float:
    """Energy whose box IDS is closest to ``target`` (median of pooled eigenvalues)."""
    th = theta_grid(theta_samples)
    ev = np.sort(np.concatenate([eigenvalues_box(v, alpha, t, size) for t in th]))
    i = min(ev.size - 1, max(0, int(round(target * ev.size))))
    if 0 < i < ev.size:
        return float(0.5 * (ev[i - 1] + ev[i]))
    return float(ev[i])
