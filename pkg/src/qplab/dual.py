"""Aubry-dual finite-range operator and its 2d-dimensional symplectic cocycle.

The dual of H_{v,alpha,theta} with v of degree d acts as

    sum_k v_k x_{n+k} + 2 cos 2 pi (theta + n alpha) x_n = E x_n,

and its transfer matrix on (x_{n+d-1}, ..., x_{n-d}) is a companion matrix
whose first row is

    (-v_{d-1}, ..., -v_1, E - 2 cos 2 pi (theta + i eps) - v_0, -v_{-1}, ..., -v_{-d}) / v_d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from . import _kernels as K
from .cocycle import Companion, CocycleMap, LyapunovSpectrum, companion_cocycle, lyapunov_spectrum
from .errors import DegenerateLeadingCoefficient, PairingViolation
from .fitting import segmented_fit
from .potential import TrigPotential
from .schrodinger.transfer import GOLDEN, schrodinger_cocycle

TWO_PI = 2.0 * math.pi
LEAD_FLOOR = 1e-12


@dataclass(frozen=True)
class DualCocycle:
    potential: TrigPotential
    E: complex
    eps: float
    alpha: float
    cocycle: CocycleMap
    symplectic_form: np.ndarray
    C: np.ndarray

    @property
    def d(self) -> int:
        return self.potential.degree

    def __call__(self, z):
        return self.cocycle(z)


def toeplitz_C(v: TrigPotential) -> np.ndarray:
    """Upper-triangular Toeplitz matrix with first row (v_d, v_{d-1}, ..., v_1)."""
    d = v.degree
    first = np.array([v.coeff(d - j) for j in range(d)])
    col = np.zeros(d, dtype=complex)
    col[0] = first[0]
    return toeplitz(col, first)


def symplectic_form(v: TrigPotential) -> np.ndarray:
    """S = [[0, -C^*], [C, 0]]."""
    C = toeplitz_C(v)
    Z = np.zeros_like(C)
    return np.block([[Z, -C.conj().T], [C, Z]])


def dual_companion(v: TrigPotential, E: complex) -> Companion:
    d = v.degree
    vd = v.coeff(d)
    row = [-v.coeff(k) for k in range(d - 1, 0, -1)]
    row += [E - v.coeff(0)]
    row += [-v.coeff(-k) for k in range(1, d + 1)]
    row0 = np.array(row, dtype=complex) / vd
    fco = np.array([-1.0, 0.0, -1.0], dtype=complex) / vd
    return Companion(row0, d - 1, fco)


def dual_cocycle(v: TrigPotential, E: complex, eps: float = 0.0, alpha: float = GOLDEN) -> DualCocycle:
    """Dual transfer cocycle theta -> A_E(theta + i eps) of the degree-d potential ``v``."""
    if not isinstance(v, TrigPotential):
        raise TypeError("the dual cocycle needs a trigonometric polynomial")
    d = v.degree
    if d < 1 or abs(v.coeff(d)) <= LEAD_FLOOR:
        raise DegenerateLeadingCoefficient(f"leading coefficient v_{d} is (numerically) zero")
    comp = dual_companion(v, E).shifted(eps)
    coc = companion_cocycle(alpha, comp, name=f"dual(E={E}, eps={eps})")
    return DualCocycle(v, E, float(eps), float(alpha), coc, symplectic_form(v), toeplitz_C(v))


def symplectic_defect(v: TrigPotential, theta: float, eps: float, E: complex, alpha=GOLDEN) -> float:
    """max |A_E(theta + i eps)^* S A_conj(E)(theta - i eps) - S|."""
    A = dual_cocycle(v, E, eps, alpha).cocycle(np.array([theta]))[0]
    B = dual_cocycle(v, np.conj(E), -eps, alpha).cocycle(np.array([theta]))[0]
    S = symplectic_form(v)
    return float(np.max(np.abs(A.conj().T @ S @ B - S)))


def pairing_defect(spec: LyapunovSpectrum) -> tuple[np.ndarray, np.ndarray]:
    """|L_i + L_{m+1-i}| and the matching 3-sigma tolerance for i <= m/2."""
    m = spec.dim
    h = m // 2
    s = np.abs(spec.exponents[:h] + spec.exponents[::-1][:h])
    tol = 3.0 * np.hypot(spec.stderr[:h], spec.stderr[::-1][:h])
    return s, tol


def dual_lyapunov_spectrum(dc: DualCocycle, N: int = 1_000_000, segments: int = 8, check=True, jobs=1):
    """Full 2d-dimensional spectrum; symplectic pairing is checked when eps = 0 and E is real.

    The non-negative half is exposed as ``gammas`` (gamma_d >= ... >= gamma_1).
    """
    spec = lyapunov_spectrum(dc.cocycle, N, segments, jobs=jobs)
    if check and dc.eps == 0 and np.imag(dc.E) == 0:
        s, tol = pairing_defect(spec)
        if np.any(s > tol):
            raise PairingViolation(f"pairing defects {s} exceed tolerances {tol}")
    return spec


def gammas(spec: LyapunovSpectrum) -> np.ndarray:
    """Non-negative half gamma_d >= ... >= gamma_1."""
    return spec.exponents[: spec.dim // 2]


@dataclass(frozen=True)
class JensenProfile:
    E: float
    eps_grid: np.ndarray
    L_hat_d: np.ndarray
    stderr: np.ndarray
    flat_value: float
    flat_radius_fit: float
    post_slope_fit: float
    asymptote_offset: float
    breakpoints: np.ndarray
    slopes: np.ndarray


def dual_exterior_profile(v, E, eps_grid, k, alpha=GOLDEN, N=200_000, segments=8):
    """eps -> L^k of the dual cocycle at eps (sum of the top k exponents)."""
    vals, errs = [], []
    for e in eps_grid:
        dc = dual_cocycle(v, E, float(e), alpha)
        s = lyapunov_spectrum(dc.cocycle, N, segments)
        vals.append(float(np.sum(s.exponents[:k])))
        # a conservative error for the partial sum
        errs.append(float(np.sqrt(np.sum(s.stderr[:k] ** 2))))
    return np.array(vals), np.array(errs)


def jensen_profile(v, E: float, eps_grid, alpha=GOLDEN, N=200_000, segments=8) -> JensenProfile:
    """L^d of the dual cocycle along eps with its flat part, slope and large-eps offset."""
    eps_grid = np.asarray(eps_grid, dtype=float)
    d = v.degree
    vals, errs = dual_exterior_profile(v, E, eps_grid, d, alpha, N, segments)
    x = np.abs(eps_grid)
    order = np.argsort(x, kind="stable")
    x, y, e = x[order], vals[order], errs[order]
    fit = segmented_fit(x, y, max_segments=4, noise=3 * max(float(e.max()), 1e-7))
    if fit.breakpoints.size:
        r = float(fit.breakpoints[0])
        post = float(fit.slopes[1])
    else:
        r, post = 0.0, float(fit.slopes[0])
    flat = float(fit.intercept)
    last = x >= (fit.breakpoints[-1] if fit.breakpoints.size else x[0])
    offset = float(np.mean(y[last] - TWO_PI * x[last]))
    return JensenProfile(
        float(np.real(E)), eps_grid, vals, errs, flat, r, post, offset, fit.breakpoints, fit.slopes
    )


def jensen_inner_flatness(v, E, k: int, eps_grid, alpha=GOLDEN, N=200_000, segments=8) -> float:
    """max over eps_grid of |L^k_eps - L^k_0| for the dual cocycle."""
    eps_grid = np.asarray(eps_grid, dtype=float)
    grid = np.concatenate([[0.0], eps_grid])
    vals, _ = dual_exterior_profile(v, E, grid, k, alpha, N, segments)
    return float(np.max(np.abs(vals[1:] - vals[0])))


def haro_puig_check(v, E: float, alpha=GOLDEN, N=400_000, segments=8) -> float:
    """|L(E) - (L^d_0 + ln|v_d|)|."""
    d = v.degree
    L = lyapunov_spectrum(schrodinger_cocycle(v, E, alpha), N, segments, k=1).exponents[0]
    s = lyapunov_spectrum(dual_cocycle(v, E, 0.0, alpha).cocycle, N, segments)
    return float(abs(L - (np.sum(s.exponents[:d]) + math.log(abs(v.coeff(d))))))


@dataclass(frozen=True)
class DominationResult:
    dominated: bool
    margin: float
    horizon: int
    worst_theta: float
    slopes: np.ndarray


def growth_logs(dc: DualCocycle, thetas, horizon: int, checkpoints: int = 16, renorm: int = 5):
    """Cumulative log|R_jj| of the forward products A_n(theta) at checkpoints n."""
    comp = dc.cocycle.companion
    m = comp.row0.size
    thetas = np.asarray(thetas, dtype=float)
    Q = np.broadcast_to(np.eye(m, dtype=complex), (thetas.size, m, m)).copy()
    logs = np.zeros((thetas.size, m))
    block = max(1, horizon // checkpoints)
    ns, out = [], []
    n = 0
    while n + block <= horizon:
        start = np.mod(thetas + np.mod(n * dc.alpha, 1.0), 1.0)
        Q, lg = K.companion_frames(
            comp.row0, comp.index, comp.fcoeffs, dc.alpha, start + 1j * 0.0, block, renorm,
            K.OP_FORWARD, Q,
        )
        logs = logs + lg
        n += block
        ns.append(n)
        out.append(logs.copy())
    return np.array(ns), np.array(out)


def domination_check(dc: DualCocycle, k: int, horizon: int = 4000, theta_samples: int = 64, margin=0.01):
    """Finite-horizon test of k-domination.

    The gap log sigma_k - log sigma_{k+1} of A_n(theta) is tracked through the
    QR diagonal; its least-squares growth rate in n must exceed ``margin``
    at every sampled theta.
    """
    m = dc.cocycle.dim
    if not 1 <= k <= m - 1:
        raise ValueError(f"k must lie in 1..{m - 1}")
    thetas = (np.arange(theta_samples) + 0.5) / theta_samples
    ns, logs = growth_logs(dc, thetas, horizon)
    # the QR diagonal is ordered by construction; the k-th gap is R_kk vs R_{k+1,k+1}
    gap = logs[:, :, k - 1] - logs[:, :, k]
    slopes = np.array([np.polyfit(ns, gap[:, i], 1)[0] for i in range(theta_samples)])
    i = int(np.argmin(slopes))
    return DominationResult(bool(slopes[i] > margin), float(slopes[i]), int(ns[-1]), float(thetas[i]), slopes)
