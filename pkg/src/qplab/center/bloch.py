"""Cohomological equation, Diophantine windows and Bloch-wave reconstruction.

A reducible center gives a section s(theta) of the dual cocycle with
A(theta) s(theta) = e^{2 pi i r} s(theta + alpha). The Fourier coefficients
of its site-0 component are then an eigenfunction of the Schrodinger
operator H_{v, alpha, r} at the energy E.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from ..errors import ConjugationStalled, SmallDivisorOverflow, WindowRejected
from ..fourier import coefficients, modes, shift
from ..potential import TrigPotential
from ..schrodinger.localization import decay_rate
from .frame import CenterFrame, center_L1
from .rotation import center_rotation

DIVISOR_FLOOR = 1e-12
MODE_TOL = 1e-12
CONJ_THRESHOLD = 1e-6


@dataclass(frozen=True)
class DiophantineWindow:
    """Set of x with ||2x + k alpha|| >= gamma / (|k| + 1)^tau for all k."""

    tau: float = 2.0
    gamma: float = 1e-4

    def __post_init__(self):
        if not self.tau > 1:
            raise ValueError("tau must exceed 1")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")

    def margin(self, x: float, alpha: float, K_max: int = 10_000) -> tuple[float, int]:
        """Smallest ratio ||2x + k alpha|| (|k|+1)^tau / gamma over |k| <= K_max, and its k."""
        k = np.arange(-K_max, K_max + 1)
        y = np.mod(2.0 * x + np.mod(k * alpha, 1.0), 1.0)
        dist = np.minimum(y, 1.0 - y)
        ratio = dist * (np.abs(k) + 1.0) ** self.tau / self.gamma
        i = int(np.argmin(ratio))
        return float(ratio[i]), int(k[i])

    def contains(self, x: float, alpha: float, K_max: int = 10_000) -> bool:
        return self.margin(x, alpha, K_max)[0] >= 1.0


@dataclass(frozen=True)
class CohomologySolution:
    psi: np.ndarray
    mean: float
    residual: float
    retained_modes: int
    min_divisor: float


def cohomological_solve(phi, alpha: float, h: float | None = None, beta: float | None = None,
                        tol: float = MODE_TOL) -> CohomologySolution:
    """psi with psi(theta + alpha) - psi(theta) = phi(theta) - mean(phi) on a uniform grid.

    Modes with max(|phi_k|, |phi_-k|) < ``tol`` are dropped; a kept mode
    whose divisor |e^{2 pi i k alpha} - 1| is below 1e-12 raises
    SmallDivisorOverflow.
    """
    if h is not None and beta is not None and beta / (2 * math.pi) >= h:
        raise ValueError(f"beta/2pi = {beta / (2 * math.pi):.4g} is not below the strip width {h:.4g}")
    phi = np.asarray(phi, dtype=float)
    n = phi.size
    c = coefficients(phi)
    k = modes(n)
    size = np.maximum(np.abs(c), np.abs(c[-np.arange(n) % n]))
    keep = (size >= tol) & (k != 0)
    if n % 2 == 0:
        keep[n // 2] = False
    div = np.exp(2j * math.pi * k * alpha) - 1.0
    dmin = float(np.min(np.abs(div[keep]))) if keep.any() else math.inf
    if dmin < DIVISOR_FLOOR:
        bad = k[keep][np.argmin(np.abs(div[keep]))]
        raise SmallDivisorOverflow(f"divisor at k={bad} is {dmin:.3e}")
    ph = np.zeros(n, dtype=complex)
    ph[keep] = c[keep] / div[keep]
    psi = np.fft.ifft(ph * n).real
    resid = shift(psi, alpha) - psi - (phi - c[0].real)
    return CohomologySolution(psi, float(c[0].real), float(np.max(np.abs(resid))), int(keep.sum()), dmin)


@dataclass(frozen=True)
class BlochWave:
    """Unit-norm two-sided sequence u(n), n in ``indices``, with its eigen-equation residual."""

    E: float
    phase: float
    indices: np.ndarray
    amplitudes: np.ndarray
    residual: float

    @property
    def decay_rate(self) -> float:
        return decay_rate(self.amplitudes)[0]


@dataclass(frozen=True)
class BlochPair:
    u: BlochWave
    v: BlochWave
    rho_hat: float
    multiplier_phase: float
    conjugation_residual: float
    cohomology_residual: float
    L1: float
    stalled: bool


def schrodinger_residual(v: TrigPotential, alpha, phase, E, u, indices) -> float:
    """||(H_{v,alpha,phase} - E) u|| / ||u|| over interior sites."""
    pot = v(np.mod(phase + np.mod(indices * alpha, 1.0), 1.0)).real
    Hu = u[2:] + u[:-2] + (pot[1:-1] - E) * u[1:-1]
    return float(np.linalg.norm(Hu) / np.linalg.norm(u))


def _block_toeplitz(Ck, Kw, alpha):
    """Matrix of w -> D^{-1} sum_j C_{k-j} w_j on modes |k| <= Kw."""
    ks = np.arange(-Kw, Kw + 1)
    size = ks.size
    T = np.zeros((2 * size, 2 * size), dtype=complex)
    for a, k in enumerate(ks):
        for b, j in enumerate(ks):
            blk = Ck.get(k - j)
            if blk is not None:
                T[2 * a : 2 * a + 2, 2 * b : 2 * b + 2] = blk * np.exp(-2j * math.pi * k * alpha)
    return T, ks


def _fourier_blocks(C_values, tol=1e-15):
    c = coefficients(C_values)
    k = modes(C_values.shape[0])
    top = np.max(np.abs(c))
    return {int(kk): c[i] for i, kk in enumerate(k) if np.max(np.abs(c[i])) > tol * top and abs(kk) < k.size // 2}


def rotation_eigenvector(frame: CenterFrame, target: float, budget: int = 64):
    """w with C(theta) w(theta) = e^{2 pi i x} w(theta + alpha), x closest to ``target``.

    Solved as a block-Toeplitz eigenproblem on Fourier modes |k| <= budget;
    among eigenvectors whose mass sits well inside the mode window the one
    with multiplier nearest e^{2 pi i target} is returned, with its grid
    samples and the achieved conjugation residual.
    """
    Ck = _fourier_blocks(frame.C_values)
    T, ks = _block_toeplitz(Ck, budget, frame.alpha)
    mu, W = linalg.eig(T)
    W = W / np.linalg.norm(W, axis=0)
    mass = np.abs(W.reshape(ks.size, 2, -1)) ** 2
    mass = mass.sum(axis=1)
    outer = mass[np.abs(ks) > budget // 2].sum(axis=0)
    x = np.angle(mu) / (2 * math.pi)
    dist = np.abs((x - target + 0.5) % 1.0 - 0.5)
    score = np.where((outer < 1e-20) & (np.abs(np.abs(mu) - 1) < 1e-8), dist, np.inf)
    i = int(np.argmin(score))
    if not np.isfinite(score[i]):
        i = int(np.argmin(outer + dist))
    n = frame.theta_grid.size
    hat = np.zeros((n, 2), dtype=complex)
    hat[np.mod(ks, n)] = W[:, i].reshape(ks.size, 2)
    w = np.fft.ifft(hat * n, axis=0)
    m = float(x[i] % 1.0)
    lhs = np.einsum("nij,nj->ni", frame.C_values, w)
    rhs = np.exp(2j * math.pi * m) * shift(w, frame.alpha)
    resid = float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(w)))
    return w, m, resid


def _wave(frame, w, psi, phase):
    s = np.einsum("nij,nj->ni", frame.frames, w) * np.exp(2j * math.pi * psi)[:, None]
    g = s[:, frame.dual.d - 1]
    n = g.size
    k = modes(n)
    order = np.argsort(k)
    amp = (np.fft.fft(g) / n)[order]
    amp = amp / np.linalg.norm(amp)
    idx = k[order]
    v = frame.dual.potential
    E = float(np.real(frame.E))
    res = schrodinger_residual(v, frame.alpha, phase, E, amp, idx)
    return BlochWave(E, phase, idx, amp, res)


def bloch_reconstruct(frame: CenterFrame, psi=None, alpha=None, window: DiophantineWindow = DiophantineWindow(),
                      conjugation_budget: int = 64, strict: bool = False, L1: float | None = None) -> BlochPair:
    """Eigenfunctions u_E at phase rho_1(E) and v_E at phase rho_2(E).

    C is reduced to a rotation through the eigenproblem of
    ``rotation_eigenvector``; the phase phi is removed with ``psi`` (solved
    here when not given). ``u_E`` is the Fourier transform of the site-0
    component of F w e^{2 pi i psi}; ``v_E`` uses the conjugate eigenvector.
    When the conjugation residual stays above 1e-6 the pair is still
    returned with ``stalled`` set (or ConjugationStalled raised if ``strict``).
    """
    alpha = frame.alpha if alpha is None else alpha
    if frame.winding:
        raise ValueError("phase with non-zero winding has no periodic cohomological solution")
    rot = center_rotation(frame)
    ok = window.contains(rot.rho_hat, alpha)
    if not ok:
        r, k = window.margin(rot.rho_hat, alpha)
        raise WindowRejected(f"rho_hat={rot.rho_hat:.8f} fails the window at k={k} (ratio {r:.3g})")
    if L1 is None:
        L1 = center_L1(frame.dual.potential, frame.E, 0.0, alpha)
    if L1 >= 1e-2:
        raise WindowRejected(f"center is not subcritical: L1(C) = {L1:.3g}")
    coh = None
    if psi is None:
        coh = cohomological_solve(frame.phi, alpha)
        psi = coh.psi
    w, x, cres = rotation_eigenvector(frame, rot.rho_hat, conjugation_budget)
    mean = frame.mean_phi
    u = _wave(frame, w, psi, (mean + x) % 1.0)
    v = _wave(frame, np.conj(w), psi, (mean - x) % 1.0)
    stalled = cres > CONJ_THRESHOLD
    pair = BlochPair(u, v, rot.rho_hat, x, cres, coh.residual if coh else float("nan"), float(L1), stalled)
    if stalled and strict:
        raise ConjugationStalled(f"conjugation residual {cres:.3e} above {CONJ_THRESHOLD}", cres, pair)
    return pair


def direct_eigenvector(v, alpha, phase, E, half: int = 2000):
    """Eigenpair of H_{v,alpha,phase} on sites -half..half with eigenvalue nearest E."""
    idx = np.arange(-half, half + 1)
    pot = v(np.mod(phase + np.mod(idx * alpha, 1.0), 1.0)).real
    w, U = linalg.eigh_tridiagonal(pot, np.ones(idx.size - 1), select="v",
                                   select_range=(E - 1e-2, E + 1e-2))
    if w.size == 0:
        w, U = linalg.eigh_tridiagonal(pot, np.ones(idx.size - 1))
    j = int(np.argmin(np.abs(w - E)))
    return float(w[j]), idx, U[:, j]


def cosine_similarity(wave: BlochWave, idx, vec) -> float:
    """|<u, vec>| / (|u| |vec|) after aligning the index ranges."""
    a = np.zeros(idx.size, dtype=complex)
    pos = {int(n): i for i, n in enumerate(idx)}
    for n, amp in zip(wave.indices, wave.amplitudes):
        i = pos.get(int(n))
        if i is not None:
            a[i] = amp
    return float(abs(np.vdot(a, vec)) / (np.linalg.norm(a) * np.linalg.norm(vec)))


def reflected(wave: BlochWave) -> np.ndarray:
    """Amplitudes n -> u(-n) on the index set of ``wave`` (zero where -n is missing)."""
    pos = {int(n): i for i, n in enumerate(wave.indices)}
    out = np.zeros_like(wave.amplitudes)
    for i, n in enumerate(wave.indices):
        j = pos.get(-int(n))
        if j is not None:
            out[i] = wave.amplitudes[j]
    return out


def reflection_defect(u: BlochWave, v: BlochWave) -> float:
    """min over unimodular c of |u - c v(-.)| for unit-norm u, v."""
    r = reflected(v)
    ov = np.vdot(r, u.amplitudes)
    c = ov / abs(ov) if abs(ov) > 0 else 1.0
    return float(np.linalg.norm(u.amplitudes - c * r))
