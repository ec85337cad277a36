"""Two-dimensional center of the dual cocycle and its (phi, C) normalization.

For a type I energy the dual cocycle splits as E_s + E_c + E_u with a
two-dimensional center. A basis (u, v) of E_c with u*Sv = 1 and u, v
S-isotropic turns the restricted cocycle into e^{2 pi i phi(theta)} C(theta)
with C real of determinant one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import _kernels as K
from ..dual import DualCocycle, domination_check, dual_lyapunov_spectrum
from ..errors import BranchDiscontinuity, CenterDegenerate, SplittingDegenerate
from ..fourier import torus_grid

TWO_PI = 2.0 * math.pi
J = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
ANGLE_FLOOR = 1e-4
C_FLOOR = 1e-8
MAX_HORIZON = 10_000
MIN_HORIZON = 64
RENORM = 5


@dataclass(frozen=True)
class CenterSubspaces:
    """Orthonormal bases of E_c(theta), shape (n, 2d, 2).

    ``angles`` holds the smallest principal angle between the forward and
    backward fast directions at each theta (NaN when d = 1).
    """

    thetas: np.ndarray
    bases: np.ndarray
    angles: np.ndarray
    horizon: int
    margin: float


@dataclass(frozen=True)
class CenterFrame:
    """Symplectically normalized center frame on a uniform grid.

    ``u_basis``/``v_basis`` are the columns of the normalized frame with
    u*Sv = 1 and u*Su = v*Sv = 0. ``c_values`` is u*Sv for the canonical
    (unnormalized) basis. ``phi`` is continuous along the grid; when
    ``winding`` is non-zero it carries the linear part winding*theta/2.
    """

    dual: DualCocycle
    theta_grid: np.ndarray
    u_basis: np.ndarray
    v_basis: np.ndarray
    c_values: np.ndarray
    phi: np.ndarray
    C_values: np.ndarray
    M_values: np.ndarray
    winding: int
    strip_radius: float
    domination_margin: float
    horizon: int
    frame_residual: float
    omega_defect: float
    realness: float
    det_defect: float

    @property
    def alpha(self) -> float:
        return self.dual.alpha

    @property
    def E(self):
        return self.dual.E

    @property
    def mean_phi(self) -> float:
        return float(np.mean(self.phi))

    @property
    def frames(self) -> np.ndarray:
        return np.stack([self.u_basis, self.v_basis], axis=-1)


def _start_frame(m: int, k: int) -> np.ndarray:
    """A fixed generic orthonormal k-frame in C^m."""
    g = (math.sqrt(5.0) - 1.0) / 2.0
    r = np.arange(1, m + 1)[:, None]
    c = np.arange(1, k + 1)[None, :]
    Q, _ = np.linalg.qr(np.exp(TWO_PI * 1j * g * r * c) + np.eye(m, k))
    return Q


def _fast_directions(dc: DualCocycle, thetas, k, horizon, op):
    comp = dc.cocycle.companion
    m = comp.row0.size
    Q0 = np.broadcast_to(_start_frame(m, k), (thetas.size, m, k)).copy()
    Q, _ = K.companion_frames(
        comp.row0, comp.index, comp.fcoeffs, dc.alpha, thetas.astype(complex), horizon, RENORM, op, Q0
    )
    return Q


def spectral_margin(dc: DualCocycle, N: int = 200_000) -> tuple[float, np.ndarray]:
    """Gap between the center pair and the nearest hyperbolic exponents."""
    spec = dual_lyapunov_spectrum(dc, N, check=False)
    ex = spec.exponents
    d = dc.d
    if d == 1:
        return math.inf, ex
    return float(min(ex[d - 2] - ex[d - 1], ex[d] - ex[d + 1])), ex


def default_horizon(margin: float) -> int:
    if not np.isfinite(margin):
        return 0
    if margin <= 0:
        raise SplittingDegenerate(f"no spectral gap around the center (margin {margin})")
    return int(min(MAX_HORIZON, max(MIN_HORIZON, math.ceil(20.0 / margin))))


def center_subspace(
    dc: DualCocycle,
    grid_size: int = 2048,
    horizon: int | None = None,
    thetas=None,
    check: bool = True,
    margin: float | None = None,
) -> CenterSubspaces:
    """E_c(theta) = (forward slow subspace) intersected with (backward slow subspace).

    The forward fast directions are the top d-1 right singular vectors of
    A_n(theta), obtained by QR iteration with the adjoint product; the
    backward ones come from A_{-n}(theta) the same way. E_c is the orthogonal
    complement of their span, certified by principal angles above 1e-4.
    """
    d = dc.d
    m = 2 * d
    if thetas is None:
        thetas = torus_grid(grid_size)
    thetas = np.asarray(thetas, dtype=float)
    if d == 1:
        bases = np.broadcast_to(np.eye(2, dtype=complex), (thetas.size, 2, 2)).copy()
        return CenterSubspaces(thetas, bases, np.full(thetas.size, np.nan), 0, math.inf)
    if check:
        for k in (d - 1, d + 1):
            res = domination_check(dc, k)
            if not res.dominated:
                raise SplittingDegenerate(
                    f"cocycle is not {k}-dominated (margin {res.margin:.3g})", res.worst_theta
                )
    if margin is None:
        margin, _ = spectral_margin(dc)
    if horizon is None:
        horizon = default_horizon(margin)
    fwd = _fast_directions(dc, thetas, d - 1, horizon, K.OP_ADJOINT)
    bwd = _fast_directions(dc, thetas, d - 1, horizon, K.OP_INV_ADJ)
    cos = np.linalg.svd(np.conj(np.swapaxes(fwd, 1, 2)) @ bwd, compute_uv=False)
    angles = np.arccos(np.clip(cos.max(axis=1), 0.0, 1.0))
    bad = int(np.argmin(angles))
    if angles[bad] <= ANGLE_FLOOR:
        raise SplittingDegenerate(
            f"forward and backward fast directions collapse at theta={thetas[bad]:.6f}",
            float(thetas[bad]),
            angles[bad],
        )
    U, _, _ = np.linalg.svd(np.concatenate([fwd, bwd], axis=2), full_matrices=True)
    return CenterSubspaces(thetas, U[:, :, m - 2 :], angles, int(horizon), float(margin))


def canonical_basis(bases: np.ndarray, d: int) -> np.ndarray:
    """Basis of each center with rows d-1, d (the sites x_0, x_{-1}) equal to the identity.

    This fixes the gauge independently of the orthonormal basis returned by
    the extraction, so that frames at different theta (and different
    truncations) are directly comparable.
    """
    L = bases[:, d - 1 : d + 1, :]
    cond = np.linalg.cond(L)
    if np.any(~np.isfinite(cond)) or cond.max() > 1e10:
        raise CenterDegenerate("center projects degenerately onto the sites 0 and -1")
    return bases @ np.linalg.inv(L)


def _inv_sqrt_2x2(Y):
    """Principal inverse square roots of a stack of 2x2 matrices."""
    det = Y[:, 0, 0] * Y[:, 1, 1] - Y[:, 0, 1] * Y[:, 1, 0]
    s = np.sqrt(det)
    t = np.sqrt(Y[:, 0, 0] + Y[:, 1, 1] + 2 * s)
    R = (Y + s[:, None, None] * np.eye(2)) / t[:, None, None]
    return np.linalg.inv(R)


def symplectic_gauge(B: np.ndarray, S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Right-multiply B so that F*SF = J. Returns (F, c) with c = b1*S b2 before normalizing."""
    G = np.conj(np.swapaxes(B, 1, 2)) @ S @ B
    c = G[:, 0, 1]
    if np.min(np.abs(c)) <= C_FLOOR:
        i = int(np.argmin(np.abs(c)))
        raise CenterDegenerate(f"u*Sv vanishes at grid index {i}")
    if np.mean(c.real) < 0:
        B = B.copy()
        B[:, :, 1] *= -1
        G = np.conj(np.swapaxes(B, 1, 2)) @ S @ B
    Y = -J @ G
    F = B @ _inv_sqrt_2x2(Y)
    return F, c


def _gauged_frames(dc, thetas, subspaces_kw):
    sub = center_subspace(dc, thetas=thetas, **subspaces_kw)
    B = canonical_basis(sub.bases, dc.d)
    F, c = symplectic_gauge(B, dc.symplectic_form)
    return sub, F, c


def unwrap_phase(det_vals) -> tuple[np.ndarray, int]:
    """Continuous arg of det M along the grid, with the jump guard and winding."""
    a = np.angle(det_vals)
    closed = np.concatenate([a, a[:1]])
    jumps = np.abs(np.angle(np.exp(1j * np.diff(closed))))
    if jumps.max() > 0.5 * math.pi:
        i = int(np.argmax(jumps))
        raise BranchDiscontinuity(f"arg det M jumps by {jumps[i]:.3f} rad at grid index {i}")
    un = np.unwrap(closed)
    winding = int(round((un[-1] - un[0]) / TWO_PI))
    return un[:-1], winding


def schrodinger_strip(exponents, v) -> float:
    """L(E)/2 pi from the dual spectrum via L = L^d + ln|v_d|."""
    d = v.degree
    L = float(np.sum(exponents[:d]) + math.log(abs(v.coeff(d))))
    return max(L, 0.0) / TWO_PI


def symplectic_normalize(
    dc: DualCocycle,
    grid_size: int = 2048,
    horizon: int | None = None,
    check: bool = True,
    spectrum_N: int = 200_000,
) -> CenterFrame:
    """Center frame with (phi, C) on a uniform grid.

    M(theta) = -J F(theta + alpha)^* S A(theta) F(theta) is the restricted
    cocycle in the normalized frame; det M = e^{4 pi i phi} and
    C = M e^{-2 pi i phi}. The frame at theta + alpha is extracted directly
    rather than interpolated.
    """
    thetas = torus_grid(grid_size)
    margin, ex = spectral_margin(dc, spectrum_N)
    if horizon is None:
        horizon = default_horizon(margin)
    kw = dict(horizon=horizon, check=check, margin=margin)
    sub, F, c = _gauged_frames(dc, thetas, kw)
    _, F1, _ = _gauged_frames(dc, np.mod(thetas + dc.alpha, 1.0), dict(kw, check=False))
    S = dc.symplectic_form
    A = dc.cocycle(thetas)
    AF = A @ F
    M = -J @ np.conj(np.swapaxes(F1, 1, 2)) @ S @ AF
    scale = np.linalg.norm(AF, axis=(1, 2))
    residual = float(np.max(np.linalg.norm(AF - F1 @ M, axis=(1, 2)) / scale))
    omega = float(np.max(np.abs(np.conj(np.swapaxes(M, 1, 2)) @ J @ M - J)))
    det = np.linalg.det(M)
    arg, winding = unwrap_phase(det)
    phi = arg / (4 * math.pi)
    Cc = M * np.exp(-2j * math.pi * phi)[:, None, None]
    realness = float(np.max(np.abs(Cc.imag)))
    C = Cc.real
    det_defect = float(np.max(np.abs(np.linalg.det(C) - 1.0)))
    return CenterFrame(
        dual=dc,
        theta_grid=thetas,
        u_basis=F[:, :, 0],
        v_basis=F[:, :, 1],
        c_values=c,
        phi=phi,
        C_values=C,
        M_values=M,
        winding=winding,
        strip_radius=schrodinger_strip(ex, dc.potential),
        domination_margin=float(margin),
        horizon=int(sub.horizon),
        frame_residual=residual,
        omega_defect=omega,
        realness=realness,
        det_defect=det_defect,
    )


def center_frame(v, E: float, alpha: float, grid_size: int = 2048, horizon=None, check=True) -> CenterFrame:
    from ..dual import dual_cocycle

    return symplectic_normalize(dual_cocycle(v, E, 0.0, alpha), grid_size, horizon, check)


def center_exponents(v, E, eps: float, alpha: float, N: int = 400_000, segments: int = 8):
    """Lyapunov exponents of the restricted center cocycle at eps.

    Under domination the center carries the middle pair L_d >= L_{d+1} of
    the full spectrum, so the restriction needs no separate frame.
    """
    from ..cocycle import lyapunov_spectrum
    from ..dual import dual_cocycle

    dc = dual_cocycle(v, E, eps, alpha)
    spec = lyapunov_spectrum(dc.cocycle, N, segments)
    d = dc.d
    ex, se = spec.exponents[d - 1 : d + 1], spec.stderr[d - 1 : d + 1]
    return ex, se


def center_L1(v, E, eps: float, alpha: float, N: int = 400_000) -> float:
    """L_1 of C(. + i eps): half the spread of the center pair (the phase removes the mean)."""
    ex, _ = center_exponents(v, E, eps, alpha, N)
    return float(0.5 * (ex[0] - ex[1]))


def center_invariance_check(frame: CenterFrame, eps_list, N: int = 400_000) -> float:
    """max over eps of |L_1(C_eps) - L_1(C_0)| for |eps| inside the strip."""
    h = frame.strip_radius
    eps_list = np.atleast_1d(np.asarray(eps_list, dtype=float))
    if np.any(np.abs(eps_list) >= h):
        raise ValueError(f"every |eps| must lie below the strip radius {h:.6f}")
    v, E, alpha = frame.dual.potential, frame.E, frame.alpha
    base = center_L1(v, E, 0.0, alpha, N)
    return float(max((abs(center_L1(v, E, e, alpha, N) - base) for e in eps_list), default=0.0))
