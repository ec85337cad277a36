"""One-frequency analytic cocycles: QR products, Lyapunov spectra, rotation numbers."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import _kernels as K
from .errors import NonRealSampler, NotHomotopicToIdentity, SingularSample, StripExceeded

SILVER = math.sqrt(2.0) - 1.0
CHUNK = 1 << 14
MAX_HORIZON = 10**8


@dataclass(frozen=True)
class Companion:
    """First row ``row0 + f(z) e_index`` over a shifted identity, f trigonometric."""

    row0: np.ndarray
    index: int
    fcoeffs: np.ndarray

    def shifted(self, eps: float) -> "Companion":
        n = self.fcoeffs.size // 2
        k = np.arange(-n, n + 1)
        return Companion(self.row0, self.index, self.fcoeffs * np.exp(-2 * np.pi * k * eps))

    def rows(self, z):
        z = np.asarray(z, dtype=complex)
        n = self.fcoeffs.size // 2
        w = np.exp(2j * np.pi * z)
        f = np.full(z.shape, self.fcoeffs[n], dtype=complex)
        for k in range(1, n + 1):
            f = f + self.fcoeffs[n + k] * w**k + self.fcoeffs[n - k] * w ** (-k)
        rows = np.broadcast_to(self.row0, z.shape + self.row0.shape).copy()
        rows[..., self.index] += f
        return rows

    def matrices(self, z):
        r = self.rows(z)
        m = self.row0.size
        out = np.zeros(r.shape[:-1] + (m, m), dtype=complex)
        out[..., 0, :] = r
        idx = np.arange(1, m)
        out[..., idx, idx - 1] = 1.0
        return out


@dataclass(frozen=True)
class CocycleMap:
    """Cocycle (alpha, A) with A given by a vectorised ``sampler``.

    ``sampler(z)`` maps an array of torus points (complex allowed) to an
    array of shape ``z.shape + (dim, dim)``. ``companion`` optionally
    exposes the structure used by the fast kernels.
    """

    alpha: float
    dim: int
    sampler: Callable
    strip_radius: float = math.inf
    companion: Optional[Companion] = field(default=None, compare=False)
    name: str = ""

    def __call__(self, z):
        return self.sampler(np.asarray(z))


def companion_cocycle(alpha, comp: Companion, strip_radius=math.inf, name="") -> CocycleMap:
    comp = Companion(
        np.ascontiguousarray(comp.row0, dtype=complex),
        int(comp.index),
        np.ascontiguousarray(comp.fcoeffs, dtype=complex),
    )
    return CocycleMap(float(alpha), comp.row0.size, comp.matrices, strip_radius, comp, name)


def constant_cocycle(A, alpha=SILVER) -> CocycleMap:
    A = np.asarray(A, dtype=complex)

    def sampler(z):
        z = np.asarray(z)
        return np.broadcast_to(A, z.shape + A.shape).copy()

    return CocycleMap(float(alpha), A.shape[0], sampler, math.inf, None, "constant")


def complexify(c: CocycleMap, eps: float) -> CocycleMap:
    """Cocycle z -> A(z + i eps)."""
    if abs(eps) >= c.strip_radius:
        raise StripExceeded(f"|eps|={abs(eps)} exceeds strip radius {c.strip_radius}")
    if eps == 0:
        return c
    base = c.sampler

    def sampler(z):
        return base(np.asarray(z) + 1j * eps)

    comp = c.companion.shifted(eps) if c.companion is not None else None
    return replace(c, sampler=sampler, strip_radius=c.strip_radius - abs(eps), companion=comp)


@dataclass(frozen=True)
class LyapunovSpectrum:
    exponents: np.ndarray
    horizon: int
    theta_samples: int
    stderr: np.ndarray

    @property
    def dim(self) -> int:
        return self.exponents.size


def exterior_sum(spec: LyapunovSpectrum, k: int) -> float:
    """L^k = L_1 + ... + L_k."""
    if not 1 <= k <= spec.dim:
        raise ValueError(f"k must lie in 1..{spec.dim}")
    return float(np.sum(spec.exponents[:k]))


def default_renorm(c: CocycleMap, theta0=0.0) -> int:
    """QR cadence: 10 for m <= 4, 5 otherwise, reduced when steps are large."""
    base = 10 if c.dim <= 4 else 5
    z = theta0 + np.arange(64) / 64.0
    mats = c.sampler(z)
    sv = np.linalg.svd(mats, compute_uv=False)
    spread = float(np.max(np.log(sv[:, 0]) - np.log(np.maximum(sv[:, -1], 1e-300))))
    # keep the per-block singular-value spread below ~e^20 so no direction is lost
    if spread > 0:
        base = min(base, max(1, int(20.0 / spread)))
    return base


def _advance(c: CocycleMap, theta0, N, Q, logs, renorm):
    if c.companion is not None:
        comp = c.companion
        ok = K.companion_product(
            comp.row0, comp.index, comp.fcoeffs, c.alpha, complex(theta0), int(N), renorm, Q, logs
        )
        if not ok:
            raise SingularSample("QR breakdown in companion product")
        return
    steps = 0
    for start in range(0, N, CHUNK):
        n = np.arange(start, min(N, start + CHUNK))
        z = theta0 + np.mod(n * c.alpha, 1.0)
        mats = np.ascontiguousarray(c.sampler(z), dtype=complex)
        if not np.all(np.isfinite(mats)):
            raise SingularSample("non-finite sampled matrix")
        steps = K.generic_chunk(mats, Q, logs, renorm, steps)
        if steps < 0:
            raise SingularSample("QR breakdown: sampled matrix numerically singular")
    if steps and not K._mgs(Q, logs):
        raise SingularSample("QR breakdown: sampled matrix numerically singular")


def product_qr(
    c: CocycleMap,
    theta0,
    N: int,
    renorm_every: int | None = None,
    k: int | None = None,
    warmup: int | None = None,
):
    """Average log growth of the first ``k`` QR directions over ``N`` steps.

    Returns an array of k values (1/N) sum log|R_jj| for the product
    A(x + (N-1) alpha) ... A(x), x = theta0 + warmup * alpha. The ``warmup``
    steps (default min(N, 1000)) only align the frame and are not counted,
    which removes the O(1/N) transient from the initial frame.
    """
    if N < 1:
        raise ValueError("N must be positive")
    k = c.dim if k is None else int(k)
    renorm = default_renorm(c, np.real(theta0)) if renorm_every is None else int(renorm_every)
    if renorm < 1 or N < renorm:
        raise ValueError("need N >= renorm_every >= 1")
    warmup = min(N, 1000) if warmup is None else int(warmup)
    Q = np.eye(c.dim, k, dtype=complex)
    logs = np.zeros(k)
    if warmup:
        _advance(c, theta0, warmup, Q, logs, renorm)
        logs[:] = 0.0
        theta0 = np.real(theta0) + (warmup * c.alpha) % 1.0 + 1j * np.imag(theta0)
    _advance(c, theta0, N, Q, logs, renorm)
    return logs / N


def segment_starts(segments: int) -> np.ndarray:
    """Kronecker low-discrepancy base points."""
    return np.mod(np.arange(segments) * SILVER + 0.5 / segments, 1.0)


def lyapunov_spectrum(
    c: CocycleMap,
    N: int = 200_000,
    segments: int = 8,
    renorm_every: int | None = None,
    k: int | None = None,
    jobs: int = 1,
) -> LyapunovSpectrum:
    """Lyapunov exponents from ``segments`` orbit pieces of N // segments steps.

    The spread across segments gives ``stderr`` (standard error of the mean).
    """
    if segments < 4:
        raise ValueError("segments must be >= 4")
    n_seg = max(1, N // segments)
    renorm = default_renorm(c) if renorm_every is None else renorm_every
    renorm = min(renorm, n_seg)
    starts = segment_starts(segments)

    def one(t):
        return product_qr(c, t, n_seg, renorm, k)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            rows = list(pool.map(one, starts))
    else:
        rows = [one(t) for t in starts]
    rows = np.array(rows)
    ex = rows.mean(axis=0)
    err = rows.std(axis=0, ddof=1) / math.sqrt(segments)
    order = np.argsort(-ex, kind="stable")
    return LyapunovSpectrum(ex[order], n_seg * segments, segments, err[order])


def lyapunov_adaptive(c: CocycleMap, tol: float = 1e-4, N0: int = 20_000, segments: int = 8, k=None):
    """Double the horizon until successive spectra agree within ``tol``."""
    N = N0
    prev = lyapunov_spectrum(c, N, segments, k=k)
    while N < MAX_HORIZON:
        N *= 2
        cur = lyapunov_spectrum(c, N, segments, k=k)
        if np.max(np.abs(cur.exponents - prev.exponents)) < tol:
            return cur
        prev = cur
    return prev


# -- rotation numbers --------------------------------------------------------


@dataclass(frozen=True)
class RotationResult:
    """``lift_drift`` compares the half-horizon and full-horizon averages."""

    rho: float
    lift_drift: float
    horizon: int
    winding_correction: int = 0


def _is_schrodinger(c: CocycleMap) -> bool:
    comp = c.companion
    return (
        comp is not None
        and c.dim == 2
        and comp.index == 0
        and abs(comp.row0[1] + 1) == 0
        and np.allclose(comp.fcoeffs, np.conj(comp.fcoeffs[::-1]), atol=1e-13)
        and abs(comp.row0[0].imag) < 1e-13
    )


def _check_real(c: CocycleMap, grid: int = 256):
    z = np.arange(grid) / grid
    mats = c.sampler(z)
    if np.iscomplexobj(mats) and np.max(np.abs(mats.imag)) > 1e-10 * max(1.0, np.max(np.abs(mats))):
        raise NonRealSampler("sampler is not real on the real axis")
    det = np.linalg.det(mats.real)
    if np.max(np.abs(det - 1)) > 1e-8:
        raise NonRealSampler("sampler is not SL(2,R)-valued")
    return mats.real


def polar_angle_lift(c: CocycleMap, grid: int = 4096):
    """Continuous lift of the polar angle atan2(c - b, a + d) over one period.

    Returns (theta grid, unwrapped angles, winding). A non-zero winding means
    the cocycle is not homotopic to the identity.
    """
    t = np.arange(grid + 1) / grid
    m = c.sampler(t).real
    phi = np.unwrap(np.arctan2(m[:, 1, 0] - m[:, 0, 1], m[:, 0, 0] + m[:, 1, 1]))
    winding = int(round((phi[-1] - phi[0]) / (2 * np.pi)))
    return t, phi, winding


def rotation_number(
    c: CocycleMap, N: int = 1_000_000, theta0: float = 0.0, allow_winding: bool = False
) -> RotationResult:
    """Fibered rotation number of a real SL(2,R) cocycle homotopic to the identity.

    The projective angle of e_1 is iterated along the orbit of ``theta0`` and
    the lifted increments are averaged. ``rho`` is in turns, reduced mod 1.
    With ``allow_winding`` a cocycle of non-zero degree is accepted; the lift
    then uses the fundamental domain [0, 1) and the degree is reported as
    ``winding_correction``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    _check_real(c)
    half = N // 2
    winding = 0
    if _is_schrodinger(c):
        comp = c.companion
        a0 = float(comp.row0[0].real)
        t1, x, y = K.schrodinger_lift(a0, comp.fcoeffs, c.alpha, float(theta0), half, 1.0, 0.0)
        t2, _, _ = K.schrodinger_lift(
            a0, comp.fcoeffs, c.alpha, float((theta0 + half * c.alpha) % 1.0), N - half, x, y
        )
        total_half, total = t1, t1 + t2
    else:
        t, phi_grid, winding = polar_angle_lift(c)
        if winding != 0 and not allow_winding:
            raise NotHomotopicToIdentity(
                f"polar angle winds {winding} times around the circle", winding
            )
        total = 0.0
        total_half = 0.0
        x, y = 1.0, 0.0
        worst = 0.0
        for start in range(0, N, CHUNK):
            n = np.arange(start, min(N, start + CHUNK))
            z = np.mod(theta0 + np.mod(n * c.alpha, 1.0), 1.0)
            mats = np.ascontiguousarray(c.sampler(z).real)
            raw = np.arctan2(mats[:, 1, 0] - mats[:, 0, 1], mats[:, 0, 0] + mats[:, 1, 1])
            ref = np.interp(z, t, phi_grid)
            phis = ref + np.mod(raw - ref + np.pi, 2 * np.pi) - np.pi
            if start < half < start + n.size:
                cut = half - start
                s1, x, y, w1 = K.polar_lift_chunk(mats[:cut], phis[:cut], x, y)
                total += s1
                total_half = total
                s, x, y, w = K.polar_lift_chunk(mats[cut:], phis[cut:], x, y)
                w = max(w, w1)
            else:
                s, x, y, w = K.polar_lift_chunk(mats, phis, x, y)
            total += s
            if start + n.size == half:
                total_half = total
            worst = max(worst, w)
        if worst >= 0.5 * np.pi:
            raise NonRealSampler("positive part moved a direction by a quarter turn or more")
    rho = total / (2 * np.pi * N)
    drift = abs(rho - total_half / (2 * np.pi * half)) if half else 0.0
    return RotationResult(float(rho % 1.0), float(drift), int(N), int(winding))
