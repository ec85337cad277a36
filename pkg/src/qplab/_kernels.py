"""Numba kernels for cocycle products.

Companion cocycles have the shape

    A(z) = [[r_0 + f(z) e_j],
            [ I_{m-1}   0  ]]

where only the first row depends on the base point, and only through a single
entry f(z) = sum_k c_k exp(2 pi i k z). The kernels evaluate f inline so that
long orbits need no sample storage.
"""

import numpy as np
from numba import njit

TWO_PI = 2.0 * np.pi

# operator codes for ``companion_frames``
OP_FORWARD = 0   # A
OP_INVERSE = 1   # A^{-1}
OP_ADJOINT = 2   # A^*
OP_INV_ADJ = 3   # A^{-*}


@njit(cache=True, nogil=True)
def _trig_eval(coeffs, z):
    K = coeffs.shape[0] // 2
    w = np.exp(1j * TWO_PI * z)
    winv = 1.0 / w
    acc = coeffs[K]
    wk = 1.0 + 0j
    wm = 1.0 + 0j
    for k in range(1, K + 1):
        wk *= w
        wm *= winv
        acc += coeffs[K + k] * wk + coeffs[K - k] * wm
    return acc


@njit(cache=True, nogil=True)
def _mgs(Q, logs):
    """In-place QR of the columns of Q (two-pass Gram-Schmidt); adds log|R_jj|."""
    m, k = Q.shape
    for j in range(k):
        for _ in range(2):
            for i in range(j):
                r = 0j
                for t in range(m):
                    r += np.conj(Q[t, i]) * Q[t, j]
                for t in range(m):
                    Q[t, j] -= r * Q[t, i]
        nrm = 0.0
        for t in range(m):
            nrm += Q[t, j].real ** 2 + Q[t, j].imag ** 2
        nrm = np.sqrt(nrm)
        if nrm == 0.0 or not np.isfinite(nrm):
            return False
        logs[j] += np.log(nrm)
        for t in range(m):
            Q[t, j] /= nrm
    return True


@njit(cache=True, nogil=True)
def _companion_apply(Q, row, op):
    """Q <- A Q (or inverse/adjoint variants) for a companion matrix with first row ``row``."""
    m, k = Q.shape
    if op == OP_FORWARD:
        for c in range(k):
            s = 0j
            for t in range(m):
                s += row[t] * Q[t, c]
            for t in range(m - 1, 0, -1):
                Q[t, c] = Q[t - 1, c]
            Q[0, c] = s
    elif op == OP_INVERSE:
        last = row[m - 1]
        for c in range(k):
            y0 = Q[0, c]
            for t in range(m - 1):
                Q[t, c] = Q[t + 1, c]
            s = y0
            for t in range(m - 1):
                s -= row[t] * Q[t, c]
            Q[m - 1, c] = s / last
    elif op == OP_ADJOINT:
        for c in range(k):
            y0 = Q[0, c]
            for t in range(m - 1):
                Q[t, c] = np.conj(row[t]) * y0 + Q[t + 1, c]
            Q[m - 1, c] = np.conj(row[m - 1]) * y0
    else:
        # A^{-*} = (A^*)^{-1}: solve A^* x = y
        last = np.conj(row[m - 1])
        for c in range(k):
            x0 = Q[m - 1, c] / last
            for t in range(m - 2, -1, -1):
                Q[t + 1, c] = Q[t, c] - np.conj(row[t]) * x0
            Q[0, c] = x0


@njit(cache=True, nogil=True)
def companion_product(row0, j, fcoeffs, alpha, theta0, N, renorm, Q, logs):
    """Forward QR product along theta0 + n alpha, n = 0..N-1. Returns success flag."""
    m = row0.shape[0]
    row = row0.copy()
    steps = 0
    for n in range(N):
        x = (n * alpha) % 1.0
        row[j] = row0[j] + _trig_eval(fcoeffs, theta0 + x)
        _companion_apply(Q, row, OP_FORWARD)
        steps += 1
        if steps == renorm:
            if not _mgs(Q, logs):
                return False
            steps = 0
    if steps:
        if not _mgs(Q, logs):
            return False
    return True


@njit(cache=True, nogil=True)
def companion_frames(row0, j, fcoeffs, alpha, thetas, horizon, renorm, op, Q0):
    """Propagate a k-frame along the orbit for every base point in ``thetas``.

    ``op`` selects A, A^{-1}, A^* or A^{-*}. The orbit order matches the
    product that is being built:

    * OP_FORWARD: A(t), A(t+a), ..., A(t+(n-1)a), result lives at t + n a
    * OP_INVERSE: A(t-a)^{-1}, ..., A(t-n a)^{-1}, result lives at t - n a
    * OP_ADJOINT: A(t+(n-1)a)^*, ..., A(t)^*, result lives at t
    * OP_INV_ADJ: A(t-n a)^{-*}, ..., A(t-a)^{-*}, result lives at t

    ``Q0`` holds one starting frame per base point, shape (n_theta, m, k).
    Returns frames (n_theta, m, k) and log growth (n_theta, k).
    """
    nth = thetas.shape[0]
    m = row0.shape[0]
    k = Q0.shape[2]
    out = np.empty((nth, m, k), dtype=np.complex128)
    logs_out = np.zeros((nth, k))
    row = row0.copy()
    for i in range(nth):
        Q = Q0[i].copy()
        logs = np.zeros(k)
        steps = 0
        for s in range(horizon):
            if op == OP_FORWARD:
                n = s
            elif op == OP_INVERSE:
                n = -(s + 1)
            elif op == OP_ADJOINT:
                n = horizon - 1 - s
            else:
                n = -horizon + s
            x = (n * alpha) % 1.0
            row[j] = row0[j] + _trig_eval(fcoeffs, thetas[i] + x)
            _companion_apply(Q, row, op)
            steps += 1
            if steps == renorm:
                _mgs(Q, logs)
                steps = 0
        if steps:
            _mgs(Q, logs)
        out[i] = Q
        logs_out[i] = logs
    return out, logs_out


@njit(cache=True, nogil=True)
def generic_chunk(mats, Q, logs, renorm, steps):
    """Forward QR product over a chunk of precomputed matrices.

    Returns the updated step counter (steps since the last QR), or -1 on a
    numerical failure.
    """
    n, m, _ = mats.shape
    k = Q.shape[1]
    tmp = np.empty(m, dtype=np.complex128)
    for s in range(n):
        A = mats[s]
        for c in range(k):
            for r in range(m):
                acc = 0j
                for t in range(m):
                    acc += A[r, t] * Q[t, c]
                tmp[r] = acc
            for r in range(m):
                Q[r, c] = tmp[r]
        steps += 1
        if steps == renorm:
            if not _mgs(Q, logs):
                return -1
            steps = 0
    return steps


@njit(cache=True, nogil=True)
def _wrap(x):
    # into (-pi, pi]
    y = (x + np.pi) % TWO_PI - np.pi
    if y == -np.pi:
        y = np.pi
    return y


@njit(cache=True, nogil=True)
def schrodinger_lift(a0, fcoeffs, alpha, theta0, N, x, y):
    """Lifted angle sum for steps (x, y) -> (a x - y, x), a = a0 + Re f(theta).

    The step factors as a shear after a quarter turn, so each increment is
    exactly pi/2 plus a shear increment inside (-pi, pi).
    """
    total = 0.0
    for n in range(N):
        t = (n * alpha) % 1.0
        a = a0 + _trig_eval(fcoeffs, theta0 + t).real
        nx = a * x - y
        ny = x
        total += 0.5 * np.pi + _wrap(np.arctan2(ny, nx) - np.arctan2(x, -y))
        nrm = np.sqrt(nx * nx + ny * ny)
        x = nx / nrm
        y = ny / nrm
    return total, x, y


@njit(cache=True, nogil=True)
def polar_lift_chunk(mats, phis, x, y):
    """Lifted angle sum for real 2x2 steps with continuous polar angles ``phis``.

    A = R_phi P with P positive definite, and P moves any direction by less
    than a quarter turn. Returns (total, x, y, worst) where ``worst`` is the
    largest |P-increment| seen (should stay below pi/2).
    """
    total = 0.0
    worst = 0.0
    for s in range(mats.shape[0]):
        A = mats[s]
        nx = A[0, 0] * x + A[0, 1] * y
        ny = A[1, 0] * x + A[1, 1] * y
        phi = phis[s]
        inc = _wrap(np.arctan2(ny, nx) - phi - np.arctan2(y, x))
        if abs(inc) > worst:
            worst = abs(inc)
        total += phi + inc
        nrm = np.sqrt(nx * nx + ny * ny)
        x = nx / nrm
        y = ny / nrm
    return total, x, y, worst
