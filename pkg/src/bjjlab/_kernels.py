"""Hot inner loops, each in a numba and a pure-numpy flavour.

The public names at the bottom dispatch on ``USE_NUMBA``. Both flavours are
importable directly so tests and benchmarks can compare them.

Kernels never raise from inside compiled code; they return a status and the
Python callers turn that into exceptions.
"""
from __future__ import annotations

import math

import numpy as np

from ._jit import USE_NUMBA, njit

# ---------------------------------------------------------------------------
# implicit QL with Wilkinson shift on a symmetric tridiagonal matrix
#
# d: diagonal (n), e: off-diagonal padded to length n (e[n-1] unused), zt:
# rows are the accumulated eigenvectors (start from identity). Returns -1 on
# success, else the index whose iteration budget ran out.
# ---------------------------------------------------------------------------


def _tql_py(d, e, zt, eps, maxit, rotate):
    n = d.shape[0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if it == maxit:
                return l
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                rotate(zt, i, s, c)
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


def _rotate_rows_numpy(zt, i, s, c):
    zi = zt[i].copy()
    zi1 = zt[i + 1].copy()
    zt[i + 1] = s * zi + c * zi1
    zt[i] = c * zi - s * zi1


def tql_numpy(d, e, zt, eps, maxit):
    return _tql_py(d, e, zt, eps, maxit, _rotate_rows_numpy)


@njit(cache=True, nogil=True)
def tql_numba(d, e, zt, eps, maxit):
    n = d.shape[0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if it == maxit:
                return l
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(n):
                    zk = zt[i, k]
                    zk1 = zt[i + 1, k]
                    zt[i + 1, k] = s * zk + c * zk1
                    zt[i, k] = c * zk - s * zk1
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


# ---------------------------------------------------------------------------
# cyclic Jacobi rotations on a dense symmetric matrix (test oracle)
#
# a is overwritten, v accumulates eigenvectors as columns. Returns the number
# of sweeps used, or -1 if the off-diagonal norm never dropped below tol.
# ---------------------------------------------------------------------------


def _jacobi_angle(app, aqq, apq):
    theta = (aqq - app) / (2.0 * apq)
    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
    if theta < 0.0:
        t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    return c, t * c


def jacobi_numpy(a, v, tol, max_sweeps):
    n = a.shape[0]
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(2.0 * float(np.sum(a[iu] ** 2)))
        if off <= tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                c, s = _jacobi_angle(a[p, p], a[q, q], apq)
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - s * colq
                a[:, q] = s * colp + c * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - s * rowq
                a[q, :] = s * rowp + c * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return -1


@njit(cache=True, nogil=True)
def jacobi_numba(a, v, tol, max_sweeps):
    n = a.shape[0]
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if math.sqrt(2.0 * off) <= tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return -1


# ---------------------------------------------------------------------------
# Fock-basis moments of real amplitude vectors
#
# vecs has shape (N+1, m), one state per column. Output shape (m, 5) with
# columns: hop1, hop2, ks, <N_r>, <N_r^2>.
# ---------------------------------------------------------------------------

N_MOMENTS = 5


def _moment_coefficients(n_total):
    k = np.arange(n_total + 1, dtype=np.float64)
    nf = float(n_total)
    hop1 = np.sqrt(k[1:] * (nf - k[1:] + 1.0))
    hop2 = np.sqrt(k[2:] * (k[2:] - 1.0) * (nf - k[2:] + 1.0) * (nf - k[2:] + 2.0))
    ks = 2.0 * k * (nf - k) + nf
    nr = nf - 2.0 * k
    return hop1, hop2, ks, nr


def state_moments_numpy(vecs, n_total):
    hop1, hop2, ks, nr = _moment_coefficients(n_total)
    out = np.empty((vecs.shape[1], N_MOMENTS))
    prob = vecs * vecs
    out[:, 0] = 2.0 * np.sum(vecs[:-1] * vecs[1:] * hop1[:, None], axis=0)
    if n_total >= 2:
        out[:, 1] = 2.0 * np.sum(vecs[:-2] * vecs[2:] * hop2[:, None], axis=0)
    else:
        out[:, 1] = 0.0
    out[:, 2] = np.sum(prob * ks[:, None], axis=0)
    out[:, 3] = np.sum(prob * nr[:, None], axis=0)
    out[:, 4] = np.sum(prob * (nr * nr)[:, None], axis=0)
    return out


@njit(cache=True, nogil=True, inline="always")
def _kahan_add(acc, comp, q, value):
    y = value - comp[q]
    t = acc[q] + y
    comp[q] = (t - acc[q]) - y
    acc[q] = t


@njit(cache=True, nogil=True)
def state_moments_numba(vecs, n_total):
    d = vecs.shape[0]
    m = vecs.shape[1]
    nf = float(n_total)
    out = np.zeros((m, 5))
    acc = np.zeros(5)
    comp = np.zeros(5)
    for j in range(m):
        acc[:] = 0.0
        comp[:] = 0.0
        for k in range(d):
            kf = float(k)
            ck = vecs[k, j]
            if k >= 1:
                _kahan_add(acc, comp, 0, 2.0 * vecs[k - 1, j] * ck * math.sqrt(kf * (nf - kf + 1.0)))
            if k >= 2:
                _kahan_add(
                    acc, comp, 1,
                    2.0 * vecs[k - 2, j] * ck
                    * math.sqrt(kf * (kf - 1.0) * (nf - kf + 1.0) * (nf - kf + 2.0)),
                )
            p = ck * ck
            nr = nf - 2.0 * kf
            _kahan_add(acc, comp, 2, p * (2.0 * kf * (nf - kf) + nf))
            _kahan_add(acc, comp, 3, p * nr)
            _kahan_add(acc, comp, 4, p * nr * nr)
        for q in range(5):
            out[j, q] = acc[q]
    return out


# ---------------------------------------------------------------------------
# classical phase-space sums for the pendulum Hamiltonian
#
# Trapezoid in n over n_grid (endpoints half weight), uniform periodic rule
# in phi. Returns (s0, s1, s2, log_shift) where sK = sum w * exp(L - shift) *
# cos(phi)^K, without the cell areas.
# ---------------------------------------------------------------------------


def _classical_row_logs(n_grid, beta, ec, delta, ej, n_total):
    x = 2.0 * n_grid / n_total
    amp = beta * ej * np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    log_row = -beta * (0.5 * ec * n_grid * n_grid + delta * n_grid) + amp
    return amp, log_row


def classical_sums_numpy(n_grid, cos_phi, beta, ec, delta, ej, n_total):
    amp, log_row = _classical_row_logs(n_grid, beta, ec, delta, ej, n_total)
    shift = float(np.max(log_row))
    w = np.exp(log_row - shift)
    w[0] *= 0.5
    w[-1] *= 0.5
    s0 = s1 = s2 = 0.0
    chunk = max(1, 2**21 // cos_phi.size)
    cm1 = cos_phi - 1.0
    for lo in range(0, n_grid.size, chunk):
        hi = min(lo + chunk, n_grid.size)
        f = np.exp(amp[lo:hi, None] * cm1[None, :])
        r0 = f.sum(axis=1)
        r1 = f @ cos_phi
        r2 = f @ (cos_phi * cos_phi)
        s0 += float(w[lo:hi] @ r0)
        s1 += float(w[lo:hi] @ r1)
        s2 += float(w[lo:hi] @ r2)
    return s0, s1, s2, shift


@njit(cache=True, nogil=True)
def classical_sums_numba(n_grid, cos_phi, beta, ec, delta, ej, n_total):
    nn = n_grid.shape[0]
    mp = cos_phi.shape[0]
    amp = np.empty(nn)
    log_row = np.empty(nn)
    shift = -np.inf
    for i in range(nn):
        x = 2.0 * n_grid[i] / n_total
        q = 1.0 - x * x
        if q < 0.0:
            q = 0.0
        amp[i] = beta * ej * math.sqrt(q)
        log_row[i] = -beta * (0.5 * ec * n_grid[i] * n_grid[i] + delta * n_grid[i]) + amp[i]
        if log_row[i] > shift:
            shift = log_row[i]
    s0 = 0.0
    s1 = 0.0
    s2 = 0.0
    for i in range(nn):
        w = math.exp(log_row[i] - shift)
        if i == 0 or i == nn - 1:
            w *= 0.5
        if w == 0.0:
            continue
        a = amp[i]
        r0 = 0.0
        r1 = 0.0
        r2 = 0.0
        for j in range(mp):
            cj = cos_phi[j]
            f = math.exp(a * (cj - 1.0))
            r0 += f
            r1 += f * cj
            r2 += f * cj * cj
        s0 += w * r0
        s1 += w * r1
        s2 += w * r2
    return s0, s1, s2, shift


if USE_NUMBA:
    tql = tql_numba
    jacobi = jacobi_numba
    state_moments = state_moments_numba
    classical_sums = classical_sums_numba
else:
    tql = tql_numpy
    jacobi = jacobi_numpy
    state_moments = state_moments_numpy
    classical_sums = classical_sums_numpy
