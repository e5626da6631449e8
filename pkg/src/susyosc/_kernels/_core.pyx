# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernels.

Mirrors _fallback.py operation for operation: orthonormal Hermite recurrence
for the series part, Horner for the residual and denominator polynomials,
panelled Gauss-Legendre in y for the Wigner transform.
"""

import numpy as np

from libc.math cimport ceil, cos, exp, fabs, sin, sqrt

cdef double H0 = 0.7511255444649425     # pi ** -0.25
cdef double PI = 3.141592653589793


def _recurrence_tables(Py_ssize_t J):
    """sqrt factors of the orthonormal Hermite recurrence, indexed by j."""
    up = np.zeros(J, dtype=np.float64)
    back = np.zeros(J, dtype=np.float64)
    for j in range(1, J):
        up[j] = (2.0 / j) ** 0.5
        back[j] = ((j - 1.0) / j) ** 0.5
    return up, back


def eval_states(double[:, ::1] herm, double[:, ::1] resid, double[::1] den,
                double[::1] xs):
    """Evaluate K basis states on a grid; returns a (K, N) float array."""
    cdef Py_ssize_t K = herm.shape[0]
    cdef Py_ssize_t J = herm.shape[1]
    cdef Py_ssize_t Rw = resid.shape[1]
    cdef Py_ssize_t D = den.shape[0]
    cdef Py_ssize_t N = xs.shape[0]
    out = np.zeros((K, N), dtype=np.float64)
    cdef double[:, ::1] V = out
    up_arr, back_arr = _recurrence_tables(J)
    cdef double[::1] up = up_arr
    cdef double[::1] back = back_arr
    hbuf_arr = np.empty(J, dtype=np.float64)
    cdef double[::1] hbuf = hbuf_arr
    cdef Py_ssize_t i, j, k, r, J4 = J - (J % 4)
    cdef double x, gauss, dv, num, s0, s1, s2, s3
    for i in range(N):
        x = xs[i]
        gauss = exp(-x * x / 2.0)
        hbuf[0] = H0 * gauss
        for j in range(1, J):
            hbuf[j] = x * up[j] * hbuf[j - 1]
            if j > 1:
                hbuf[j] -= back[j] * hbuf[j - 2]
        dv = 0.0
        for r in range(D - 1, -1, -1):
            dv = dv * x + den[r]
        for k in range(K):
            # four-lane dot product; partial sums keep the FP pipeline busy
            s0 = 0.0
            s1 = 0.0
            s2 = 0.0
            s3 = 0.0
            for j in range(0, J4, 4):
                s0 += herm[k, j] * hbuf[j]
                s1 += herm[k, j + 1] * hbuf[j + 1]
                s2 += herm[k, j + 2] * hbuf[j + 2]
                s3 += herm[k, j + 3] * hbuf[j + 3]
            for j in range(J4, J):
                s0 += herm[k, j] * hbuf[j]
            num = 0.0
            for r in range(Rw - 1, -1, -1):
                num = num * x + resid[k, r]
            V[k, i] = (s0 + s1) + (s2 + s3) + num * gauss / dv
    return out


def eval_packet(double complex[::1] B, double complex[::1] R, double[::1] den,
                double[::1] xs):
    """Evaluate one complex packet on a grid; returns an (N,) complex array."""
    cdef Py_ssize_t J = B.shape[0]
    cdef Py_ssize_t Rw = R.shape[0]
    cdef Py_ssize_t D = den.shape[0]
    cdef Py_ssize_t N = xs.shape[0]
    out = np.empty(N, dtype=np.complex128)
    cdef double complex[::1] V = out
    up_arr, back_arr = _recurrence_tables(J)
    cdef double[::1] up = up_arr
    cdef double[::1] back = back_arr
    cdef Py_ssize_t i, j, r
    cdef double x, gauss, h, hprev, hnext, dv
    cdef double complex acc, num
    for i in range(N):
        x = xs[i]
        gauss = exp(-x * x / 2.0)
        h = H0 * gauss
        hprev = 0.0
        acc = 0.0
        for j in range(J):
            if j > 0:
                hnext = x * up[j] * h - back[j] * hprev
                hprev = h
                h = hnext
            acc = acc + B[j] * h
        dv = 0.0
        for r in range(D - 1, -1, -1):
            dv = dv * x + den[r]
        num = 0.0
        for r in range(Rw - 1, -1, -1):
            num = num * x + R[r]
        V[i] = acc + num * gauss / dv
    return out


def wigner_grid(double complex[::1] B, double complex[::1] R, double[::1] den,
                double[::1] xs, double[::1] ps,
                double[::1] base_nodes, double[::1] base_weights,
                int min_panels=6):
    """Wigner function of a packet on an (x, p) grid.

    Same panelling rule as the fallback: the y-integral over (-x, x) gets
    more Gauss-Legendre panels as |p| x grows.
    """
    cdef Py_ssize_t Nx = xs.shape[0]
    cdef Py_ssize_t Np = ps.shape[0]
    cdef Py_ssize_t M = base_nodes.shape[0]
    out = np.zeros((Nx, Np), dtype=np.float64)
    cdef double[:, ::1] W = out
    cdef double pmax = 0.0
    cdef Py_ssize_t ix, ip, q, m, idx, total
    cdef int n_panels
    cdef double x, width, start, yv, p2, s
    cdef double a, b, c0, s0, cr, sr, tmp, dp
    cdef double complex fv
    cdef double[::1] y
    cdef double[::1] wy
    cdef double[::1] fr
    cdef double[::1] fi
    cdef double[::1] acc
    cdef double complex[::1] left
    cdef double complex[::1] right
    cdef bint uniform = Np >= 2
    for ip in range(Np):
        if fabs(ps[ip]) > pmax:
            pmax = fabs(ps[ip])
    dp = ps[1] - ps[0] if Np >= 2 else 0.0
    for ip in range(2, Np):
        if fabs(ps[ip] - ps[ip - 1] - dp) > 1e-12 * (fabs(dp) + 1e-300):
            uniform = False
            break
    for ix in range(Nx):
        x = xs[ix]
        if x <= 0.0:
            continue
        n_panels = <int>ceil(pmax * x / PI / 6.0) + 6
        if n_panels < min_panels:
            n_panels = min_panels
        width = 2.0 * x / n_panels
        total = n_panels * M
        y_arr = np.empty(total, dtype=np.float64)
        wy_arr = np.empty(total, dtype=np.float64)
        y = y_arr
        wy = wy_arr
        for q in range(n_panels):
            start = -x + width * q
            for m in range(M):
                y[q * M + m] = start + 0.5 * width * (base_nodes[m] + 1.0)
                wy[q * M + m] = 0.5 * width * base_weights[m]
        left = eval_packet(B, R, den, x - y_arr)
        right = eval_packet(B, R, den, x + y_arr)
        fr_arr = np.empty(total, dtype=np.float64)
        fi_arr = np.empty(total, dtype=np.float64)
        fr = fr_arr
        fi = fi_arr
        for idx in range(total):
            fv = left[idx].conjugate() * right[idx] * wy[idx]
            fr[idx] = fv.real
            fi[idx] = fv.imag
        if uniform:
            # One sincos per node; march across the p-grid by the unit
            # rotation exp(-2i dp y).  Drift is ~ Np rounding steps, well
            # under the quadrature error of the y-panels.
            acc_arr = np.zeros(Np, dtype=np.float64)
            acc = acc_arr
            for idx in range(total):
                yv = y[idx]
                c0 = cos(2.0 * ps[0] * yv)
                s0 = -sin(2.0 * ps[0] * yv)
                cr = cos(2.0 * dp * yv)
                sr = -sin(2.0 * dp * yv)
                a = fr[idx]
                b = fi[idx]
                for ip in range(Np):
                    acc[ip] += a * c0 - b * s0
                    tmp = c0 * cr - s0 * sr
                    s0 = c0 * sr + s0 * cr
                    c0 = tmp
            for ip in range(Np):
                W[ix, ip] = acc[ip] / PI
        else:
            for ip in range(Np):
                p2 = 2.0 * ps[ip]
                s = 0.0
                for idx in range(total):
                    yv = y[idx]
                    s += fr[idx] * cos(p2 * yv) + fi[idx] * sin(p2 * yv)
                W[ix, ip] = s / PI
    return out
