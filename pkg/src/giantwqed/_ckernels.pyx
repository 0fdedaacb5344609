# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled sweep kernels; see ``_pykernels`` for the reference versions."""
import numpy as np

from libc.math cimport cos, sin, sinh, acos, acosh, fabs, sqrt, isfinite
from libc.stdlib cimport malloc, free

NAME = "cython"


cdef inline double _abs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double complex _expi(double x) noexcept nogil:
    return cos(x) + 1j * sin(x)


cdef int _lu_solve(double complex* a, double complex* b, Py_ssize_t n) noexcept nogil:
    # Gaussian elimination with partial pivoting, in place; b holds the solution.
    cdef Py_ssize_t i, j, k, p
    cdef double best, cand
    cdef double complex m, tmp, piv
    for k in range(n):
        p = k
        best = _abs2(a[k * n + k])
        for i in range(k + 1, n):
            cand = _abs2(a[i * n + k])
            if cand > best:
                best = cand
                p = i
        if best == 0.0:
            return 1
        if p != k:
            for j in range(n):
                tmp = a[k * n + j]
                a[k * n + j] = a[p * n + j]
                a[p * n + j] = tmp
            tmp = b[k]
            b[k] = b[p]
            b[p] = tmp
        piv = a[k * n + k]
        for i in range(k + 1, n):
            m = a[i * n + k] / piv
            if m != 0:
                for j in range(k + 1, n):
                    a[i * n + j] = a[i * n + j] - m * a[k * n + j]
                b[i] = b[i] - m * b[k]
    for k in range(n - 1, -1, -1):
        tmp = b[k]
        for j in range(k + 1, n):
            tmp = tmp - a[k * n + j] * b[j]
        b[k] = tmp / a[k * n + k]
    return 0


cdef int _scatter_point(const double complex* h, const double complex* v, double delta,
                        Py_ssize_t n, double complex* work, double complex* f,
                        double complex* t, double complex* r) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double complex tt = 0, rr = 0
    for i in range(n):
        for j in range(n):
            work[i * n + j] = -h[i * n + j]
        work[i * n + i] = work[i * n + i] + delta
        f[i] = v[i]
    if _lu_solve(work, f, n):
        return 1
    for i in range(n):
        tt = tt + v[i].conjugate() * f[i]
        rr = rr + v[i] * f[i]
    t[0] = 1.0 - 1j * tt
    r[0] = -1j * rr
    return 0


def solve_sweep(h, v, deltas):
    cdef double complex[:, ::1] hm = np.ascontiguousarray(h, dtype=np.complex128)
    cdef double complex[::1] vm = np.ascontiguousarray(v, dtype=np.complex128)
    cdef double[::1] dm = np.ascontiguousarray(deltas, dtype=np.float64)
    cdef Py_ssize_t n = vm.shape[0], k = dm.shape[0], q
    t_out = np.empty(k, dtype=np.complex128)
    r_out = np.empty(k, dtype=np.complex128)
    ok_out = np.ones(k, dtype=np.bool_)
    cdef double complex[::1] tm = t_out
    cdef double complex[::1] rm = r_out
    cdef unsigned char[::1] om = ok_out.view(np.uint8)
    cdef double complex* work = <double complex*> malloc(n * n * sizeof(double complex))
    cdef double complex* f = <double complex*> malloc(n * sizeof(double complex))
    cdef double nan = float("nan")
    if work == NULL or f == NULL:
        free(work)
        free(f)
        raise MemoryError()
    try:
        with nogil:
            for q in range(k):
                if _scatter_point(&hm[0, 0], &vm[0], dm[q], n, work, f, &tm[q], &rm[q]):
                    om[q] = 0
                    tm[q] = nan
                    rm[q] = nan
    finally:
        free(work)
        free(f)
    return t_out, r_out, ok_out


def solve_sweep_retarded(slope, amp, owner, atom_det, double omega_a, deltas):
    cdef double[::1] sm = np.ascontiguousarray(slope, dtype=np.float64)
    cdef double[::1] am = np.ascontiguousarray(amp, dtype=np.float64)
    cdef Py_ssize_t[::1] own = np.ascontiguousarray(owner, dtype=np.intp)
    cdef double[::1] det = np.ascontiguousarray(atom_det, dtype=np.float64)
    cdef double[::1] dm = np.ascontiguousarray(deltas, dtype=np.float64)
    cdef Py_ssize_t n = det.shape[0], npts = sm.shape[0], k = dm.shape[0]
    cdef Py_ssize_t q, p, p2, i
    cdef double th, inv_sqrt2 = 1.0 / sqrt(2.0)
    t_out = np.empty(k, dtype=np.complex128)
    r_out = np.empty(k, dtype=np.complex128)
    ok_out = np.ones(k, dtype=np.bool_)
    cdef double complex[::1] tm = t_out
    cdef double complex[::1] rm = r_out
    cdef unsigned char[::1] om = ok_out.view(np.uint8)
    cdef double complex* h = <double complex*> malloc(n * n * sizeof(double complex))
    cdef double complex* v = <double complex*> malloc(n * sizeof(double complex))
    cdef double complex* work = <double complex*> malloc(n * n * sizeof(double complex))
    cdef double complex* f = <double complex*> malloc(n * sizeof(double complex))
    cdef double* theta = <double*> malloc(npts * sizeof(double))
    cdef double nan = float("nan")
    if h == NULL or v == NULL or work == NULL or f == NULL or theta == NULL:
        free(h); free(v); free(work); free(f); free(theta)
        raise MemoryError()
    try:
        with nogil:
            for q in range(k):
                for p in range(npts):
                    theta[p] = (omega_a + dm[q]) * sm[p]
                for i in range(n * n):
                    h[i] = 0
                for i in range(n):
                    v[i] = 0
                    h[i * n + i] = det[i]
                for p in range(npts):
                    v[own[p]] = v[own[p]] + am[p] * inv_sqrt2 * _expi(theta[p])
                    for p2 in range(npts):
                        h[own[p] * n + own[p2]] = (h[own[p] * n + own[p2]]
                            - 0.5j * am[p] * am[p2] * _expi(fabs(theta[p] - theta[p2])))
                if _scatter_point(h, v, dm[q], n, work, f, &tm[q], &rm[q]):
                    om[q] = 0
                    tm[q] = nan
                    rm[q] = nan
    finally:
        free(h); free(v); free(work); free(f); free(theta)
    return t_out, r_out, ok_out


def cascade_sweep(gamma_eff, lamb, atom_det, alpha, deltas):
    cdef double[::1] gm = np.ascontiguousarray(gamma_eff, dtype=np.float64)
    cdef double[::1] lm = np.ascontiguousarray(lamb, dtype=np.float64)
    cdef double[::1] det = np.ascontiguousarray(atom_det, dtype=np.float64)
    cdef double[::1] al = np.ascontiguousarray(alpha, dtype=np.float64)
    cdef double[::1] dm = np.ascontiguousarray(deltas, dtype=np.float64)
    cdef Py_ssize_t n = gm.shape[0], k = dm.shape[0], q, i
    cdef double xi
    cdef double complex m11, m12, m21, m22, a11, a12, a21, a22, ph, n11, n12, n21, n22
    cdef double complex pre_t = _expi(al[0] - al[n - 1]), pre_r = _expi(2.0 * al[0])
    t_out = np.empty(k, dtype=np.complex128)
    r_out = np.empty(k, dtype=np.complex128)
    ok_out = np.ones(k, dtype=np.bool_)
    cdef double complex[::1] tm = t_out
    cdef double complex[::1] rm = r_out
    cdef unsigned char[::1] om = ok_out.view(np.uint8)
    with nogil:
        for q in range(k):
            m11 = 1; m12 = 0; m21 = 0; m22 = 1
            for i in range(n):
                xi = gm[i] / (2.0 * (dm[q] - det[i] - lm[i]))
                a11 = 1 + 1j * xi
                a12 = 1j * xi
                a21 = -1j * xi
                a22 = 1 - 1j * xi
                if i < n - 1:
                    ph = _expi(-(al[i + 1] - al[i]))
                    a11 = a11 * ph
                    a21 = a21 * ph
                    a12 = a12 / ph
                    a22 = a22 / ph
                n11 = m11 * a11 + m12 * a21
                n12 = m11 * a12 + m12 * a22
                n21 = m21 * a11 + m22 * a21
                n22 = m21 * a12 + m22 * a22
                m11 = n11; m12 = n12; m21 = n21; m22 = n22
            tm[q] = pre_t / m11
            rm[q] = pre_r * m21 / m11
            if not (isfinite(tm[q].real) and isfinite(tm[q].imag)
                    and isfinite(rm[q].real) and isfinite(rm[q].imag)):
                om[q] = 0
    return t_out, r_out, ok_out


cdef double _cheb_u(int n, double y) noexcept nogil:
    cdef double prev, cur, nxt, lam, ay
    cdef int i
    if n < 0:
        return 0.0
    if n <= 64:
        prev = 0.0
        cur = 1.0
        for i in range(n):
            nxt = 2.0 * y * cur - prev
            prev = cur
            cur = nxt
        return cur
    ay = fabs(y)
    if ay < 1.0:
        lam = acos(y)
        return sin((n + 1) * lam) / sin(lam)
    if ay == 1.0:
        return (n + 1) if (y > 0 or n % 2 == 0) else -(n + 1)
    lam = acosh(ay)
    cur = sinh((n + 1) * lam) / sinh(lam)
    return cur if (y > 0 or n % 2 == 0) else -cur


def chebyshev_u(int n, y):
    cdef double[::1] ym = np.ascontiguousarray(np.atleast_1d(y), dtype=np.float64).ravel()
    out = np.empty(ym.shape[0], dtype=np.float64)
    cdef double[::1] om = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(ym.shape[0]):
            om[i] = _cheb_u(n, ym[i])
    return out.reshape(np.shape(y))
