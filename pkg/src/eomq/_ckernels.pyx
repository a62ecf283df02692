# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_kernels_py`` for the reference."""

import numpy as np

from libc.math cimport ldexp, sqrt, lgamma, log, fabs, cos, sin

cdef double SERIES_MAX_X = 0.25
cdef double _BIG = 4.149515568880993e+180  # 2**600
cdef int _SHIFT = -600
cdef double _LOG_FLOOR = -760.0


cdef long _significant_order(double x, long nmax):
    cdef long n
    cdef double lx
    if nmax <= x:
        return nmax
    lx = log(0.5 * x)
    n = <long>x
    if n < 0:
        n = 0
    while n < nmax and n * lx - lgamma(n + 1.0) > _LOG_FLOOR:
        n += 1
    return n


cdef void _series_sequence(long nmax, double x, double[::1] out):
    cdef double half = 0.5 * x
    cdef double q = -half * half
    cdef double lead = 1.0
    cdef double term, total
    cdef long n, k
    for n in range(nmax + 1):
        if n > 0:
            lead *= half / n
        if lead == 0.0:
            break
        term = lead
        total = term
        k = 1
        while True:
            term *= q / (k * (k + n))
            total += term
            if fabs(term) <= 1e-18 * fabs(total):
                break
            k += 1
        out[n] = total


def bessel_j_sequence(long nmax, double x):
    """J_0(x) .. J_nmax(x) for finite x >= 0 as a float64 array."""
    result = np.zeros(nmax + 1)
    cdef double[::1] out = result
    if x == 0.0:
        out[0] = 1.0
        return result
    if x <= SERIES_MAX_X:
        _series_sequence(nmax, x, out)
        return result

    cdef long ntop = _significant_order(x, nmax)
    cdef long base = ntop if ntop > <long>x else <long>x
    cdef long start = base + 30 + <long>sqrt(60.0 * (base if base > 1 else 1))
    start += start % 2

    counts_arr = np.zeros(ntop + 1, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef long scale = 0
    cdef double two_over_x = 2.0 / x
    cdef double bjp = 0.0
    cdef double bj = 1.0
    cdef double bjm
    cdef double norm = 0.0
    cdef long j, n
    for j in range(start, 0, -1):
        bjm = j * two_over_x * bj - bjp
        bjp = bj
        bj = bjm
        n = j - 1
        if fabs(bj) > _BIG:
            bj = ldexp(bj, _SHIFT)
            bjp = ldexp(bjp, _SHIFT)
            norm = ldexp(norm, _SHIFT)
            scale += 1
        if n <= ntop:
            out[n] = bj
            counts[n] = scale
        if n > 0 and n % 2 == 0:
            norm += 2.0 * bj
    norm += bj
    for n in range(ntop + 1):
        out[n] = ldexp(out[n], _SHIFT * <int>(scale - counts[n])) / norm
    return result


cdef inline long _mode_index(long q, long step):
    return (q - 1) // step + 1


cdef inline double complex _unit(long p):
    cdef long r = p % 4
    if r < 0:
        r += 4
    if r == 0:
        return 1.0
    if r == 1:
        return -1.0j
    if r == 2:
        return -1.0
    return 1.0j


def pm_matrix(double[::1] jvals, long q_lo, long q_hi, double theta, double phi_b, long step):
    """Exact single-tone phase-modulation matrix over [q_lo, q_hi]."""
    cdef long size = q_hi - q_lo + 1
    result = np.zeros((size, size), dtype=complex)
    cdef double complex[:, ::1] out = result
    cdef double complex bias = cos(phi_b) + 1j * sin(phi_b)
    cdef long nj = jvals.shape[0]
    cdef long row, col, q, k, pq, pk, d, s, ad
    cdef double jd, js, ph
    for col in range(size):
        q = q_lo + col
        pq = _mode_index(q, step)
        for row in range(size):
            k = q_lo + row
            if (k - q) % step:
                continue
            pk = _mode_index(k, step)
            d = pk - pq
            s = pk + pq
            ad = -d if d < 0 else d
            jd = jvals[ad] if ad < nj else 0.0
            if d < 0 and (ad % 2):
                jd = -jd
            js = jvals[s] if s < nj else 0.0
            if jd == 0.0 and js == 0.0:
                continue
            ph = -theta * d
            out[row, col] = bias * (cos(ph) + 1j * sin(ph)) * (_unit(d) * jd - _unit(s) * js)
    return result
