"""Pure-Python reference implementations of the hot kernels.

These mirror ``_ckernels.pyx`` line for line and are used whenever the
compiled extension is unavailable (or ``EOMQ_PURE_PYTHON=1`` is set).
"""

import math

import numpy as np

# Below this argument the ascending series is used directly.
SERIES_MAX_X = 0.25
# Miller recurrence rescale threshold and binary exponent step.
_BIG = 2.0**600
_SHIFT = -600
# ln of the smallest value worth keeping; anything below flushes to zero.
_LOG_FLOOR = -760.0


def _significant_order(x, nmax):
    """Largest order <= nmax whose bound (x/2)^n / n! is above the underflow floor."""
    if nmax <= x:
        return nmax
    lx = math.log(0.5 * x)
    n = max(int(x), 0)
    while n < nmax and n * lx - math.lgamma(n + 1.0) > _LOG_FLOOR:
        n += 1
    return n


def _series_sequence(nmax, x, out):
    half = 0.5 * x
    q = -half * half
    lead = 1.0
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
            if abs(term) <= 1e-18 * abs(total):
                break
            k += 1
        out[n] = total
    return out


def bessel_j_sequence(nmax, x):
    """J_0(x) .. J_nmax(x) for finite x >= 0 as a float64 array.

    Miller's downward recurrence normalised with J_0 + 2 sum J_2k = 1; the
    ascending series is used for x <= SERIES_MAX_X.
    """
    out = np.zeros(nmax + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    if x <= SERIES_MAX_X:
        return _series_sequence(nmax, x, out)

    ntop = _significant_order(x, nmax)
    base = max(ntop, int(x))
    start = base + 30 + int(math.sqrt(60.0 * max(base, 1)))
    start += start % 2

    counts = np.zeros(ntop + 1, dtype=np.int64)
    scale = 0
    two_over_x = 2.0 / x
    bjp = 0.0
    bj = 1.0
    norm = 0.0
    for j in range(start, 0, -1):
        bjm = j * two_over_x * bj - bjp
        bjp = bj
        bj = bjm
        n = j - 1
        if abs(bj) > _BIG:
            bj = math.ldexp(bj, _SHIFT)
            bjp = math.ldexp(bjp, _SHIFT)
            norm = math.ldexp(norm, _SHIFT)
            scale += 1
        if n <= ntop:
            out[n] = bj
            counts[n] = scale
        if n > 0 and n % 2 == 0:
            norm += 2.0 * bj
    norm += bj
    for n in range(ntop + 1):
        lag = scale - counts[n]
        out[n] = math.ldexp(out[n], _SHIFT * int(lag)) / norm
    return out


_UNITS = (1.0 + 0.0j, -1.0j, -1.0 + 0.0j, 1.0j)


def _mode_index(q, step):
    # index of lattice mode q on the sublattice coupled by a tone of `step` spacings
    return (q - 1) // step + 1


def pm_matrix(jvals, q_lo, q_hi, theta, phi_b, step):
    """Exact single-tone phase-modulation matrix over [q_lo, q_hi].

    ``jvals[n]`` must hold J_n(m) for 0 <= n <= 2 * mode_index(q_hi).
    Entry [k - q_lo, q - q_lo] is the amplitude from input mode q to output k.
    """
    size = q_hi - q_lo + 1
    out = np.zeros((size, size), dtype=complex)
    bias = complex(math.cos(phi_b), math.sin(phi_b))
    nj = len(jvals)
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
            jd = jvals[abs(d)] if abs(d) < nj else 0.0
            if d < 0 and (d % 2):
                jd = -jd
            js = jvals[s] if s < nj else 0.0
            if jd == 0.0 and js == 0.0:
                continue
            amp = _UNITS[d % 4] * jd - _UNITS[s % 4] * js
            ph = -theta * d
            out[row, col] = bias * complex(math.cos(ph), math.sin(ph)) * amp
    return out
