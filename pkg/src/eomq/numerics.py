"""Bessel functions of the first kind (integer order) and the modified I_0.

The fast path for J_n is Miller's downward recurrence (compiled kernel when
available); for tiny arguments the ascending series is summed directly.
"""

import math

import numpy as np

from . import _backend


def _check_finite(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"argument must be finite, got {x!r}")
    return x


def bessel_j_sequence(nmax, x):
    """Return ``[J_0(x), ..., J_nmax(x)]`` as a float64 array.

    Negative ``x`` is handled through J_n(-x) = (-1)^n J_n(x).
    """
    x = _check_finite(x)
    nmax = int(nmax)
    if nmax < 0:
        raise ValueError("nmax must be non-negative")
    vals = _backend.kernels.bessel_j_sequence(nmax, abs(x))
    if x < 0:
        vals = vals.copy()
        vals[1::2] *= -1.0
    return vals


def bessel_j(n, x):
    """J_n(x) for integer ``n`` (any sign) and finite real ``x``.

    >>> bessel_j(0, 0.0)
    1.0
    >>> bessel_j(3, 0.0)
    0.0
    """
    n = int(n)
    an = abs(n)
    val = float(bessel_j_sequence(an, x)[an])
    if n < 0 and an % 2:
        val = -val
    return val


def bessel_i0(x):
    """Modified Bessel function I_0(x) for 0 <= x, by its ascending series.

    All terms are positive, so the series is accurate to a few ulps over the
    whole range of modulation indices of interest (x <= 50).
    """
    x = _check_finite(x)
    if x < 0:
        raise ValueError(f"bessel_i0 requires x >= 0, got {x}")
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    k = 1
    while True:
        term *= q / (k * k)
        total += term
        if term <= 1e-17 * total:
            return total
        k += 1


def log_bessel_j_bound(n, x):
    """ln of (|x|/2)^n / n!, the classic bound on |J_n(x)| for n >= 0."""
    if x == 0:
        return -math.inf if n > 0 else 0.0
    return n * math.log(0.5 * abs(x)) - math.lgamma(n + 1.0)


def solve_bessel_root(func, lo, hi, tol=1e-15, maxiter=200):
    """Bisection for a sign change of ``func`` on [lo, hi]."""
    flo = func(lo)
    fhi = func(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise ValueError("no sign change on the bracket")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        fm = func(mid)
        if fm == 0.0 or hi - lo < tol:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
