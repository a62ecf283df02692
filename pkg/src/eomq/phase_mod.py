"""Single-tone phase modulation: classical sidebands, the exact unitary
one-photon matrix, its optical-limit error bound, coherent states, and the
first-order multi-tone operator.

Conventions: a drive ``V_m cos(Omega t + theta)`` with modulation index ``m``
multiplies the envelope by ``exp(i phi_b - i m cos(Omega t + theta))``, whose
n-th sideband (frequency omega_0 + n Omega) has amplitude

    C_n = exp(i phi_b) (-i exp(-i theta))^n J_n(m).

The exact scattering amplitude from mode q to mode k (both >= 1) is

    S_kq = exp(i phi_b) exp(-i theta (k - q))
           [(-i)^(k-q) J_(k-q)(m) - (-i)^(k+q) J_(k+q)(m)],

where the second term is the correction that keeps the matrix unitary in the
presence of the zero-frequency floor. It dies off like (m/2)^(2q)/q!^2.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import GuardBandError, PerturbativeRegimeWarning
from .mode_space import OnePhotonMatrix, check_guard
from .numerics import bessel_i0, bessel_j, bessel_j_sequence

MAX_INDEX = 12.0
PERTURBATIVE_LIMIT = 0.3


@dataclass(frozen=True)
class ToneConfig:
    """Parameters of one phase modulator driven by a single RF tone.

    ``omega_index`` is the tone frequency in units of the lattice spacing.
    ``gain`` is the complex RF response H at that tone; it scales m by |H|
    and delays the phase by arg H.
    """

    m: float
    theta: float = 0.0
    phi_b: float = 0.0
    omega_index: int = 1
    gain: complex = 1.0

    def __post_init__(self):
        if not 0.0 <= self.m <= MAX_INDEX:
            raise ValueError(f"modulation index must lie in [0, {MAX_INDEX}], got {self.m}")
        if int(self.omega_index) != self.omega_index or self.omega_index < 1:
            raise ValueError("omega_index must be a positive integer")

    @property
    def effective_m(self):
        return self.m * abs(self.gain)

    @property
    def effective_theta(self):
        return self.theta - float(np.angle(self.gain))


@dataclass(frozen=True)
class SidebandSpectrum:
    offsets: np.ndarray
    coeffs: np.ndarray

    @property
    def powers(self):
        return np.abs(self.coeffs) ** 2

    def rows(self):
        """(offset, Re C, Im C, |C|^2) tuples in offset order."""
        return [
            (int(n), float(c.real), float(c.imag), float(abs(c) ** 2))
            for n, c in zip(self.offsets, self.coeffs)
        ]


_UNITS = (1.0 + 0.0j, -1.0j, -1.0 + 0.0j, 1.0j)


def _minus_i_pow(n):
    return _UNITS[n % 4]


def classical_coeff(cfg, n):
    """Sideband amplitude C_n of the classical (optical-limit) modulator."""
    n = int(n)
    j = bessel_j(n, cfg.effective_m)
    return np.exp(1j * cfg.phi_b) * _minus_i_pow(n) * np.exp(-1j * cfg.effective_theta * n) * j


def carson_band(m):
    """Number of significant sidebands either side of the carrier: ceil(m) + 1."""
    if m < 0:
        raise ValueError("m must be non-negative")
    return math.ceil(m) + 1


def sideband_tail(m, band):
    """Power outside |n| <= band: 2 * sum_{n > band} J_n(m)^2."""
    vals = bessel_j_sequence(band + 60 + math.ceil(m), m)
    return 2.0 * float(np.sum(vals[band + 1:] ** 2))


def guard_band(m, tol=1e-13):
    """Guard band in tone steps: ceil(m) + 8, widened until the tail power is below ``tol``."""
    g = math.ceil(m) + 8
    vals = bessel_j_sequence(g + 80 + math.ceil(m), m)
    while 2.0 * float(np.sum(vals[g + 1:] ** 2)) > tol:
        g += 1
    return g


def sideband_spectrum(cfg, band=None):
    """Classical coefficients for |n| <= band (default: the guard band)."""
    if band is None:
        band = guard_band(cfg.effective_m)
    offsets = np.arange(-band, band + 1)
    return SidebandSpectrum(offsets, np.array([classical_coeff(cfg, n) for n in offsets]))


def _mode_index(q, step):
    return (q - 1) // step + 1


def exact_coeff(cfg, k, q):
    """Exact one-photon amplitude S_kq from input mode q to output mode k."""
    k, q = int(k), int(q)
    if k < 1 or q < 1:
        raise ValueError("mode indices must be >= 1")
    step = int(cfg.omega_index)
    if (k - q) % step:
        return 0.0j
    pk, pq = _mode_index(k, step), _mode_index(q, step)
    d, s = pk - pq, pk + pq
    m = cfg.effective_m
    amp = _minus_i_pow(d) * bessel_j(d, m) - _minus_i_pow(s) * bessel_j(s, m)
    return np.exp(1j * cfg.phi_b) * np.exp(-1j * cfg.effective_theta * d) * amp


def correction_coeff(cfg, k, q):
    """The unitarity-restoring part S2_kq, so that S_kq = C_(k-q) - S2_kq."""
    step = int(cfg.omega_index)
    if (k - q) % step:
        return 0.0j
    pk, pq = _mode_index(k, step), _mode_index(q, step)
    d, s = pk - pq, pk + pq
    return (
        np.exp(1j * cfg.phi_b)
        * np.exp(-1j * cfg.effective_theta * d)
        * _minus_i_pow(s)
        * bessel_j(s, cfg.effective_m)
    )


def exact_matrix(cfg, lattice, dispersion=None):
    """Exact single-tone matrix over the lattice window.

    ``dispersion`` is an optional array of per-mode phases applied diagonally
    after scattering. Raises GuardBandError if no column is far enough from
    the truncated edges to be trusted.
    """
    step = int(cfg.omega_index)
    guard = step * guard_band(cfg.effective_m)
    p_hi = _mode_index(lattice.q_hi, step)
    jvals = np.ascontiguousarray(bessel_j_sequence(2 * p_hi, cfg.effective_m))
    data = _backend.kernels.pm_matrix(
        jvals, lattice.q_lo, lattice.q_hi, cfg.effective_theta, cfg.phi_b, step
    )
    if dispersion is not None:
        phases = np.asarray(dispersion, dtype=float)
        if phases.shape != (lattice.size,):
            raise ValueError("dispersion must give one phase per window mode")
        data = np.exp(1j * phases)[:, None] * data
    mat = OnePhotonMatrix(lattice, data, guard)
    if not mat.interior_modes():
        raise GuardBandError(
            f"window [{lattice.q_lo}, {lattice.q_hi}] has no mode at least {guard} "
            f"modes from a truncated edge (m = {cfg.effective_m})"
        )
    return mat


def classical_matrix(cfg, lattice):
    """Optical-limit matrix with entries C_(k-q) (no positivity correction)."""
    step = int(cfg.omega_index)
    guard = step * guard_band(cfg.effective_m)
    n = lattice.size
    band = min(n, guard + 1)
    coeffs = {d: classical_coeff(cfg, d) for d in range(-band, band + 1)}
    data = np.zeros((n, n), dtype=complex)
    for col in range(n):
        for d, c in coeffs.items():
            row = col + d * step
            if 0 <= row < n:
                data[row, col] = c
    return OnePhotonMatrix(lattice, data, guard)


def unitarity_defect_bound(m, q):
    """Upper bound I_0(m) (m/2)^(2q+2) / ((q+1)!)^2 on ||S2 |1_q>||^2."""
    if m < 0 or q < 1:
        raise ValueError("need m >= 0 and q >= 1")
    if m == 0:
        return 0.0
    logb = (
        math.log(bessel_i0(m))
        + (2 * q + 2) * (math.log(m) - math.log(2.0))
        - 2.0 * math.lgamma(q + 2.0)
    )
    return math.exp(logb)


def correction_norm_sq(m, q):
    """||S2 |1_q>||^2 = sum_{k>=1} J_(k+q)(m)^2, evaluated numerically."""
    vals = bessel_j_sequence(q + 80 + 2 * math.ceil(m), m)
    return float(np.sum(vals[q + 1:] ** 2))


def coherent_scatter(matrix, alpha):
    """Displacement amplitudes after scattering: alpha'_k = sum_q M_kq alpha_q."""
    alpha = np.asarray(alpha, dtype=complex)
    if alpha.shape != (matrix.lattice.size,):
        raise ValueError("alpha must have one amplitude per window mode")
    support = [q for q, a in zip(matrix.lattice.modes, alpha) if a != 0]
    check_guard(matrix, support, what="coherent amplitude")
    return matrix.apply(alpha)


def multitone_first_order(tones, m, lattice, phi_b=0.0):
    """First-order multi-tone operator exp(i phi_b) [1 - i G].

    ``tones`` holds ``(A_k, theta_k, index_k)`` or ``(A_k, theta_k, index_k, H_k)``
    tuples, where the tone frequency is ``index_k`` lattice spacings and
    ``H_k`` an optional complex RF response. A photon at q goes to q + index_k
    with amplitude -i m A_k H_k exp(-i theta_k) / 2 and to q - index_k with
    the conjugate-phase amplitude -i m A_k conj(H_k) exp(i theta_k) / 2.
    Shifts leaving the window (or dropping below q = 1) are discarded.
    """
    n = lattice.size
    data = np.eye(n, dtype=complex)
    tags = []
    max_shift = 0
    for tone in tones:
        amp, theta, idx = tone[0], tone[1], int(tone[2])
        gain = complex(tone[3]) if len(tone) > 3 else 1.0
        if idx < 1:
            raise ValueError("tone index must be a positive integer")
        strength = m * abs(amp * gain)
        if strength > PERTURBATIVE_LIMIT:
            msg = f"m*A = {strength:.3g} exceeds {PERTURBATIVE_LIMIT}; first-order result unreliable"
            warnings.warn(msg, PerturbativeRegimeWarning, stacklevel=2)
            tags.append(msg)
        up = -0.5j * m * amp * gain * np.exp(-1j * theta)
        down = -0.5j * m * amp * np.conj(gain) * np.exp(1j * theta)
        for col in range(n):
            if col + idx < n:
                data[col + idx, col] += up
            if col - idx >= 0:
                data[col - idx, col] += down
        max_shift = max(max_shift, idx)
    return OnePhotonMatrix(lattice, np.exp(1j * phi_b) * data, max_shift, tuple(tags))
