"""Sampled single-photon wavepackets and their modulation.

A packet is ``|1_phi> = sum_j phi(t_j) sqrt(dt) a+(t_j) |vac>`` on a uniform
grid ``t_j = t0 + j dt`` with ``N`` a power of two. Time dependence follows
``exp(-i omega t)``, so the spectrum is

    phi~(omega) = int phi(t) exp(i omega t) dt  ~  dt exp(i omega t0) F[k],
    F[k] = sum_j phi_j exp(2 pi i j k / N).

Modulating by a single tone of angular frequency ``Omega0`` shifts spectral
content by whole bins only if ``Omega0 N dt / 2 pi`` is an integer; that grid
rule is enforced wherever a tone is used.
"""

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .amp_mod import classical_matrix, classical_sideband
from .errors import ContractViolation
from .phase_mod import ToneConfig, guard_band

NORM_TOL = 1e-10


def _is_pow2(n):
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True, eq=False)
class Wavepacket:
    """Complex envelope samples on ``t0 + j dt`` around carrier ``carrier`` (rad/s)."""

    samples: np.ndarray
    t0: float
    dt: float
    carrier: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim != 1 or not _is_pow2(s.size):
            raise ValueError(f"sample count must be a power of two, got {s.size}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def n(self):
        return self.samples.size

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.n)

    def norm_sq(self):
        return float(np.sum(np.abs(self.samples) ** 2) * self.dt)

    def normalized(self):
        return self.with_samples(self.samples / math.sqrt(self.norm_sq()))

    def is_normalized(self, tol=NORM_TOL):
        return abs(self.norm_sq() - 1.0) <= tol

    def with_samples(self, samples):
        return Wavepacket(samples, self.t0, self.dt, self.carrier)

    def same_grid(self, other):
        return self.n == other.n and self.t0 == other.t0 and self.dt == other.dt

    def index_of(self, t):
        """Grid index of time ``t``; off-grid times are rejected."""
        j = (t - self.t0) / self.dt
        k = int(round(j))
        if abs(j - k) > 1e-9 or not 0 <= k < self.n:
            raise ValueError(f"time {t!r} is not on the packet grid")
        return k

    def bin_omega(self):
        """Angular detuning of every DFT bin, in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n, self.dt)

    def dft(self):
        """F[k] = sum_j phi_j exp(2 pi i j k / N)."""
        return self.n * np.fft.ifft(self.samples)

    def spectrum(self):
        """(detuning omega_k, phi~(omega_k)) in FFT order."""
        w = self.bin_omega()
        return w, self.dt * np.exp(1j * w * self.t0) * self.dft()

    @classmethod
    def from_dft(cls, values, t0, dt, carrier=0.0):
        return cls(np.fft.fft(values) / len(values), t0, dt, carrier)

    def to_dict(self):
        return {
            "t0": self.t0,
            "dt": self.dt,
            "n": self.n,
            "carrier": self.carrier,
            "re": self.samples.real.tolist(),
            "im": self.samples.imag.tolist(),
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        s = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        if "n" in data and int(data["n"]) != s.size:
            raise ValueError("sample count does not match n")
        return cls(s, float(data["t0"]), float(data["dt"]), float(data.get("carrier", 0.0)))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t_s", "re_phi_per_sqrt_s", "im_phi_per_sqrt_s"])
        for t, v in zip(self.times, self.samples):
            w.writerow(["%.17g" % t, "%.17g" % v.real, "%.17g" % v.imag])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, carrier=0.0):
        rows = list(csv.reader(io.StringIO(text)))
        body = [r for r in rows[1:] if r]
        t = np.array([float(r[0]) for r in body])
        s = np.array([complex(float(r[1]), float(r[2])) for r in body])
        if t.size < 2:
            raise ValueError("need at least two samples")
        dt = (t[-1] - t[0]) / (t.size - 1)
        if np.max(np.abs(np.diff(t) - dt)) > 1e-9 * abs(dt):
            raise ValueError("time column is not uniformly spaced")
        return cls(s, float(t[0]), float(dt), carrier)


def gaussian(n, dt, width, center=None, carrier=0.0, t0=None, chirp=0.0):
    """Normalized Gaussian envelope exp(-(t-c)^2 / (2 width^2) - i chirp (t-c)^2)."""
    t0 = -0.5 * n * dt if t0 is None else t0
    t = t0 + dt * np.arange(n)
    c = t0 + 0.5 * n * dt if center is None else center
    s = np.exp(-((t - c) ** 2) / (2.0 * width**2) - 1j * chirp * (t - c) ** 2)
    return Wavepacket(s, t0, dt, carrier).normalized()


@dataclass(frozen=True, eq=False)
class DriveSignal:
    """Real dimensionless drive x(t_j); the modulator phase is phi_b - m x(t)."""

    samples: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        if x.ndim != 1:
            raise ValueError("drive samples must be one-dimensional")
        mean = float(np.mean(x)) if x.size else 0.0
        if abs(mean) > 1e-10:
            raise ValueError(f"drive must be dc-balanced, mean = {mean:.3g}")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    @classmethod
    def tone(cls, packet, omega, theta=0.0):
        """cos(omega t + theta) on the packet grid; omega must satisfy the grid rule."""
        check_grid_rule(packet, omega)
        return cls(np.cos(omega * packet.times + theta))

    @classmethod
    def from_phase(cls, alpha, m=1.0):
        """Drive and bias with phi_b - m x(t) = alpha(t); returns (drive, phi_b)."""
        alpha = np.asarray(alpha, dtype=float)
        bias = float(np.mean(alpha))
        return cls(-(alpha - bias) / m), bias

    def with_response(self, dt, response):
        """Filter through an RF response H(Omega) given as a callable or per-bin array.

        H must satisfy H(-Omega) = conj(H(Omega)) so the drive stays real.
        """
        n = self.samples.size
        omega = 2.0 * np.pi * np.fft.fftfreq(n, dt)
        h = response(omega) if callable(response) else np.asarray(response, dtype=complex)
        coef = np.fft.ifft(self.samples) * h
        x = np.fft.fft(coef)
        if np.max(np.abs(x.imag)) > 1e-9 * max(1.0, np.max(np.abs(x.real))):
            raise ValueError("RF response is not Hermitian; filtered drive would be complex")
        x = x.real
        return DriveSignal(x - np.mean(x))


def check_grid_rule(packet, omega):
    """Require omega = K 2 pi / (N dt) with integer K; return K."""
    k = omega * packet.n * packet.dt / (2.0 * np.pi)
    kk = int(round(k))
    if abs(k - kk) > 1e-9 * max(1.0, abs(k)):
        raise ValueError(
            f"tone {omega:g} rad/s is not a multiple of the bin spacing "
            f"{2.0 * np.pi / (packet.n * packet.dt):g} rad/s"
        )
    return kk


def _require_normalized(packet):
    if not packet.is_normalized():
        raise ValueError(f"wavepacket is not normalized (norm^2 = {packet.norm_sq():.12g})")


def modulate_wavepacket(cfg, packet, omega0=None, drive1=None, drive2=None):
    """Amplitude-modulate a single photon: (phi_O, phi_R) = (m11 phi, m21 phi).

    The outputs are left unnormalized; their squared norms are the exit
    probabilities through the physical and radiative ports.
    """
    _require_normalized(packet)
    if drive1 is None or drive2 is None:
        if omega0 is not None:
            for tone, drive in zip(cfg.arms, (drive1, drive2)):
                if drive is None:
                    check_grid_rule(packet, tone.omega_index * omega0)
    for drive in (drive1, drive2):
        if drive is not None and np.asarray(getattr(drive, "samples", drive)).size != packet.n:
            raise ValueError("drive is not sampled on the packet grid")
    cm = classical_matrix(cfg, packet.times, omega0, drive1, drive2)
    out = packet.with_samples(cm.m11 * packet.samples)
    rad = packet.with_samples(cm.m21 * packet.samples)
    total = out.norm_sq() + rad.norm_sq()
    if abs(total - 1.0) > NORM_TOL:
        raise ContractViolation("probability_split", f"|phi_O|^2 + |phi_R|^2 = {total!r}")
    return out, rad


def frequency_convolve(cfg, packet, omega0, out_port=1, band=None):
    """phi_O built in the frequency domain: sum_s a_s phi~(omega - s Omega0).

    ``a_s`` is the optical-limit sideband amplitude of the modulator from
    input port 1 to ``out_port``. Only single-tone arms are supported.
    """
    base = check_grid_rule(packet, omega0)
    if band is None:
        # amplitudes, not powers, must be negligible beyond the band
        band = max(guard_band(t.effective_m, tol=1e-32) * t.omega_index for t in cfg.arms)
    f = packet.dft()
    k = np.arange(packet.n)
    acc = np.zeros(packet.n, dtype=complex)
    for s in range(-band, band + 1):
        a = classical_sideband(cfg, out_port, 1, s)
        if a == 0:
            continue
        acc += a * np.exp(-1j * s * omega0 * packet.t0) * f[(k - s * base) % packet.n]
    return Wavepacket.from_dft(acc, packet.t0, packet.dt, packet.carrier)


def phase_modulate_wavepacket(mod, packet, omega0=None, m=1.0, phi_b=0.0):
    """phi'(t) = phi(t) exp(i phi_b - i m x(t)).

    ``mod`` is a ToneConfig (x = cos(n omega0 t + theta), its own m and phi_b)
    or a DriveSignal / sample array scaled by ``m`` with bias ``phi_b``.
    """
    t = packet.times
    if isinstance(mod, ToneConfig):
        if omega0 is None:
            raise ValueError("omega0 is needed for a ToneConfig drive")
        check_grid_rule(packet, mod.omega_index * omega0)
        x = np.cos(mod.omega_index * omega0 * t + mod.effective_theta)
        phase = mod.phi_b - mod.effective_m * x
    else:
        x = np.asarray(getattr(mod, "samples", mod), dtype=float)
        if x.shape != t.shape:
            raise ValueError("drive is not sampled on the packet grid")
        phase = phi_b - m * x
    return packet.with_samples(packet.samples * np.exp(1j * phase))


def hom_coincidences(packet, alpha, t1, t2):
    """Coincidence densities after a balanced splitter.

    One photon with envelope ``phi`` enters each input; the one on input 1
    carries the extra phase ``alpha(t)``. Returns (P(1 t1, 1 t2),
    P(2 t1, 2 t2), P(1 t1, 2 t2)).
    """
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (packet.n,):
        raise ValueError("alpha must be sampled on the packet grid")
    j, k = packet.index_of(t1), packet.index_of(t2)
    w = abs(packet.samples[j]) ** 2 * abs(packet.samples[k]) ** 2
    c = math.cos(alpha[j] - alpha[k])
    same = 0.25 * w * (1.0 + c)
    return same, same, 0.5 * w * (1.0 - c)


def hom_density_grids(packet, alpha):
    """All ordered-pair densities on the grid as three N x N arrays."""
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (packet.n,):
        raise ValueError("alpha must be sampled on the packet grid")
    p = np.abs(packet.samples) ** 2
    w = np.outer(p, p)
    c = np.cos(alpha[:, None] - alpha[None, :])
    same = 0.25 * w * (1.0 + c)
    return same, same.copy(), 0.5 * w * (1.0 - c)


def g1_correlation(cfg, packet, ports, t1, t2, omega0=None, drive1=None, drive2=None):
    """Normalized first-order coherence between output ``a`` at t1 and ``b`` at t2."""
    a, b = ports
    if a not in (1, 2) or b not in (1, 2):
        raise ValueError("ports must be 1 or 2")
    j, k = packet.index_of(t1), packet.index_of(t2)
    cm = classical_matrix(cfg, packet.times, omega0, drive1, drive2)
    u = cm.entry(a, 1)[j] * packet.samples[j]
    v = cm.entry(b, 1)[k] * packet.samples[k]
    den = abs(u) * abs(v)
    if den < 1e-300:
        raise ContractViolation("g1_defined", "zero amplitude at a requested sample; g1 undefined")
    return complex(np.conj(u) * v / den)
