"""Electro-optic amplitude modulator: a Mach-Zehnder with a phase modulator
in each arm between an input and an output splitter.

Arm 1 is the path reached from input port 1 through the ``t'`` route of the
input splitter (and from input port 2 through ``r``); arm 2 is the other path.
With transfer matrices ``U_i``, ``U_o`` (rows = outputs) and arm phases
``e_k(t) = exp(i phi_Bk - i m_k x_k(t))`` the classical field matrix is

    M(t) = U_o diag(e_1, e_2) U_i

so for instance ``m11 = t'_o t'_i e_1 + r_o r'_i e_2``. Quantum mechanically
each ``e_k`` becomes the arm's exact one-photon matrix and the same product
acts on the creation operators of every photon.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation
from .mode_space import (
    ModeLattice,
    OnePhotonMatrix,
    TwoPortState,
    apply_one_photon_matrix,
    check_guard,
    transform_creators,
)
from .phase_mod import ToneConfig, classical_coeff, exact_matrix, guard_band
from .splitters import SplitterCoeffs, make_splitter, split_one_photon, validate

PRESETS = ("dsb_quadrature", "ssb_lower_suppressed", "ssb_upper_suppressed")


@dataclass(frozen=True)
class EomConfig:
    """Splitters plus the two arm modulators. ``asymmetric`` replaces arm 1 by the identity."""

    input_splitter: SplitterCoeffs
    output_splitter: SplitterCoeffs
    arm1: ToneConfig
    arm2: ToneConfig
    asymmetric: bool = False

    def __post_init__(self):
        validate(self.input_splitter)
        validate(self.output_splitter)

    @property
    def arms(self):
        arm1 = ToneConfig(0.0) if self.asymmetric else self.arm1
        return (arm1, self.arm2)

    def block(self):
        """Coefficients ``c[a][b][k] = U_o[a, k] U_i[k, b]`` (arm k from input b to output a)."""
        uo = self.output_splitter.transfer_matrix()
        ui = self.input_splitter.transfer_matrix()
        return np.einsum("ak,kb->abk", uo, ui)


@dataclass(frozen=True)
class EomClassicalMatrix:
    """m_ab(t) sampled on ``times``: field on output a per unit field on input b."""

    times: np.ndarray
    m11: np.ndarray
    m12: np.ndarray
    m21: np.ndarray
    m22: np.ndarray

    def entry(self, a, b):
        return getattr(self, f"m{a}{b}")

    def unitarity_defect(self):
        col = np.abs(self.m11) ** 2 + np.abs(self.m21) ** 2 - 1.0
        cross = self.m11 * np.conj(self.m12) + self.m21 * np.conj(self.m22)
        return float(max(np.max(np.abs(col)), np.max(np.abs(cross))))

    def rows(self):
        """(t, Re m11, Im m11, Re m12, Im m12, Re m21, Im m21, Re m22, Im m22) per sample."""
        cols = [self.m11, self.m12, self.m21, self.m22]
        return [
            (float(t),) + tuple(v for c in cols for v in (float(c[j].real), float(c[j].imag)))
            for j, t in enumerate(self.times)
        ]


def _drive_samples(drive, times):
    if drive is None:
        return None
    samples = np.asarray(getattr(drive, "samples", drive), dtype=float)
    if samples.shape != times.shape:
        raise ValueError(
            f"drive has {samples.shape[0] if samples.ndim else 0} samples, grid has {times.size}"
        )
    return samples


def arm_phase(tone, times, omega0=None, drive=None):
    """e(t) = exp(i phi_b - i m x(t)); x is the drive or cos(n Omega0 t + theta)."""
    if drive is None:
        if omega0 is None:
            if tone.effective_m == 0:
                return np.full(times.shape, np.exp(1j * tone.phi_b))
            raise ValueError("omega0 is needed for single-tone drives")
        x = np.cos(tone.omega_index * omega0 * times + tone.effective_theta)
        return np.exp(1j * tone.phi_b - 1j * tone.effective_m * x)
    return np.exp(1j * tone.phi_b - 1j * tone.m * drive)


def classical_matrix(cfg, times, omega0=None, drive1=None, drive2=None):
    """Classical modulation functions on a time grid.

    Without explicit drives each arm follows its ToneConfig, x_k(t) =
    cos(n_k omega0 t + theta_k). An explicit drive (array or object with
    ``samples``) replaces x_k and is scaled by the arm's ``m``.
    """
    times = np.asarray(times, dtype=float)
    d1 = _drive_samples(drive1, times)
    d2 = _drive_samples(drive2, times)
    arm1, arm2 = cfg.arms
    e1 = np.ones(times.shape, dtype=complex) if cfg.asymmetric else arm_phase(arm1, times, omega0, d1)
    e2 = arm_phase(arm2, times, omega0, d2)
    c = cfg.block()
    m = {
        (a, b): c[a, b, 0] * e1 + c[a, b, 1] * e2 for a in range(2) for b in range(2)
    }
    out = EomClassicalMatrix(times, m[0, 0], m[0, 1], m[1, 0], m[1, 1])
    defect = out.unitarity_defect()
    if defect > 1e-12:
        raise ContractViolation("classical_unitarity", f"pointwise defect {defect:.3g}")
    return out


def harmonics(cfg, nmax, samples=256):
    """Fourier coefficients of m11 and m21 over one RF period for offsets -nmax..nmax.

    Coefficient n multiplies exp(-i n Omega0 t), i.e. it is the amplitude
    landing n tone steps above the input frequency.
    """
    if samples <= 2 * nmax:
        raise ValueError("need more samples than harmonics")
    phase = 2.0 * np.pi * np.arange(samples) / samples
    cm = classical_matrix(cfg, phase, omega0=1.0)
    offsets = np.arange(-nmax, nmax + 1)
    kern = np.exp(1j * np.outer(offsets, phase)) / samples
    return offsets, kern @ cm.m11, kern @ cm.m21


@dataclass(frozen=True, eq=False)
class EomMatrices:
    """One-photon EOM response as four window matrices ``blocks[a][b]`` (input b -> output a)."""

    lattice: object
    blocks: tuple
    guard: int
    arms: tuple = field(default=())

    def matrix(self, out_port, in_port):
        return self.blocks[out_port - 1][in_port - 1]


def eom_matrices(cfg, lattice):
    arm_mats = []
    for tone in cfg.arms:
        if tone.effective_m == 0:
            arm_mats.append(OnePhotonMatrix.identity(lattice, tone.phi_b))
        else:
            arm_mats.append(exact_matrix(tone, lattice))
    c = cfg.block()
    blocks = tuple(
        tuple(c[a, b, 0] * arm_mats[0].data + c[a, b, 1] * arm_mats[1].data for b in range(2))
        for a in range(2)
    )
    guard = max(mat.guard for mat in arm_mats)
    return EomMatrices(lattice, blocks, guard, tuple(arm_mats))


def eom_apply(cfg, state, lattice, matrices=None):
    """Send every photon of ``state`` through the modulator."""
    mats = matrices or eom_matrices(cfg, lattice)
    probe = OnePhotonMatrix(lattice, mats.blocks[0][0], mats.guard)
    for port in (1, 2):
        check_guard(probe, state.occupied_modes(port))
    modes = np.array(list(lattice.modes))

    def image(port, q):
        col = lattice.index(q)
        out = []
        for a in (1, 2):
            vec = mats.blocks[a - 1][port - 1][:, col]
            nz = np.flatnonzero(np.abs(vec) >= 1e-17)
            out.extend(((a, int(modes[i])), complex(vec[i])) for i in nz)
        return out

    return transform_creators(state, image)


def eom_apply_stepwise(cfg, state, lattice):
    """Same map as :func:`eom_apply`, built element by element:
    input splitter, each arm's phase modulator, output splitter."""
    mats = eom_matrices(cfg, lattice)
    inside = split_one_photon(cfg.input_splitter, state)
    for port, arm in zip((1, 2), mats.arms):
        inside = apply_one_photon_matrix(inside, port, arm)
    return split_one_photon(cfg.output_splitter, inside)


def eom_one_photon(cfg, input_port, q, lattice):
    return eom_apply(cfg, TwoPortState.single(input_port, q), lattice)


def preset(kind, m):
    """Y-branch modulators with the standard biasing.

    ``dsb_quadrature``: m1 = m2 = m, theta = (0, pi), phi_B = (pi/2, -pi/2);
    the output is the real part of the arm-1 phase factor, so even harmonics
    vanish. ``ssb_*``: phi_B = (pi/2, 0), theta1 = 0 and theta2 = -pi/2
    (lower first sideband cancelled) or +pi/2 (upper cancelled).
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    if kind not in PRESETS:
        raise ValueError(f"unknown preset {kind!r}; expected one of {PRESETS}")
    split = make_splitter("yb_split", 0.5)
    combine = make_splitter("yb_combine", 0.5)
    if kind == "dsb_quadrature":
        arm1 = ToneConfig(m, 0.0, math.pi / 2)
        arm2 = ToneConfig(m, math.pi, -math.pi / 2)
    else:
        theta2 = -math.pi / 2 if kind == "ssb_lower_suppressed" else math.pi / 2
        arm1 = ToneConfig(m, 0.0, math.pi / 2)
        arm2 = ToneConfig(m, theta2, 0.0)
    return EomConfig(split, combine, arm1, arm2)


def classical_sideband(cfg, out_port, in_port, n):
    """Optical-limit amplitude at offset n: sum over arms of splitter weight times C_n."""
    c = cfg.block()[out_port - 1, in_port - 1]
    total = 0.0j
    for k, tone in enumerate(cfg.arms):
        total += c[k] * classical_coeff(tone, n)
    return total


def switch_coefficients(delta_phi_b):
    """Two-photon output coefficients of the directional-coupler switch.

    Keys name the operator products of the arm-1 creator ``b+`` on the output
    ports: ``same1`` for (b+_1)^2, ``cross`` for b+_1 b+_2, ``same2`` for (b+_2)^2.
    """
    ph = np.exp(1j * delta_phi_b)
    return {
        "same1": 0.5 * ph * math.sin(delta_phi_b),
        "cross": -ph * math.cos(delta_phi_b),
        "same2": -0.5 * ph * math.sin(delta_phi_b),
    }


DC_TERM_COEFFS = {
    ("b", 1, 1): 0.25j,
    ("b", 1, 2): -0.5,
    ("b", 2, 2): -0.25j,
    ("c", 1, 1): -0.25j,
    ("c", 1, 2): -0.5,
    ("c", 2, 2): 0.25j,
}
"""Coefficients of b+_a b+_b and c+_a c+_b for one photon in each input of a DC(1/2) EOM."""


def switch_config(delta_phi_b, m, theta=0.0, omega_index=1):
    dc = make_splitter("dc", 0.5)
    return EomConfig(
        dc,
        dc,
        ToneConfig(m, theta, 0.0, omega_index),
        ToneConfig(m, theta, delta_phi_b, omega_index),
    )


def eom_two_photon_switch(delta_phi_b, m, theta, q, lattice):
    """One photon at mode q in each input of a DC(1/2) modulator with equal arm drives."""
    cfg = switch_config(delta_phi_b, m, theta)
    state = TwoPortState.fock([(1, q, 1), (2, q, 1)])
    return eom_apply(cfg, state, lattice)


def sideband_table(cfg, lattice, q=None, input_port=1, min_power=0.0):
    """(port, offset, power, Re amp, Im amp) rows for a single photon at mode q."""
    q = lattice.carrier_index if q is None else q
    out = eom_one_photon(cfg, input_port, q, lattice)
    rows = []
    for key, amp in sorted(out.items()):
        (port, mode, _), = key
        power = abs(amp) ** 2
        if power > min_power:
            rows.append((port, mode - q, power, amp.real, amp.imag))
    return rows


def default_window(cfg, half_window=None, carrier_index=None):
    """Guard-band respecting window around a carrier deep in the optical limit."""
    g = max(guard_band(t.effective_m) * t.omega_index for t in cfg.arms)
    hw = 2 * g if half_window is None else half_window
    q0 = carrier_index if carrier_index is not None else hw + 40
    return ModeLattice.from_window(q0 - hw, q0 + hw, q0)
