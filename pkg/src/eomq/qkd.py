"""Frequency-coded BB84: qubits in the carrier and first sidebands.

Alice prepares each state with a phase modulator and a filter that keeps the
three modes (omega - Omega, omega, omega + Omega):

=====  =====================  =======================
label  setting                amplitudes
=====  =====================  =======================
+1     m1, theta = -pi/2      (-1/2, 1/sqrt2, 1/2)
-1     m1, theta = +pi/2      (1/2, 1/sqrt2, -1/2)
+2     m = 0                  (0, 1, 0)
-2     m2, theta = +pi/2      (-1/sqrt2, 0, 1/sqrt2)
=====  =====================  =======================

where J0(m1) = sqrt2 J1(m1) and J0(m2) = 0. Bob measures basis 2 directly
(carrier detector D2, everything else D1) and basis 1 after his own phase
modulation with m1, theta = -pi/2, which maps |+,1> entirely off the carrier.
The |-,1> state reaches D2 only with probability 4 J1(m1)^2, about 0.953.
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ContractViolation, PerturbativeRegimeWarning
from .mode_space import ModeLattice
from .numerics import bessel_j, solve_bessel_root
from .phase_mod import PERTURBATIVE_LIMIT, ToneConfig, exact_matrix, guard_band

LABELS = ("+1", "-1", "+2", "-2")
CLOSED_FORMS = {
    "+1": (-0.5, 1 / math.sqrt(2), 0.5),
    "-1": (0.5, 1 / math.sqrt(2), -0.5),
    "+2": (0.0, 1.0, 0.0),
    "-2": (-1 / math.sqrt(2), 0.0, 1 / math.sqrt(2)),
}
QUOTED_M = (1.161, 2.405)
BLOCK_SIZE = 1 << 16
# Carrier mode used for Bob's exact matrix; far into the optical limit.
BOB_CARRIER = 400


@lru_cache(maxsize=None)
def solve_modulation_indices():
    """(m1, m2) with J0(m1) = sqrt2 J1(m1) and J0(m2) = 0, by bisection."""
    m1 = solve_bessel_root(lambda m: bessel_j(0, m) - math.sqrt(2) * bessel_j(1, m), 0.5, 2.0)
    m2 = solve_bessel_root(lambda m: bessel_j(0, m), 2.0, 3.0)
    for got, quoted in zip((m1, m2), QUOTED_M):
        if abs(got - quoted) > 2e-3:
            raise ContractViolation("qkd_indices", f"solved m = {got} far from {quoted}")
    return m1, m2


def basis_of(label):
    return int(label[1])


def bit_of(label):
    return 0 if label[0] == "+" else 1


@dataclass(frozen=True, eq=False)
class FcState:
    """Amplitudes over (omega - Omega, omega, omega + Omega)."""

    amplitudes: np.ndarray
    label: str = None

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.shape != (3,):
            raise ValueError("an FC state has three amplitudes")
        if abs(np.linalg.norm(a) - 1.0) > 1e-12:
            raise ValueError(f"FC state is not unit norm: {np.linalg.norm(a)!r}")
        object.__setattr__(self, "amplitudes", a)

    def overlap(self, other):
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def alice_setting(label):
    """(m, theta) used to prepare ``label``."""
    m1, m2 = solve_modulation_indices()
    return {
        "+1": (m1, -math.pi / 2),
        "-1": (m1, math.pi / 2),
        "+2": (0.0, 0.0),
        "-2": (m2, math.pi / 2),
    }[label]


def filtered_state(m, theta):
    """First-sideband filtered phase-modulated carrier, before any phase alignment."""
    j0, j1 = bessel_j(0, m), bessel_j(1, m)
    eta = j0**2 + 2 * j1**2
    amps = np.array([-1j * np.exp(1j * theta) * j1, j0, -1j * np.exp(-1j * theta) * j1])
    return amps / math.sqrt(eta)


def alice_state(label):
    """Prepare ``label`` and align its global phase with the closed form.

    A global phase carries no physics; it is fixed so the state can be
    compared entrywise with the tabulated amplitudes (within 1e-3).
    """
    if label not in LABELS:
        raise ValueError(f"unknown label {label!r}; expected one of {LABELS}")
    amps = filtered_state(*alice_setting(label))
    target = np.array(CLOSED_FORMS[label], dtype=complex)
    ov = np.vdot(amps, target)
    amps = amps * (ov / abs(ov))
    err = float(np.max(np.abs(amps - target)))
    if err > 1e-3:
        raise ContractViolation("fc_state_closed_form", f"{label}: deviation {err:.3g}")
    return FcState(amps, label)


@lru_cache(maxsize=None)
def _bob_matrix(basis):
    m1, _ = solve_modulation_indices()
    g = guard_band(m1) + 2
    lat = ModeLattice.from_window(BOB_CARRIER - g, BOB_CARRIER + g, BOB_CARRIER)
    if basis == 1:
        return lat, exact_matrix(ToneConfig(m1, -math.pi / 2), lat).data
    return lat, np.eye(lat.size, dtype=complex)


def bob_measure_probs(state, bob_basis):
    """(p_D1, p_D2): D2 watches the carrier, D1 every other mode."""
    if bob_basis not in (1, 2):
        raise ValueError("Bob's basis is 1 or 2")
    lat, mat = _bob_matrix(bob_basis)
    q0 = lat.carrier_index
    cols = [lat.index(q) for q in (q0 - 1, q0, q0 + 1)]
    out = mat[:, cols] @ state.amplitudes
    p = np.abs(out) ** 2
    p_d2 = float(p[lat.index(q0)])
    p_d1 = float(np.sum(p) - p_d2)
    if abs(p_d1 + p_d2 - 1.0) > 1e-6:
        raise ContractViolation("bob_probability_sum", f"p_D1 + p_D2 = {p_d1 + p_d2!r}")
    return p_d1, p_d2


def bob_bit(basis, detector):
    """Basis 1: D1 means '+', D2 '-'. Basis 2: D2 means '+', D1 '-'."""
    if basis == 1:
        return 0 if detector == 1 else 1
    return 0 if detector == 2 else 1


def b92_sideband_amplitude(m_a, theta_a, m_b, theta_b, alpha):
    """First-order (lower, upper) sideband amplitudes after Alice's and Bob's modulators."""
    for m in (m_a, m_b):
        if m > PERTURBATIVE_LIMIT:
            warnings.warn(
                f"m = {m:.3g} exceeds {PERTURBATIVE_LIMIT}; first-order amplitude unreliable",
                PerturbativeRegimeWarning,
                stacklevel=2,
            )
    lower = -0.5j * (np.exp(1j * theta_a) * m_a + np.exp(1j * theta_b) * m_b) * alpha
    upper = -0.5j * (np.exp(-1j * theta_a) * m_a + np.exp(-1j * theta_b) * m_b) * alpha
    return complex(lower), complex(upper)


def click_table():
    """p_D2 for every (label, Bob basis), as a 4 x 2 array."""
    return np.array(
        [[bob_measure_probs(alice_state(lab), b)[1] for b in (1, 2)] for lab in LABELS]
    )


def _normalize_rates(rates):
    if rates is None:
        return np.full(4, 0.25)
    if isinstance(rates, dict):
        unknown = set(rates) - set(LABELS)
        if unknown:
            raise ValueError(f"unknown labels in rates: {sorted(unknown)}")
        rates = [rates.get(lab, 0.0) for lab in LABELS]
    r = np.asarray(rates, dtype=float)
    if r.shape != (4,) or np.any(r < 0):
        raise ValueError("rates must be four non-negative numbers")
    if abs(r.sum() - 1.0) > 1e-12:
        raise ValueError(f"rates must sum to 1, got {r.sum()!r}")
    return r


def expected_qber(rates=None, force_basis=None):
    """Exact sifted QBER implied by the click table."""
    r = _normalize_rates(rates)
    pd2 = click_table()
    pb = {1: 0.5, 2: 0.5} if force_basis is None else {force_basis: 1.0}
    sifted = err = 0.0
    for i, lab in enumerate(LABELS):
        b = basis_of(lab)
        w = r[i] * pb.get(b, 0.0)
        p_right_det = pd2[i, b - 1] if bob_bit(b, 2) == bit_of(lab) else 1 - pd2[i, b - 1]
        sifted += w
        err += w * (1 - p_right_det)
    return err / sifted if sifted else 0.0


@dataclass(frozen=True)
class SessionStats:
    """Counts indexed by (label, Bob basis, detector) plus sifted figures."""

    trials: int
    seed: int
    counts: dict = field(repr=False)
    sifted: int
    errors: int
    minus1_errors: int

    @property
    def sift_rate(self):
        return self.sifted / self.trials

    @property
    def qber(self):
        return self.errors / self.sifted if self.sifted else 0.0

    @property
    def minus1_contribution(self):
        """Fraction of sifted bits wrong because |-,1> reached D1."""
        return self.minus1_errors / self.sifted if self.sifted else 0.0

    def qber_sigma(self):
        q = self.qber
        return math.sqrt(q * (1 - q) / self.sifted) if self.sifted else 0.0

    def to_dict(self):
        return {
            "trials": self.trials,
            "seed": self.seed,
            "sifted": self.sifted,
            "errors": self.errors,
            "sift_rate": self.sift_rate,
            "qber": self.qber,
            "qber_sigma": self.qber_sigma(),
            "minus1_contribution": self.minus1_contribution,
            "counts": [
                {"label": lab, "bob_basis": b, "detector": d, "count": n}
                for (lab, b, d), n in sorted(self.counts.items())
            ],
        }


def _run_block(child, n, rates, pd2, force_basis):
    rng = np.random.default_rng(child)
    labels = rng.choice(4, size=n, p=rates)
    if force_basis is None:
        basis = rng.integers(1, 3, size=n)
    else:
        basis = np.full(n, force_basis)
    u = rng.random(n)
    det = np.where(u < pd2[labels, basis - 1], 2, 1)
    counts = np.zeros((4, 2, 2), dtype=np.int64)
    np.add.at(counts, (labels, basis - 1, det - 1), 1)
    return counts


def run_session(trials, rates=None, seed=None, force_basis=None, workers=1, block_size=BLOCK_SIZE):
    """Monte Carlo session with ideal detectors and a lossless channel.

    Trials are split into fixed-size blocks, each with its own child seed,
    so the result depends only on ``seed`` and ``block_size``, never on
    ``workers``.
    """
    if seed is None:
        raise ValueError("a seed is required")
    if trials <= 0:
        raise ValueError("trials must be positive")
    if force_basis not in (None, 1, 2):
        raise ValueError("force_basis must be 1, 2 or None")
    r = _normalize_rates(rates)
    pd2 = click_table()
    nblocks = -(-trials // block_size)
    children = np.random.SeedSequence(seed).spawn(nblocks)
    sizes = [block_size] * (nblocks - 1) + [trials - block_size * (nblocks - 1)]
    args = [(c, n, r, pd2, force_basis) for c, n in zip(children, sizes)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _run_block(*a), args))
    else:
        parts = [_run_block(*a) for a in args]
    counts = sum(parts)
    table = {}
    sifted = errors = minus1 = 0
    for i, lab in enumerate(LABELS):
        for b in (1, 2):
            for d in (1, 2):
                n = int(counts[i, b - 1, d - 1])
                table[(lab, b, d)] = n
                if b == basis_of(lab):
                    sifted += n
                    if bob_bit(b, d) != bit_of(lab):
                        errors += n
                        if lab == "-1":
                            minus1 += n
    return SessionStats(trials, int(seed), table, sifted, errors, minus1)
