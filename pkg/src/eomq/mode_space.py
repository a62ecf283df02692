"""Frequency-mode lattices and sparse multi-photon states on two ports.

A mode index ``q >= 1`` labels the optical frequency
``omega_q = carrier_freq + (q - carrier_index) * tone``; index 1 is the lowest
strictly positive frequency reachable from the carrier in steps of the tone.

States are stored as ``{key: amplitude}`` where a key is the sorted tuple of
``(port, mode, occupation)`` triples, i.e. the normalised Fock vector

    prod_s (a+_{port_s, mode_s})^{n_s} / sqrt(n_s!) |vac>

Every linear optical element here acts on creation operators
(``a+ -> sum c a+``), so :func:`transform_creators` is the single workhorse
behind splitters, modulators and their compositions.
"""

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import GuardBandError

MAX_PHOTONS = 4
PRUNE = 1e-15
# Column entries below this cannot lift any amplitude above PRUNE.
_COEFF_FLOOR = 1e-17


@dataclass(frozen=True)
class ModeLattice:
    """A window ``[q_lo, q_hi]`` of a frequency lattice with spacing ``tone``."""

    carrier_index: int
    tone: float
    q_lo: int
    q_hi: int
    carrier_freq: float = None

    def __post_init__(self):
        if self.tone <= 0:
            raise ValueError("tone must be positive")
        if self.q_lo < 1:
            raise ValueError(f"window reaches non-positive frequency index q={self.q_lo}")
        if not (self.q_lo <= self.carrier_index <= self.q_hi):
            raise ValueError(
                f"carrier index {self.carrier_index} outside window [{self.q_lo}, {self.q_hi}]"
            )

    @classmethod
    def from_window(cls, q_lo, q_hi, carrier_index=None, tone=1.0):
        if carrier_index is None:
            carrier_index = (q_lo + q_hi) // 2
        return cls(int(carrier_index), float(tone), int(q_lo), int(q_hi))

    @property
    def size(self):
        return self.q_hi - self.q_lo + 1

    @property
    def modes(self):
        return range(self.q_lo, self.q_hi + 1)

    def index(self, q):
        """Row/column position of mode ``q`` in dense window arrays."""
        if not self.q_lo <= q <= self.q_hi:
            raise IndexError(f"mode {q} outside window [{self.q_lo}, {self.q_hi}]")
        return q - self.q_lo

    def offset(self, q):
        return q - self.carrier_index

    def frequency(self, q):
        base = self.carrier_freq if self.carrier_freq is not None else self.carrier_index * self.tone
        return base + (q - self.carrier_index) * self.tone

    def edge_distance(self, q):
        """Distance to the nearest *truncated* edge; the q=1 floor is physical."""
        lower = math.inf if self.q_lo == 1 else q - self.q_lo
        return min(lower, self.q_hi - q)


def make_lattice(carrier_freq, tone, half_window):
    """Lattice centred on the carrier with ``half_window`` modes either side.

    The carrier index is ceil(carrier_freq / tone); ratios within 1e-9 of an
    integer are snapped so that e.g. 200 THz / 25 GHz gives exactly 8000.
    """
    if carrier_freq <= 0 or tone <= 0:
        raise ValueError("carrier frequency and tone must be positive")
    half_window = int(half_window)
    ratio = carrier_freq / tone
    nearest = round(ratio)
    q0 = int(nearest) if abs(ratio - nearest) <= 1e-9 * max(1.0, ratio) else math.ceil(ratio)
    q_lo = q0 - half_window
    if q_lo < 1:
        raise ValueError(
            f"window would include q = {q_lo} <= 0 (negative or zero frequency): "
            f"carrier/tone = {ratio:g} must exceed half_window = {half_window}"
        )
    return ModeLattice(q0, float(tone), q_lo, q0 + half_window, float(carrier_freq))


def _canonical(key):
    merged = defaultdict(int)
    for port, mode, n in key:
        if port not in (1, 2):
            raise ValueError(f"port must be 1 or 2, got {port}")
        if mode < 1:
            raise ValueError(f"mode index must be >= 1, got {mode}")
        if n < 0:
            raise ValueError("occupation must be non-negative")
        merged[(int(port), int(mode))] += int(n)
    return tuple(sorted((p, q, n) for (p, q), n in merged.items() if n > 0))


class TwoPortState:
    """Immutable sparse superposition of two-port Fock vectors."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        acc = defaultdict(complex)
        for key, amp in (terms or {}).items():
            ckey = _canonical(key)
            if sum(n for _, _, n in ckey) > MAX_PHOTONS:
                raise ValueError(f"more than {MAX_PHOTONS} photons in term {ckey}")
            acc[ckey] += complex(amp)
        self._terms = {k: v for k, v in acc.items() if abs(v) > 0.0}

    @classmethod
    def vacuum(cls):
        return cls({(): 1.0})

    @classmethod
    def single(cls, port, mode, amplitude=1.0):
        return cls({((port, mode, 1),): amplitude})

    @classmethod
    def fock(cls, occupations, amplitude=1.0):
        """One basis vector from ``[(port, mode, n), ...]``."""
        return cls({tuple(occupations): amplitude})

    @classmethod
    def from_vector(cls, lattice, port, amplitudes):
        """One-photon state ``sum_q amplitudes[i] |1_q>`` on ``port``."""
        return cls(
            {((port, q, 1),): a for q, a in zip(lattice.modes, amplitudes) if a != 0}
        )

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def amplitude(self, key):
        return self._terms.get(_canonical(key), 0.0j)

    def norm(self):
        return math.sqrt(sum(abs(a) ** 2 for a in self._terms.values()))

    def photon_numbers(self):
        return {sum(n for _, _, n in key) for key in self._terms}

    def occupied_modes(self, port):
        return sorted({q for key in self._terms for p, q, _ in key if p == port})

    def scaled(self, factor):
        return TwoPortState({k: factor * v for k, v in self._terms.items()})

    def normalized(self):
        return self.scaled(1.0 / self.norm())

    def __add__(self, other):
        acc = dict(self._terms)
        for k, v in other.items():
            acc[k] = acc.get(k, 0.0) + v
        return TwoPortState(acc)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def pruned(self, threshold=PRUNE):
        return TwoPortState({k: v for k, v in self._terms.items() if abs(v) >= threshold})

    def port_marginal(self, port):
        """Probability of each photon count on ``port``."""
        out = defaultdict(float)
        for key, amp in self._terms.items():
            out[sum(n for p, _, n in key if p == port)] += abs(amp) ** 2
        return dict(out)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dict(self):
        return {
            "terms": [
                {
                    "occupations": [{"port": p, "mode": q, "n": n} for p, q, n in key],
                    "amplitude": {"re": amp.real, "im": amp.imag},
                }
                for key, amp in sorted(self._terms.items())
            ]
        }

    @classmethod
    def from_dict(cls, data):
        terms = {}
        for entry in data["terms"]:
            key = tuple((o["port"], o["mode"], o["n"]) for o in entry["occupations"])
            amp = complex(entry["amplitude"]["re"], entry["amplitude"]["im"])
            terms[_canonical(key)] = terms.get(_canonical(key), 0.0) + amp
        return cls(terms)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return f"TwoPortState({len(self._terms)} terms, norm={self.norm():.12g})"


def inner_product(a, b):
    """<a|b> over the orthonormal occupation basis."""
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0.0j
    for key, amp in small.items():
        other = large._terms.get(key)
        if other is not None:
            total += amp.conjugate() * other if small is a else other.conjugate() * amp
    return total


def transform_creators(state, image, prune=PRUNE):
    """Apply a linear substitution of creation operators to ``state``.

    ``image(port, mode)`` returns ``[((port', mode'), coeff), ...]`` describing
    a+_{port,mode} -> sum coeff a+_{port',mode'}. The vacuum is left invariant,
    so the state maps by substituting inside each monomial.
    """
    out = defaultdict(complex)
    cache = {}

    def img(op):
        if op not in cache:
            cache[op] = [(o, c) for o, c in image(*op) if abs(c) >= _COEFF_FLOOR]
        return cache[op]

    for key, amp in state.items():
        factor = amp
        ops = []
        for port, mode, n in key:
            factor /= math.sqrt(math.factorial(n))
            ops.extend([(port, mode)] * n)
        poly = {(): factor}
        for op in ops:
            nxt = defaultdict(complex)
            for mono, c in poly.items():
                for target, coeff in img(op):
                    nxt[tuple(sorted(mono + (target,)))] += c * coeff
            poly = nxt
        for mono, c in poly.items():
            counts = defaultdict(int)
            for op in mono:
                counts[op] += 1
            bose = math.prod(math.sqrt(math.factorial(n)) for n in counts.values())
            out[tuple((p, q, n) for (p, q), n in sorted(counts.items()))] += c * bose
    return TwoPortState({k: v for k, v in out.items() if abs(v) >= prune})


@dataclass(frozen=True, eq=False)
class OnePhotonMatrix:
    """Dense one-photon amplitudes ``data[k - q_lo, q - q_lo]`` (input q, output k).

    ``guard`` is the minimum distance an occupied mode must keep from a
    truncated window edge for the truncation loss to stay negligible.
    """

    lattice: ModeLattice
    data: np.ndarray
    guard: int = 0
    warnings: tuple = field(default=())

    def __post_init__(self):
        n = self.lattice.size
        if self.data.shape != (n, n):
            raise ValueError(f"matrix shape {self.data.shape} does not match window size {n}")

    @classmethod
    def identity(cls, lattice, phase=0.0):
        return cls(lattice, np.exp(1j * phase) * np.eye(lattice.size, dtype=complex))

    def entry(self, k, q):
        return self.data[self.lattice.index(k), self.lattice.index(q)]

    def column(self, q):
        return self.data[:, self.lattice.index(q)]

    def column_norms(self):
        return np.sqrt(np.sum(np.abs(self.data) ** 2, axis=0))

    def interior_modes(self, guard=None):
        g = self.guard if guard is None else guard
        return [q for q in self.lattice.modes if self.lattice.edge_distance(q) >= g]

    def then(self, other):
        """Matrix of applying ``self`` first, then ``other``."""
        if other.lattice != self.lattice:
            raise ValueError("lattices differ")
        return OnePhotonMatrix(
            self.lattice,
            other.data @ self.data,
            max(self.guard, other.guard),
            self.warnings + other.warnings,
        )

    def apply(self, vector):
        return self.data @ np.asarray(vector, dtype=complex)


def check_guard(matrix, modes, what="state"):
    for q in modes:
        if not matrix.lattice.q_lo <= q <= matrix.lattice.q_hi:
            raise GuardBandError(f"{what} occupies mode {q} outside the window")
        if matrix.lattice.edge_distance(q) < matrix.guard:
            raise GuardBandError(
                f"{what} occupies mode {q} within {matrix.guard} modes of a truncated "
                f"window edge [{matrix.lattice.q_lo}, {matrix.lattice.q_hi}]"
            )


def apply_one_photon_matrix(state, port, matrix):
    """Scatter every photon on ``port`` through ``matrix``; the other port is untouched."""
    check_guard(matrix, state.occupied_modes(port))
    lat = matrix.lattice
    modes = np.array(list(lat.modes))

    def image(p, q):
        if p != port:
            return [((p, q), 1.0)]
        col = matrix.column(q)
        nz = np.flatnonzero(np.abs(col) >= _COEFF_FLOOR)
        return [((port, int(modes[i])), complex(col[i])) for i in nz]

    return transform_creators(state, image)
