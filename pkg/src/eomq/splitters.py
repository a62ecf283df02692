"""Lossless 2x2 splitters: bulk beamsplitter, directional coupler, Y-branch.

Coefficient naming follows the creation-operator substitution

    a+_1 -> t' a+_1 + r' a+_2
    a+_2 -> r  a+_1 + t  a+_2

so ``t', r'`` describe light entering port 1 and ``t, r`` light entering
port 2. :meth:`SplitterCoeffs.operator_matrix` is that substitution matrix
``[[t', r'], [r, t]]``; :meth:`SplitterCoeffs.transfer_matrix` is its
transpose, the classical field matrix with rows = output ports and columns =
input ports, which composes left-to-right like ordinary transfer matrices.

A Y-branch is a 2x2 device whose second port is radiative: it carries vacuum
in and rejected light out. The algebra does not treat it specially.
"""

import math
from dataclasses import dataclass

import numpy as np

from .mode_space import MAX_PHOTONS, transform_creators

KINDS = ("bs", "dc", "yb_split", "yb_combine")


@dataclass(frozen=True)
class SplitterCoeffs:
    t_prime: complex
    r_prime: complex
    r: complex
    t: complex

    def operator_matrix(self):
        return np.array([[self.t_prime, self.r_prime], [self.r, self.t]], dtype=complex)

    def transfer_matrix(self):
        return self.operator_matrix().T.copy()

    @classmethod
    def from_transfer(cls, u):
        u = np.asarray(u, dtype=complex)
        return cls(u[0, 0], u[1, 0], u[0, 1], u[1, 1])

    def unitarity_defect(self):
        u = self.transfer_matrix()
        return float(np.max(np.abs(u.conj().T @ u - np.eye(2))))


IDENTITY = SplitterCoeffs(1.0, 0.0, 0.0, 1.0)


def validate(coeffs, tol=1e-12):
    """Check energy conservation and reciprocity (|t'|^2+|r'|^2 = 1, r* t' + r' t* = 0)."""
    tp, rp, r, t = coeffs.t_prime, coeffs.r_prime, coeffs.r, coeffs.t
    checks = {
        "|t'|^2+|r'|^2": abs(abs(tp) ** 2 + abs(rp) ** 2 - 1.0),
        "|t|^2+|r|^2": abs(abs(t) ** 2 + abs(r) ** 2 - 1.0),
        "r*t'+r't*": abs(np.conj(r) * tp + rp * np.conj(t)),
    }
    bad = {k: v for k, v in checks.items() if v > tol}
    if bad:
        raise ValueError(f"splitter coefficients are not unitary: {bad}")
    return coeffs


def make_splitter(kind, k=0.5, coeffs=None):
    """Build splitter coefficients.

    ``dc``: t = t' = sqrt(1-k), r = r' = i sqrt(k).
    ``yb_split``: substitution matrix [[sqrt(1-k), sqrt(k)], [-sqrt(k), sqrt(1-k)]].
    ``yb_combine``: its transpose.
    ``bs``: user supplied ``coeffs`` (a SplitterCoeffs or (t', r', r, t)),
    validated for unitarity.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown splitter kind {kind!r}; expected one of {KINDS}")
    if kind == "bs":
        if coeffs is None:
            raise ValueError("bs splitter needs explicit coefficients")
        if not isinstance(coeffs, SplitterCoeffs):
            coeffs = SplitterCoeffs(*(complex(c) for c in coeffs))
        return validate(coeffs)
    if not 0.0 <= k <= 1.0:
        raise ValueError(f"coupling constant k must lie in [0, 1], got {k}")
    a = math.sqrt(1.0 - k)
    b = math.sqrt(k)
    if kind == "dc":
        return SplitterCoeffs(a, 1j * b, 1j * b, a)
    if kind == "yb_split":
        return SplitterCoeffs(a, b, -b, a)
    return SplitterCoeffs(a, -b, b, a)


def split_one_photon(coeffs, state):
    """Send every photon of ``state`` through the splitter (mode indices kept)."""
    if max(state.photon_numbers(), default=0) > MAX_PHOTONS:
        raise ValueError(f"state exceeds the {MAX_PHOTONS}-photon cap")
    row = {1: (coeffs.t_prime, coeffs.r_prime), 2: (coeffs.r, coeffs.t)}

    def image(port, mode):
        to1, to2 = row[port]
        return [((1, mode), to1), ((2, mode), to2)]

    return transform_creators(state, image)
