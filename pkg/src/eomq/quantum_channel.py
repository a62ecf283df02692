"""Amplitude modulation seen from the physical output port as a quantum operation.

For one photon entering port 1 the modulator output is
``(V|psi>) (x) |vac> + |vac> (x) (W|psi>)`` with

    V = t'_o t'_i S_1 + r_o r'_i S_2      (stays in port 1)
    W = r'_o t'_i S_1 + t_o r'_i S_2      (leaves through port 2)

and ``V+V + W+W = 1``. Tracing out port 2 gives the channel
``rho -> W-weight |vac><vac| + V rho V+`` whose Kraus operators are
``K_0 = V`` and ``K_k = |vac><1_k| W`` for every lattice mode k.
"""

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .amp_mod import eom_apply, eom_apply_stepwise, eom_matrices
from .errors import ContractViolation, GuardBandError
from .mode_space import OnePhotonMatrix, TwoPortState

TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OnePhotonDensity:
    """Density matrix of one photon on one port over a lattice window."""

    lattice: object
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        n = self.lattice.size
        if rho.shape != (n, n):
            raise ValueError(f"density shape {rho.shape} does not match window size {n}")
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > 1e-10:
            raise ValueError(f"density matrix trace is {np.trace(rho).real!r}, expected 1")
        if np.min(np.linalg.eigvalsh(rho)) < -1e-10:
            raise ValueError("density matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", rho)

    @classmethod
    def pure(cls, lattice, vector):
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(lattice, np.outer(v, v.conj()))

    @classmethod
    def mixture(cls, lattice, weights, vectors):
        rho = np.zeros((lattice.size, lattice.size), dtype=complex)
        for w, v in zip(weights, vectors):
            v = np.asarray(v, dtype=complex)
            v = v / np.linalg.norm(v)
            rho += w * np.outer(v, v.conj())
        return cls(lattice, rho)

    def support(self):
        diag = np.real(np.diag(self.matrix))
        return [q for q, d in zip(self.lattice.modes, diag) if d > 1e-15]


@dataclass(frozen=True, eq=False)
class ChannelResult:
    """Exit probabilities and the state conditioned on a photon in port 1.

    ``conditional`` is None when p1 < 1e-12; it is never fabricated.
    """

    p0: float
    p1: float
    conditional: object
    unnormalized: np.ndarray

    @property
    def has_photon(self):
        return self.conditional is not None


def vw_operators(cfg, lattice):
    mats = eom_matrices(cfg, lattice)
    return (
        OnePhotonMatrix(lattice, mats.matrix(1, 1), mats.guard),
        OnePhotonMatrix(lattice, mats.matrix(2, 1), mats.guard),
    )


def _interior_index(op):
    return [op.lattice.index(q) for q in op.interior_modes()]


def completeness_defect(v, w):
    """max |V+V + W+W - 1| over interior columns."""
    idx = _interior_index(v)
    vv = v.data[:, idx]
    ww = w.data[:, idx]
    gram = vv.conj().T @ vv + ww.conj().T @ ww
    return float(np.max(np.abs(gram - np.eye(len(idx))), initial=0.0))


def _check_support(rho, v):
    interior = set(v.interior_modes())
    bad = [q for q in rho.support() if q not in interior]
    if bad:
        raise GuardBandError(f"input density occupies modes {bad[:5]} inside the guard band")


def apply_channel(rho, cfg):
    v, w = vw_operators(cfg, rho.lattice)
    _check_support(rho, v)
    out1 = v.data @ rho.matrix @ v.data.conj().T
    p1 = float(np.real(np.trace(out1)))
    p0 = float(np.real(np.trace(w.data @ rho.matrix @ w.data.conj().T)))
    if abs(p0 + p1 - 1.0) > TOL:
        raise ContractViolation("trace_preservation", f"p0 + p1 = {p0 + p1!r}")
    cond = None
    if p1 >= 1e-12:
        cond = OnePhotonDensity(rho.lattice, 0.5 * (out1 + out1.conj().T) / p1)
    return ChannelResult(p0, p1, cond, out1)


def channel_by_propagation(rho, cfg):
    """(vacuum weight, port-1 block) from eigen-components sent through the
    element-by-element modulator and a partial trace over port 2."""
    lat = rho.lattice
    vals, vecs = np.linalg.eigh(rho.matrix)
    block = np.zeros_like(rho.matrix)
    vac = 0.0
    for lam, vec in zip(vals, vecs.T):
        if lam <= 1e-15:
            continue
        out = eom_apply_stepwise(cfg, TwoPortState.from_vector(lat, 1, vec), lat)
        port1 = np.zeros(lat.size, dtype=complex)
        for key, amp in out.items():
            ((port, mode, _),) = key
            if port == 1:
                port1[lat.index(mode)] += amp
            else:
                vac += lam * abs(amp) ** 2
        block += lam * np.outer(port1, port1.conj())
    return vac, block


def kraus_operators(cfg, lattice, tol=1e-14):
    """K_0 = V followed by the row vectors W[k, :] of every non-empty output mode."""
    v, w = vw_operators(cfg, lattice)
    rows = [(q, w.data[i]) for i, q in enumerate(lattice.modes) if np.linalg.norm(w.data[i]) > tol]
    return v, rows


def kraus_consistency(rho, cfg):
    """Compare the operator-sum form against direct propagation; raise on mismatch."""
    v, rows = kraus_operators(cfg, rho.lattice)
    _check_support(rho, v)
    block = v.data @ rho.matrix @ v.data.conj().T
    vac = float(sum(np.real(r @ rho.matrix @ r.conj()) for _, r in rows))
    ref_vac, ref_block = channel_by_propagation(rho, cfg)
    recon = float(max(abs(vac - ref_vac), np.max(np.abs(block - ref_block))))
    idx = _interior_index(v)
    comp = v.data[:, idx].conj().T @ v.data[:, idx]
    for _, r in rows:
        comp = comp + np.outer(r[idx].conj(), r[idx])
    comp_err = float(np.max(np.abs(comp - np.eye(len(idx)))))
    report = {
        "kraus_count": 1 + len(rows),
        "vacuum_weight": vac,
        "photon_weight": float(np.real(np.trace(block))),
        "reconstruction_error": recon,
        "completeness_error": comp_err,
    }
    if recon > TOL:
        raise ContractViolation("kraus_reconstruction", f"mismatch {recon:.3g}")
    if comp_err > TOL:
        raise ContractViolation("kraus_completeness", f"defect {comp_err:.3g}")
    return report


def reduced_density(state, port=1):
    """Reduced density of ``port`` as (basis keys, matrix); keys are that port's occupations."""
    groups = defaultdict(dict)
    for key, amp in state.items():
        mine = tuple(t for t in key if t[0] == port)
        rest = tuple(t for t in key if t[0] != port)
        groups[rest][mine] = amp
    basis = sorted({k for g in groups.values() for k in g})
    pos = {k: i for i, k in enumerate(basis)}
    rho = np.zeros((len(basis), len(basis)), dtype=complex)
    for g in groups.values():
        vec = np.zeros(len(basis), dtype=complex)
        for k, a in g.items():
            vec[pos[k]] = a
        rho += np.outer(vec, vec.conj())
    return basis, rho


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    weights: tuple
    blocks: dict
    eigenvalues: dict
    commutator: float

    def summary(self):
        return {
            "weights": list(self.weights),
            "commutator_norm": self.commutator,
            "blocks": {
                str(k): {"dimension": len(self.blocks[k][0]), "eigenvalues": self.eigenvalues[k]}
                for k in sorted(self.blocks)
            },
        }


def block_decompose(state, port=1, n=None):
    """Split the reduced output density of ``port`` into photon-number blocks.

    ``n`` is the photon number of the input; weights are returned for
    k = 0..n. Raises ContractViolation if the density does not commute with
    the photon number or any check fails.
    """
    counts = state.photon_numbers()
    if n is None:
        n = max(counts, default=0)
    if n > 2:
        raise ValueError("block decomposition is limited to n <= 2")
    basis, rho = reduced_density(state, port)
    num = np.array([sum(t[2] for t in k) for k in basis])
    mismatch = num[:, None] != num[None, :]
    comm = float(np.max(np.abs(rho[mismatch]), initial=0.0))
    if comm > TOL:
        raise ContractViolation("number_commutation", f"[rho, N] has entry {comm:.3g}")
    blocks, eigs, weights = {}, {}, []
    for k in range(0, int(num.max(initial=0)) + 1):
        idx = np.flatnonzero(num == k)
        sub = rho[np.ix_(idx, idx)]
        blocks[k] = ([basis[i] for i in idx], sub)
        ev = np.linalg.eigvalsh(sub).tolist() if idx.size else []
        eigs[k] = ev
        if ev and min(ev) < -TOL:
            raise ContractViolation("block_positivity", f"block {k} eigenvalue {min(ev):.3g}")
    for k in range(n + 1):
        w = float(np.real(np.trace(blocks[k][1]))) if k in blocks else 0.0
        if w < -1e-12:
            raise ContractViolation("block_weight", f"weight {k} = {w!r}")
        weights.append(w)
    extra = [np.real(np.trace(blocks[k][1])) for k in blocks if k > n]
    if extra and max(extra) > 1e-12:
        raise ContractViolation("block_range", f"weight above k = {n}")
    total = sum(weights)
    if abs(total - 1.0) > TOL:
        raise ContractViolation("block_trace", f"weights sum to {total!r}")
    return BlockDecomposition(tuple(weights), blocks, eigs, comm)


def channel_output(cfg, state, lattice):
    """Full two-port output of the modulator, ready for :func:`block_decompose`."""
    return eom_apply(cfg, state, lattice)
