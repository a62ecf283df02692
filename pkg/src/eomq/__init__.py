"""Quantum scattering models of electro-optic phase and amplitude modulators."""

from ._backend import BACKEND
from .amp_mod import EomConfig, eom_one_photon, preset
from .errors import ContractViolation, GuardBandError, PerturbativeRegimeWarning
from .mode_space import ModeLattice, OnePhotonMatrix, TwoPortState, make_lattice
from .phase_mod import ToneConfig, classical_coeff, exact_coeff, exact_matrix
from .splitters import SplitterCoeffs, make_splitter
from .wavepacket import DriveSignal, Wavepacket

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ContractViolation",
    "DriveSignal",
    "EomConfig",
    "GuardBandError",
    "ModeLattice",
    "OnePhotonMatrix",
    "PerturbativeRegimeWarning",
    "SplitterCoeffs",
    "ToneConfig",
    "TwoPortState",
    "Wavepacket",
    "classical_coeff",
    "eom_one_photon",
    "exact_coeff",
    "exact_matrix",
    "make_lattice",
    "make_splitter",
    "preset",
]
