"""Numerical simulator for deterministic teleportation with single-photon entanglement."""

__version__ = "0.1.0"

from .config import SimConfig, Tolerances
from .fock import (
    Atom,
    BellKind,
    FockMode,
    HilbertLayout,
    SingleRailQubit,
    StateVector,
    make_bell,
    make_coherent,
    make_qubit_state,
    make_vacuum,
    tensor,
)
from .jc import perr
from .protocol import teleport_campaign

__all__ = [
    "Atom",
    "BellKind",
    "FockMode",
    "HilbertLayout",
    "SimConfig",
    "SingleRailQubit",
    "StateVector",
    "Tolerances",
    "make_bell",
    "make_coherent",
    "make_qubit_state",
    "make_vacuum",
    "perr",
    "teleport_campaign",
    "tensor",
]
