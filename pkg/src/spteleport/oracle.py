"""
Brute-force cross-checks: dense Hamiltonians built from ladder operators and
``exp(-iHt)`` by Hermitian eigendecomposition.

Nothing here reuses the closed-form propagators; the only shared piece is
the layout/index convention of :mod:`spteleport.fock`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionLimitError, LayoutError
from .fock import HilbertLayout, StateVector

ORACLE_MAX_DIM = 4096
HERMITIAN_TOL = 1e-12


def annihilation(cutoff: int) -> np.ndarray:
    """``a|n> = sqrt(n)|n-1>`` truncated to ``cutoff`` levels."""
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1).astype(np.complex128)


def creation(cutoff: int) -> np.ndarray:
    return annihilation(cutoff).conj().T


def number(cutoff: int) -> np.ndarray:
    return np.diag(np.arange(cutoff, dtype=float)).astype(np.complex128)


# basis order (g, e): sigma+ |g> = |e>
SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=np.complex128)
SIGMA_MINUS = SIGMA_PLUS.conj().T
EXCITED = np.diag([0.0, 1.0]).astype(np.complex128)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    layout: HilbertLayout
    entries: np.ndarray

    @property
    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0))

    def element(self, bra: tuple, ket: tuple) -> complex:
        dims = self.layout.dims
        return complex(self.entries[np.ravel_multi_index(bra, dims), np.ravel_multi_index(ket, dims)])

    def __add__(self, other):
        return OperatorMatrix(self.layout, self.entries + other.entries)

    def __matmul__(self, other):
        return OperatorMatrix(self.layout, self.entries @ other.entries)


def embed(layout: HilbertLayout, factors: dict) -> OperatorMatrix:
    """Kronecker product placing ``factors[idx]`` on subsystem ``idx``, identity elsewhere."""
    if layout.dimension > ORACLE_MAX_DIM:
        raise DimensionLimitError(f"oracle dimension {layout.dimension} exceeds {ORACLE_MAX_DIM}")
    out = np.ones((1, 1), dtype=np.complex128)
    for i, d in enumerate(layout.dims):
        op = factors.get(i)
        if op is None:
            op = np.eye(d, dtype=np.complex128)
        elif op.shape != (d, d):
            raise LayoutError(f"factor for subsystem {i} has shape {op.shape}, expected {(d, d)}")
        out = np.kron(out, op)
    return OperatorMatrix(layout, out)


def build_jc_hamiltonian(layout: HilbertLayout, atom: int, mode: int, gamma: float) -> OperatorMatrix:
    """``gamma (sigma- a^dag + sigma+ a)``."""
    layout.check_index(atom, "atom")
    sub = layout.check_index(mode, "fock")
    a = annihilation(sub.cutoff)
    h1 = embed(layout, {atom: SIGMA_MINUS, mode: a.conj().T})
    h2 = embed(layout, {atom: SIGMA_PLUS, mode: a})
    return OperatorMatrix(layout, gamma * (h1.entries + h2.entries))


def build_kerr_hamiltonian(layout: HilbertLayout, mode_a: int, mode_b: int, mode_c: int, kappa: float) -> OperatorMatrix:
    """``kappa (n_a + n_b) n_c``."""
    subs = [layout.check_index(m, "fock") for m in (mode_a, mode_b, mode_c)]
    na = embed(layout, {mode_a: number(subs[0].cutoff)})
    nb = embed(layout, {mode_b: number(subs[1].cutoff)})
    nc = embed(layout, {mode_c: number(subs[2].cutoff)})
    return OperatorMatrix(layout, kappa * (na.entries + nb.entries) @ nc.entries)


def excitation_number(layout: HilbertLayout, atom: int, mode: int) -> OperatorMatrix:
    """``a^dag a + |e><e|``, conserved by the JC interaction."""
    sub = layout.check_index(mode, "fock")
    return embed(layout, {mode: number(sub.cutoff)}) + embed(layout, {atom: EXCITED})


def expectation(op: OperatorMatrix, s: StateVector) -> complex:
    return complex(np.vdot(s.amplitudes, op.entries @ s.amplitudes) / s.norm_sq)


def evolve_exact(h: OperatorMatrix, t: float, s: StateVector) -> StateVector:
    """``exp(-i H t) |s>`` via ``numpy.linalg.eigh``."""
    if h.layout != s.layout:
        raise LayoutError("Hamiltonian and state layouts differ")
    if h.layout.dimension > ORACLE_MAX_DIM:
        raise DimensionLimitError(f"oracle dimension {h.layout.dimension} exceeds {ORACLE_MAX_DIM}")
    scale = max(1.0, float(np.max(np.abs(h.entries), initial=0.0)))
    if h.hermiticity_error > HERMITIAN_TOL * scale:
        raise ValueError(f"Hamiltonian is not Hermitian (max |H - H^dag| = {h.hermiticity_error:.3g})")
    w, v = np.linalg.eigh(h.entries)
    amps = v @ (np.exp(-1j * w * t) * (v.conj().T @ s.amplitudes))
    return StateVector(s.layout, amps, s.normalized)
