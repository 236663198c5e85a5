"""
Two-stage Bell analyzer for single-rail Bell states.

Stage one is a cross-Kerr QND probe: a coherent probe picks up a pi phase
shift iff the total photon number in the two rails is odd, separating the
psi pair from the phi pair without collapsing either. Stage two resolves
the sign: psi states on a balanced beam splitter, phi states by storing
each rail in an atom, rotating both atoms with coherent pi/2 pulses and
reading the parity of the atomic excitations.

Beam-splitter convention: ``a -> (a + b)/sqrt2``, ``b -> (a - b)/sqrt2``,
so ``|psi+> -> |10>`` (click in port A) and ``|psi-> -> -|01>`` (port B).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import SimConfig
from .errors import AmbiguousParityError, LayoutError, SimulationError, SupportError
from .fock import (
    BRANCH_FLOOR,
    BellKind,
    StateVector,
    branches,
    choose,
    compress,
    contract,
    drop_subsystem,
    make_atom,
    make_coherent,
    registers,
    tensor,
    with_tensor,
)
from .jc import drive_atom, transfer_photon_to_atom

SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class KerrParams:
    kappa: float
    tau_m: float | None = None

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if self.tau_m is None:
            object.__setattr__(self, "tau_m", math.pi / self.kappa)


@dataclass(frozen=True)
class ParitySignal:
    label: str  # "odd" -> psi branch, "even" -> phi branch
    probe_overlap: float
    reference_overlap: float = 0.0
    truncation_deficit: float = 0.0

    @property
    def odd(self) -> bool:
        return self.label == "odd"


@dataclass(frozen=True)
class BellOutcome:
    kind: BellKind
    parity: ParitySignal
    port: str | None = None
    atoms: tuple | None = None
    probability: float = 1.0

    @property
    def branch(self) -> str:
        return "psi" if self.parity.odd else "phi"

    def to_record(self, input_label: str, distribution: dict | None = None) -> dict:
        rec = {
            "input_label": input_label,
            "parity_signal": {
                "label": self.parity.label,
                "probe_overlap": self.parity.probe_overlap,
                "reference_overlap": self.parity.reference_overlap,
            },
            "branch": self.branch,
            "outcome": self.kind.value,
            "port": self.port,
            "atoms": "".join(self.atoms) if self.atoms else None,
            "probabilities": {"path": self.probability},
        }
        if distribution is not None:
            rec["probabilities"]["exact"] = {k.value: v for k, v in distribution.items()}
        return rec


Picker = Callable[[Sequence[float]], Sequence[int]]


def sampler(rng: np.random.Generator) -> Picker:
    return lambda probs: [choose(rng, probs)]


def enumerate_all(probs: Sequence[float]) -> Sequence[int]:
    return range(len(probs))


# ---------------------------------------------------------------------------
# QND parity probe
# ---------------------------------------------------------------------------


def _number_grid(s: StateVector, idx: int) -> np.ndarray:
    shape = [1] * len(s.layout)
    shape[idx] = s.dims[idx]
    return np.arange(s.dims[idx]).reshape(shape)


def kerr_propagate(s: StateVector, mode_a: int, mode_b: int, probe: int, kappa: float, t: float) -> StateVector:
    """Diagonal cross-Kerr propagator ``exp(-i kappa t (n_a + n_b) n_probe)``."""
    for m in (mode_a, mode_b, probe):
        s.layout.check_index(m, "fock")
    n_sig = _number_grid(s, mode_a) + _number_grid(s, mode_b)
    phase = np.exp(-1j * kappa * t * n_sig * _number_grid(s, probe))
    return with_tensor(s, s.tensor() * phase)


def parity_weights(s: StateVector, mode_a: int, mode_b: int) -> tuple:
    """(odd, even) total-photon-number weights of the two signal rails."""
    n_sig = _number_grid(s, mode_a) + _number_grid(s, mode_b)
    p = np.abs(s.tensor()) ** 2
    odd = float(np.sum(p * (n_sig % 2 == 1)))
    return odd, float(np.sum(p)) - odd


def qnd_branches(s: StateVector, mode_a: int, mode_b: int, probe_alpha: complex, params: KerrParams,
                 cutoff: int | None = None, ambiguity_tol: float = 1e-4) -> list:
    """Every readout branch of the QND probe.

    The probe ``|alpha>`` is appended, evolved under the Kerr propagator and
    read out against the references ``|-alpha>`` (odd) and ``|alpha>``
    (even). Returns ``[(ParitySignal, probability, signal_state), ...]``;
    the signal state has the probe projected out and is renormalized.
    """
    probe, deficit = make_coherent(probe_alpha, cutoff)
    pidx = len(s.layout)
    evolved = kerr_propagate(tensor(s, probe), mode_a, mode_b, pidx, params.kappa, params.tau_m)
    ref_even = probe.amplitudes
    ref_odd = ref_even * (-1.0) ** np.arange(ref_even.size)
    ref_overlap = abs(np.vdot(ref_even, ref_odd)) ** 2
    odd_w, even_w = parity_weights(s, mode_a, mode_b)
    out = []
    candidates = []
    for label, ref, sector in (("odd", ref_odd, odd_w), ("even", ref_even, even_w)):
        v = contract(evolved, pidx, ref)
        candidates.append((label, v, v.norm_sq, sector))
    total = sum(c[2] for c in candidates)
    for label, v, w, sector in candidates:
        prob = w / total
        if prob < BRANCH_FLOOR:
            continue
        overlap = min(1.0, w / sector) if sector > 0 else 0.0
        if overlap < 1.0 - ambiguity_tol:
            raise AmbiguousParityError(
                f"probe overlap {overlap:.6g} for the {label} branch is below 1 - {ambiguity_tol:g}; "
                "check the probe cutoff and the rails' support"
            )
        signal = ParitySignal(label, overlap, ref_overlap, deficit)
        out.append((signal, prob, StateVector(v.layout, v.amplitudes / math.sqrt(w))))
    return out


def qnd_parity_probe(s: StateVector, mode_a: int, mode_b: int, probe_alpha: complex, params: KerrParams,
                     rng: np.random.Generator | None = None, cutoff: int | None = None):
    """Run the QND probe once; returns ``(signal_state, ParitySignal)``.

    ``rng`` is only needed when ``s`` has weight in both parity sectors.
    """
    opts = qnd_branches(s, mode_a, mode_b, probe_alpha, params, cutoff)
    if len(opts) > 1 and rng is None:
        raise ValueError("state spans both parity sectors; pass rng to sample the readout")
    k = 0 if len(opts) == 1 else choose(rng, [o[1] for o in opts])
    signal, _, state = opts[k]
    return state, signal


# ---------------------------------------------------------------------------
# psi branch
# ---------------------------------------------------------------------------


def beam_splitter(s: StateVector, mode_a: int, mode_b: int) -> StateVector:
    """Balanced beam splitter on the at-most-one-photon subspace of two rails."""
    sa = s.layout.check_index(mode_a, "fock")
    sb = s.layout.check_index(mode_b, "fock")
    if sa.cutoff != sb.cutoff:
        raise LayoutError("beam splitter needs equal cutoffs")
    n_sig = _number_grid(s, mode_a) + _number_grid(s, mode_b)
    above = float(np.sum(np.abs(s.tensor()) ** 2 * (n_sig >= 2))) / s.norm_sq
    if above > SUPPORT_TOL:
        raise SupportError(f"beam splitter is defined on <= 1 photon; population {above:.3g} above")
    t = np.moveaxis(s.tensor(), (mode_a, mode_b), (0, 1)).copy()
    c10, c01 = t[1, 0].copy(), t[0, 1].copy()
    t[1, 0] = (c10 + c01) / math.sqrt(2)
    t[0, 1] = (c10 - c01) / math.sqrt(2)
    return with_tensor(s, np.moveaxis(t, (0, 1), (mode_a, mode_b)))


def _psi_leaves(s: StateVector, mode_a: int, mode_b: int, pick: Picker):
    out = beam_splitter(s, mode_a, mode_b)
    opts_a = branches(out, mode_a)
    for i in pick([o[1] for o in opts_a]):
        na, pa, sa = opts_a[i]
        opts_b = branches(sa, mode_b)
        for j in pick([o[1] for o in opts_b]):
            nb, pb, sb = opts_b[j]
            if na + nb != 1:
                raise SimulationError(
                    f"{na + nb} photons at the beam-splitter outputs; input was not on the psi subspace"
                )
            port = "A" if na == 1 else "B"
            yield port, pa * pb, sb


def discriminate_psi(s: StateVector, rng: np.random.Generator, mode_a: int = 0, mode_b: int = 1,
                     parity: ParitySignal | None = None):
    """Beam splitter plus photon counting; port A -> psi+, port B -> psi-.

    Returns ``(BellOutcome, collapsed_state)``.
    """
    parity = parity or ParitySignal("odd", 1.0)
    port, p, state = next(_psi_leaves(s, mode_a, mode_b, sampler(rng)))
    kind = BellKind.PSI_PLUS if port == "A" else BellKind.PSI_MINUS
    return BellOutcome(kind, parity, port=port, probability=p), state


# ---------------------------------------------------------------------------
# phi branch
# ---------------------------------------------------------------------------


def _store_and_read(s: StateVector, mode: int, cfg: SimConfig, pick: Picker):
    """Transfer ``mode`` into a fresh atom, apply a pi/2 pulse, measure the atom.

    Yields ``(atom_label, probability, state)``; the atom is removed and, in
    physical mode, the spent pulse mode is folded into the trailing register.
    """
    atom = len(s.layout)
    s = transfer_photon_to_atom(tensor(s, make_atom("g")), atom, mode, cfg.gamma)
    s = drive_atom(s, atom, cfg.alpha, cfg.gamma, ideal=cfg.ideal_mode, cutoff=cfg.cutoff)
    opts = branches(s, atom)
    for i in pick([o[1] for o in opts]):
        label, p, collapsed = opts[i]
        out = drop_subsystem(collapsed, atom, "ge".index(label))
        if not cfg.ideal_mode:
            out = compress(out, registers(out) + [len(out.layout) - 1])
        yield label, p, out


def _phi_leaves(s: StateVector, mode_a: int, mode_b: int, cfg: SimConfig, pick: Picker):
    for la, pa, sa in _store_and_read(s, mode_a, cfg, pick):
        for lb, pb, sb in _store_and_read(sa, mode_b, cfg, pick):
            yield (la, lb), pa * pb, sb


def _phi_kind(atoms: tuple) -> BellKind:
    # one excitation between the two atoms <=> phi-
    return BellKind.PHI_MINUS if atoms.count("e") == 1 else BellKind.PHI_PLUS


def discriminate_phi(s: StateVector, cfg: SimConfig, rng: np.random.Generator, mode_a: int = 0, mode_b: int = 1,
                     parity: ParitySignal | None = None):
    """Dual-rail atomic readout of the phi sign.

    Each rail is stored in its own ground-state atom (``tau``), both atoms
    get a coherent pi/2 pulse (``t_s``, ideal or physical per ``cfg``) and
    are measured. Odd atomic parity -> phi-, even -> phi+. The rails are
    left in vacuum. Returns ``(BellOutcome, collapsed_state)``.
    """
    parity = parity or ParitySignal("even", 1.0)
    atoms, p, state = next(_phi_leaves(s, mode_a, mode_b, cfg, sampler(rng)))
    return BellOutcome(_phi_kind(atoms), parity, atoms=atoms, probability=p), state


# ---------------------------------------------------------------------------
# full analyzer
# ---------------------------------------------------------------------------


def _analyze(s: StateVector, cfg: SimConfig, pick: Picker, mode_a: int, mode_b: int):
    params = KerrParams(cfg.kappa)
    qnd = qnd_branches(s, mode_a, mode_b, cfg.probe_alpha, params,
                       ambiguity_tol=cfg.tolerances.qnd_ambiguity)
    for i in pick([o[1] for o in qnd]):
        signal, p1, s1 = qnd[i]
        if signal.odd:
            for port, p2, s2 in _psi_leaves(s1, mode_a, mode_b, pick):
                kind = BellKind.PSI_PLUS if port == "A" else BellKind.PSI_MINUS
                yield BellOutcome(kind, signal, port=port, probability=p1 * p2), s2
        else:
            for atoms, p2, s2 in _phi_leaves(s1, mode_a, mode_b, cfg, pick):
                yield BellOutcome(_phi_kind(atoms), signal, atoms=atoms, probability=p1 * p2), s2


def analyze(s: StateVector, cfg: SimConfig, rng: np.random.Generator, mode_a: int = 0, mode_b: int = 1):
    """Sample one pass through the analyzer; returns ``(BellOutcome, collapsed_state)``."""
    return next(_analyze(s, cfg, sampler(rng), mode_a, mode_b))


def analyze_leaves(s: StateVector, cfg: SimConfig, mode_a: int = 0, mode_b: int = 1) -> list:
    """Every measurement record the analyzer can produce, with exact path probabilities."""
    return list(_analyze(s, cfg, enumerate_all, mode_a, mode_b))


def outcome_distribution(s: StateVector, cfg: SimConfig, mode_a: int = 0, mode_b: int = 1) -> dict:
    dist = {k: 0.0 for k in BellKind}
    for outcome, _ in analyze_leaves(s, cfg, mode_a, mode_b):
        dist[outcome.kind] += outcome.probability
    return dist
