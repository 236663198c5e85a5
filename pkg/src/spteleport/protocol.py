"""
Teleportation of a single-rail qubit with a single-photon ``|psi+>`` resource.

Rails: 0 holds the input ``|xi> = a|0> + b|1>``, 1 and 2 share ``|psi+>``;
Alice owns rails 0 and 1, Bob rail 2. After the Bell analysis Bob holds

    psi+ : a|0> + b|1>     (nothing to do)
    psi- : a|0> - b|1>     (pi phase shift)
    phi+ : a|1> + b|0>     (flip)
    phi- : a|1> - b|0>     (pi phase shift, then flip)

The flip stores the rail in an atom, applies a coherent pi pulse and maps
the atom back; the pi pulse's ``-i`` factors and the transfer phases leave
``-a|0> + b|1>`` (for real alpha), which a final phase shift of
``pi - 2 arg(alpha)`` on the rail turns into ``-|xi>``.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .bell import BellOutcome, analyze
from .config import SimConfig
from .fock import (
    BellKind,
    SingleRailQubit,
    StateVector,
    apply_phase_shift,
    bell_vector,
    compress,
    contract,
    drop_subsystem,
    make_atom,
    make_bell,
    make_qubit_state,
    population_above,
    reduced_density_matrix,
    registers,
    tensor,
)
from .errors import SupportError
from .jc import drive_atom, transfer_atom_to_photon, transfer_photon_to_atom

BOB = 2
SUPPORT_TOL = 1e-12


def flip_compensation(alpha: complex) -> float:
    """Rail phase applied after the flip so the ideal net map is ``|0> <-> |1>`` (up to global phase)."""
    return math.pi - 2 * float(np.angle(alpha))


@dataclass(frozen=True, eq=False)
class TeleportRecord:
    input: SingleRailQubit
    outcome: BellOutcome
    bob_pre: StateVector
    bob_post: StateVector
    fidelity: float
    bob_mode: int = BOB


def prepare_tripartite(q: SingleRailQubit) -> StateVector:
    """``|xi> (x) |psi+>`` on rails (0, 1, 2)."""
    return tensor(make_qubit_state(q), make_bell(BellKind.PSI_PLUS))


def bell_decomposition(s: StateVector, mode_a: int = 0, mode_b: int = 1) -> dict:
    """Project rails ``mode_a, mode_b`` on each Bell state.

    Returns ``{kind: (probability, conditional_state)}``; the conditional
    state lives on the remaining subsystems and is renormalized (or
    ``None`` when the probability vanishes).
    """
    out = {}
    t = np.moveaxis(s.tensor(), (mode_a, mode_b), (0, 1))
    layout = s.layout.without([mode_a, mode_b])
    for kind in BellKind:
        bell = bell_vector(kind, t.shape[0])
        rest = np.tensordot(np.conj(bell), t, axes=([0, 1], [0, 1])).reshape(-1)
        p = float(np.vdot(rest, rest).real) / s.norm_sq
        cond = StateVector(layout, rest / math.sqrt(p * s.norm_sq)) if p > 1e-15 else None
        out[kind] = (p, cond)
    return out


def flip(s: StateVector, mode: int, cfg: SimConfig) -> StateVector:
    """Exchange the ``|0>`` and ``|1>`` amplitudes of a rail via atom storage and a pi pulse."""
    atom = len(s.layout)
    s = transfer_photon_to_atom(tensor(s, make_atom("g")), atom, mode, cfg.gamma)
    s = drive_atom(s, atom, cfg.alpha, cfg.gamma, full=True, ideal=cfg.ideal_mode, cutoff=cfg.cutoff)
    s = transfer_atom_to_photon(s, atom, mode, cfg.gamma)
    s = drop_subsystem(s, atom, 0)
    if not cfg.ideal_mode:
        s = compress(s, registers(s) + [len(s.layout) - 1])
    return apply_phase_shift(s, mode, flip_compensation(cfg.alpha))


def bob_correct(bob: StateVector, kind: BellKind, cfg: SimConfig, mode: int = BOB) -> StateVector:
    """Apply Bob's local correction for the announced Bell outcome."""
    if population_above(bob, mode, 1) > SUPPORT_TOL:
        raise SupportError("Bob's rail has population above |1>")
    if kind is BellKind.PSI_PLUS:
        return bob
    if kind is BellKind.PSI_MINUS:
        return apply_phase_shift(bob, mode, math.pi)
    if kind is BellKind.PHI_PLUS:
        return flip(bob, mode, cfg)
    if kind is BellKind.PHI_MINUS:
        return flip(apply_phase_shift(bob, mode, math.pi), mode, cfg)
    raise ValueError(f"unsupported Bell outcome {kind!r}")


def rail_fidelity(s: StateVector, mode: int, q: SingleRailQubit) -> float:
    """``<xi| rho_mode |xi>``; equals ``|<xi|bob>|^2`` whenever the rail is unentangled."""
    target = np.zeros(s.dims[mode], dtype=np.complex128)
    target[:2] = q.vector
    proj = contract(s, mode, target)
    return min(1.0, proj.norm_sq / s.norm_sq)


def bob_reduced_state(q: SingleRailQubit) -> np.ndarray:
    """Bob's rail density matrix before any classical message (trace over Alice)."""
    return reduced_density_matrix(prepare_tripartite(q), [BOB])


def bob_average_state(q: SingleRailQubit) -> np.ndarray:
    """Outcome-averaged Bob state, ``sum_k p_k |b_k><b_k|`` over the four Bell results."""
    rho = np.zeros((2, 2), dtype=np.complex128)
    for p, cond in bell_decomposition(prepare_tripartite(q)).values():
        if cond is not None:
            rho += p * np.outer(cond.amplitudes, cond.amplitudes.conj())
    return rho


def teleport_once(q: SingleRailQubit, cfg: SimConfig, rng: np.random.Generator) -> TeleportRecord:
    s = prepare_tripartite(q)
    outcome, bob_pre = analyze(s, cfg, rng, 0, 1)
    bob_post = bob_correct(bob_pre, outcome.kind, cfg)
    return TeleportRecord(q, outcome, bob_pre, bob_post, rail_fidelity(bob_post, BOB, q))


def sample_qubit(rng: np.random.Generator, sampler: str = "haar") -> SingleRailQubit:
    if sampler == "haar":
        return SingleRailQubit.haar(rng)
    if sampler == "equatorial":
        return SingleRailQubit.equatorial(rng.uniform(0, 2 * math.pi))
    raise ValueError(f"unknown sampler {sampler!r}")


@dataclass
class CampaignSummary:
    config: SimConfig
    outcomes: list = field(default_factory=list)
    fidelities: list = field(default_factory=list)

    @property
    def trials(self) -> int:
        return len(self.fidelities)

    @property
    def mean_fidelity(self) -> float:
        return math.fsum(self.fidelities) / self.trials

    @property
    def min_fidelity(self) -> float:
        return min(self.fidelities)

    @property
    def histogram(self) -> dict:
        counts = Counter(self.outcomes)
        return {k.value: counts.get(k, 0) for k in BellKind}

    @property
    def per_outcome_fidelity(self) -> dict:
        out = {}
        for k in BellKind:
            vals = [f for o, f in zip(self.outcomes, self.fidelities) if o is k]
            out[k.value] = math.fsum(vals) / len(vals) if vals else None
        return out

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "mean_fidelity": self.mean_fidelity,
            "min_fidelity": self.min_fidelity,
            "histogram": self.histogram,
            "per_outcome_fidelity": self.per_outcome_fidelity,
            "config": self.config.to_dict(),
        }

    def trials_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "outcome", "fidelity"])
        for i, (o, f) in enumerate(zip(self.outcomes, self.fidelities)):
            w.writerow([i, o.value, repr(f)])
        return buf.getvalue()


def teleport_campaign(cfg: SimConfig, input_sampler: str | None = None,
                      rng: np.random.Generator | None = None) -> CampaignSummary:
    """Run ``cfg.trials`` independent teleportations.

    Trial ``i`` draws its input and all measurement outcomes from its own
    generator, spawned from ``cfg.seed`` (or from ``rng`` when given), so a
    campaign is reproducible and trials are order-independent.
    """
    sampler_name = input_sampler or cfg.sampler
    entropy = cfg.seed if rng is None else int(rng.integers(2**63))
    children = np.random.SeedSequence(entropy).spawn(cfg.trials)
    summary = CampaignSummary(cfg)
    for child in children:
        trial_rng = np.random.default_rng(child)
        q = sample_qubit(trial_rng, sampler_name)
        rec = teleport_once(q, cfg, trial_rng)
        summary.outcomes.append(rec.outcome.kind)
        summary.fidelities.append(rec.fidelity)
    return summary
