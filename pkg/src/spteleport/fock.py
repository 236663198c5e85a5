"""
Composite Hilbert spaces of two-level atoms and truncated photonic modes.

Index convention
----------------
Amplitudes are stored as a flat complex array in row-major order over the
subsystem basis indices: the first subsystem of the layout varies slowest.
For two modes A (index 0) and B (index 1), ``|01>`` is ``|0>_A |1>_B`` and
sits at flat index ``0 * dim_B + 1``. Atoms use basis index 0 for ``g`` and
1 for ``e``. This ordering is part of the JSON contract below.

JSON form
---------
``{"layout": [{"kind": "atom"}, {"kind": "fock", "cutoff": 4}, ...],
"amplitudes": [re0, im0, re1, im1, ...]}``
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionLimitError,
    LayoutError,
    NumericalDegeneracyError,
    SupportError,
    TruncationWarning,
)

MAX_DIMENSION = 2**24
NORM_TOL = 1e-9
BRANCH_FLOOR = 1e-15
COHERENT_DEFICIT_WARN = 1e-6


# ---------------------------------------------------------------------------
# layouts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    """Two-level atom with basis ``{g, e}``."""

    kind = "atom"

    @property
    def dim(self) -> int:
        return 2

    def label(self, level: int):
        return "ge"[level]


@dataclass(frozen=True)
class FockMode:
    """Photonic mode truncated to ``|0> ... |cutoff-1>``."""

    cutoff: int
    kind = "fock"

    def __post_init__(self):
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise LayoutError(f"Fock cutoff must be an integer >= 1, got {self.cutoff}")

    @property
    def dim(self) -> int:
        return self.cutoff

    def label(self, level: int):
        return int(level)


@dataclass(frozen=True)
class Register:
    """Opaque environment register holding compressed ancilla degrees of freedom."""

    size: int
    kind = "register"

    def __post_init__(self):
        if self.size < 1:
            raise LayoutError("register size must be >= 1")

    @property
    def dim(self) -> int:
        return self.size

    def label(self, level: int):
        return int(level)


SubsystemSpec = Atom | FockMode | Register


@dataclass(frozen=True)
class HilbertLayout:
    """Ordered list of subsystems; indices are stable identifiers."""

    subsystems: tuple = ()
    max_dimension: int = field(default=MAX_DIMENSION, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "subsystems", tuple(self.subsystems))
        for sub in self.subsystems:
            if not isinstance(sub, (Atom, FockMode, Register)):
                raise LayoutError(f"unknown subsystem spec {sub!r}")
        if self.dimension > self.max_dimension:
            raise DimensionLimitError(
                f"layout dimension {self.dimension} exceeds limit {self.max_dimension}"
            )

    @property
    def dims(self) -> tuple:
        return tuple(sub.dim for sub in self.subsystems)

    @property
    def dimension(self) -> int:
        return math.prod(self.dims)

    def __len__(self):
        return len(self.subsystems)

    def __getitem__(self, idx):
        return self.subsystems[idx]

    def __add__(self, other: "HilbertLayout") -> "HilbertLayout":
        return HilbertLayout(
            self.subsystems + other.subsystems,
            max_dimension=min(self.max_dimension, other.max_dimension),
        )

    def without(self, idxs: Iterable[int]) -> "HilbertLayout":
        drop = set(idxs)
        return HilbertLayout(
            [s for i, s in enumerate(self.subsystems) if i not in drop],
            max_dimension=self.max_dimension,
        )

    def check_index(self, idx: int, kind: str | None = None):
        if not 0 <= idx < len(self.subsystems):
            raise LayoutError(f"subsystem index {idx} out of range for {len(self)} subsystems")
        if kind is not None and self.subsystems[idx].kind != kind:
            raise LayoutError(
                f"subsystem {idx} is a {self.subsystems[idx].kind}, expected {kind}"
            )
        return self.subsystems[idx]

    def to_dict(self) -> list:
        out = []
        for sub in self.subsystems:
            if isinstance(sub, Atom):
                out.append({"kind": "atom"})
            elif isinstance(sub, FockMode):
                out.append({"kind": "fock", "cutoff": sub.cutoff})
            else:
                out.append({"kind": "register", "size": sub.size})
        return out

    @classmethod
    def from_dict(cls, items: Sequence[dict]) -> "HilbertLayout":
        subs = []
        for item in items:
            kind = item["kind"]
            if kind == "atom":
                subs.append(Atom())
            elif kind == "fock":
                subs.append(FockMode(int(item["cutoff"])))
            elif kind == "register":
                subs.append(Register(int(item["size"])))
            else:
                raise LayoutError(f"unknown subsystem kind {kind!r}")
        return cls(subs)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StateVector:
    """Immutable pure state over a :class:`HilbertLayout`.

    ``normalized=False`` marks an intentionally unnormalized intermediate;
    every other state is checked against ``NORM_TOL`` on construction.
    """

    layout: HilbertLayout
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != self.layout.dimension:
            raise LayoutError(
                f"{amps.size} amplitudes do not match layout dimension {self.layout.dimension}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        if self.normalized and abs(self.norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {self.norm_sq!r})")

    @property
    def dims(self) -> tuple:
        return self.layout.dims

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem (read-only view)."""
        return self.amplitudes.reshape(self.dims)

    def amplitude(self, *levels) -> complex:
        """Amplitude of a basis ket given one level per subsystem; atoms accept 'g'/'e'."""
        idx = tuple("ge".index(l) if isinstance(l, str) else l for l in levels)
        return complex(self.tensor()[idx])

    def to_dict(self) -> dict:
        inter = np.empty(2 * self.amplitudes.size)
        inter[0::2] = self.amplitudes.real
        inter[1::2] = self.amplitudes.imag
        return {"layout": self.layout.to_dict(), "amplitudes": inter.tolist()}

    @classmethod
    def from_dict(cls, data: dict, normalized: bool = True) -> "StateVector":
        layout = HilbertLayout.from_dict(data["layout"])
        flat = np.asarray(data["amplitudes"], dtype=float)
        return cls(layout, flat[0::2] + 1j * flat[1::2], normalized=normalized)

    def __repr__(self):
        return f"StateVector(dims={self.dims}, norm_sq={self.norm_sq:.12g})"


def _renormalized(layout, amps) -> StateVector:
    norm = np.linalg.norm(amps)
    if norm < np.sqrt(BRANCH_FLOOR):
        raise NumericalDegeneracyError("cannot renormalize a zero-norm state")
    return StateVector(layout, amps / norm)


def with_tensor(s: StateVector, tensor: np.ndarray, normalized: bool | None = None) -> StateVector:
    """New state on the same layout from a subsystem-shaped tensor."""
    return StateVector(s.layout, tensor.reshape(-1), s.normalized if normalized is None else normalized)


class BellKind(enum.Enum):
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"

    @property
    def odd(self) -> bool:
        return self in (BellKind.PSI_PLUS, BellKind.PSI_MINUS)


@dataclass(frozen=True)
class SingleRailQubit:
    """``a|0> + b|1>`` stored in one optical mode."""

    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-12:
            raise ValueError(f"qubit amplitudes not normalized: |a|^2+|b|^2 = {abs(a)**2 + abs(b)**2!r}")

    @classmethod
    def equatorial(cls, theta: float) -> "SingleRailQubit":
        """``(|0> + e^{i theta}|1>)/sqrt(2)``."""
        return cls(1 / np.sqrt(2), np.exp(1j * theta) / np.sqrt(2))

    @classmethod
    def haar(cls, rng: np.random.Generator) -> "SingleRailQubit":
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        return cls(v[0], v[1])

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b])

    def to_dict(self) -> dict:
        return {"a": [self.a.real, self.a.imag], "b": [self.b.real, self.b.imag]}


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def make_vacuum(layout: HilbertLayout) -> StateVector:
    amps = np.zeros(layout.dimension, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(layout, amps)


def default_cutoff(alpha: complex) -> int:
    """Fock cutoff for a coherent amplitude: ``ceil(|alpha|^2 + 10|alpha| + 10)``."""
    mod = abs(alpha)
    return int(math.ceil(mod**2 + 10 * mod + 10))


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """Unnormalized truncated coherent coefficients ``e^{-|a|^2/2} a^n / sqrt(n!)``."""
    n = np.arange(cutoff)
    if alpha == 0:
        c = np.zeros(cutoff, dtype=np.complex128)
        c[0] = 1.0
        return c
    # log-space to stay finite for large |alpha| and n
    log_mag = -0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha)) - 0.5 * _log_factorial(n)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def _log_factorial(n: np.ndarray) -> np.ndarray:
    from scipy.special import gammaln

    return gammaln(np.asarray(n, dtype=float) + 1.0)


def make_coherent(alpha: complex, cutoff: int | None = None):
    """Truncated, renormalized coherent state of a single Fock mode.

    Parameters
    ----------
    alpha : complex
        Coherent amplitude.
    cutoff : int, optional
        Number of Fock levels kept. Defaults to :func:`default_cutoff`.

    Returns
    -------
    state : StateVector
    deficit : float
        ``1 - sum_{n<cutoff} |c_n|^2`` before renormalization.
    """
    if cutoff is None:
        cutoff = default_cutoff(alpha)
    if cutoff < 1:
        raise LayoutError("cutoff must be >= 1")
    c = coherent_amplitudes(alpha, cutoff)
    deficit = max(0.0, 1.0 - float(np.sum(np.abs(c) ** 2)))
    if deficit > COHERENT_DEFICIT_WARN:
        warnings.warn(
            f"coherent state |{alpha}> truncated at {cutoff} loses {deficit:.3g} of its norm",
            TruncationWarning,
            stacklevel=2,
        )
    return _renormalized(HilbertLayout([FockMode(cutoff)]), c), deficit


def make_qubit_state(q: SingleRailQubit, cutoff: int = 2) -> StateVector:
    if cutoff < 2:
        raise LayoutError("a single-rail qubit needs cutoff >= 2")
    amps = np.zeros(cutoff, dtype=np.complex128)
    amps[0], amps[1] = q.a, q.b
    return StateVector(HilbertLayout([FockMode(cutoff)]), amps)


_BELL_TERMS = {
    BellKind.PSI_PLUS: (((0, 1), 1), ((1, 0), 1)),
    BellKind.PSI_MINUS: (((0, 1), 1), ((1, 0), -1)),
    BellKind.PHI_PLUS: (((0, 0), 1), ((1, 1), 1)),
    BellKind.PHI_MINUS: (((0, 0), 1), ((1, 1), -1)),
}


def bell_vector(kind: BellKind, cutoff: int = 2) -> np.ndarray:
    """Two-mode Bell tensor of shape ``(cutoff, cutoff)``."""
    t = np.zeros((cutoff, cutoff), dtype=np.complex128)
    for (i, j), sign in _BELL_TERMS[kind]:
        t[i, j] = sign / np.sqrt(2)
    return t


def make_bell(kind: BellKind, cutoff: int = 2) -> StateVector:
    if cutoff < 2:
        raise LayoutError("Bell states need cutoff >= 2")
    layout = HilbertLayout([FockMode(cutoff), FockMode(cutoff)])
    return StateVector(layout, bell_vector(kind, cutoff))


def make_atom(level: str = "g") -> StateVector:
    amps = np.zeros(2, dtype=np.complex128)
    amps["ge".index(level)] = 1.0
    return StateVector(HilbertLayout([Atom()]), amps)


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------


def tensor(*states: StateVector) -> StateVector:
    """Kronecker product in layout order (first argument varies slowest)."""
    if not states:
        raise ValueError("tensor() needs at least one state")
    layout = states[0].layout
    amps = states[0].amplitudes
    normalized = states[0].normalized
    for s in states[1:]:
        layout = layout + s.layout
        amps = np.kron(amps, s.amplitudes)
        normalized = normalized and s.normalized
    return StateVector(layout, amps, normalized)


def overlap(s1: StateVector, s2: StateVector) -> complex:
    """``<s1|s2>``."""
    if s1.layout != s2.layout:
        raise LayoutError("overlap requires identical layouts")
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def fidelity(s1: StateVector, s2: StateVector) -> float:
    return abs(overlap(s1, s2)) ** 2


def apply_local(s: StateVector, idx: int, op: np.ndarray) -> StateVector:
    """Apply a single-subsystem operator (matrix acting on basis index) to subsystem ``idx``."""
    s.layout.check_index(idx)
    t = np.tensordot(op, s.tensor(), axes=([1], [idx]))
    return with_tensor(s, np.moveaxis(t, 0, idx), normalized=s.normalized and _is_unitary(op))


def _is_unitary(op: np.ndarray) -> bool:
    return np.allclose(op.conj().T @ op, np.eye(op.shape[0]), atol=1e-12)


def apply_phase_shift(s: StateVector, mode: int, phi: float) -> StateVector:
    """Multiply Fock level ``n`` of ``mode`` by ``exp(i n phi)``."""
    sub = s.layout.check_index(mode, "fock")
    phases = np.exp(1j * phi * np.arange(sub.cutoff))
    shape = [1] * len(s.layout)
    shape[mode] = sub.cutoff
    return with_tensor(s, s.tensor() * phases.reshape(shape))


def marginal(s: StateVector, idx: int) -> np.ndarray:
    """Probability distribution of subsystem ``idx`` over its basis levels."""
    s.layout.check_index(idx)
    p = np.abs(np.moveaxis(s.tensor(), idx, 0)) ** 2
    return p.reshape(p.shape[0], -1).sum(axis=1)


def mean_number(s: StateVector, mode: int) -> float:
    p = marginal(s, mode)
    return float(np.dot(np.arange(p.size), p) / p.sum())


def population_above(s: StateVector, idx: int, level: int) -> float:
    """Total probability of subsystem ``idx`` sitting strictly above ``level``."""
    return float(marginal(s, idx)[level + 1 :].sum())


def project(s: StateVector, idx: int, level: int, drop: bool = False, renormalize: bool = True):
    """Project subsystem ``idx`` onto basis ``level``.

    Returns the projected state (subsystem kept in ``level`` unless ``drop``)
    and the probability of that level.
    """
    s.layout.check_index(idx)
    t = np.moveaxis(s.tensor(), idx, 0)
    piece = t[level]
    prob = float(np.sum(np.abs(piece) ** 2)) / s.norm_sq
    if drop:
        layout = s.layout.without([idx])
        amps = piece.reshape(-1)
    else:
        full = np.zeros_like(t)
        full[level] = piece
        layout = s.layout
        amps = np.moveaxis(full, 0, idx).reshape(-1)
    if renormalize:
        if prob < BRANCH_FLOOR:
            raise NumericalDegeneracyError(f"projection onto level {level} has zero weight")
        return _renormalized(layout, amps), prob
    return StateVector(layout, amps, normalized=False), prob


def drop_subsystem(s: StateVector, idx: int, level: int = 0, tol: float = 1e-12) -> StateVector:
    """Remove a subsystem known to sit in ``level``; errors if it does not."""
    p = marginal(s, idx)[level] / s.norm_sq
    if 1.0 - p > tol:
        raise SupportError(f"subsystem {idx} is not in level {level} (residual {1.0 - p:.3g})")
    out, _ = project(s, idx, level, drop=True)
    return out


def contract(s: StateVector, idx: int, bra: np.ndarray) -> StateVector:
    """Unnormalized ``(<bra|_idx (x) 1) |s>`` with subsystem ``idx`` removed."""
    s.layout.check_index(idx)
    t = np.tensordot(np.conj(bra), s.tensor(), axes=([0], [idx]))
    return StateVector(s.layout.without([idx]), t.reshape(-1), normalized=False)


def reduced_density_matrix(s: StateVector, idxs: Sequence[int]) -> np.ndarray:
    """Partial trace keeping ``idxs`` (in the given order)."""
    idxs = list(idxs)
    for i in idxs:
        s.layout.check_index(i)
    rest = [i for i in range(len(s.layout)) if i not in idxs]
    t = np.transpose(s.tensor(), idxs + rest)
    keep_dim = math.prod(s.dims[i] for i in idxs)
    m = t.reshape(keep_dim, -1)
    return m @ m.conj().T / s.norm_sq


def branches(s: StateVector, idx: int):
    """All measurement branches of subsystem ``idx`` above the probability floor.

    Returns a list of ``(outcome_label, probability, collapsed_state)``.
    """
    sub = s.layout.check_index(idx)
    if s.norm_sq < BRANCH_FLOOR:
        raise NumericalDegeneracyError(f"all branches of subsystem {idx} are below {BRANCH_FLOOR}")
    probs = marginal(s, idx) / s.norm_sq
    out = []
    for level, p in enumerate(probs):
        if p < BRANCH_FLOOR:
            continue
        collapsed, _ = project(s, idx, level)
        out.append((sub.label(level), float(p), collapsed))
    if not out:
        raise NumericalDegeneracyError(f"all branches of subsystem {idx} are below {BRANCH_FLOOR}")
    return out


def choose(rng: np.random.Generator, probs: Sequence[float]) -> int:
    """Sample an index from (possibly slightly unnormalized) probabilities."""
    p = np.asarray(probs, dtype=float)
    u = rng.random() * p.sum()
    return int(min(np.searchsorted(np.cumsum(p), u, side="right"), p.size - 1))


def measure_subsystem(s: StateVector, idx: int, rng: np.random.Generator):
    """Projective measurement of subsystem ``idx`` in its basis.

    Returns ``(outcome, collapsed, probability)`` where ``probability`` is
    the exact marginal of the sampled outcome.
    """
    if not s.normalized:
        raise ValueError("measure_subsystem needs a normalized state")
    opts = branches(s, idx)
    k = choose(rng, [b[1] for b in opts])
    outcome, prob, collapsed = opts[k]
    return outcome, collapsed, prob


def compress(s: StateVector, idxs: Sequence[int], tol: float = 1e-14) -> StateVector:
    """Fold subsystems ``idxs`` into a single trailing :class:`Register`.

    The register spans the Schmidt vectors of ``idxs`` against the rest of
    the system, so every reduced state and every later operation on the
    remaining subsystems is unchanged. Its size is the Schmidt rank (at most
    the dimension of the remaining subsystems).
    """
    idxs = sorted(set(idxs))
    if not idxs:
        return s
    for i in idxs:
        s.layout.check_index(i)
    rest = [i for i in range(len(s.layout)) if i not in idxs]
    rest_dim = math.prod(s.dims[i] for i in rest)
    m = np.transpose(s.tensor(), rest + idxs).reshape(rest_dim, -1)
    u, sv, _ = np.linalg.svd(m, full_matrices=False)
    keep = max(1, int(np.sum(sv > tol * max(sv[0], 1e-300))))
    new = u[:, :keep] * sv[:keep]
    layout = s.layout.without(idxs) + HilbertLayout([Register(keep)])
    return StateVector(layout, new.reshape(-1), s.normalized)


def registers(s: StateVector) -> list:
    return [i for i, sub in enumerate(s.layout.subsystems) if sub.kind == "register"]


def phase_fixed(amps: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude amplitude is real positive."""
    amps = np.asarray(amps, dtype=np.complex128)
    k = int(np.argmax(np.abs(amps)))
    if abs(amps.flat[k]) == 0:
        return amps.copy()
    return amps * np.exp(-1j * np.angle(amps.flat[k]))
