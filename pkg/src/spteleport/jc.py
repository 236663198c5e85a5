"""
Resonant Jaynes-Cummings dynamics between one atom and one Fock mode.

Units: hbar = 1, coupling ``gamma`` in 1/time. The interaction
``gamma (sigma- a^dag + sigma+ a)`` only couples the pairs
``{|g,n>, |e,n-1>}``, so the propagator is a 2x2 rotation per pair::

    |g,n>   -> cos(gamma t sqrt(n)) |g,n>   - i sin(gamma t sqrt(n)) |e,n-1>
    |e,n-1> -> cos(gamma t sqrt(n)) |e,n-1> - i sin(gamma t sqrt(n)) |g,n>

with ``|g,0>`` invariant. Inside a truncated mode ``|e,cutoff-1>`` has no
partner and is left unchanged, exactly as the truncated Hamiltonian would.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import LayoutError, SupportError, TruncationError
from .fock import (
    StateVector,
    default_cutoff,
    make_coherent,
    marginal,
    population_above,
    tensor,
    with_tensor,
)

LEAK_TOL = 1e-8
SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class JCParams:
    gamma: float
    t: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.t < 0:
            raise ValueError("interaction time must be non-negative")

    @staticmethod
    def transfer_time(gamma: float) -> float:
        """``tau = pi / (2 gamma)``: swaps one photon into the atom."""
        return math.pi / (2 * gamma)

    @staticmethod
    def pulse_time(gamma: float, alpha: complex) -> float:
        """``t_s = pi / (4 gamma |alpha|)``: coherent pi/2 pulse."""
        return math.pi / (4 * gamma * abs(alpha))

    @classmethod
    def transfer(cls, gamma: float) -> "JCParams":
        return cls(gamma, cls.transfer_time(gamma))

    @classmethod
    def half_pulse(cls, gamma: float, alpha: complex) -> "JCParams":
        return cls(gamma, cls.pulse_time(gamma, alpha))

    @classmethod
    def full_pulse(cls, gamma: float, alpha: complex) -> "JCParams":
        return cls(gamma, 2 * cls.pulse_time(gamma, alpha))


def _axes(s: StateVector, atom: int, mode: int):
    s.layout.check_index(atom, "atom")
    s.layout.check_index(mode, "fock")
    if atom == mode:
        raise LayoutError("atom and mode must differ")


def jc_evolve(s: StateVector, atom: int, mode: int, params: JCParams, check_leak: bool = True) -> StateVector:
    """Closed-form JC evolution of ``s`` for ``params.t``.

    Raises :class:`TruncationError` if more than ``LEAK_TOL`` of the norm
    sits in ``|e, cutoff-1>`` and would have been rotated out of the
    truncated space (``check_leak=False`` evolves under the truncated
    Hamiltonian without complaint).
    """
    _axes(s, atom, mode)
    t = np.moveaxis(s.tensor(), (atom, mode), (0, 1))
    cutoff = t.shape[1]
    gt = params.gamma * params.t
    if check_leak:
        leak = float(np.sum(np.abs(t[1, cutoff - 1]) ** 2)) * math.sin(gt * math.sqrt(cutoff)) ** 2
        if leak > LEAK_TOL * s.norm_sq:
            raise TruncationError(
                f"JC evolution would leak {leak:.3g} past Fock cutoff {cutoff}; raise the cutoff"
            )
    root = np.sqrt(np.arange(1, cutoff))
    shape = (cutoff - 1,) + (1,) * (t.ndim - 2)
    c = np.cos(gt * root).reshape(shape)
    sn = np.sin(gt * root).reshape(shape)
    g, e = t[0], t[1]
    out = np.empty_like(t)
    out[0, 0] = g[0]
    out[0, 1:] = c * g[1:] - 1j * sn * e[:-1]
    out[1, :-1] = c * e[:-1] - 1j * sn * g[1:]
    out[1, -1] = e[-1]
    return with_tensor(s, np.moveaxis(out, (0, 1), (atom, mode)))


def transfer_photon_to_atom(s: StateVector, atom: int, mode: int, gamma: float) -> StateVector:
    """Swap a single-rail qubit into a ground-state atom (duration ``tau``).

    ``|g>(a|0> + b|1>) -> (a|g> - i b|e>)|0>``.
    """
    _axes(s, atom, mode)
    leak = population_above(s, mode, 1)
    if leak > SUPPORT_TOL:
        raise SupportError(f"mode {mode} has population {leak:.3g} above |1>")
    return jc_evolve(s, atom, mode, JCParams.transfer(gamma))


def transfer_atom_to_photon(s: StateVector, atom: int, mode: int, gamma: float) -> StateVector:
    """Inverse of :func:`transfer_photon_to_atom` on a vacuum mode.

    Runs the interaction for ``3 tau``, which equals the adjoint of the
    ``tau`` propagator on the one-excitation block:
    ``(c_g|g> + c_e|e>)|0> -> |g>(c_g|0> + i c_e|1>)``.
    """
    _axes(s, atom, mode)
    occupied = population_above(s, mode, 0)
    if occupied > SUPPORT_TOL:
        raise SupportError(f"mode {mode} is not in vacuum (population {occupied:.3g})")
    return jc_evolve(s, atom, mode, JCParams(gamma, 3 * JCParams.transfer_time(gamma)))


def _pulse_mode(s: StateVector, pulse_mode, alpha, cutoff=None):
    if pulse_mode is None:
        probe, _ = make_coherent(alpha, cutoff)
        return tensor(s, probe), len(s.layout)
    sub = s.layout.check_index(pulse_mode, "fock")
    need = default_cutoff(alpha)
    if sub.cutoff < need:
        raise TruncationError(
            f"pulse mode cutoff {sub.cutoff} is below {need} required for |alpha|^2 = {abs(alpha)**2:g}"
        )
    return s, pulse_mode


def hadamard_pulse(s: StateVector, atom: int, pulse_mode, alpha: complex, gamma: float, cutoff: int | None = None) -> StateVector:
    """Drive ``atom`` with a coherent pi/2 pulse for ``t_s``, keeping the exact entangled output.

    If ``pulse_mode`` is ``None`` a truncated ``|alpha>`` (``cutoff`` levels,
    default from the truncation rule) is appended as the last subsystem;
    otherwise ``pulse_mode`` must already hold it.
    """
    s, pm = _pulse_mode(s, pulse_mode, alpha, cutoff)
    return jc_evolve(s, atom, pm, JCParams.half_pulse(gamma, alpha))


def pi_pulse(s: StateVector, atom: int, pulse_mode, alpha: complex, gamma: float, cutoff: int | None = None) -> StateVector:
    """Coherent pi pulse: :func:`hadamard_pulse` run for ``2 t_s``."""
    s, pm = _pulse_mode(s, pulse_mode, alpha, cutoff)
    return jc_evolve(s, atom, pm, JCParams.full_pulse(gamma, alpha))


def rotation_matrix(area: float, phase: float = 0.0) -> np.ndarray:
    """``exp(-i area (e^{i phase} sigma+ + e^{-i phase} sigma-))`` in the ``(g, e)`` basis.

    This is the strong-field limit of driving the atom with ``|alpha>``,
    ``phase = arg(alpha)``, ``area = gamma |alpha| t``.
    """
    c, s = math.cos(area), math.sin(area)
    return np.array(
        [[c, -1j * s * np.exp(-1j * phase)], [-1j * s * np.exp(1j * phase), c]],
        dtype=np.complex128,
    )


def _rotate_atom(s: StateVector, atom: int, u: np.ndarray) -> StateVector:
    s.layout.check_index(atom, "atom")
    t = np.tensordot(u, s.tensor(), axes=([1], [atom]))
    return with_tensor(s, np.moveaxis(t, 0, atom))


def ideal_hadamard_pulse(s: StateVector, atom: int, alpha: complex = 1.0) -> StateVector:
    """Large-``|alpha|`` limit of :func:`hadamard_pulse`.

    ``(|g> + i|e>)/sqrt2 -> |g>`` and ``(|g> - i|e>)/sqrt2 -> -i|e>`` for real positive alpha.
    """
    return _rotate_atom(s, atom, rotation_matrix(math.pi / 4, float(np.angle(alpha))))


def ideal_pi_pulse(s: StateVector, atom: int, alpha: complex = 1.0) -> StateVector:
    """Large-``|alpha|`` limit of :func:`pi_pulse`: ``|g> -> -i|e>``, ``|e> -> -i|g>``."""
    return _rotate_atom(s, atom, rotation_matrix(math.pi / 2, float(np.angle(alpha))))


def drive_atom(
    s: StateVector,
    atom: int,
    alpha: complex,
    gamma: float,
    *,
    full: bool = False,
    ideal: bool = False,
    cutoff: int | None = None,
) -> StateVector:
    """Coherent pi/2 (or pi, with ``full``) pulse on ``atom``.

    Physical mode appends the pulse mode as the last subsystem; ideal mode
    applies the limiting unitary to the atom alone.
    """
    if ideal:
        return (ideal_pi_pulse if full else ideal_hadamard_pulse)(s, atom, alpha)
    return (pi_pulse if full else hadamard_pulse)(s, atom, None, alpha, gamma, cutoff)


def excited_probability(s: StateVector, atom: int) -> float:
    s.layout.check_index(atom, "atom")
    p = marginal(s, atom)
    return float(p[1] / p.sum())


# ---------------------------------------------------------------------------
# analytic error probability
# ---------------------------------------------------------------------------

PERR_TAIL_TOL = 1e-14


@dataclass(frozen=True)
class ErrorProbabilityPoint:
    alpha_sq: float
    p_err: float
    terms: int = 0
    remainder_bound: float = 0.0
    limiting: bool = False


def _poisson_series(mean_sq: float, bracket):
    """Sum ``e^{-x} x^n / n! * bracket(n)`` with a bounded tail.

    ``bracket(n)`` must not exceed ``B(n) = (1 + sqrt(n)/a + a/sqrt(n+1))^2``.
    Past ``n >= 2x`` the ratio of successive term bounds only shrinks, so
    once it is below 1/2 the tail is at most ``2 r w_n B(n)``.
    """
    x = mean_sq
    a = math.sqrt(x)

    def bound(n):
        return (1 + math.sqrt(n) / a + a / math.sqrt(n + 1)) ** 2

    total = 0.0
    log_w = -x
    n = 0
    while True:
        w = math.exp(log_w)
        total += w * bracket(n)
        if n >= 2 * x:
            r = x / (n + 1) * bound(n + 1) / bound(n)
            tail = 2 * r * w * bound(n)
            if r <= 0.5 and tail < PERR_TAIL_TOL:
                return total, n + 1, tail
        n += 1
        log_w += math.log(x) - math.log(n)


def perr(alpha: complex) -> ErrorProbabilityPoint:
    """Probability that a pi/2 pulse of strength ``|alpha|`` leaves ``(|g>-i|e>)/sqrt2`` in ``|g>``.

    .. math::

        P = \\frac{e^{-|a|^2}}{2} \\sum_n \\frac{|a|^{2n}}{n!}
            \\left| \\cos\\frac{\\pi\\sqrt n}{4|a|}
            - \\frac{\\sqrt n}{|a|}\\sin\\frac{\\pi\\sqrt n}{4|a|} \\right|^2

    ``alpha = 0`` returns the limiting value 1/2 with ``limiting=True``.
    """
    a = abs(alpha)
    if a == 0:
        return ErrorProbabilityPoint(0.0, 0.5, 0, 0.0, limiting=True)

    def bracket(n):
        th = math.pi * math.sqrt(n) / (4 * a)
        return (math.cos(th) - math.sqrt(n) / a * math.sin(th)) ** 2

    total, terms, tail = _poisson_series(a * a, bracket)
    return ErrorProbabilityPoint(a * a, 0.5 * total, terms, 0.5 * tail)


def perr_excited(alpha: complex) -> ErrorProbabilityPoint:
    """Companion of :func:`perr` for ``(|g>+i|e>)/sqrt2``: probability of ending in ``|e>``."""
    a = abs(alpha)
    if a == 0:
        return ErrorProbabilityPoint(0.0, 0.5, 0, 0.0, limiting=True)

    def bracket(n):
        r = math.sqrt(n + 1)
        th = math.pi * r / (4 * a)
        return (math.cos(th) - a / r * math.sin(th)) ** 2

    total, terms, tail = _poisson_series(a * a, bracket)
    return ErrorProbabilityPoint(a * a, 0.5 * total, terms, 0.5 * tail)


def perr_sweep(alpha_sq_grid) -> list:
    out = []
    for x in alpha_sq_grid:
        if not x > 0:
            raise ValueError(f"grid values must be positive, got {x!r}")
        out.append(perr(math.sqrt(x)))
    return out


def perr_csv(points) -> str:
    """CSV text with header ``alpha_sq,p_err`` (15 significant digits)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha_sq", "p_err"])
    for p in points:
        w.writerow([f"{p.alpha_sq:.15g}", f"{p.p_err:.15g}"])
    return buf.getvalue()
