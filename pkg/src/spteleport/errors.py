"""Exception and warning types shared across the simulator."""


class SimulationError(Exception):
    """Base class for all simulator errors."""


class LayoutError(SimulationError, ValueError):
    """Subsystem index, type or layout mismatch."""


class DimensionLimitError(SimulationError, ValueError):
    """The composite Hilbert space would exceed the allowed dimension."""


class TruncationError(SimulationError, RuntimeError):
    """Population would leak past a Fock cutoff, or a cutoff is too small."""


class NumericalDegeneracyError(SimulationError, RuntimeError):
    """Every measurement branch has (numerically) zero probability."""


class SupportError(SimulationError, ValueError):
    """A state has population outside the subspace an operation requires."""


class AmbiguousParityError(SimulationError, RuntimeError):
    """The QND probe could not be matched to either coherent reference."""


class TruncationWarning(UserWarning):
    """A truncated coherent state lost more than the tolerated norm."""
