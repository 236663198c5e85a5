"""Simulation configuration shared by the analyzer, protocol and CLI."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace

from .fock import default_cutoff


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-9
    fidelity: float = 1e-9
    qnd_ambiguity: float = 1e-4


@dataclass(frozen=True)
class SimConfig:
    """Physical and run parameters.

    ``alpha`` is the amplitude of the coherent pi/2 and pi pulses (real
    positive is the reference configuration), ``probe_alpha`` that of the
    QND probe. ``cutoff`` overrides the per-pulse Fock cutoff; ``None``
    uses ``ceil(|alpha|^2 + 10|alpha| + 10)``.
    """

    alpha: complex = math.sqrt(50)
    gamma: float = 1.0
    kappa: float = 1.0
    probe_alpha: complex = 5.0
    cutoff: int | None = None
    ideal_mode: bool = False
    trials: int = 1000
    seed: int = 42
    sampler: str = "haar"
    min_fidelity: float | None = None
    min_mean_fidelity: float | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "probe_alpha", complex(self.probe_alpha))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not (self.gamma > 0 and self.kappa > 0):
            raise ValueError("gamma and kappa must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.sampler not in ("haar", "equatorial"):
            raise ValueError(f"unknown sampler {self.sampler!r}")
        if not self.ideal_mode and self.alpha == 0:
            raise ValueError("physical mode needs a non-zero pulse amplitude")
        if self.cutoff is not None and self.cutoff < default_cutoff(self.alpha):
            raise ValueError(
                f"cutoff {self.cutoff} is below the truncation rule ({default_cutoff(self.alpha)}) for this alpha"
            )

    @property
    def alpha_sq(self) -> float:
        return abs(self.alpha) ** 2

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known - {"alpha_sq", "probe_alpha_sq"}
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        if "alpha_sq" in data:
            if "alpha" in data:
                raise ValueError("give either alpha or alpha_sq, not both")
            data["alpha"] = math.sqrt(float(data.pop("alpha_sq")))
        if "probe_alpha_sq" in data:
            data["probe_alpha"] = math.sqrt(float(data.pop("probe_alpha_sq")))
        for key in ("alpha", "probe_alpha"):
            if isinstance(data.get(key), (list, tuple)):
                re, im = data[key]
                data[key] = complex(re, im)
        if "tolerances" in data:
            data["tolerances"] = Tolerances(**data["tolerances"])
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "SimConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alpha"] = [self.alpha.real, self.alpha.imag]
        d["probe_alpha"] = [self.probe_alpha.real, self.probe_alpha.imag]
        return d

    def evolve(self, **changes) -> "SimConfig":
        return replace(self, **changes)
