"""Exponent bundles and the logarithmic t-quadrature used by square functions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import ConfigError, Grid


@dataclass(frozen=True)
class ExponentConfig:
    p0: float = 1.0
    p_list: tuple[float, ...] = (2.0, 2.0)
    s: int = 2
    eps1: float = 1.0
    eps2: float = 1.0
    delta: float = 1.5
    p: float = field(init=False)

    def __post_init__(self):
        if not self.p0 >= 1:
            raise ConfigError(f"p0 must be >= 1, got {self.p0}")
        p_list = tuple(float(x) for x in self.p_list)
        if not p_list or any(not q > 0 for q in p_list):
            raise ConfigError(f"p_list must be positive, got {self.p_list}")
        if self.eps1 <= 0 or self.eps2 <= 0:
            raise ConfigError("eps1 and eps2 must be positive")
        object.__setattr__(self, "p_list", p_list)
        object.__setattr__(self, "p", 1.0 / sum(1.0 / q for q in p_list))

    @property
    def m(self) -> int:
        return len(self.p_list)

    def to_dict(self) -> dict:
        return {"p0": self.p0, "p_list": list(self.p_list), "s": self.s,
                "eps1": self.eps1, "eps2": self.eps2, "delta": self.delta}


@dataclass(frozen=True)
class TQuad:
    """Midpoint rule in ``log t`` on ``[t_min, t_max]``.

    Nodes are spaced uniformly in ``log t`` with (at least) ``nodes_per_octave``
    nodes per doubling; the log-weights sum to ``ln(t_max / t_min)``.
    """

    t_min: float
    t_max: float
    nodes_per_octave: int = 8

    def __post_init__(self):
        if not (0 < self.t_min < self.t_max) or not math.isfinite(self.t_max):
            raise ConfigError(f"need 0 < t_min < t_max, got {self.t_min}, {self.t_max}")
        if self.nodes_per_octave < 1:
            raise ConfigError("nodes_per_octave must be >= 1")

    @property
    def count(self) -> int:
        octaves = math.log2(self.t_max / self.t_min)
        return max(1, math.ceil(round(octaves * self.nodes_per_octave, 9)))

    @property
    def log_weight(self) -> float:
        return math.log(self.t_max / self.t_min) / self.count

    @property
    def nodes(self) -> np.ndarray:
        h = self.log_weight
        return self.t_min * np.exp((np.arange(self.count) + 0.5) * h)

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.count, self.log_weight)

    def __iter__(self):
        return iter(zip(self.nodes.tolist(), self.weights.tolist()))

    def refined(self) -> "TQuad":
        return TQuad(self.t_min, self.t_max, 2 * self.nodes_per_octave)

    @classmethod
    def for_grid(cls, grid: Grid, nodes_per_octave: int = 8) -> "TQuad":
        return cls(grid.spacing / 4, 4 * grid.length, nodes_per_octave)
