from __future__ import annotations

import numpy as np
import pytest

from mslab.grid import Grid, SampledField


def random_field(g: Grid, seed: int = 0, complex_: bool = False) -> SampledField:
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(g.shape)
    if complex_:
        vals = vals + 1j * rng.standard_normal(g.shape)
    return SampledField(g, vals)


def bandlimited(g: Grid, seed: int = 0, degree: int = 4) -> SampledField:
    """Real trigonometric polynomial with zero mean and frequencies up to ``degree / L``."""
    rng = np.random.default_rng(seed)
    x = g.coords()[..., 0]
    vals = np.zeros(g.shape)
    for k in range(1, degree + 1):
        ph = 2 * np.pi * k * x / g.length
        vals += rng.standard_normal() * np.cos(ph) + rng.standard_normal() * np.sin(ph)
    return SampledField(g, vals)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
