"""Seeded random test functions defined in the continuum.

Each generator draws its parameters from a counter-based stream keyed by
``(seed, index)`` and returns a function of the coordinates, so the same trial
sampled on nested grids describes the same continuum function.
"""
from __future__ import annotations

import numpy as np

from ..grid import ConfigError, Grid, SampledField

GENERATORS = ("random_trig", "random_bumps", "zero")


def trial_rng(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    key = np.array([seed, (index << 8) | stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def smooth_window(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """C-infinity bump equal to ``exp(1 - 1/(1 - u^2))`` on ``(lo, hi)``, zero outside."""
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    u = (x - mid) / half
    out = np.zeros_like(x, dtype=float)
    inside = np.abs(u) < 1
    out[inside] = np.exp(1 - 1 / (1 - u[inside] ** 2))
    return out


def _window(coords: np.ndarray, L: float, support) -> np.ndarray:
    lo, hi = support[0] * L, support[1] * L
    w = np.ones(coords.shape[:-1])
    for axis in range(coords.shape[-1]):
        w = w * smooth_window(coords[..., axis], lo, hi)
    return w


def random_trig(rng: np.random.Generator, dim: int, L: float, degree: int, support):
    """Real trigonometric polynomial of the given degree (unit-normal coefficients) times a bump."""
    ks = np.arange(-degree, degree + 1)
    mesh = np.stack(np.meshgrid(*([ks] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    a = rng.standard_normal(len(mesh))
    b = rng.standard_normal(len(mesh))
    scale = 1.0 / np.sqrt(len(mesh))

    def func(coords):
        phase = 2 * np.pi * (coords @ mesh.T) / L
        poly = (np.cos(phase) @ a + np.sin(phase) @ b) * scale
        return poly * _window(coords, L, support)

    return func


def random_bumps(rng: np.random.Generator, dim: int, L: float, count: int, support):
    """Sum of Gaussian bumps with random centers, widths and unit-normal amplitudes."""
    lo, hi = support[0] * L, support[1] * L
    centers = rng.uniform(lo, hi, size=(count, dim))
    widths = L * rng.uniform(1 / 32, 1 / 8, size=count)
    amps = rng.standard_normal(count)

    def func(coords):
        out = np.zeros(coords.shape[:-1])
        for c, w, a in zip(centers, widths, amps):
            out += a * np.exp(-np.sum((coords - c) ** 2, axis=-1) / w**2)
        return out * _window(coords, L, support)

    return func


def make_functions(ensemble: dict, dim: int, L: float, index: int, count: int = 2):
    """``count`` continuum functions for trial ``index``."""
    kind = ensemble.get("generator", "random_trig")
    seed = int(ensemble.get("seed", 0))
    support = ensemble.get("support", (0.25, 0.75))
    funcs = []
    for slot in range(count):
        rng = trial_rng(seed, index, slot)
        if kind == "random_trig":
            funcs.append(random_trig(rng, dim, L, int(ensemble.get("degree", 8)), support))
        elif kind == "random_bumps":
            funcs.append(random_bumps(rng, dim, L, int(ensemble.get("bumps", 3)), support))
        elif kind == "zero":
            funcs.append(lambda c: np.zeros(c.shape[:-1]))
        else:
            raise ConfigError(f"unknown generator {kind!r}; choose from {GENERATORS}")
    return funcs


def sample(funcs, g: Grid) -> list[SampledField]:
    coords = g.coords()
    return [SampledField(g, f(coords)) for f in funcs]
