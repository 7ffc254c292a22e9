"""Spatial kernels ``K_t(u) = t^-D mcheck(u / t)`` of multiplier symbols.

``mcheck(v) = int m(eta) exp(2 pi i v . eta) d eta`` is approximated by a
finite Fourier sum over a dedicated symbol lattice ``[-Xi, Xi)^D`` (``D =
arity * dim``), independent of the data grid, and windowed to one period.
The lattice cutoff ``Xi`` is chosen from the decay of ``|m|``.
"""
from __future__ import annotations

import math
import warnings
from functools import lru_cache

import numpy as np

from .grid import ConfigError, Grid, SampledField
from .symbols import Symbol

_DECAY_TOL = 1e-12
_SUPPORT_TOL = 1e-11


def _evaluate_on_mesh(m: Symbol, dim: int, axes: list[np.ndarray]) -> np.ndarray:
    """m on the tensor mesh of ``axes`` (one axis per scalar frequency coordinate)."""
    mesh = np.meshgrid(*axes, indexing="ij")
    coords = np.stack(mesh, axis=-1)
    args = [coords[..., i * dim:(i + 1) * dim] for i in range(m.arity)]
    with np.errstate(all="ignore"):
        return m(*args)


def auto_freq_cutoff(m: Symbol, dim: int = 1) -> float:
    """Smallest power of two ``Xi`` (capped at 64) with ``|m| < tol * max|m|`` outside ``[-Xi, Xi]^D``."""
    D = m.arity * dim
    step = 1 / 8 if D == 1 else 1 / 2
    axis = np.arange(-512, 513) * step if D == 1 else np.arange(-128, 129) * step
    vals = np.abs(_evaluate_on_mesh(m, dim, [axis] * D))
    if not np.all(np.isfinite(vals)):
        raise ConfigError(f"symbol {m.name} is not finite on the synthesis box")
    peak = vals.max()
    if peak == 0:
        return 1.0
    mesh = np.meshgrid(*([np.abs(axis)] * D), indexing="ij")
    linf = np.max(np.stack(mesh), axis=0)
    for a in range(-2, 7):
        xi = 2.0**a
        if vals[linf > xi].max(initial=0.0) < _DECAY_TOL * peak:
            return xi
    warnings.warn(f"symbol {m.name} decays slowly; kernel synthesized with cutoff 64",
                  RuntimeWarning, stacklevel=2)
    return 64.0


class KernelSynth:
    """Finite-Fourier-sum evaluator of ``mcheck`` for one symbol."""

    def __init__(self, m: Symbol, dim: int = 1, n_freq: int | None = None,
                 freq_cutoff: float | None = None):
        self.m = m
        self.dim = dim
        self.D = m.arity * dim
        if self.D > 2:
            raise ConfigError("kernel synthesis supports arity * dim <= 2")
        self.freq_cutoff = float(freq_cutoff or auto_freq_cutoff(m, dim))
        self.n_freq = int(n_freq or (2048 if self.D == 1 else 256))
        self.d_eta = 2 * self.freq_cutoff / self.n_freq
        self.period = 1.0 / self.d_eta
        self.eta = (np.arange(self.n_freq) - self.n_freq // 2) * self.d_eta
        vals = _evaluate_on_mesh(m, dim, [self.eta] * self.D)
        self.mhat = np.asarray(vals, dtype=complex) * self.d_eta**self.D
        self.support_radius = self._support_radius()

    def _phases(self, v: np.ndarray) -> np.ndarray:
        return np.exp(2j * np.pi * np.outer(v, self.eta))

    def _window(self, v: np.ndarray) -> np.ndarray:
        return np.abs(v) < self.period / 2

    def tensor(self, *axes: np.ndarray) -> np.ndarray:
        """mcheck on the tensor product of 1-D coordinate arrays (one per scalar axis)."""
        if len(axes) != self.D:
            raise ConfigError(f"expected {self.D} coordinate axes")
        axes = [np.asarray(a, dtype=float).ravel() for a in axes]
        if self.D == 1:
            out = self._phases(axes[0]) @ self.mhat
            return np.where(self._window(axes[0]), out, 0)
        E1, E2 = self._phases(axes[0]), self._phases(axes[1])
        out = E1 @ self.mhat @ E2.T
        mask = self._window(axes[0])[:, None] & self._window(axes[1])[None, :]
        return np.where(mask, out, 0)

    def points(self, pts: np.ndarray, chunk: int = 4096) -> np.ndarray:
        """mcheck at scattered points, shape ``(K, D)``."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.empty(len(pts), dtype=complex)
        for s in range(0, len(pts), chunk):
            p = pts[s:s + chunk]
            if self.D == 1:
                val = self._phases(p[:, 0]) @ self.mhat
            else:
                val = np.sum((self._phases(p[:, 0]) @ self.mhat) * self._phases(p[:, 1]), axis=1)
            inside = np.all(np.abs(p) < self.period / 2, axis=1)
            out[s:s + chunk] = np.where(inside, val, 0)
        return out

    def _support_radius(self) -> float:
        """l-infinity radius outside which ``|mcheck|`` is negligible."""
        h = 1.0 / (2 * self.freq_cutoff)
        v = (np.arange(self.n_freq) - self.n_freq // 2) * h
        vals = np.abs(self.tensor(*([v] * self.D)))
        peak = vals.max()
        if peak == 0:
            return 0.0
        big = vals > _SUPPORT_TOL * peak
        mesh = np.meshgrid(*([np.abs(v)] * self.D), indexing="ij")
        radius = float(np.max(np.max(np.stack(mesh), axis=0)[big])) + h
        if radius >= self.period / 2 - h:
            warnings.warn(f"kernel of {self.m.name} is not localized within its period",
                          RuntimeWarning, stacklevel=3)
        return min(radius, self.period / 2)


@lru_cache(maxsize=32)
def kernel_synth(m: Symbol, dim: int = 1) -> KernelSynth:
    return KernelSynth(m, dim)


def kernel_at(m: Symbol, t: float, points, dim: int = 1,
              synth: KernelSynth | None = None) -> np.ndarray:
    """``K_t`` at displacement points of shape ``(K, arity*dim)``."""
    if not t > 0:
        raise ConfigError(f"t must be positive, got {t}")
    ks = synth or kernel_synth(m, dim)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return ks.points(pts / t) / t**ks.D


def periodized_offsets(ks: KernelSynth, t: float, h: float, count: int, length: float):
    """Kernel ``K_t`` on displacements ``d*h``, periodized with period ``length``.

    ``count`` offsets ``d = 0..count-1`` are used with wrapped coordinates when the
    support ``R t`` reaches half the period; otherwise the offsets are truncated
    to ``|d| h <= R t``.  Returns ``(offsets, values)`` where ``values`` has one
    axis per scalar displacement coordinate.
    """
    reach = ks.support_radius * t
    if 2 * reach < length:
        dmax = int(math.ceil(reach / h))
        offsets = np.arange(-dmax, dmax + 1)
        u = offsets * h
        vals = ks.tensor(*([u / t] * ks.D)) / t**ks.D
        return offsets, vals
    offsets = np.arange(count)
    u = np.where(offsets < count // 2, offsets, offsets - count) * h
    images = int(math.ceil(reach / length)) + 1
    shifts = np.arange(-images, images + 1) * length
    expanded = (u[None, :] + shifts[:, None]).ravel()
    big = ks.tensor(*([expanded / t] * ks.D)) / t**ks.D
    n_img = len(shifts)
    if ks.D == 1:
        vals = big.reshape(n_img, count).sum(axis=0)
    else:
        vals = big.reshape(n_img, count, n_img, count).sum(axis=(0, 2))
    return offsets, vals


def synthesize_kernel(m: Symbol, g: Grid, t: float, synth: KernelSynth | None = None) -> SampledField:
    """Periodized ``K_t`` sampled at the grid displacements, on a grid of dimension ``arity*dim``."""
    if not t > 0:
        raise ConfigError(f"t must be positive, got {t}")
    ks = synth or kernel_synth(m, g.dim)
    h = g.spacing
    n = g.n
    u = np.where(np.arange(n) < n // 2, np.arange(n), np.arange(n) - n) * h
    images = int(math.ceil(ks.support_radius * t / g.length)) + 1
    shifts = np.arange(-images, images + 1) * g.length
    expanded = (u[None, :] + shifts[:, None]).ravel()
    big = ks.tensor(*([expanded / t] * ks.D)) / t**ks.D
    n_img = len(shifts)
    if ks.D == 1:
        vals = big.reshape(n_img, n).sum(axis=0)
    else:
        vals = big.reshape(n_img, n, n_img, n).sum(axis=(0, 2))
    return SampledField(Grid(ks.D, n, g.length), vals)
