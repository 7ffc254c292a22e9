"""Uniform periodic grids, sampled fields and continuum-normalized transforms.

Conventions
-----------
Coordinates are ``x_j = j * dx`` with ``dx = L / N`` on every axis and the
frequency lattice is ``xi_k = k / L`` for ``k = -N/2, ..., N/2 - 1``.  The
forward transform is the Riemann sum

    fhat(xi_k) = dx**dim * sum_j f(x_j) exp(-2 pi i x_j . xi_k)

and the inverse is ``f(x_j) = L**-dim * sum_k fhat(xi_k) exp(2 pi i x_j . xi_k)``,
so that the pair is an exact roundtrip and Parseval reads
``sum |f|^2 dx**dim == L**-dim * sum |fhat|^2``.  Spectral coefficients are
stored in centered order (index ``k + N/2``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class ConfigError(ValueError):
    """Invalid configuration (grid, exponents, file format, ...)."""


@dataclass(frozen=True)
class Grid:
    dim: int
    n: int
    length: float

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ConfigError(f"dim must be 1 or 2, got {self.dim}")
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 8 or n & (n - 1):
            raise ConfigError(f"N must be a power of two >= 8, got {n}")
        if not (self.length > 0 and np.isfinite(self.length)):
            raise ConfigError(f"box length must be positive, got {self.length}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "length", float(self.length))

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n**self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    def axis_coords(self) -> np.ndarray:
        return np.arange(self.n) * self.spacing

    def axis_freqs(self) -> np.ndarray:
        return np.arange(-self.n // 2, self.n // 2) / self.length

    def coords(self) -> np.ndarray:
        """Point coordinates, shape ``shape + (dim,)``."""
        axes = np.meshgrid(*([self.axis_coords()] * self.dim), indexing="ij")
        return np.stack(axes, axis=-1)

    def freqs(self) -> np.ndarray:
        """Centered frequency lattice, shape ``shape + (dim,)``."""
        axes = np.meshgrid(*([self.axis_freqs()] * self.dim), indexing="ij")
        return np.stack(axes, axis=-1)

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.dim, self.n * factor, self.length)


def make_grid(dim: int, n: int, length: float) -> Grid:
    return Grid(dim, n, length)


def _frozen(values, dtype=np.complex128) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SampledField:
    """Complex samples on a grid; ``nonnegative`` marks real, >= 0 data."""

    grid: Grid
    values: np.ndarray
    nonnegative: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != self.grid.shape:
            if vals.size != self.grid.size:
                raise ConfigError(
                    f"field has {vals.size} samples, grid needs {self.grid.size}")
            vals = vals.reshape(self.grid.shape)
        vals = _frozen(vals)
        if self.nonnegative:
            if np.any(vals.imag != 0) or np.any(vals.real < 0):
                raise ValueError("field tagged nonnegative has negative or complex samples")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, grid: Grid, func, **kw) -> "SampledField":
        return cls(grid, func(grid.coords()), **kw)

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def abs(self) -> np.ndarray:
        return np.abs(self.values)

    def with_values(self, values, nonnegative: bool = False) -> "SampledField":
        return SampledField(self.grid, values, nonnegative)

    def __add__(self, other: "SampledField") -> "SampledField":
        _same_grid(self, other)
        return SampledField(self.grid, self.values + other.values)

    def __mul__(self, c) -> "SampledField":
        if isinstance(c, SampledField):
            _same_grid(self, c)
            return SampledField(self.grid, self.values * c.values)
        return SampledField(self.grid, self.values * c)

    __rmul__ = __mul__


def nonnegative_field(grid: Grid, values) -> SampledField:
    vals = np.asarray(values, dtype=float)
    return SampledField(grid, np.maximum(vals, 0.0), nonnegative=True)


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: Grid
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        coef = np.asarray(self.coefficients)
        if coef.size != self.grid.size:
            raise ConfigError("coefficient count does not match grid")
        object.__setattr__(self, "coefficients", _frozen(coef.reshape(self.grid.shape)))


def _same_grid(*fields) -> Grid:
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise ConfigError(f"grid mismatch: {g} vs {f.grid}")
    return g


def forward_transform(f: SampledField) -> SpectralField:
    g = f.grid
    coef = np.fft.fftshift(np.fft.fftn(f.values)) * g.cell_volume
    return SpectralField(g, coef)


def inverse_transform(F: SpectralField) -> SampledField:
    g = F.grid
    vals = np.fft.ifftn(np.fft.ifftshift(F.coefficients)) / g.cell_volume
    return SampledField(g, vals)


def spectral_energy(F: SpectralField) -> float:
    """``L**-dim * sum |fhat|^2``; equals ``lp_norm(f, 2)**2`` by Parseval."""
    return float(np.sum(np.abs(F.coefficients) ** 2)) / F.grid.length**F.grid.dim


def _weights(f: SampledField, w: SampledField | None) -> np.ndarray | None:
    if w is None:
        return None
    _same_grid(f, w)
    wv = w.values.real
    if np.any(wv < 0) or np.any(w.values.imag != 0):
        raise ValueError("weight must be nonnegative and real")
    return wv


def lp_norm(f: SampledField, p: float, w: SampledField | None = None) -> float:
    """Weighted (quasi-)norm ``(sum |f|^p w dx^dim)^(1/p)``; p < 1 allowed."""
    if not p > 0:
        raise ConfigError(f"exponent p must be positive, got {p}")
    wv = _weights(f, w)
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max() if wv is None else a[wv > 0].max(initial=0.0))
    terms = a**p if wv is None else a**p * wv
    return float(np.sum(terms) * f.grid.cell_volume) ** (1.0 / p)


def distribution_levels(values: np.ndarray, weights: np.ndarray | None, cell: float):
    """Distinct magnitude levels and the measure of ``{|f| > level*(1-1e-12)}``.

    Returns ``(levels, measures)`` with ``levels`` ascending and positive.
    """
    a = np.abs(np.ravel(values))
    w = np.ones_like(a) if weights is None else np.ravel(weights).astype(float)
    order = np.argsort(a, kind="stable")
    a_sorted = a[order]
    w_sorted = w[order] * cell
    # tail[i] = measure of samples with index >= i in ascending order
    tail = np.concatenate([np.cumsum(w_sorted[::-1])[::-1], [0.0]])
    levels = np.unique(a_sorted[a_sorted > 0])
    first = np.searchsorted(a_sorted, levels * (1 - 1e-12), side="right")
    return levels, tail[first]


def weak_lp_quasinorm(f: SampledField, p: float, w: SampledField | None = None) -> float:
    if not p > 0:
        raise ConfigError(f"exponent p must be positive, got {p}")
    wv = _weights(f, w)
    levels, measures = distribution_levels(f.values, wv, f.grid.cell_volume)
    if levels.size == 0:
        return 0.0
    return float(np.max(levels * measures ** (1.0 / p)))


def trig_interpolate(f: SampledField, factor: int) -> np.ndarray:
    """Band-limited (zero-padded spectral) interpolation onto an ``N*factor`` grid.

    The Nyquist mode is split symmetrically so real input stays real.
    """
    if factor == 1:
        return np.array(f.values)
    g = f.grid
    n, m = g.n, g.n * factor
    coef = np.fft.fftn(f.values)
    for axis in range(g.dim):
        coef = _pad_axis(coef, axis, n, m)
    out = np.fft.ifftn(coef) * factor**g.dim
    if np.all(f.values.imag == 0):
        out = out.real.astype(complex)
    return out


def _pad_axis(coef: np.ndarray, axis: int, n: int, m: int) -> np.ndarray:
    coef = np.moveaxis(coef, axis, 0)
    out = np.zeros((m,) + coef.shape[1:], dtype=complex)
    h = n // 2
    out[:h] = coef[:h]
    out[m - h + 1:] = coef[h + 1:]
    out[h] = coef[h] / 2
    out[m - h] = coef[h] / 2
    return np.moveaxis(out, 0, axis)
