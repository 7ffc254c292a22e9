"""Square functions of bilinear (and unilinear) Fourier multipliers.

``square_multiplier`` sums the frequency-side double series for every t-node;
``square_kernel`` integrates the synthesized kernel against band-limited
interpolants of the data and serves as an independent oracle.
"""
from __future__ import annotations

import math
import warnings

import numpy as np

from .exponents import ExponentConfig, TQuad
from .grid import ConfigError, Grid, SampledField, _same_grid, forward_transform, trig_interpolate
from .kernels import KernelSynth, kernel_synth, periodized_offsets
from .symbols import Symbol

__all__ = [
    "ExponentConfig", "TQuad", "apply_bilinear_fixed_t", "apply_unilinear_fixed_t",
    "square_multiplier", "square_kernel", "commutator_square", "commutator_multiplier",
    "square_identity_check", "default_tquad",
]

DEFAULT_MAX_COST = 2.0**34


def default_tquad(grid: Grid) -> TQuad:
    return TQuad.for_grid(grid)


def _check_fields(m: Symbol, fields) -> Grid:
    fields = list(fields)
    if len(fields) != m.arity:
        raise ConfigError(f"symbol {m.name} has arity {m.arity}, got {len(fields)} fields")
    return _same_grid(*fields)


def _fold_index(n: int, dim: int) -> np.ndarray:
    """``(k1 + k2) mod N`` for centered indices; the centering shift is a multiple of N."""
    i = np.arange(n)
    return (i[:, None] + i[None, :]) % n


def _symbol_matrix(m: Symbol, g: Grid, t: float) -> np.ndarray:
    xi = g.freqs() * t
    if g.dim == 1:
        a = xi.reshape(-1, 1)
        return m(a[:, None, :], a[None, :, :])
    flat = xi.reshape(-1, 2)
    return m(flat[:, None, :], flat[None, :, :])


def _bincount_complex(idx: np.ndarray, vals: np.ndarray, size: int) -> np.ndarray:
    idx = idx.ravel()
    vals = vals.ravel()
    return (np.bincount(idx, vals.real, size) + 1j * np.bincount(idx, vals.imag, size))


def _bilinear_from_coefs(mvals: np.ndarray, F1: np.ndarray, F2: np.ndarray, g: Grid) -> np.ndarray:
    n = g.n
    if g.dim == 1:
        terms = mvals * F1[:, None] * F2[None, :]
        G = _bincount_complex(_fold_index(n, 1), terms, n)
        return n * np.fft.ifft(G) / g.length**2
    # dim 2: fold both coordinates of k1 + k2 separately
    i = np.arange(n)
    r1 = (i[:, None] + i[None, :]) % n
    idx = (r1[:, None, :, None] * n + r1[None, :, None, :]).reshape(n * n, n * n)
    terms = mvals * F1.ravel()[:, None] * F2.ravel()[None, :]
    G = _bincount_complex(idx, terms, n * n).reshape(n, n)
    return n * n * np.fft.ifftn(G) / g.length**4


def apply_bilinear_fixed_t(m: Symbol, t: float, f1: SampledField, f2: SampledField) -> SampledField:
    """``B_t(f1, f2)`` by the direct double sum over the frequency lattice."""
    if m.arity != 2:
        raise ConfigError("apply_bilinear_fixed_t needs a bilinear symbol")
    if not t > 0:
        raise ConfigError(f"t must be positive, got {t}")
    g = _same_grid(f1, f2)
    F1 = forward_transform(f1).coefficients
    F2 = forward_transform(f2).coefficients
    return SampledField(g, _bilinear_from_coefs(_symbol_matrix(m, g, t), F1, F2, g))


def apply_unilinear_fixed_t(m: Symbol, t: float, f: SampledField) -> SampledField:
    if m.arity != 1:
        raise ConfigError("apply_unilinear_fixed_t needs a one-argument symbol")
    g = f.grid
    F = forward_transform(f).coefficients
    mv = m(g.freqs() * t)
    vals = np.fft.ifftn(np.fft.ifftshift(mv * F)) / g.cell_volume
    return SampledField(g, vals)


def _warn_origin(m: Symbol, dim: int) -> None:
    val = m.at_origin(dim)
    if val != 0:
        warnings.warn(f"m(0) = {val} != 0: the t-integral diverges; value is truncation dependent",
                      RuntimeWarning, stacklevel=3)


def _combine(g: Grid, acc: np.ndarray) -> SampledField:
    return SampledField(g, np.sqrt(acc), nonnegative=True)


def square_multiplier(m: Symbol, fields, q: TQuad | None = None) -> SampledField:
    """``(sum_q w_q |B_{t_q}(f)|^2)^(1/2)`` with ``B_t`` from the frequency-side sum."""
    fields = list(fields)
    g = _check_fields(m, fields)
    q = q or default_tquad(g)
    _warn_origin(m, g.dim)
    coefs = [forward_transform(f).coefficients for f in fields]
    acc = np.zeros(g.shape)
    for t, w in q:
        if m.arity == 1:
            mv = m(g.freqs() * t)
            vals = np.fft.ifftn(np.fft.ifftshift(mv * coefs[0])) / g.cell_volume
        else:
            vals = _bilinear_from_coefs(_symbol_matrix(m, g, t), coefs[0], coefs[1], g)
        acc += w * np.abs(vals) ** 2
    return _combine(g, acc)


# -- kernel route ---------------------------------------------------------------

def _refinement(ks: KernelSynth, g: Grid, t: float) -> int:
    """Smallest r with ``2^r / dx >= Xi / t + N / (2 L)``."""
    need = ks.freq_cutoff / t + g.n / (2 * g.length)
    return max(0, math.ceil(math.log2(need * g.spacing) - 1e-12))


class _KernelStep:
    """Per-t quadrature data shared by all slots and inputs."""

    def __init__(self, ks: KernelSynth, g: Grid, t: float):
        self.factor = 2 ** _refinement(ks, g, t)
        self.h = g.spacing / self.factor
        self.fine_n = g.n * self.factor
        self.offsets, self.kernel = periodized_offsets(ks, t, self.h, self.fine_n, g.length)
        i = np.arange(g.n) * self.factor
        self.idx = (i[:, None] - self.offsets[None, :]) % self.fine_n

    def cost(self, g: Grid, arity: int) -> float:
        nd = len(self.offsets)
        return float(g.size) * nd ** (arity * g.dim) if g.dim == 1 else float(g.n * nd * nd * self.fine_n)

    def apply(self, fine: list[np.ndarray], dim: int) -> np.ndarray:
        K, idx, h = self.kernel, self.idx, self.h
        if len(fine) == 2:
            return np.einsum("ia,ab,ib->i", fine[0][idx], K, fine[1][idx], optimize=True) * h * h
        if dim == 1:
            return (fine[0][idx] @ K) * h
        rows = fine[0][idx]                                   # (N, nd, M)
        T = np.einsum("iaj,ab->ibj", rows, K, optimize=True)  # (N, nd, M)
        nd = len(self.offsets)
        cols = T[:, np.arange(nd)[None, :], idx]               # (N, N, nd)
        return cols.sum(axis=-1) * h * h


def _kernel_steps(m: Symbol, g: Grid, q: TQuad, synth, max_cost: float):
    ks = synth or kernel_synth(m, g.dim)
    if ks.D != m.arity * g.dim:
        raise ConfigError("kernel synthesizer does not match symbol and grid")
    if float(g.n) ** (1 + m.arity * g.dim) > max_cost:
        raise ConfigError(f"kernel route too expensive: N^(1+arity*dim) > {max_cost:g}")
    steps = []
    for t, w in q:
        step = _KernelStep(ks, g, t)
        if step.cost(g, m.arity) > max_cost:
            raise ConfigError(f"kernel quadrature at t={t:g} exceeds the resource limit {max_cost:g}")
        steps.append((step, w))
    return steps


def _fine_cache(fields, factor_cache: dict, key, factor: int):
    if (key, factor) not in factor_cache:
        factor_cache[(key, factor)] = trig_interpolate(fields[key], factor)
    return factor_cache[(key, factor)]


def square_kernel(m: Symbol, fields, q: TQuad | None = None, synth: KernelSynth | None = None,
                  max_cost: float = DEFAULT_MAX_COST) -> SampledField:
    """Brute-force kernel quadrature oracle for ``square_multiplier``."""
    fields = list(fields)
    g = _check_fields(m, fields)
    if m.arity * g.dim > 2:
        raise ConfigError("kernel route supports bilinear dim 1 or unilinear dim <= 2")
    q = q or default_tquad(g)
    _warn_origin(m, g.dim)
    cache: dict = {}
    acc = np.zeros(g.shape)
    for step, w in _kernel_steps(m, g, q, synth, max_cost):
        fine = [_fine_cache(fields, cache, i, step.factor) for i in range(len(fields))]
        acc += w * np.abs(step.apply(fine, g.dim)).reshape(g.shape) ** 2
    return _combine(g, acc)


def _centered_symbol(b: SampledField) -> np.ndarray:
    """Real part of b shifted by one of its own samples (constants map to exact zeros)."""
    bv = b.values.real
    return bv - bv.flat[0]


def commutator_square(m: Symbol, bs, fields, q: TQuad | None = None,
                      synth: KernelSynth | None = None,
                      max_cost: float = DEFAULT_MAX_COST) -> SampledField:
    """``sum_i (sum_q w_q |int (b_i(x) - b_i(y_i)) K_t f|^2)^(1/2)`` by kernel quadrature.

    ``bs`` holds one real field (or ``None``) per slot; ``b_i(y)`` is the band-limited
    interpolant of the samples on the refined quadrature grid.
    """
    fields = list(fields)
    bs = list(bs)
    g = _check_fields(m, fields)
    if len(bs) != len(fields):
        raise ConfigError("need one BMO symbol (or None) per slot")
    if m.arity * g.dim > 2:
        raise ConfigError("kernel route supports bilinear dim 1 or unilinear dim <= 2")
    q = q or default_tquad(g)
    active = [(i, SampledField(g, _centered_symbol(b))) for i, b in enumerate(bs) if b is not None]
    total = np.zeros(g.shape)
    if not active:
        return SampledField(g, total, nonnegative=True)
    steps = _kernel_steps(m, g, q, synth, max_cost)
    cache: dict = {}
    for i, b in active:
        if not np.any(b.values):
            continue
        acc = np.zeros(g.shape)
        bcache: dict = {}
        for step, w in steps:
            fine = [_fine_cache(fields, cache, j, step.factor) for j in range(len(fields))]
            bfine = _fine_cache([b], bcache, 0, step.factor).real
            plain = step.apply(fine, g.dim).reshape(g.shape)
            weighted = list(fine)
            weighted[i] = bfine * fine[i]
            inner = step.apply(weighted, g.dim).reshape(g.shape)
            acc += w * np.abs(b.values.real * plain - inner) ** 2
        total += np.sqrt(acc)
    return SampledField(g, total, nonnegative=True)


def commutator_multiplier(m: Symbol, bs, fields, q: TQuad | None = None) -> SampledField:
    """Commutator through ``b(x) B_t(f) - B_t(.., b f_i, ..)`` on the grid itself.

    Algebraically equal to the kernel form; the product ``b f_i`` is taken
    pointwise on the data grid, so this is fast but not an independent oracle.
    """
    fields = list(fields)
    bs = list(bs)
    g = _check_fields(m, fields)
    if len(bs) != len(fields):
        raise ConfigError("need one BMO symbol (or None) per slot")
    q = q or default_tquad(g)
    coefs = [forward_transform(f).coefficients for f in fields]
    slots = []
    for i, b in enumerate(bs):
        if b is None:
            continue
        bv = _centered_symbol(b)
        if not np.any(bv):
            continue
        shifted = list(coefs)
        shifted[i] = forward_transform(SampledField(g, bv * fields[i].values)).coefficients
        slots.append((bv, shifted, np.zeros(g.shape)))
    total = np.zeros(g.shape)
    if not slots:
        return SampledField(g, total, nonnegative=True)
    for t, w in q:
        if m.arity == 1:
            mv = m(g.freqs() * t)
            plain = np.fft.ifftn(np.fft.ifftshift(mv * coefs[0])) / g.cell_volume
        else:
            mat = _symbol_matrix(m, g, t)
            plain = _bilinear_from_coefs(mat, coefs[0], coefs[1], g)
        for bv, shifted, acc in slots:
            if m.arity == 1:
                inner = np.fft.ifftn(np.fft.ifftshift(mv * shifted[0])) / g.cell_volume
            else:
                inner = _bilinear_from_coefs(mat, shifted[0], shifted[1], g)
            acc += w * np.abs(bv * plain - inner) ** 2
    for _, _, acc in slots:
        total += np.sqrt(acc)
    return SampledField(g, total, nonnegative=True)


# -- quadrilinear identity ------------------------------------------------------

def square_identity_check(m: Symbol, f1: SampledField, f2: SampledField,
                          q: TQuad | None = None, max_n: int = 32) -> float:
    """Max pointwise relative gap between ``T_m(f)^2`` and the quadrilinear form.

    The quadrilinear side sums ``m(t xi1, t xi2) conj(m(-t xi3, -t xi4))`` against
    ``(f1, f2, conj f1, conj f2)`` over all four frequency indices explicitly.
    """
    if m.arity != 2:
        raise ConfigError("square_identity_check needs a bilinear symbol")
    g = _same_grid(f1, f2)
    if g.dim != 1:
        raise ConfigError("square_identity_check is implemented for dim 1")
    if g.n > max_n:
        raise ConfigError(f"quadrilinear sum limited to N <= {max_n}")
    q = q or default_tquad(g)
    n = g.n
    F = [forward_transform(f).coefficients for f in (f1, f2)]
    G = [forward_transform(SampledField(g, np.conj(f.values))).coefficients for f in (f1, f2)]
    i = np.arange(n)
    fold = (i[:, None, None, None] + i[None, :, None, None]
            + i[None, None, :, None] + i[None, None, None, :]) % n
    lhs = np.zeros(n)
    rhs = np.zeros(n, dtype=complex)
    xi = g.axis_freqs().reshape(-1, 1)
    for t, w in q:
        m12 = m(t * xi[:, None, :], t * xi[None, :, :])
        m34 = np.conj(m(-t * xi[:, None, :], -t * xi[None, :, :]))
        lhs += w * np.abs(_bilinear_from_coefs(m12, F[0], F[1], g)) ** 2
        P = m12 * F[0][:, None] * F[1][None, :]
        Q = m34 * G[0][:, None] * G[1][None, :]
        terms = P[:, :, None, None] * Q[None, None, :, :]
        S = _bincount_complex(fold, terms, n)
        # fold index counts k1+..+k4 - 2N (centered shift), which is congruent mod N
        rhs += w * n * np.fft.ifft(S) / g.length**4
    scale = max(float(lhs.max()), float(np.abs(rhs).max()))
    if scale == 0:
        return 0.0
    denom = np.maximum(lhs, 1e-12 * scale)
    return float(np.max(np.abs(lhs - rhs) / denom))
