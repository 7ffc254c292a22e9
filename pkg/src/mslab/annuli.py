"""Kernel integrals over dyadic annuli of a ball (bilinear symbols, dim 1).

``estimate_Bjk`` and ``estimate_Ajk`` discretize

    ( int_{S_j} int_{S_k} ( int_0^inf |mcheck(...)|^2 dt / t^(4n+1) )^(p'/2) dy )^(1/p')

with a tensor midpoint mesh in ``(y1, y2)`` and a log-t midpoint rule.  Both
scale like ``value(Q^a) = a^(-2n/p) value(Q)`` under dilation by ``a``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exponents import ExponentConfig, TQuad
from .grid import ConfigError
from .kernels import KernelSynth, kernel_synth
from .symbols import ConditionReport, Symbol, _finish, annulus_samples


@dataclass(frozen=True)
class Ball:
    """Continuum ball ``B(center, radius)`` on the real line."""

    center: float
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ConfigError(f"ball radius must be positive, got {self.radius}")

    def dilate(self, a: float) -> "Ball":
        return Ball(a * self.center, a * self.radius)

    @property
    def measure(self) -> float:
        return 2.0 * self.radius

    def contains_half(self, x: float) -> bool:
        return abs(x - self.center) <= self.radius / 2


def annulus_mesh(Q: Ball, j: int, mesh: int) -> tuple[np.ndarray, float]:
    """Midpoints and cell length of ``S_j(Q)``: ``Q`` for ``j = 0``, else two intervals."""
    if j < 0:
        raise ConfigError("annulus index must be >= 0")
    if j == 0:
        h = Q.measure / mesh
        return Q.center - Q.radius + (np.arange(mesh) + 0.5) * h, h
    half = max(1, mesh // 2)
    inner, outer = 2.0 ** (j - 1) * Q.radius, 2.0**j * Q.radius
    h = (outer - inner) / half
    right = Q.center + inner + (np.arange(half) + 0.5) * h
    left = Q.center - inner - (np.arange(half) + 0.5) * h
    return np.concatenate([left[::-1], right]), h


def default_tquad(Q: Ball, j: int, k: int, octaves: int = 12, nodes_per_octave: int = 8) -> TQuad:
    """Log-t rule centered at the annulus scale; dilates with the ball."""
    rho = Q.radius * 2.0 ** max(j, k)
    return TQuad(rho * 2.0**-octaves, rho * 2.0**octaves, nodes_per_octave)


def _conjugate(p: float) -> float:
    if not 1 <= p <= 2:
        raise ConfigError(f"exponent p must lie in [1, 2], got {p}")
    return math.inf if p == 1 else p / (p - 1)


def _synth(m: Symbol, synth: KernelSynth | None) -> KernelSynth:
    if m.arity != 2:
        raise ConfigError("annulus integrals are defined for bilinear symbols")
    ks = synth or kernel_synth(m, 1)
    if ks.D != 2:
        raise ConfigError("annulus integrals are implemented for dim 1")
    return ks


def _t_integral(ks: KernelSynth, xs: list[float], signs: list[float], y1, y2, q: TQuad,
                n: int = 1) -> np.ndarray:
    """``sum_q w_q t_q^(-4n) |sum_i sign_i mcheck((x_i - y1)/t, (x_i - y2)/t)|^2`` on the mesh."""
    acc = np.zeros((len(y1), len(y2)))
    for t, w in q:
        val = 0
        for x, s in zip(xs, signs):
            val = val + s * ks.tensor((x - y1) / t, (x - y2) / t)
        acc += w * t ** (-4 * n) * np.abs(val) ** 2
    return acc


def _outer_norm(inner: np.ndarray, h1: float, h2: float, p: float) -> float:
    pc = _conjugate(p)
    if math.isinf(pc):
        return float(np.sqrt(inner.max()))
    return float(np.sum(inner ** (pc / 2)) * h1 * h2) ** (1.0 / pc)


def _check_pair(j: int, k: int) -> None:
    if (j, k) == (0, 0):
        raise ConfigError("(j, k) = (0, 0) is excluded")


def estimate_Bjk(m: Symbol, Q: Ball, j: int, k: int, p: float, q: TQuad | None = None,
                 mesh: int = 64, synth: KernelSynth | None = None) -> float:
    """Kernel-size integral over ``S_j(Q) x S_k(Q)`` for the ball centered at ``x``."""
    _check_pair(j, k)
    ks = _synth(m, synth)
    q = q or default_tquad(Q, j, k)
    y1, h1 = annulus_mesh(Q, j, mesh)
    y2, h2 = annulus_mesh(Q, k, mesh)
    inner = _t_integral(ks, [Q.center], [1.0], y1, y2, q)
    return _outer_norm(inner, h1, h2, p)


def estimate_Ajk(m: Symbol, Q: Ball, x: float, xbar: float, j: int, k: int, p: float,
                 q: TQuad | None = None, mesh: int = 64,
                 synth: KernelSynth | None = None) -> float:
    """Kernel-difference integral for ``x, xbar`` in ``Q/2``."""
    _check_pair(j, k)
    if not (Q.contains_half(x) and Q.contains_half(xbar)):
        raise ConfigError("x and xbar must lie in the half ball")
    if x == xbar:
        return 0.0
    ks = _synth(m, synth)
    q = q or default_tquad(Q, j, k)
    y1, h1 = annulus_mesh(Q, j, mesh)
    y2, h2 = annulus_mesh(Q, k, mesh)
    inner = _t_integral(ks, [x, xbar], [1.0, -1.0], y1, y2, q)
    return _outer_norm(inner, h1, h2, p)


def dilation_exponent(value: float, dilated: float, a: float) -> float:
    """``log(dilated / value) / log(a)``; the predicted value is ``-2n/p``."""
    if value <= 0 or dilated <= 0:
        raise ConfigError("dilation exponent needs positive values")
    return math.log(dilated / value) / math.log(a)


def observed_exponent(kind: str, m: Symbol, Q: Ball, j: int, k: int, p: float, a: float,
                      mesh: int = 64, q: TQuad | None = None, offset: float = 0.25) -> float:
    """Dilation exponent of ``B_jk`` (``kind='B'``) or ``A_jk`` (``kind='A'``)."""
    qa = None if q is None else q
    if kind == "B":
        v0 = estimate_Bjk(m, Q, j, k, p, qa, mesh)
        v1 = estimate_Bjk(m, Q.dilate(a), j, k, p, qa, mesh)
    elif kind == "A":
        x, xb = Q.center, Q.center + offset * Q.radius
        v0 = estimate_Ajk(m, Q, x, xb, j, k, p, qa, mesh)
        v1 = estimate_Ajk(m, Q.dilate(a), a * x, a * xb, j, k, p, qa, mesh)
    else:
        raise ConfigError(f"unknown annulus quantity {kind!r}")
    return dilation_exponent(v0, v1, a)


# -- kernel-side condition scans ---------------------------------------------------

_PAIRS = [(j, k) for j in range(3) for k in range(3) if (j, k) != (0, 0)]


def _scale_tquad(rho: float, octaves: int = 10, nodes_per_octave: int = 4) -> TQuad:
    return TQuad(rho * 2.0**-octaves, rho * 2.0**octaves, nodes_per_octave)


def _square_size(ks: KernelSynth, pts: np.ndarray, q: TQuad) -> np.ndarray:
    """``(int |K_t(u)|^2 dt/t)^(1/2)`` at displacement points ``u`` of shape (K, 2)."""
    acc = np.zeros(len(pts))
    for t, w in q:
        acc += w * np.abs(ks.points(pts / t) / t**2) ** 2
    return np.sqrt(acc)


def kernel_condition_report(m: Symbol, cfg: ExponentConfig, cond: str,
                            ell_range: tuple[int, int] = (-4, 4),
                            samples_per_annulus: int = 32, mesh: int = 16,
                            synth: KernelSynth | None = None) -> ConditionReport:
    """Margins of the kernel conditions over balls/annuli of radius ``2^ell``.

    ``H3``: ``B_jk / (|Q|^(-2/p0) 2^(-2 j0 / p0))``; ``H2``: ``A_jk`` against
    ``|x-z|^(2(delta-1/p0)) |Q|^(-2 delta) 2^(-2 delta j0)`` with ``z = x + R/4``;
    ``XY-smooth``: pointwise size and x-smoothness ratios with ``gamma = min(1, eps1)``.
    """
    ks = _synth(m, synth)
    lo, hi = ell_range
    p0 = float(cfg.p0)
    report = ConditionReport(cond, derivative_step=0.0, annulus_range=(lo, hi),
                             max_order=0, samples_per_annulus=samples_per_annulus)
    direction, radial = annulus_samples(2, samples_per_annulus)
    for ell in range(lo, hi + 1):
        R = 2.0**ell
        worst = 0.0
        if cond in ("H2", "H3"):
            Q = Ball(0.0, R)
            for j, k in _PAIRS:
                j0 = max(j, k)
                q = _scale_tquad(R * 2.0**j0)
                if cond == "H3":
                    val = estimate_Bjk(m, Q, j, k, p0, q, mesh, ks)
                    bound = Q.measure ** (-2 / p0) * 2.0 ** (-2 * j0 / p0)
                else:
                    z = R / 4
                    val = estimate_Ajk(m, Q, 0.0, z, j, k, p0, q, mesh, ks)
                    d = cfg.delta
                    bound = z ** (2 * (d - 1 / p0)) * Q.measure ** (-2 * d) * 2.0 ** (-2 * d * j0)
                margin = val / bound
                report.entries.append({"ell": ell, "alpha": [j, k], "margin": margin})
                worst = max(worst, margin)
        elif cond == "XY-smooth":
            rho = 2.0 ** (ell - 1 + 2 * radial)
            pts = direction / np.sum(np.abs(direction), axis=1, keepdims=True) * rho[:, None]
            q = _scale_tquad(R)
            size = _square_size(ks, pts, q)
            margin_size = float(np.max(size * rho**2))
            gamma = min(1.0, cfg.eps1)
            shift = 0.25 * np.max(np.abs(pts), axis=1) * (2 * radial - 1)
            moved = pts + shift[:, None]     # z - y = (x - y) + (z - x) in both slots
            acc = np.zeros(len(pts))
            for t, w in q:
                diff = ks.points(moved / t) - ks.points(pts / t)
                acc += w * np.abs(diff / t**2) ** 2
            with np.errstate(divide="ignore", invalid="ignore"):
                smooth = np.where(shift != 0, np.sqrt(acc) * rho ** (2 + gamma)
                                  / np.abs(shift) ** gamma, 0.0)
            margin_smooth = float(np.max(smooth))
            report.entries.append({"ell": ell, "alpha": [0], "margin": margin_size})
            report.entries.append({"ell": ell, "alpha": [1], "margin": margin_smooth})
            worst = max(margin_size, margin_smooth)
        else:
            raise ConfigError(f"unknown kernel condition {cond!r}")
        if not math.isfinite(worst):
            report.nonfinite_annuli.append(ell)
        report.annulus_margins[ell] = worst
    _finish(report)
    return report
