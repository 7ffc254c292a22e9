"""Power weights, A_p and multiple A_P characteristics, BMO and John-Nirenberg profiles."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import ConfigError, Grid, SampledField, _same_grid
from .maximal import WindowFamily, _axes, _window_mean, _windows

WEIGHT_FLOOR = 1e-300


def power_weight(a: float, center, g: Grid) -> SampledField:
    """``|x - center|^a`` in torus distance; distances are clamped below at ``dx/2``."""
    if abs(a) >= 10 * g.dim:
        raise ConfigError(f"power exponent {a} outside the sanity bound")
    c = np.broadcast_to(np.asarray(center, dtype=float), (g.dim,))
    d = np.abs(g.coords() - c)
    d = np.minimum(d, g.length - d)
    r = np.maximum(np.sqrt(np.sum(d * d, axis=-1)), g.spacing / 2)
    return SampledField(g, np.maximum(r**a, WEIGHT_FLOOR), nonnegative=True)


def _positive(w: SampledField) -> np.ndarray:
    v = w.values.real
    if np.any(w.values.imag != 0) or not np.all(v > 0):
        raise ConfigError("weights must be real and strictly positive")
    return v / v.flat[0]


@dataclass
class Characteristic:
    value: float
    side: int
    corner: tuple

    def to_dict(self) -> dict:
        return {"characteristic": self.value, "argmax_window": {"side": self.side,
                                                                "corner": list(self.corner)}}


def _max_over_windows(grid: Grid, W: WindowFamily, stat) -> Characteristic:
    best = Characteristic(-math.inf, 0, ())
    for s in W.sides(grid):
        vals = stat(s)
        k = int(np.argmax(vals))
        if vals.flat[k] > best.value:
            best = Characteristic(float(vals.flat[k]), s, tuple(int(i) for i in np.unravel_index(k, vals.shape)))
    return best


def _window_min(a: np.ndarray, s: int, wrap: bool) -> np.ndarray:
    return _windows(a, s, wrap).min(axis=_axes(a.ndim))


def ap_characteristic(w: SampledField, p: float, W: WindowFamily | None = None,
                      detail: bool = False):
    """``max_Q (mean_Q w) (mean_Q w^(1-p'))^(p-1)`` for ``p > 1``."""
    if not p > 1:
        raise ConfigError("ap_characteristic needs p > 1; use a1_characteristic for p = 1")
    W = W or WindowFamily()
    v = _positive(w)
    dual = v ** (1 - p / (p - 1))
    res = _max_over_windows(w.grid, W, lambda s: _window_mean(v, s, W.wrap)
                            * _window_mean(dual, s, W.wrap) ** (p - 1))
    return res if detail else res.value


def a1_characteristic(w: SampledField, W: WindowFamily | None = None, detail: bool = False):
    """``max_Q (mean_Q w) / (min_Q w)``."""
    W = W or WindowFamily()
    v = _positive(w)
    res = _max_over_windows(w.grid, W, lambda s: _window_mean(v, s, W.wrap) / _window_min(v, s, W.wrap))
    return res if detail else res.value


def _harmonic(ps) -> float:
    return 1.0 / sum(1.0 / q for q in ps)


def multi_ap_characteristic(weights, P, p0: float = 1.0, W: WindowFamily | None = None,
                            detail: bool = False):
    """Multiple-weight characteristic for the exponents ``r_i = p_i / p0``.

    ``max_Q (mean_Q prod w_i^(r / r_i))^(1/r) prod_i (mean_Q w_i^(1 - r_i'))^(1/r_i')``
    with ``1/r = sum 1/r_i``; a slot with ``r_i = 1`` uses ``(min_Q w_i)^(-1)``.
    """
    weights = list(weights)
    P = [float(x) for x in P]
    if len(weights) != len(P):
        raise ConfigError("need one exponent per weight")
    if not p0 >= 1:
        raise ConfigError("p0 must be >= 1")
    rs = [q / p0 for q in P]
    if any(r < 1 - 1e-14 for r in rs):
        raise ConfigError(f"exponents p_i / p0 must be >= 1, got {rs}")
    g = _same_grid(*weights)
    W = W or WindowFamily()
    vals = [_positive(w) for w in weights]
    r = _harmonic(rs)
    nu = np.prod([v ** (r / ri) for v, ri in zip(vals, rs)], axis=0)

    def stat(s):
        out = _window_mean(nu, s, W.wrap) ** (1 / r)
        for v, ri in zip(vals, rs):
            if abs(ri - 1) <= 1e-14:
                out = out / _window_min(v, s, W.wrap)
            else:
                rc = ri / (ri - 1)
                out = out * _window_mean(v ** (1 - rc), s, W.wrap) ** (1 / rc)
        return out

    res = _max_over_windows(g, W, stat)
    return res if detail else res.value


def nu_weight(weights, P) -> SampledField:
    """``prod_i w_i^(p / p_i)`` with ``1/p = sum 1/p_i``."""
    weights = list(weights)
    g = _same_grid(*weights)
    p = _harmonic(P)
    out = np.ones(g.shape)
    for w, q in zip(weights, P):
        out = out * w.values.real ** (p / q)
    return SampledField(g, out, nonnegative=True)


def openness_scan(weights, P, p0: float, qs, W: WindowFamily | None = None,
                  cap: float = 1e8) -> dict:
    """Characteristic of ``P / q`` along ``qs``; reports the largest ``q`` below ``cap``."""
    rows = []
    best = None
    for q in qs:
        if q < p0 or any(pi / q < 1 for pi in P):
            rows.append({"q": q, "characteristic": None})
            continue
        val = multi_ap_characteristic(weights, P, q, W)
        rows.append({"q": q, "characteristic": val})
        if val < cap:
            best = q if best is None else max(best, q)
    return {"scan": rows, "largest_q": best}


def bmo_norm(b: SampledField, W: WindowFamily | None = None) -> float:
    """``max_Q mean_Q |b - mean_Q b|`` (real part of b)."""
    W = W or WindowFamily()
    v = b.values.real
    axes = _axes(v.ndim)

    def stat(s):
        view = _windows(v, s, W.wrap)
        mu = view.sum(axis=axes, keepdims=True) / s**v.ndim
        osc = np.abs(view - mu).sum(axis=axes) / s**v.ndim
        return np.where(view.max(axis=axes) == view.min(axis=axes), 0.0, osc)

    return max(_max_over_windows(b.grid, W, stat).value, 0.0)


@dataclass
class JNProfile:
    levels: np.ndarray
    curve: np.ndarray
    bmo: float
    rate: float
    degenerate: bool = False
    fit_points: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"levels": self.levels.tolist(), "curve": self.curve.tolist(), "bmo": self.bmo,
                "rate": self.rate, "degenerate": self.degenerate, "fit_points": self.fit_points}


def john_nirenberg_profile(b: SampledField, W: WindowFamily | None = None, levels=None) -> JNProfile:
    """``lambda -> max_Q |{x in Q : |b - b_Q| > lambda}| / |Q|`` and its exponential rate.

    The rate ``c1`` comes from a least-squares fit of ``log curve`` against
    ``lambda / ||b||_BMO`` over levels where the curve lies in ``[1e-6, 0.5]``.
    """
    W = W or WindowFamily()
    v = b.values.real
    bmo = bmo_norm(b, W)
    if levels is None:
        levels = np.linspace(0, 8, 33) * (bmo if bmo > 0 else 1.0)
    levels = np.asarray(levels, dtype=float)
    curve = np.zeros(len(levels))
    axes = _axes(v.ndim)
    for s in W.sides(b.grid):
        view = _windows(v, s, W.wrap)
        mu = view.sum(axis=axes, keepdims=True) / s**v.ndim
        dev = np.abs(view - mu).reshape(*view.shape[:v.ndim], -1)
        for k, lam in enumerate(levels):
            frac = np.mean(dev > lam, axis=-1).max()
            curve[k] = max(curve[k], frac)
    if bmo == 0:
        return JNProfile(levels, curve, 0.0, math.nan, degenerate=True)
    sel = (curve >= 1e-6) & (curve <= 0.5)
    rate = math.nan
    if sel.sum() >= 2:
        slope = np.polyfit(levels[sel] / bmo, np.log(curve[sel]), 1)[0]
        rate = float(-slope)
    return JNProfile(levels, curve, bmo, rate, fit_points=int(sel.sum()))
