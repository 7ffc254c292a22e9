"""Young functions of L log L type, their complementary pair, and Luxemburg norms.

With ``phi_1(t) = t^a`` on ``(0, 1)`` and ``(1 + log t)^a`` on ``[1, inf)``, its
inverse ``phibar_1(t) = t^(1/a)`` on ``(0, 1)`` and ``exp(t^(1/a) - 1)`` on
``[1, inf)``, the primitives ``Phi_1`` and ``Phibar_1`` form an exact
complementary pair, so Young's inequality ``s t <= Phi_1(s) + Phibar_1(t)``
holds with equality at ``t = phi_1(s)``.

The upper branches are evaluated in closed form through
``int_0^x u^(c-1) e^u du = x^c / c * 1F1(c; c+1; x)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import hyp1f1

from .grid import ConfigError

OVERFLOW_EXPONENT = 700.0
KINDS = ("phi", "phi0", "phi1", "phibar1")


def _as_nonneg(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ConfigError("Young functions are evaluated at t >= 0")
    return t


def _check_alpha(alpha: float) -> float:
    if not alpha > 0:
        raise ConfigError(f"alpha must be positive, got {alpha}")
    return float(alpha)


def _ret(x, like):
    return float(x) if np.ndim(like) == 0 else x


def phi(t, alpha: float):
    """``t^a (1 + log+ t)^a``."""
    a = _check_alpha(alpha)
    t = _as_nonneg(t)
    with np.errstate(divide="ignore"):
        logp = np.log(np.maximum(t, 1.0))
    return _ret(t**a * (1 + logp) ** a, t)


def phi0(t, alpha: float):
    """``t^(1+a)`` on ``[0, 1)``, ``t (1 + log t)^a`` on ``[1, inf)``."""
    a = _check_alpha(alpha)
    t = _as_nonneg(t)
    big = t >= 1
    out = np.where(big, t * (1 + np.log(np.where(big, t, 1.0))) ** a, t ** (1 + a))
    return _ret(out, t)


def phi1_density(t, alpha: float):
    a = _check_alpha(alpha)
    t = _as_nonneg(t)
    big = t >= 1
    out = np.where(big, (1 + np.log(np.where(big, t, 1.0))) ** a, t**a)
    return _ret(out, t)


def phibar1_density(t, alpha: float):
    a = _check_alpha(alpha)
    t = _as_nonneg(t)
    big = t >= 1
    with np.errstate(over="ignore"):
        out = np.where(big, np.exp(np.where(big, t, 1.0) ** (1 / a) - 1), t ** (1 / a))
    return _ret(out, t)


def _power_exp_integral(c: float, x: np.ndarray) -> np.ndarray:
    """``int_0^x u^(c-1) e^u du`` for ``x >= 0``."""
    with np.errstate(over="ignore"):
        return x**c / c * hyp1f1(c, c + 1, x)


def phi1(t, alpha: float):
    """``Phi_1(t) = int_0^t phi_1``."""
    a = _check_alpha(alpha)
    t = _as_nonneg(t)
    big = t > 1
    w = 1 + np.log(np.where(big, t, 1.0))
    # int_1^t (1 + log s)^a ds = e^-1 int_1^w u^a e^u du
    upper = 1 / (a + 1) + (_power_exp_integral(a + 1, w) - _power_exp_integral(a + 1, 1.0)) / math.e
    out = np.where(big, upper, t ** (a + 1) / (a + 1))
    return _ret(out, t)


def phibar1(t, alpha: float):
    """``Phibar_1(t) = int_0^t phibar_1``; ``inf`` once ``t^(1/a)`` exceeds 700."""
    a = _check_alpha(alpha)
    t = _as_nonneg(t)
    big = t > 1
    u = np.where(big, t, 1.0) ** (1 / a)
    # int_1^t exp(s^(1/a) - 1) ds = a e^-1 int_1^u v^(a-1) e^v dv
    with np.errstate(over="ignore", invalid="ignore"):
        upper = a / (a + 1) + a * (_power_exp_integral(a, u) - _power_exp_integral(a, 1.0)) / math.e
    upper = np.where(u > OVERFLOW_EXPONENT, np.inf, upper)
    out = np.where(big, upper, t ** (1 + 1 / a) * a / (a + 1))
    return _ret(out, t)


_FUNCS = {"phi": phi, "phi0": phi0, "phi1": phi1, "phibar1": phibar1}


@dataclass(frozen=True)
class YoungFn:
    kind: str
    alpha: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown Young function {self.kind!r}; choose from {KINDS}")
        _check_alpha(self.alpha)

    def __call__(self, t):
        return _FUNCS[self.kind](t, self.alpha)


def luxemburg_norms(samples, Y: YoungFn, rtol: float = 1e-10, max_iter: int = 200) -> np.ndarray:
    """Luxemburg norms ``inf{lam : mean Y(|f|/lam) <= 1}`` of each row of ``samples``.

    Geometric bisection on a bracket grown by doubling; rows that vanish give 0.
    """
    a = np.abs(np.atleast_2d(np.asarray(samples)))
    if a.ndim != 2:
        a = a.reshape(a.shape[0], -1)
    top = a.max(axis=1)
    out = np.zeros(len(a))
    live = top > 0
    if not np.any(live):
        return out
    a, top = a[live], top[live]

    def over(lam):
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(Y(a / lam[:, None]), dtype=float)
        return np.mean(vals, axis=1) > 1      # inf (overflow sentinel) counts as too small

    hi = top.copy()
    while np.any(mask := over(hi)):
        hi[mask] *= 2
    lo = hi.copy()
    while np.any(mask := ~over(lo)) and np.all(lo > 1e-300):
        lo[mask] /= 2
        if not np.any(mask):
            break
    lo = np.maximum(lo, 1e-300)
    for _ in range(max_iter):
        if np.all(hi - lo <= rtol * hi):
            break
        mid = np.sqrt(lo * hi)
        bad = over(mid)
        lo = np.where(bad, mid, lo)
        hi = np.where(bad, hi, mid)
    out[live] = hi
    return out


def luxemburg_norm(samples, Y: YoungFn, rtol: float = 1e-10) -> float:
    return float(luxemburg_norms(np.ravel(samples)[None, :], Y, rtol)[0])


@dataclass(frozen=True)
class YoungCheck:
    holds: bool
    slack: float


def young_pair_check(s, t, alpha: float, rtol: float = 1e-12):
    """Young's inequality ``s t <= Phi_1(s) + Phibar_1(t)`` with relative tolerance."""
    s = _as_nonneg(s)
    t = _as_nonneg(t)
    rhs = np.asarray(phi1(s, alpha)) + np.asarray(phibar1(t, alpha))
    slack = rhs - s * t
    holds = slack >= -rtol * np.maximum(rhs, 1e-300)
    if np.ndim(holds) == 0:
        return YoungCheck(bool(holds), float(slack))
    return YoungCheck(bool(np.all(holds)), float(np.min(slack / np.maximum(rhs, 1e-300))))


@dataclass(frozen=True)
class HolderResult:
    ratio: float
    inconsistent: bool = False


def orlicz_holder_check(f, g, alpha: float) -> HolderResult:
    """``mean|fg| / (2 ||f||_{Phi_1} ||g||_{Phibar_1})`` over one window."""
    f = np.abs(np.ravel(np.asarray(f)))
    g = np.abs(np.ravel(np.asarray(g)))
    num = float(np.mean(f * g))
    nf = luxemburg_norm(f, YoungFn("phi1", alpha))
    ng = luxemburg_norm(g, YoungFn("phibar1", alpha))
    den = 2 * nf * ng
    if den == 0:
        return HolderResult(0.0, inconsistent=num != 0)
    return HolderResult(num / den)
