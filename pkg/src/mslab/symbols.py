"""Multiplier symbols m(xi1[, xi2]): built-ins, parsed expressions,
Littlewood-Paley pieces and numerical decay-condition scans.

A symbol is evaluated on arrays of frequency vectors of shape ``(..., dim)``,
one array per argument, and returns a complex array of shape ``(...)``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import qmc

from . import expr as _expr
from .exponents import ExponentConfig
from .grid import ConfigError


@dataclass(frozen=True, eq=False)
class Symbol:
    arity: int
    func: Callable = field(repr=False)
    name: str = "symbol"
    claim: dict | None = None

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise ConfigError(f"symbol arity must be 1 or 2, got {self.arity}")

    def __call__(self, *xis) -> np.ndarray:
        if len(xis) != self.arity:
            raise ConfigError(f"symbol {self.name} takes {self.arity} arguments, got {len(xis)}")
        xis = [np.asarray(x, dtype=float) for x in xis]
        shape = np.broadcast_shapes(*[x.shape for x in xis])
        out = np.asarray(self.func(*xis), dtype=complex)
        return np.broadcast_to(out, shape[:-1]).copy() if out.shape != shape[:-1] else out

    def at_origin(self, dim: int = 1) -> complex:
        z = np.zeros((1, dim))
        return complex(self(*([z] * self.arity))[0])

    def scaled(self, c: complex) -> "Symbol":
        return Symbol(self.arity, lambda *x: c * self.func(*x), f"{c}*{self.name}", self.claim)


def _env(xis) -> dict:
    r2 = sum(np.sum(x * x, axis=-1) for x in xis)
    env = {"r2": r2, "xi1": xis[0][..., 0]}
    if len(xis) > 1:
        env["xi2"] = xis[1][..., 0]
    return env


def parse_symbol(source: str, arity: int | None = None) -> Symbol:
    """Compile an expression into a Symbol; arity defaults to 2 unless only
    ``xi1`` is referenced."""
    tree = _expr.parse(source)
    names = _expr.free_variables(tree)
    if arity is None:
        arity = 1 if names == {"xi1"} else 2
    if arity == 1 and "xi2" in names:
        raise ConfigError("one-argument symbol cannot reference xi2")

    def func(*xis):
        val = _expr.evaluate(tree, _env(xis))
        return np.broadcast_to(val, np.broadcast_shapes(*[x.shape for x in xis])[:-1])

    return Symbol(arity, func, source, None)


def _rational_bump(k: int):
    def func(*xis):
        r2 = _env(xis)["r2"]
        return r2 / np.power(1 + r2, float(k))
    return func


def _gauss_bump(*xis):
    r2 = _env(xis)["r2"]
    return r2 * np.exp(-r2)


def _zero(*xis):
    return np.zeros(np.broadcast_shapes(*[x.shape for x in xis])[:-1])


FAMILIES = ("rational_bump", "gauss_bump", "zero", "unilinear_gauss", "one")


def builtin_symbol(family: str, **params) -> Symbol:
    if family == "rational_bump":
        k = int(params.get("k", 4))
        if k < 2:
            raise ConfigError("rational_bump needs k >= 2")
        claim = {"eps1_max": 2.0, "s_plus_eps2_max": 2.0 * k - 2, "origin_value": 0.0}
        return Symbol(2, _rational_bump(k), f"rational_bump:k={k}", claim)
    if family == "gauss_bump":
        return Symbol(2, _gauss_bump, "gauss_bump", {"eps1_max": 2.0, "schwartz": True,
                                                     "origin_value": 0.0})
    if family == "unilinear_gauss":
        return Symbol(1, _gauss_bump, "unilinear_gauss", {"eps1_max": 2.0, "schwartz": True,
                                                          "origin_value": 0.0})
    if family == "zero":
        return Symbol(int(params.get("arity", 2)), _zero, "zero", {"origin_value": 0.0})
    if family == "one":
        arity = int(params.get("arity", 2))
        return Symbol(arity, lambda *x: np.ones(np.broadcast_shapes(*[a.shape for a in x])[:-1]),
                      "one", None)
    raise ConfigError(f"unknown symbol family {family!r}")


def symbol_from_spec(spec: str | dict) -> Symbol:
    """``"gauss_bump"``, ``"rational_bump:k=4"``, ``{"family": ...}`` or ``{"expr": ...}``."""
    if isinstance(spec, dict):
        if "expr" in spec:
            return parse_symbol(spec["expr"], spec.get("arity"))
        spec = dict(spec)
        fam = spec.pop("family", None)
        if fam is None:
            raise ConfigError("symbol spec needs 'family' or 'expr'")
        return builtin_symbol(fam, **spec)
    name, _, rest = spec.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        params[key.strip()] = float(val) if "." in val else int(val)
    return builtin_symbol(name.strip(), **params)


# -- Littlewood-Paley partition ------------------------------------------------

def _sigma(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def _chi(u):
    """Smooth step: 1 for u <= 0, 0 for u >= 1."""
    a = _sigma(1 - u)
    b = _sigma(u)
    return a / (a + b)


def bump_log(u):
    """C^infinity bump supported on [-1, 1] whose integer translates sum to 1."""
    u = np.asarray(u, dtype=float)
    return _chi(u) - _chi(u + 1)


def partition_weight(rho, ell: int):
    """Psi(2^-ell xi, 2^-ell eta) as a function of rho = |xi| + |eta|."""
    rho = np.asarray(rho, dtype=float)
    out = np.zeros_like(rho)
    pos = rho > 0
    out[pos] = bump_log(np.log2(rho[pos]) - ell)
    return out


def annulus_radius(xis) -> np.ndarray:
    return sum(np.sqrt(np.sum(x * x, axis=-1)) for x in xis)


def lp_piece(m: Symbol, ell: int) -> Symbol:
    if m.arity != 2:
        raise ConfigError("lp_piece expects a bilinear symbol")

    def func(*xis):
        return partition_weight(annulus_radius(xis), ell) * m.func(*xis)

    return Symbol(2, func, f"lp_piece({m.name},{ell})", None)


# -- decay-condition scans ------------------------------------------------------

CONDITIONS = ("eq13", "eq21", "eq152", "eq153", "H2", "H3", "XY-smooth")

_STENCILS = {
    0: {0: 1.0},
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
    4: {-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0},
    5: {-3: -0.5, -2: 2.0, -1: -2.5, 1: 2.5, 2: -2.0, 3: 0.5},
}


@dataclass
class ConditionReport:
    condition_id: str
    entries: list = field(default_factory=list)
    annulus_margins: dict = field(default_factory=dict)
    overall_margin: float = 0.0
    derivative_step: float = 0.0
    annulus_range: tuple = (0, 0)
    max_order: int = 0
    samples_per_annulus: int = 0
    tail_slopes: tuple = (0.0, 0.0)
    bounded: bool = True
    nonfinite_annuli: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["annulus_margins"] = {str(k): _json_float(v) for k, v in self.annulus_margins.items()}
        d["entries"] = [dict(e, margin=_json_float(e["margin"])) for e in self.entries]
        d["overall_margin"] = _json_float(self.overall_margin)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else ("inf" if x > 0 else "nan")


def multiindices(nvars: int, max_order: int):
    for total in range(max_order + 1):
        for alpha in itertools.product(range(total + 1), repeat=nvars):
            if sum(alpha) == total:
                yield alpha


def annulus_samples(nvars: int, count: int, seed: int = 7):
    """Quasi-random directions in [-1, 1]^nvars and radial fractions in [0, 1)."""
    sampler = qmc.Halton(d=nvars + 1, scramble=True, seed=seed)
    u = sampler.random(count)
    direction = 2 * u[:, :nvars] - 1
    return direction, u[:, nvars]


def _place(direction, radial, ell, arity, dim):
    pts = direction.reshape(len(direction), arity, dim)
    rho = sum(np.linalg.norm(pts[:, i], axis=-1) for i in range(arity))
    rho = np.where(rho > 1e-12, rho, 1.0)
    target = 2.0 ** (ell - 1 + 2 * radial)
    return pts * (target / rho)[:, None, None], target


def _rhs(cond: str, rho, order: int, cfg: ExponentConfig):
    e1, e2 = cfg.eps1, cfg.eps2
    if cond == "eq13":
        return rho ** (-order + e1) / (1 + rho) ** (e1 + e2)
    if cond == "eq21":
        return (1 + rho) ** (-cfg.s - e1)
    if cond == "eq152":
        return rho ** (-float(order))
    if cond == "eq153":
        return rho**e1 / (1 + rho) ** (e1 + e2)
    raise ConfigError(f"unknown condition {cond!r}")


def default_max_order(cond: str, cfg: ExponentConfig, dim: int) -> int:
    if cond == "eq21":
        return 2 * dim + 1
    if cond == "eq153":
        return 0
    return int(cfg.s)


def check_decay_condition(m: Symbol, cfg: ExponentConfig, cond: str,
                          ell_range: tuple[int, int] = (-10, 10),
                          samples_per_annulus: int = 64, fd_step: float = 1e-3,
                          dim: int = 1, max_order: int | None = None,
                          **kernel_kw) -> ConditionReport:
    """Scan sup |d^alpha m| / (right-hand side) over dyadic annuli.

    No pass/fail verdict is issued against the unspecified constants; the
    report carries margins plus the tail slopes of log2(margin) in ell.
    """
    if cond not in CONDITIONS:
        raise ConfigError(f"unknown condition {cond!r}; choose from {CONDITIONS}")
    if cond in ("H2", "H3", "XY-smooth"):
        from .annuli import kernel_condition_report
        return kernel_condition_report(m, cfg, cond, ell_range, samples_per_annulus,
                                       **kernel_kw)
    if max_order is None:
        max_order = default_max_order(cond, cfg, dim)
    if max_order > 5:
        raise ConfigError("finite differences are implemented up to total order 5")
    nvars = m.arity * dim
    alphas = list(multiindices(nvars, max_order))
    direction, radial = annulus_samples(nvars, samples_per_annulus)
    lo, hi = ell_range
    report = ConditionReport(cond, derivative_step=fd_step, annulus_range=(lo, hi),
                             max_order=max_order, samples_per_annulus=samples_per_annulus)
    for ell in range(lo, hi + 1):
        pts, rho = _place(direction, radial, ell, m.arity, dim)
        h = fd_step * 2.0**ell
        cache: dict[tuple, np.ndarray] = {}

        def values_at(offset):
            if offset not in cache:
                shift = np.asarray(offset, dtype=float).reshape(m.arity, dim) * h
                q = pts + shift
                with np.errstate(all="ignore"):
                    cache[offset] = m(*[q[:, i] for i in range(m.arity)])
            return cache[offset]

        worst = 0.0
        for alpha in alphas:
            deriv = np.zeros(len(pts), dtype=complex)
            for combo in itertools.product(*[_STENCILS[a].items() for a in alpha]):
                coef = math.prod(c for _, c in combo)
                offset = tuple(o for o, _ in combo)
                deriv += coef * values_at(offset)
            deriv /= h ** sum(alpha)
            ratio = np.abs(deriv) / _rhs(cond, rho, sum(alpha), cfg)
            margin = float(np.max(ratio)) if np.all(np.isfinite(ratio)) else math.inf
            report.entries.append({"ell": ell, "alpha": list(alpha), "margin": margin})
            worst = max(worst, margin)
        if not math.isfinite(worst):
            report.nonfinite_annuli.append(ell)
        report.annulus_margins[ell] = worst
    _finish(report)
    return report


def _finish(report: ConditionReport, tail: int = 4) -> None:
    margins = report.annulus_margins
    report.overall_margin = max(margins.values()) if margins else 0.0
    ells = sorted(margins)
    if len(ells) >= 2:
        k = min(tail, len(ells))
        logs = {e: math.log2(margins[e]) if 0 < margins[e] < math.inf
                else (-1074.0 if margins[e] == 0 else math.inf) for e in ells}

        def slope(sel):
            ys = [logs[e] for e in sel]
            if any(math.isinf(y) and y > 0 for y in ys):
                return math.nan
            if all(margins[e] == 0 for e in sel):
                return 0.0
            return float(np.polyfit(sel, ys, 1)[0])

        low, high = slope(ells[:k]), slope(ells[-k:])
        report.tail_slopes = (low, high)
        report.bounded = bool(np.isfinite(low) and np.isfinite(high)
                              and low >= -0.1 and high <= 0.1)
    report.bounded = report.bounded and not report.nonfinite_annuli


def __getattr__(name):
    # kernel synthesis lives in ``kernels`` (which imports this module)
    if name in ("synthesize_kernel", "kernel_at"):
        from . import kernels
        return getattr(kernels, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
