"""Ratio trials for the weighted inequalities, dominations and scaling laws."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ..annuli import Ball, observed_exponent
from ..grid import ConfigError, Grid, SampledField, lp_norm
from ..maximal import (WindowFamily, m_delta, multilinear_maximal_p, orlicz_maximal_slot,
                       sharp_maximal_delta)
from ..operators import (commutator_multiplier, commutator_square, square_identity_check,
                         square_kernel, square_multiplier)
from ..orlicz import phi
from ..symbols import symbol_from_spec
from ..weights import bmo_norm, nu_weight, power_weight
from .config import HypothesisError, TrialConfig, check_hypotheses
from .generators import make_functions, sample, trial_rng

WEAK_LEVELS = 32


@dataclass
class TrialRecord:
    index: int
    n: int
    lhs: float
    rhs: float
    ratio: float
    config_hash: str
    degenerate: bool = False
    notes: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _ratio(lhs: float, rhs: float) -> tuple[float, bool]:
    if lhs == 0:
        return 0.0, rhs == 0
    if rhs == 0:
        return math.inf, True
    return lhs / rhs, False


# -- building blocks -------------------------------------------------------------------

def _weights(cfg: TrialConfig, g: Grid, m: int) -> list[SampledField]:
    spec = cfg.weights
    fam = spec.get("family", "unit")
    if fam == "unit":
        return [SampledField(g, np.ones(g.shape), nonnegative=True) for _ in range(m)]
    if fam == "power":
        a = spec.get("a", 0.0)
        a = list(a) if isinstance(a, (list, tuple)) else [a] * m
        center = np.asarray(spec.get("center", 0.5), dtype=float) * g.length
        return [power_weight(float(x), center, g) for x in a]
    raise ConfigError(f"unknown weight family {fam!r}")


def _bmo_fields(cfg: TrialConfig, g: Grid, m: int) -> list[SampledField | None]:
    spec = cfg.bmo
    fam = spec.get("family", "log")
    slots = list(spec.get("slots", [1] * m))
    coords = g.coords()
    if fam == "log":
        c = np.asarray(spec.get("center", 0.5), dtype=float) * g.length
        d = np.abs(coords - c)
        d = np.minimum(d, g.length - d)
        r = np.sqrt(np.sum(d * d, axis=-1))
        vals = np.log(np.maximum(r, float(spec.get("floor", 1 / 64)) * g.length))
    elif fam == "sin":
        vals = np.sin(2 * np.pi * float(spec.get("freq", 1)) * coords[..., 0] / g.length)
    elif fam == "const":
        vals = np.full(g.shape, float(spec.get("value", 1.0)))
    else:
        raise ConfigError(f"unknown bmo family {fam!r}")
    b = SampledField(g, vals)
    return [b if slots[i] else None for i in range(m)]


def _windows(cfg: TrialConfig) -> WindowFamily:
    w = cfg.windows or {}
    return WindowFamily(w.get("mode", "dyadic"), w.get("max_side"), bool(w.get("wrap", False)))


def _levels(values: np.ndarray) -> np.ndarray:
    pos = values[values > 0]
    if pos.size == 0:
        return np.zeros(0)
    lo, hi = np.percentile(pos, [1.0, 99.9])
    if not hi > lo:
        return np.array([lo]) * (1 - 1e-12)
    return np.geomspace(lo, hi, WEAK_LEVELS)


def _measure_above(values: np.ndarray, weight: np.ndarray, lam: float, cell: float) -> float:
    return float(np.sum(weight[values > lam]) * cell)


def _weak_norm(F: SampledField, p: float, nu: SampledField) -> float:
    vals = F.values.real
    best = 0.0
    for lam in _levels(vals):
        best = max(best, lam * _measure_above(vals, nu.values.real, lam, F.grid.cell_volume) ** (1 / p))
    return best


def _endpoint(F: SampledField, nu: SampledField, fs, ws, p0: float, m: int):
    """sup over levels t^m of nu({F > t^m}) / prod_j (int Phi(|f_j|/t) w_j)^(1/m)."""
    vals = F.values.real
    cell = F.grid.cell_volume
    best = None
    for lam in _levels(vals):
        t = lam ** (1 / m)
        lhs = _measure_above(vals, nu.values.real, lam, cell)
        rhs = 1.0
        for f, w in zip(fs, ws):
            rhs *= (float(np.sum(phi(np.abs(f.values) / t, p0) * w.values.real)) * cell) ** (1 / m)
        r, deg = _ratio(lhs, rhs)
        if best is None or r > best[0]:
            best = (r, lhs, rhs, deg)
    return best or (0.0, 0.0, 0.0, False)


def _field_ratio(num: np.ndarray, den: np.ndarray, region: np.ndarray | None = None):
    """Sup of num/den over the region; (ratio, lhs, rhs, degenerate)."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    if region is None:
        region = np.ones(num.shape, dtype=bool)
    if not np.any(region):
        return 0.0, 0.0, 0.0, True
    n, d = num[region], den[region]
    if np.all(n == 0):
        return 0.0, 0.0, float(d.max(initial=0.0)), False
    bad = (d == 0) & (n > 0)
    if np.any(bad):
        k = int(np.argmax(np.where(bad, n, -1)))
        return math.inf, float(n[k]), 0.0, True
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(d > 0, n / np.where(d > 0, d, 1), 0.0)
    k = int(np.argmax(r))
    return float(r[k]), float(n[k]), float(d[k]), False


class _Context:
    """Per-trial inputs at one resolution."""

    def __init__(self, cfg: TrialConfig, index: int, factor: int):
        self.cfg = cfg
        self.g = cfg.make_grid(factor)
        self.q = cfg.make_tquad(self.g)
        self.m = symbol_from_spec(cfg.symbol)
        self.k = self.m.arity
        self.fs = sample(make_functions(cfg.ensemble, self.g.dim, self.g.length, index, self.k), self.g)
        self.ws = _weights(cfg, self.g, self.k)
        self.W = _windows(cfg)
        self.route = cfg.params.get("route", "multiplier")

    def square(self, fields=None) -> SampledField:
        fields = fields or self.fs
        if self.route == "kernel":
            return square_kernel(self.m, fields, self.q)
        return square_multiplier(self.m, fields, self.q)

    def commutator(self) -> SampledField:
        bs = _bmo_fields(self.cfg, self.g, self.k)
        if self.route == "kernel":
            return commutator_square(self.m, bs, self.fs, self.q)
        return commutator_multiplier(self.m, bs, self.fs, self.q)

    def bmo(self) -> float:
        bs = [b for b in _bmo_fields(self.cfg, self.g, self.k) if b is not None]
        return max((bmo_norm(b, self.W) for b in bs), default=0.0)

    def nu(self) -> SampledField:
        return nu_weight(self.ws, self.cfg.exponents.p_list[:self.k])

    def rhs_product(self) -> float:
        out = 1.0
        for f, w, p in zip(self.fs, self.ws, self.cfg.exponents.p_list):
            out *= lp_norm(f, p, w)
        return out


# -- per-theorem trials -----------------------------------------------------------------

def _strong(ctx: _Context, F: SampledField, scale: float = 1.0):
    p = ctx.cfg.exponents.p
    lhs = lp_norm(F, p, ctx.nu())
    return lhs, scale * ctx.rhs_product()


def _trial_values(cfg: TrialConfig, index: int, factor: int):
    tid = cfg.theorem_id
    e = cfg.exponents
    if tid in ("P31scale", "P32scale"):
        return _scaling_trial(cfg, index)
    if tid == "SQID":
        ctx = _Context(cfg, index, factor)
        gap = square_identity_check(ctx.m, ctx.fs[0], ctx.fs[1], ctx.q)
        return gap, gap, 1.0, False, ""
    ctx = _Context(cfg, index, factor)
    weak = tid == "T11ii" or (tid == "T14" and any(p == e.p0 for p in e.p_list))
    if tid in ("T11i", "T11ii", "T14"):
        F = ctx.square()
        if weak:
            lhs, rhs = _weak_norm(F, e.p, ctx.nu()), ctx.rhs_product()
        else:
            lhs, rhs = _strong(ctx, F)
        r, deg = _ratio(lhs, rhs)
        return r, lhs, rhs, deg, "weak-type" if weak else "strong-type"
    if tid in ("T12i", "T15"):
        lhs, rhs = _strong(ctx, ctx.commutator(), ctx.bmo())
        r, deg = _ratio(lhs, rhs)
        return r, lhs, rhs, deg, f"route={ctx.route}"
    if tid in ("T12ii", "T16"):
        r, lhs, rhs, deg = _endpoint(ctx.commutator(), ctx.nu(), ctx.fs, ctx.ws, e.p0, ctx.k)
        return r, lhs, rhs, deg, f"route={ctx.route}"
    if tid == "L55":
        best = (0.0, 0.0, 0.0, False)
        for i in range(ctx.k):
            F = orlicz_maximal_slot(ctx.fs, i, e.p0, ctx.W)
            res = _endpoint(F, ctx.nu(), ctx.fs, ctx.ws, e.p0, ctx.k)
            if res[0] > best[0] or i == 0:
                best = res
        r, lhs, rhs, deg = best
        return r, lhs, rhs, deg, ""
    if tid == "L43":
        delta = float(cfg.params.get("delta", 0.3))
        A = sharp_maximal_delta(ctx.square(), delta, ctx.W).real
        B = multilinear_maximal_p(ctx.fs, e.p0, ctx.W).real
        r, lhs, rhs, deg = _field_ratio(A, B)
        return r, lhs, rhs, deg, ""
    if tid == "L44":
        sup = cfg.ensemble.get("support", (0.375, 0.625))
        c = (sup[0] + sup[1]) / 2 * ctx.g.length
        R = (sup[1] - sup[0]) / 2 * ctx.g.length * math.sqrt(ctx.g.dim)
        d = np.abs(ctx.g.coords() - c)
        d = np.minimum(d, ctx.g.length - d)
        region = np.sqrt(np.sum(d * d, axis=-1)) > 3 * R
        A = ctx.square().real
        B = multilinear_maximal_p(ctx.fs, e.p0, ctx.W).real
        r, lhs, rhs, deg = _field_ratio(A, B, region)
        note = "empty admissible region" if not np.any(region) else f"region cells={int(region.sum())}"
        return r, lhs, rhs, deg, note
    if tid == "L46":
        delta = float(cfg.params.get("delta", 0.3))
        eps = float(cfg.params.get("eps", 0.5))
        q0 = float(cfg.params.get("q0", 2.5))
        A = sharp_maximal_delta(ctx.commutator(), delta, ctx.W).real
        B = ctx.bmo() * (multilinear_maximal_p(ctx.fs, q0, ctx.W).real
                         + m_delta(ctx.square(), eps, ctx.W).real)
        r, lhs, rhs, deg = _field_ratio(A, B)
        return r, lhs, rhs, deg, f"route={ctx.route}"
    raise ConfigError(f"no trial defined for {tid}")


def _scaling_trial(cfg: TrialConfig, index: int):
    rng = trial_rng(int(cfg.ensemble.get("seed", 0)), index, 7)
    m = symbol_from_spec(cfg.symbol)
    p = cfg.exponents.p
    a = float(cfg.params.get("a", 2.0))
    mesh = int(cfg.params.get("mesh", 32))
    pairs = [(j, k) for j in range(3) for k in range(3) if (j, k) != (0, 0)]
    j, k = pairs[int(rng.integers(len(pairs)))]
    Q = Ball(float(rng.uniform(-1, 1)), float(rng.uniform(0.5, 2.0)))
    kind = "A" if cfg.theorem_id == "P31scale" else "B"
    offset = float(rng.uniform(0.05, 0.45))
    obs = observed_exponent(kind, m, Q, j, k, p, a, mesh=mesh, offset=offset)
    pred = -2.0 / p
    gap = abs(obs - pred)
    return gap, obs, pred, False, f"j={j} k={k} a={a:g}"


def run_trial(cfg: TrialConfig, index: int, factor: int = 1) -> TrialRecord:
    """One ratio trial; hypothesis violations raise ``HypothesisError``."""
    check_hypotheses(cfg)
    ratio, lhs, rhs, deg, notes = _trial_values(cfg, index, factor)
    n = cfg.make_grid(factor).n
    return TrialRecord(index, n, float(lhs), float(rhs), float(ratio), cfg.digest(), bool(deg), notes)


# -- ensembles ---------------------------------------------------------------------------

def thread_count() -> int:
    raw = os.environ.get("MSLAB_THREADS", "")
    try:
        k = int(raw)
    except ValueError:
        k = os.cpu_count() or 1
    return max(1, k)


def _safe_trial(cfg: TrialConfig, index: int, factor: int) -> TrialRecord:
    try:
        return run_trial(cfg, index, factor)
    except HypothesisError:
        raise
    except (ConfigError, FloatingPointError, ValueError) as exc:
        return TrialRecord(index, cfg.make_grid(factor).n, math.nan, math.nan, math.nan,
                           cfg.digest(), True, f"error: {exc}")


def _finite_max(vals) -> float:
    vals = [v for v in vals if not math.isnan(v)]
    return max(vals) if vals else math.nan


def summarize(records: list[TrialRecord], base_n: int) -> dict:
    base = [r.ratio for r in records if r.n == base_n]
    fine = [r.ratio for r in records if r.n != base_n]
    summary = {"count": len(base), "max_ratio": _finite_max(base),
               "median_ratio": float(np.median([v for v in base if not math.isnan(v)]))
               if any(not math.isnan(v) for v in base) else math.nan,
               "degenerate": sum(r.degenerate for r in records)}
    if fine:
        mf = _finite_max(fine)
        summary["max_ratio_refined"] = mf
        mb = summary["max_ratio"]
        summary["refinement_drift"] = mf / mb if mb and not math.isnan(mb) and mb != 0 else math.nan
    else:
        summary["refinement_drift"] = math.nan
    return summary


@dataclass
class Report:
    config: dict
    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    header: dict = field(default_factory=dict)


def ensemble_report(cfg: TrialConfig, refine: bool = False, threads: int | None = None) -> Report:
    """Run ``count`` trials (and optionally the same trials at 2N) in index order."""
    check_hypotheses(cfg)
    count = int(cfg.ensemble.get("count", 0))
    jobs = [(i, 1) for i in range(count)]
    if refine and cfg.theorem_id not in ("P31scale", "P32scale"):
        jobs += [(i, 2) for i in range(count)]
    workers = min(threads or thread_count(), max(1, len(jobs)))
    if workers == 1:
        records = [_safe_trial(cfg, i, f) for i, f in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda job: _safe_trial(cfg, *job), jobs))
    base_n = cfg.make_grid().n
    from .. import __version__
    header = {"theorem_id": cfg.theorem_id, "config_hash": cfg.digest(),
              "note": _restriction_note(), "package_version": __version__,
              "numpy_version": np.__version__}
    return Report(cfg.to_dict(), records, summarize(records, base_n), header)


def _restriction_note() -> str:
    from .config import RESTRICTION_NOTE
    return RESTRICTION_NOTE


def domination_field_check(kind: str, cfg: TrialConfig, refine: bool = False,
                           threads: int | None = None) -> Report:
    if kind not in ("L43", "L44", "L46"):
        raise ConfigError(f"domination kind must be L43, L44 or L46, got {kind!r}")
    if cfg.theorem_id != kind:
        d = cfg.to_dict()
        d["theorem_id"] = kind
        cfg = TrialConfig(**d)
    return ensemble_report(cfg, refine, threads)
