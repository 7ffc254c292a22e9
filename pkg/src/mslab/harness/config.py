"""Trial configurations: JSON round trip, built-in defaults and hypothesis gates."""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..exponents import ExponentConfig, TQuad
from ..grid import ConfigError, Grid

THEOREMS = ("T11i", "T11ii", "T12i", "T12ii", "T14", "T15", "T16",
            "L43", "L44", "L46", "L55", "P31scale", "P32scale", "SQID")

RESTRICTION_NOTE = ("the bilinear Fourier-multiplier operator is exercised with m in {1, 2} "
                    "slots only; general m-linear statements are not covered")


class HypothesisError(ConfigError):
    """A configuration violates a hypothesis of the statement under test."""


_DEFAULT_ENSEMBLE = {"count": 50, "seed": 20240601, "generator": "random_trig",
                     "degree": 8, "bumps": 3, "support": [0.25, 0.75]}
_DEFAULT_BMO = {"family": "log", "center": 0.5, "floor": 1 / 64, "slots": [1, 1]}


@dataclass
class TrialConfig:
    theorem_id: str
    grid: dict = field(default_factory=lambda: {"dim": 1, "n": 128, "length": 16.0})
    symbol: object = "gauss_bump"
    exponents: ExponentConfig = field(default_factory=ExponentConfig)
    weights: dict = field(default_factory=lambda: {"family": "unit"})
    bmo: dict = field(default_factory=lambda: dict(_DEFAULT_BMO))
    ensemble: dict = field(default_factory=lambda: dict(_DEFAULT_ENSEMBLE))
    tquad: dict = field(default_factory=lambda: {"nodes_per_octave": 8})
    windows: dict = field(default_factory=lambda: {"mode": "dyadic"})
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.theorem_id not in THEOREMS:
            raise ConfigError(f"unknown theorem_id {self.theorem_id!r}; choose from {THEOREMS}")
        if isinstance(self.exponents, dict):
            e = dict(self.exponents)
            if "p_list" in e:
                e["p_list"] = tuple(e["p_list"])
            try:
                self.exponents = ExponentConfig(**e)
            except TypeError as exc:
                raise ConfigError(f"bad exponents block: {exc}") from None
        ens = dict(_DEFAULT_ENSEMBLE)
        ens.update(self.ensemble)
        self.ensemble = ens
        self.make_grid()

    def make_grid(self, factor: int = 1) -> Grid:
        g = self.grid
        try:
            return Grid(int(g.get("dim", 1)), int(g.get("n", 128)) * factor, float(g.get("length", 16.0)))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad grid block: {exc}") from None

    def make_tquad(self, grid: Grid) -> TQuad:
        tq = self.tquad or {}
        npo = int(tq.get("nodes_per_octave", 8))
        t_min = tq.get("t_min")
        t_max = tq.get("t_max")
        return TQuad(float(t_min) if t_min else grid.spacing / 4,
                     float(t_max) if t_max else 4 * grid.length, npo)

    def to_dict(self) -> dict:
        return {"theorem_id": self.theorem_id, "grid": dict(self.grid), "symbol": self.symbol,
                "exponents": self.exponents.to_dict(), "weights": dict(self.weights),
                "bmo": dict(self.bmo), "ensemble": dict(self.ensemble),
                "tquad": dict(self.tquad), "windows": dict(self.windows),
                "params": dict(self.params)}

    @classmethod
    def from_dict(cls, d: dict) -> "TrialConfig":
        if not isinstance(d, dict) or "theorem_id" not in d:
            raise ConfigError("config must be an object with a theorem_id")
        known = {"theorem_id", "grid", "symbol", "exponents", "weights", "bmo", "ensemble",
                 "tquad", "windows", "params"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config fields: {sorted(extra)}")
        base = builtin_config(d["theorem_id"]).to_dict()
        for key, val in d.items():
            if isinstance(val, dict) and isinstance(base.get(key), dict):
                base[key].update(val)
            else:
                base[key] = val
        return cls(**base)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def with_grid_factor(self, factor: int) -> "TrialConfig":
        d = self.to_dict()
        d["grid"]["n"] = int(d["grid"].get("n", 128)) * factor
        return TrialConfig(**d)


def load_config(path) -> TrialConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return TrialConfig.from_dict(data)


_BUILTIN = {
    "T11i": {"exponents": {"p0": 1.0, "p_list": [2.0, 2.0]}},
    "T11ii": {"exponents": {"p0": 1.5, "p_list": [1.5, 3.0]}},
    "T12i": {"exponents": {"p0": 1.0, "p_list": [2.0, 2.0]}},
    "T12ii": {"exponents": {"p0": 1.0, "p_list": [2.0, 2.0]}},
    "T14": {"exponents": {"p0": 1.0, "p_list": [2.0, 2.0]}},
    "T15": {"exponents": {"p0": 1.0, "p_list": [2.0, 2.0]}},
    "T16": {"exponents": {"p0": 1.0, "p_list": [2.0, 2.0]}},
    "L43": {"exponents": {"p0": 2.0, "p_list": [4.0, 4.0]}, "params": {"delta": 0.3}},
    "L44": {"exponents": {"p0": 1.0, "p_list": [2.0, 2.0]},
            "ensemble": {"support": [0.375, 0.625]}},
    "L46": {"exponents": {"p0": 2.0, "p_list": [4.0, 4.0]},
            "params": {"delta": 0.3, "eps": 0.5, "q0": 2.5}},
    "L55": {"exponents": {"p0": 1.0, "p_list": [2.0, 2.0]}},
    "P31scale": {"exponents": {"p0": 1.5, "p_list": [4.0, 4.0]}, "ensemble": {"count": 8},
                 "params": {"a": 2.0, "mesh": 32}},
    "P32scale": {"exponents": {"p0": 1.5, "p_list": [4.0, 4.0]}, "ensemble": {"count": 8},
                 "params": {"a": 2.0, "mesh": 32}},
    "SQID": {"grid": {"dim": 1, "n": 16, "length": 8.0}, "ensemble": {"count": 10}},
}


def builtin_config(theorem_id: str) -> TrialConfig:
    if theorem_id not in THEOREMS:
        raise ConfigError(f"unknown theorem_id {theorem_id!r}; choose from {THEOREMS}")
    d = copy.deepcopy(_BUILTIN.get(theorem_id, {}))
    ens = dict(_DEFAULT_ENSEMBLE)
    ens.update(d.pop("ensemble", {}))
    return TrialConfig(theorem_id=theorem_id, ensemble=ens, **d)


# -- hypothesis gates ---------------------------------------------------------------

def _require(cond: bool, tid: str, text: str) -> None:
    if not cond:
        raise HypothesisError(f"{tid} requires {text}")


def check_hypotheses(cfg: TrialConfig) -> None:
    """Reject configurations outside the hypotheses of the statement under test."""
    tid = cfg.theorem_id
    e = cfg.exponents
    n = cfg.make_grid().dim
    ps = e.p_list
    p0 = e.p0
    if tid in ("T11i", "T11ii", "T12i", "T12ii"):
        _require(len(ps) == 2, tid, "two exponents p1, p2")
        _require(n + 1 <= e.s <= 2 * n, tid, f"an integer s in [n+1, 2n] = [{n + 1}, {2 * n}]")
        _require(2 * n / e.s <= p0 <= 2, tid, "2n/s <= p0 <= 2")
        _require(all(p >= p0 for p in ps), tid, "p0 <= p1, p2")
    if tid in ("T11i", "T12i"):
        _require(all(p > p0 for p in ps), tid, "p1,p2>p0")
    if tid == "T11ii":
        _require(p0 > 2 * n / e.s, tid, "p0 > 2n/s")
        _require(any(p == p0 for p in ps), tid, "p1 = p0 or p2 = p0")
    if tid in ("T12ii", "T16", "L55"):
        _require(cfg.weights.get("family", "unit") in ("unit", "power"), tid,
                 "weights in A_1 (unit or power weights)")
        if cfg.weights.get("family") == "power":
            a = cfg.weights.get("a", 0.0)
            a = a if isinstance(a, (list, tuple)) else [a]
            _require(all(-n < x <= 0 for x in a), tid, "power weights |x|^a with -n < a <= 0 (A_1)")
    if tid == "T14":
        _require(p0 >= 1, tid, "p0 >= 1")
        _require(all(p >= p0 for p in ps), tid, "p0 <= p_i")
    if tid == "T15":
        _require(all(p > p0 for p in ps), tid, "p0 < p_i for every i")
    if tid in ("L43", "L46"):
        m = len(ps)
        top = min(1.0, p0 / m)
        delta = float(cfg.params.get("delta", 0.3))
        _require(0 < delta < top, tid, f"0 < delta < min(1, p0/m) = {top:g}")
        if tid == "L46":
            eps = float(cfg.params.get("eps", 0.5))
            q0 = float(cfg.params.get("q0", 2.5))
            _require(delta < eps < top, tid, f"delta < eps < min(1, p0/m) = {top:g}")
            _require(q0 > p0, tid, "q0 > p0")
    if tid in ("P31scale", "P32scale"):
        p = e.p
        _require(n == 1, tid, "dim 1")
        _require(2 * n / e.s < p <= 2, tid, f"2n/s < p <= 2 (p = {p:g})")
    if tid == "SQID":
        _require(n == 1, tid, "dim 1")
