"""Command line entry point: ``mslab <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 hypothesis rejection.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from .exponents import ExponentConfig, TQuad
from .fieldio import read_field, write_field
from .grid import ConfigError, Grid, SampledField, lp_norm
from .harness.config import HypothesisError, TrialConfig, builtin_config, load_config
from .harness.generators import make_functions, sample
from .harness.report import write_report
from .harness.trials import ensemble_report
from .symbols import check_decay_condition, parse_symbol, symbol_from_spec


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(f"not serializable: {type(x)}")


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _emit(obj) -> None:
    print(json.dumps(_clean(obj), indent=2, sort_keys=True, default=_json_default))


def _symbol(args):
    if getattr(args, "expr", None):
        return parse_symbol(args.expr)
    return symbol_from_spec(args.symbol)


def _tquad(args, grid: Grid) -> TQuad:
    return TQuad(args.t_min or grid.spacing / 4, args.t_max or 4 * grid.length, args.npo)


def _config_hash(args, fields) -> str:
    h = hashlib.sha256()
    skip = {"func", "out"}
    h.update(json.dumps({k: v for k, v in vars(args).items() if k not in skip},
                        sort_keys=True, default=str).encode())
    for f in fields:
        h.update(np.ascontiguousarray(f.values, dtype="<c16").tobytes())
    return h.hexdigest()[:16]


def _summary(args, F: SampledField, inputs) -> dict:
    return {"l2": lp_norm(F, 2.0), "linf": float(np.max(np.abs(F.values))),
            "config_hash": _config_hash(args, inputs)}


def _write_out(args, F: SampledField) -> None:
    if args.out:
        write_field(args.out, F)


# -- subcommands -----------------------------------------------------------------------

def cmd_make_field(args) -> int:
    g = Grid(args.dim, args.n, args.length)
    ens = {"generator": args.generator, "seed": args.seed, "degree": args.degree}
    funcs = make_functions(ens, g.dim, g.length, args.index, count=1)
    F = sample(funcs, g)[0]
    write_field(args.out, F)
    _emit({"out": args.out, "l2": lp_norm(F, 2.0)})
    return 0


def _operator(args, kind: str) -> int:
    from .operators import (commutator_multiplier, commutator_square, square_kernel,
                            square_multiplier)
    m = _symbol(args)
    fields = [read_field(p) for p in args.f]
    if len(fields) != m.arity:
        raise ConfigError(f"symbol has arity {m.arity} but {len(fields)} fields were given")
    q = _tquad(args, fields[0].grid)
    if kind == "sq-mult":
        F = square_multiplier(m, fields, q)
    elif kind == "sq-kernel":
        F = square_kernel(m, fields, q)
    else:
        bs = [read_field(p) if p != "-" else None for p in args.b]
        if len(bs) != m.arity:
            raise ConfigError("give one --b per slot ('-' leaves a slot plain)")
        if args.route == "kernel":
            F = commutator_square(m, bs, fields, q)
        else:
            F = commutator_multiplier(m, bs, fields, q)
    _write_out(args, F)
    _emit(_summary(args, F, fields))
    return 0


def cmd_annulus(args, kind: str) -> int:
    from .annuli import Ball, estimate_Ajk, estimate_Bjk
    m = _symbol(args)
    Q = Ball(args.center, args.radius)
    if kind == "bjk":
        val = estimate_Bjk(m, Q, args.j, args.k, args.p, mesh=args.mesh)
    else:
        x = args.center + args.x * args.radius
        xbar = args.center + args.xbar * args.radius
        val = estimate_Ajk(m, Q, x, xbar, args.j, args.k, args.p, mesh=args.mesh)
    _emit({"value": float(val), "j": args.j, "k": args.k, "p": args.p,
           "config_hash": _config_hash(args, [])})
    return 0


def cmd_maximal(args) -> int:
    from .maximal import (WindowFamily, m_delta, maximal, multilinear_maximal_p,
                          orlicz_maximal_slot, sharp_maximal_delta)
    fields = [read_field(p) for p in args.f]
    W = WindowFamily(args.windows, None, args.wrap)
    if args.op == "hl":
        F = maximal(fields[0], W)
    elif args.op == "mp":
        F = multilinear_maximal_p(fields, args.p0, W)
    elif args.op == "mdelta":
        F = m_delta(fields[0], args.delta, W)
    elif args.op == "sharp":
        F = sharp_maximal_delta(fields[0], args.delta, W)
    else:
        F = orlicz_maximal_slot(fields, args.slot, args.p0, W)
    _write_out(args, F)
    _emit(_summary(args, F, fields))
    return 0


def _parse_family(text: str) -> tuple[str, dict]:
    name, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        params[key.strip()] = float(val)
    return name.strip(), params


def cmd_weights(args) -> int:
    from .maximal import WindowFamily
    from .weights import a1_characteristic, ap_characteristic, power_weight
    g = Grid(args.dim, args.n, args.length)
    name, params = _parse_family(args.family)
    if name == "power":
        w = power_weight(params.get("a", 0.0), params.get("center", 0.5) * g.length, g)
    elif name == "unit":
        w = SampledField(g, np.ones(g.shape), nonnegative=True)
    elif name == "file":
        w = read_field(args.weight)
    else:
        raise ConfigError(f"unknown weight family {name!r}")
    W = WindowFamily(args.windows)
    if args.ap == 1:
        ch = a1_characteristic(w, W, detail=True)
    else:
        ch = ap_characteristic(w, args.ap, W, detail=True)
    _emit(ch.to_dict())
    return 0


def _values(args) -> np.ndarray:
    if args.f:
        return np.abs(read_field(args.f).values).ravel()
    if args.values is None:
        raise ConfigError("give --values or --f")
    return np.asarray(args.values, dtype=float)


def cmd_orlicz_eval(args) -> int:
    from .orlicz import YoungFn
    Y = YoungFn(args.kind, args.alpha)
    t = _values(args)
    _emit({"kind": args.kind, "alpha": args.alpha, "t": t.tolist(),
           "value": np.asarray(Y(t), dtype=float).tolist()})
    return 0


def cmd_orlicz_norm(args) -> int:
    from .orlicz import YoungFn, luxemburg_norm
    Y = YoungFn(args.kind, args.alpha)
    _emit({"kind": args.kind, "alpha": args.alpha,
           "norm": luxemburg_norm(_values(args), Y, args.rtol)})
    return 0


def cmd_check_symbol(args) -> int:
    if args.expr:
        m = parse_symbol(args.expr)
    else:
        m = symbol_from_spec(args.family)
    cfg = ExponentConfig(p0=args.p0, s=args.s, eps1=args.eps1, eps2=args.eps2, delta=args.delta)
    lo, hi = args.ell
    rep = check_decay_condition(m, cfg, args.cond, (lo, hi), args.samples, dim=args.dim)
    print(rep.to_json())
    return 0


def _config_for(args) -> TrialConfig:
    if args.config:
        cfg = load_config(args.config)
        if args.theorem and cfg.theorem_id != args.theorem:
            raise ConfigError(f"config is for {cfg.theorem_id}, not {args.theorem}")
        return cfg
    if not args.theorem:
        raise ConfigError("give --theorem or --config")
    return builtin_config(args.theorem)


def cmd_verify(args) -> int:
    cfg = _config_for(args)
    if args.count is not None or args.seed is not None:
        d = cfg.to_dict()
        if args.count is not None:
            d["ensemble"]["count"] = args.count
        if args.seed is not None:
            d["ensemble"]["seed"] = args.seed
        cfg = TrialConfig(**d)
    rep = ensemble_report(cfg, refine=not args.no_refine)
    paths = write_report(rep, args.out)
    _emit({"summary": rep.summary, "files": paths, "config_hash": cfg.digest()})
    return 0


def cmd_report(args) -> int:
    path = Path(args.dir) / "report.json"
    if not path.exists():
        raise ConfigError(f"no report.json in {args.dir}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"report.json is not valid JSON: {exc}") from None
    _emit({"header": data.get("header"), "summary": data.get("summary")})
    return 0


# -- parser ----------------------------------------------------------------------------

def _add_symbol(p) -> None:
    p.add_argument("--symbol", default="gauss_bump",
                   help="built-in family spec, e.g. gauss_bump or rational_bump:k=4")
    p.add_argument("--expr", help="symbol expression in xi1, xi2")


def _add_tquad(p) -> None:
    p.add_argument("--t-min", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--npo", type=int, default=8, help="t nodes per octave")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mslab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-field", help="write a random test field")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--length", type=float, default=16.0)
    p.add_argument("--generator", default="random_trig")
    p.add_argument("--degree", type=int, default=8)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_make_field)

    for name in ("sq-mult", "sq-kernel", "commutator"):
        p = sub.add_parser(name)
        _add_symbol(p)
        _add_tquad(p)
        p.add_argument("--f", action="append", required=True, help="input field file (repeat)")
        if name == "commutator":
            p.add_argument("--b", action="append", required=True,
                           help="BMO field per slot, '-' for none")
            p.add_argument("--route", choices=("multiplier", "kernel"), default="multiplier")
        p.add_argument("--out")
        p.set_defaults(func=lambda a, k=name: _operator(a, k))

    for name in ("ajk", "bjk"):
        p = sub.add_parser(name)
        _add_symbol(p)
        p.add_argument("--center", type=float, default=0.0)
        p.add_argument("--radius", type=float, default=1.0)
        p.add_argument("--j", type=int, default=1)
        p.add_argument("--k", type=int, default=1)
        p.add_argument("--p", type=float, default=2.0)
        p.add_argument("--mesh", type=int, default=64)
        if name == "ajk":
            p.add_argument("--x", type=float, default=0.25, help="offset in units of the radius")
            p.add_argument("--xbar", type=float, default=-0.25)
        p.set_defaults(func=lambda a, k=name: cmd_annulus(a, k))

    p = sub.add_parser("maximal")
    p.add_argument("--op", choices=("hl", "mp", "mdelta", "sharp", "orlicz"), default="hl")
    p.add_argument("--windows", choices=("dyadic", "all"), default="all")
    p.add_argument("--wrap", action="store_true")
    p.add_argument("--f", action="append", required=True)
    p.add_argument("--p0", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--slot", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_maximal)

    p = sub.add_parser("weights")
    p.add_argument("--family", default="power:a=-0.5")
    p.add_argument("--weight", help="weight field file for --family file")
    p.add_argument("--ap", type=float, default=2.0)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--length", type=float, default=1.0)
    p.add_argument("--windows", choices=("dyadic", "all"), default="all")
    p.set_defaults(func=cmd_weights)

    for name, fn in (("orlicz-eval", cmd_orlicz_eval), ("orlicz-norm", cmd_orlicz_norm)):
        p = sub.add_parser(name)
        p.add_argument("--kind", choices=("phi", "phi0", "phi1", "phibar1"), default="phi")
        p.add_argument("--alpha", type=float, default=1.0)
        p.add_argument("--values", type=float, nargs="+")
        p.add_argument("--f", help="field file; uses |values|")
        if name == "orlicz-norm":
            p.add_argument("--rtol", type=float, default=1e-10)
        p.set_defaults(func=fn)

    p = sub.add_parser("check-symbol")
    p.add_argument("--family", default="gauss_bump")
    p.add_argument("--expr")
    p.add_argument("--cond", default="eq13")
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--p0", type=float, default=1.0)
    p.add_argument("--eps1", type=float, default=1.0)
    p.add_argument("--eps2", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=1.5)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--ell", type=int, nargs=2, default=(-6, 6))
    p.add_argument("--samples", type=int, default=32)
    p.set_defaults(func=cmd_check_symbol)

    p = sub.add_parser("verify", help="run a trial ensemble and write reports")
    p.add_argument("--theorem")
    p.add_argument("--config")
    p.add_argument("--out", default=".")
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--no-refine", action="store_true", help="skip the 2N repetition")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="print the header and summary of a report directory")
    p.add_argument("dir")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.func(args))
    except HypothesisError as exc:
        print(f"hypothesis rejected: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


cli_main = main

if __name__ == "__main__":
    sys.exit(main())
