"""Report serialization: ``report.json``, ``report.csv`` and ``ratios.dat``."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from .trials import Report

CSV_FIELDS = ("index", "n", "lhs", "rhs", "ratio", "degenerate", "config_hash", "notes")


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def report_dict(rep: Report) -> dict:
    return _clean({"header": rep.header, "config": rep.config, "summary": rep.summary,
                   "records": [r.to_dict() for r in rep.records]})


def report_json(rep: Report) -> str:
    return json.dumps(report_dict(rep), indent=2, sort_keys=True) + "\n"


def report_csv(rep: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rep.records:
        d = r.to_dict()
        w.writerow([repr(d[k]) if isinstance(d[k], float) else d[k] for k in CSV_FIELDS])
    return buf.getvalue()


def ratios_dat(rep: Report) -> str:
    """Two columns (index, ratio); one gnuplot data block per resolution."""
    blocks: dict[int, list[str]] = {}
    for r in rep.records:
        blocks.setdefault(r.n, []).append(f"{r.index} {r.ratio!r}")
    out = []
    for n, lines in blocks.items():
        out.append("\n".join([f"# N={n}", "# index ratio", *lines]))
    return "\n\n\n".join(out) + "\n" if out else "# index ratio\n"


def write_report(rep: Report, out_dir) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"json": out / "report.json", "csv": out / "report.csv", "dat": out / "ratios.dat"}
    paths["json"].write_text(report_json(rep))
    paths["csv"].write_text(report_csv(rep))
    paths["dat"].write_text(ratios_dat(rep))
    return {k: str(v) for k, v in paths.items()}
