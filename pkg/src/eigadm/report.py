"""CSV and JSON serialisation of risk reports."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict
from pathlib import Path

from .risk import RiskEstimate, RiskReport, RiskRow

CSV_HEADER = ("pattern", "nu", "estimator", "risk", "std_error", "n_rep")
META_KEYS = ("seed", "n_points", "n_rep", "version", "wall_ms")


class ReportIOError(OSError):
    pass


def _num(x) -> str:
    # repr gives the shortest string that round-trips
    x = float(x)
    if math.isfinite(x) and x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def format_pattern(lam) -> str:
    return "|".join(repr(float(v)) for v in lam)


def to_csv(report: RiskReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in report.rows:
        for name, est in row.estimates.items():
            w.writerow(
                [format_pattern(row.lam), _num(row.nu), name, repr(float(est.mean_loss)), repr(float(est.std_error)), est.n_rep]
            )
    return buf.getvalue()


def to_dict(report: RiskReport, *, timing: bool = True) -> dict:
    meta = {k: report.metadata.get(k) for k in META_KEYS}
    meta.update({k: v for k, v in report.metadata.items() if k not in META_KEYS})
    if not timing:
        meta["wall_ms"] = None
    rows = []
    for row in report.rows:
        for name, est in row.estimates.items():
            d = asdict(est)
            rows.append(
                {
                    "lambda": list(row.lam),
                    "nu": row.nu,
                    "estimator": name,
                    "risk": d.pop("mean_loss"),
                    "std_error": d.pop("std_error"),
                    **d,
                }
            )
    return {"metadata": meta, "rows": rows}


def from_dict(data: dict) -> RiskReport:
    rows: list[RiskRow] = []
    index = {}
    for item in data["rows"]:
        item = dict(item)
        key = (tuple(item.pop("lambda")), item.pop("nu"))
        name = item.pop("estimator")
        est = RiskEstimate(mean_loss=item.pop("risk"), std_error=item.pop("std_error"), **item)
        if key not in index:
            index[key] = RiskRow(key[0], key[1], {})
            rows.append(index[key])
        index[key].estimates[name] = est
    return RiskReport(rows, dict(data["metadata"]))


def write_report(report: RiskReport, path, fmt: str = "csv", *, timing: bool = True) -> None:
    """Write ``report`` as CSV or JSON.

    With ``timing=False`` the wall-clock field is nulled so reruns produce
    byte-identical files.
    """
    if fmt == "csv":
        text = to_csv(report)
    elif fmt == "json":
        text = json.dumps(to_dict(report, timing=timing), indent=2) + "\n"
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise ReportIOError(f"cannot write report to {path}: {exc}") from exc


def read_report(path) -> RiskReport:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ReportIOError(f"cannot read report from {path}: {exc}") from exc
    return from_dict(data)
