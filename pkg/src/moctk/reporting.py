"""Plain-text and delimited renderings of evaluation reports."""

from __future__ import annotations

import csv
import io
from typing import Mapping

COLUMNS = ("IS", "IE", "O", "macro")


def fmt(v) -> str:
    """Three decimals without the leading zero; ``--`` for undefined values."""
    if v is None:
        return "--"
    s = f"{v:.3f}"
    return s[1:] if s.startswith("0.") else s


def table_rows(reports: Mapping[str, Mapping]) -> list[list[str]]:
    rows = []
    for name, rep in reports.items():
        row = [name]
        for col in COLUMNS:
            vals = rep["post_level"][col]
            row += [fmt(vals["precision"]), fmt(vals["recall"]), fmt(vals["f1"])]
        for col in COLUMNS:
            vals = rep["coverage"].get(col, {})
            row += [fmt(vals.get("C_p")), fmt(vals.get("C_r"))]
        rows.append(row)
    return rows


def header() -> tuple[list[str], list[str]]:
    top = [""] + [c for c in COLUMNS for _ in range(3)] + [c for c in COLUMNS for _ in range(2)]
    sub = ["model"] + ["P", "R", "F1"] * len(COLUMNS) + ["C_p", "C_r"] * len(COLUMNS)
    return top, sub


def render_table(reports: Mapping[str, Mapping]) -> str:
    """Post-level P/R/F1 and coverage per label, one row per model."""
    top, sub = header()
    rows = table_rows(reports)
    body = [top, sub] + rows
    widths = [max(len(r[i]) for r in body) for i in range(len(sub))]
    lines = []
    for k, r in enumerate(body):
        cells = [r[0].ljust(widths[0])] + [c.rjust(widths[i]) for i, c in enumerate(r[1:], start=1)]
        lines.append("  ".join(cells).rstrip())
        if k == 1:
            lines.append("-" * len(lines[-1]))
    windowed = _windowed_lines(reports)
    return "\n".join(lines + [""] + windowed) + "\n"


def _windowed_lines(reports: Mapping[str, Mapping]) -> list[str]:
    out = ["timeline-level P_w / R_w (IS, IE)"]
    for name, rep in reports.items():
        for wkey in sorted(rep["windowed"], key=lambda k: int(k.split("=")[1])):
            block = rep["windowed"][wkey]
            parts = [
                f"{lab} P={fmt(block[lab]['precision'])} R={fmt(block[lab]['recall'])}"
                for lab in ("IS", "IE")
                if lab in block
            ]
            out.append(f"  {name:<14} {wkey:<4} " + "  ".join(parts))
    return out


def render_csv(reports: Mapping[str, Mapping]) -> str:
    top, sub = header()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model"] + [f"{t}_{s}" for t, s in zip(top[1:], sub[1:])])
    for row in table_rows(reports):
        w.writerow(row)
    return buf.getvalue()
