"""Table rendering: CSV and Markdown mirroring the published layouts.

Every number is re-derived from the analysis objects at render time;
cells follow the "count (pct%)" format with one-decimal percentages, and
a zero-population row renders "0 (nan%)".
"""

from __future__ import annotations

import csv
import io
import json
import math

from ..stats import CorrelationMatrix, CrossTab, Distribution, fmt_pct


def cell(count: int, pct: float) -> str:
    return f"{count} ({fmt_pct(pct)}%)"


def distribution_csv(dists: list[Distribution]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["variable", "category", "count", "pct"])
    for d in dists:
        for cat, count in zip(d.categories, d.counts):
            pct = 100.0 * count / d.total if d.total else math.nan
            w.writerow([d.variable, cat, count, fmt_pct(pct)])
    return buf.getvalue()


def distribution_md(dists: list[Distribution]) -> str:
    lines = []
    for d in dists:
        lines.append(f"**{d.variable}**")
        lines.append("")
        lines.append("| Category | Count | % |")
        lines.append("| --- | ---: | ---: |")
        for cat, count in zip(d.categories, d.counts):
            pct = 100.0 * count / d.total if d.total else math.nan
            lines.append(f"| {cat} | {count} | {fmt_pct(pct)}% |")
        lines.append("")
    return "\n".join(lines)


def crosstab_csv(ct: CrossTab) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"{ct.row_variable} \\ {ct.col_variable}"] + list(ct.col_categories))
    pcts = ct.row_pcts()
    for r, row_cat in enumerate(ct.row_categories):
        w.writerow([row_cat] + [cell(ct.counts[r][c], pcts[r][c])
                                for c in range(len(ct.col_categories))])
    return buf.getvalue()


def crosstab_md(ct: CrossTab) -> str:
    pcts = ct.row_pcts()
    head = f"| {ct.row_variable} \\ {ct.col_variable} | " + " | ".join(ct.col_categories) + " |"
    sep = "| --- |" + " ---: |" * len(ct.col_categories)
    lines = [head, sep]
    for r, row_cat in enumerate(ct.row_categories):
        cells = " | ".join(cell(ct.counts[r][c], pcts[r][c])
                           for c in range(len(ct.col_categories)))
        lines.append(f"| {row_cat} | {cells} |")
    return "\n".join(lines) + "\n"


def matrix_csv(cm: CorrelationMatrix, which: str = "rho") -> str:
    data = cm.rho if which == "rho" else cm.pvalues
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([which] + list(cm.variables))
    for i, var in enumerate(cm.variables):
        w.writerow([var] + ["" if v is None else f"{v:.6f}" for v in data[i]])
    return buf.getvalue()


def matrix_json(cm: CorrelationMatrix) -> str:
    doc = {
        "variables": list(cm.variables),
        "rho": [[None if v is None else round(v, 12) for v in row] for row in cm.rho],
        "pvalues": [[None if v is None else float(f"{v:.6g}") for v in row]
                    for row in cm.pvalues],
        "n_obs": [list(row) for row in cm.n_obs],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
