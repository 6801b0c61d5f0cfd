"""Report rendering: JSON (stable schemas) and plain-text tables."""

from __future__ import annotations

import json
from pathlib import Path

from .campaign import CampaignResult
from .matrix import OutcomeMatrix
from .overhead import OverheadReport


def matrix_to_record(matrix: OutcomeMatrix) -> dict:
    return {
        "corpus": matrix.corpus,
        "strategies": list(matrix.strategies),
        "cases": [
            {"name": name,
             "cells": dict(matrix.cells[name]),
             "success_count": matrix.success_count(name)}
            for name in matrix.case_names
        ],
        "totals": matrix.totals,
        "union": matrix.union,
    }


def matrix_to_json(matrix: OutcomeMatrix) -> str:
    return json.dumps(matrix_to_record(matrix), indent=2, sort_keys=True) + "\n"


def matrix_to_text(matrix: OutcomeMatrix) -> str:
    name_width = max([len("case"), len("Total")]
                     + [len(n) for n in matrix.case_names]) + 2
    col_width = 5
    header = "case".ljust(name_width) + "".join(
        sid.ljust(col_width) for sid in matrix.strategies) + "success"
    lines = [header, "-" * len(header)]
    for name in matrix.case_names:
        row = name.ljust(name_width)
        for sid in matrix.strategies:
            row += matrix.cells[name][sid].ljust(col_width)
        row += str(matrix.success_count(name))
        lines.append(row)
    lines.append("-" * len(header))
    totals = matrix.totals
    total_row = "Total".ljust(name_width) + "".join(
        str(totals[sid]).ljust(col_width) for sid in matrix.strategies)
    lines.append(total_row)
    lines.append(f"Union: {matrix.union}/{len(matrix.case_names)}")
    return "\n".join(lines) + "\n"


def _fmt_ms(ms: float) -> str:
    return f"{ms:.1f}"


def _fmt_pct(pct: float) -> str:
    return f"{pct:.0f}%"


def overhead_to_record(report: OverheadReport) -> dict:
    return {
        "cases": [
            {"name": c.name,
             "original_ms": round(c.original_ms, 3),
             "transformed_ms": round(c.transformed_ms, 3),
             "overhead_pct": round(c.overhead_pct, 1),
             "reps": c.reps}
            for c in report.cases
        ]
    }


def overhead_to_json(report: OverheadReport) -> str:
    return json.dumps(overhead_to_record(report), indent=2, sort_keys=True) + "\n"


def overhead_row_text(name: str, original_ms: float, transformed_ms: float,
                      name_width: int = 24) -> str:
    pct = 0.0 if original_ms == 0 else \
        (transformed_ms - original_ms) / original_ms * 100.0
    return (name.ljust(name_width)
            + _fmt_ms(original_ms).rjust(12)
            + _fmt_ms(transformed_ms).rjust(16)
            + _fmt_pct(pct).rjust(10))


def overhead_to_text(report: OverheadReport) -> str:
    name_width = max([len("case")] + [len(c.name) for c in report.cases]) + 2
    header = ("case".ljust(name_width) + "original ms".rjust(12)
              + "transformed ms".rjust(16) + "overhead".rjust(10))
    lines = [header, "-" * len(header)]
    for c in report.cases:
        lines.append(overhead_row_text(c.name, c.original_ms, c.transformed_ms,
                                       name_width))
    return "\n".join(lines) + "\n"


# Union repair rate reported by the large-scale Java evaluation of this
# technique; printed for context only, never asserted.
REFERENCE_UNION_RATE_PCT = 61


def campaign_to_text(result: CampaignResult) -> str:
    lines = [
        f"project: {result.project}",
        f"removed null checks: {result.seed_report.count}",
        f"tests: {len(result.tests)}",
        f"failing (NullPointerException): {result.failing_npe}",
        f"failing (AssertionError): {result.failing_assertion}",
    ]
    if result.matrix is not None and result.matrix.case_names:
        lines.append("")
        lines.append(matrix_to_text(result.matrix).rstrip("\n"))
        lines.append(
            f"union repair rate: {result.union_repair_rate:.0f}% "
            f"(reference Java-scale evaluation: {REFERENCE_UNION_RATE_PCT}%)")
    return "\n".join(lines) + "\n"


def campaign_to_json(result: CampaignResult) -> str:
    record = result.to_record()
    if result.matrix is not None:
        record["matrix"] = matrix_to_record(result.matrix)
    record["reference_union_rate_pct"] = REFERENCE_UNION_RATE_PCT
    return json.dumps(record, indent=2, sort_keys=True) + "\n"


def write_report(path: str | Path, content: str):
    Path(path).write_text(content, encoding="utf-8")
