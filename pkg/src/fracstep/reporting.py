"""Flat-file output for convergence reports.

CSV is the machine format: one row per (alpha, tau) with the columns

    alpha,tau,error,order,scheme,generator,space,eval

floats written with repr so parse_csv(emit target) reconstructs the rows
bit for bit. Markdown is the human format and mirrors the usual table
layout: grouped by alpha, errors in scientific notation, observed order
next to each refinement, and the expected asymptotic rate in parentheses
on the first row of each group.
"""

from __future__ import annotations

import csv
import io
import math

from .experiments import ConvergenceReport, ReportRow, theoretical_order

CSV_COLUMNS = ("alpha", "tau", "error", "order", "scheme", "generator", "space", "eval")
FORMATS = ("csv", "md")


def render_csv(report: ConvergenceReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    meta = report.metadata
    for row in report.rows:
        writer.writerow(
            [
                repr(row.alpha),
                repr(row.tau),
                repr(row.error),
                "" if row.order is None else repr(row.order),
                meta["scheme"],
                meta["generator"],
                meta["space"],
                meta["eval"],
            ]
        )
    return buf.getvalue()


def parse_csv(text: str) -> ConvergenceReport:
    """Inverse of render_csv for the fields the CSV carries."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("empty report file: missing header") from None
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected report header {header!r}")
    rows = []
    meta = {}
    for record in reader:
        if len(record) != len(CSV_COLUMNS):
            raise ValueError(f"malformed report row {record!r}")
        alpha, tau, error, order = record[:4]
        rows.append(
            ReportRow(
                alpha=float(alpha),
                tau=float(tau),
                error=float(error),
                order=None if order == "" else float(order),
            )
        )
        meta = {
            "scheme": record[4],
            "generator": record[5],
            "space": record[6],
            "eval": record[7],
        }
    return ConvergenceReport(rows=tuple(rows), metadata=meta)


def _tau_label(tau: float) -> str:
    k = math.log2(1.0 / tau)
    if abs(k - round(k)) < 1e-12:
        return f"2^-{round(k)}"
    return f"{tau:g}"


def render_markdown(report: ConvergenceReport) -> str:
    meta = report.metadata
    eval_mode = "max" if meta["eval"] == "max" else "fixed"
    example = meta.get("example", "")
    lines = [
        f"## {example or 'report'}: {meta['scheme']}({meta['generator']}), "
        f"{meta['space']}, eval {meta['eval']}",
        "",
        f"Errors measured against: {meta.get('reference', 'exact solution')}.",
        "",
        "| alpha | tau | error | order |",
        "| --- | --- | --- | --- |",
    ]
    for row in report.rows:
        if row.order is None:
            expected = theoretical_order(example, meta["scheme"], eval_mode, row.alpha)
            order_cell = "--" if expected is None else f"({expected:.2f})"
        else:
            order_cell = f"{row.order:.2f}"
        lines.append(
            f"| {row.alpha:g} | {_tau_label(row.tau)} | {row.error:.4E} | {order_cell} |"
        )
    flags = meta.get("flags", ())
    if flags:
        lines.append("")
        for flag in flags:
            lines.append(f"Note: {flag}.")
    lines.append("")
    return "\n".join(lines)


def emit(report: ConvergenceReport, path: str, fmt: str = "csv") -> None:
    """Write the report to path in the requested format."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    text = render_csv(report) if fmt == "csv" else render_markdown(report)
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise RuntimeError(f"cannot write report to {path}: {exc}") from exc
