"""Serialise scan summaries as canonical JSON, CSV or plain text.

JSON output has sorted keys and holds integers, booleans, strings and
nulls only. The Andrica rank key is written as an exact "k/2**32" string.
"""
from __future__ import annotations

import csv
import io
import json

from .codes import ALL_CHECKS
from .engine import RangeSummary, canonical_json
from .exact import rank_key, rank_key_str

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CAPACITY = 4

FORMATS = ("json", "csv", "text")


def exit_code(summary: RangeSummary) -> int:
    return EXIT_COUNTEREXAMPLE if summary.failure_total else EXIT_OK


def parse_report(data: bytes) -> RangeSummary:
    return RangeSummary.from_dict(json.loads(data))


def _fmt_details(details: dict) -> str:
    return " ".join(f"{k}={_v(details[k])}" for k in sorted(details))


def _v(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    return str(x)


def _subject(c) -> str:
    return f"({c.subject}, {c.p_hi})" if c.p_hi is not None else f"N={c.subject}"


def emit_report(summary: RangeSummary, fmt: str = "json") -> bytes:
    if fmt == "json":
        return canonical_json(summary.to_dict())
    if fmt == "csv":
        return _csv(summary)
    if fmt == "text":
        return render_text(summary).encode()
    raise ValueError(f"unknown format {fmt!r}")


def _csv(summary: RangeSummary) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "subject", "p_hi", "details"])
    for c in summary.counterexamples:
        w.writerow([c.check, c.subject, "" if c.p_hi is None else c.p_hi, _fmt_details(c.details)])
    return buf.getvalue().encode()


def render_text(summary: RangeSummary) -> str:
    cfg = summary.config
    lines = [
        f"parityscan report (schema {summary.to_dict()['schema_version']}, config {summary.config_digest[:12]})",
        f"range         p_lo in [{cfg['range_lo']}, {cfg['range_hi']})",
    ]
    if cfg["n_lo"] is not None:
        lines.append(f"square index  N in [{cfg['n_lo']}, {cfg['n_hi']})")
    lines += [
        f"pairs checked {summary.pairs_checked}",
        f"N checked     {summary.n_checked}",
        f"divisions     {summary.divisions}",
        f"divergences   {summary.divergence_count}",
        "",
        f"{'check':<18}{'holds':>12}{'fails':>12}",
    ]
    for name in ALL_CHECKS:
        if name in summary.counters:
            h, f = summary.counters[name]
            lines.append(f"{name:<18}{h:>12}{f:>12}")
    lines += ["", "extremes"]
    if summary.max_gap:
        g, p = summary.max_gap
        lines.append(f"  max gap              {g} at p_lo={p}")
    if summary.min_theorem1_margin:
        m, p = summary.min_theorem1_margin
        lines.append(f"  min theorem1 margin  {m} at p_lo={p}")
    if summary.max_andrica_pair:
        p, q = summary.max_andrica_pair
        lines.append(f"  max Andrica pair     ({p}, {q}) rank key {rank_key_str(rank_key(p, q))}")
    if summary.invariant_violations:
        lines += ["", "INVARIANT VIOLATIONS (implementation bug)"]
        for k, n in summary.invariant_violations.items():
            lines.append(f"  {k}: {n}")
    total = summary.failure_total
    lines += ["", f"counterexamples: {len(summary.counterexamples)} recorded, "
                  f"{total - len(summary.counterexamples)} suppressed"]
    for c in summary.counterexamples:
        lines.append(f"  {c.check:<18}{_subject(c):<22}{_fmt_details(c.details)}")
    return "\n".join(lines) + "\n"
