"""Command-line front end.

Exit codes: 0 every enabled check held, 1 at least one counterexample was
recorded, 2 usage error, 3 I/O or corrupt checkpoint, 4 capacity refusal.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from dataclasses import dataclass, field

from .codes import ALL_CHECKS, PAIR_CHECKS
from .engine import ScanConfig, canonical_json, run_scan, DEFAULT_CAP, DEFAULT_SHARD_SIZE
from .errors import CapacityError, CheckpointError, CheckpointMismatch, ParityScanError, UsageError
from .parity import chain_check, closed_form_L, gap_bound_check, largest_multiple, lemma2_check
from .conjectures import andrica_check
from .primes import PrimePair
from .report import (EXIT_CAPACITY, EXIT_COUNTEREXAMPLE, EXIT_IO, EXIT_OK, EXIT_USAGE, FORMATS,
                     emit_report, exit_code, render_text)

WORKERS_ENV = "PARITYSCAN_WORKERS"
CORE_CHECKS = ("parity", "identity", "lemma1", "lemma2", "chain", "theorem1", "eq14", "andrica")
CHECK_GROUPS = {"core": CORE_CHECKS, "pairs": PAIR_CHECKS, "all": ALL_CHECKS}
ARROW = "→"


@dataclass
class CliInvocation:
    subcommand: str
    config: ScanConfig | None = None
    resume: bool = False
    output_path: str | None = None
    format: str = "text"
    prime: int | None = None
    backend: str | None = None
    extra: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


_INT_FORMS = (
    (re.compile(r"^(\d+)(?:\*\*|\^)(\d+)$"), lambda a, b: a ** b),
    (re.compile(r"^(\d+)e(\d+)$", re.I), lambda a, b: a * 10 ** b),
)


def parse_int(text: str) -> int:
    """Integers, also written as 10**8, 10^8 or 1e8 (exact, no floats)."""
    s = text.strip().replace("_", "")
    if s.isdigit():
        return int(s)
    for pat, fn in _INT_FORMS:
        m = pat.match(s)
        if m:
            return fn(int(m.group(1)), int(m.group(2)))
    raise argparse.ArgumentTypeError(f"not a non-negative integer: {text!r}")


def parse_checks(text: str) -> frozenset:
    out = set()
    for tok in filter(None, (t.strip() for t in text.split(","))):
        if tok in CHECK_GROUPS:
            out.update(CHECK_GROUPS[tok])
        elif tok in ALL_CHECKS:
            out.add(tok)
        else:
            raise argparse.ArgumentTypeError(
                f"unknown check {tok!r}; choose from {', '.join(ALL_CHECKS)} or core/pairs/all")
    if not out:
        raise argparse.ArgumentTypeError("--check needs at least one check")
    return frozenset(out)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="parityscan", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    s = sub.add_parser("scan", help="verify checks over every odd pair with p_lo in [FROM, TO)")
    s.add_argument("--from", dest="range_lo", type=parse_int, required=True)
    s.add_argument("--to", dest="range_hi", type=parse_int, required=True)
    s.add_argument("--check", dest="checks", type=parse_checks, default=frozenset(CORE_CHECKS),
                   help="comma list of checks, or core/pairs/all (default: core)")
    s.add_argument("--workers", type=parse_int, default=None,
                   help=f"worker processes (default: ${WORKERS_ENV} or 1)")
    s.add_argument("--shard-size", type=parse_int, default=DEFAULT_SHARD_SIZE)
    s.add_argument("--cap", type=parse_int, default=DEFAULT_CAP, help="counterexamples kept per check")
    s.add_argument("--n-from", type=parse_int, default=None, help="first N for legendre/oppermann")
    s.add_argument("--n-to", type=parse_int, default=None, help="end (exclusive) of the N range")
    s.add_argument("--checkpoint", default=None)
    s.add_argument("--resume", action="store_true")
    _output_args(s, default="json")

    pr = sub.add_parser("probe", help="show every m_i between an odd prime and the next prime")
    pr.add_argument("prime", type=parse_int)
    _output_args(pr, default="text")

    d = sub.add_parser("demo-2329", help="walk through the pair (23, 29)")
    _output_args(d, default="text")
    return p


def _output_args(p, default):
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--format", choices=FORMATS, default=default)
    p.add_argument("--backend", choices=("auto", "compiled", "python"), default=None)


def parse_args(argv: list[str]) -> CliInvocation:
    ns = build_parser().parse_args(argv)
    inv = CliInvocation(ns.subcommand, output_path=ns.output, format=ns.format,
                        backend=None if ns.backend in (None, "auto") else ns.backend)
    inv.extra["verbose"] = ns.verbose
    if ns.subcommand == "scan":
        if ns.range_hi <= ns.range_lo:
            raise UsageError(f"--to ({ns.range_hi}) must be greater than --from ({ns.range_lo})")
        if ns.resume and not ns.checkpoint:
            raise UsageError("--resume needs --checkpoint")
        workers = ns.workers
        if workers is None:
            env = os.environ.get(WORKERS_ENV)
            try:
                workers = parse_int(env) if env else 1
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"${WORKERS_ENV}: {exc}") from None
        inv.config = ScanConfig(
            range_lo=ns.range_lo,
            range_hi=ns.range_hi,
            checks=ns.checks,
            shard_size=ns.shard_size,
            worker_count=workers,
            counterexample_cap=ns.cap,
            checkpoint_path=ns.checkpoint,
            n_lo=ns.n_from,
            n_hi=ns.n_to,
        )
        inv.resume = ns.resume
        inv.config.validate()
    elif ns.subcommand == "probe":
        inv.prime = ns.prime
    return inv


# -- probe and demo ----------------------------------------------------------


def probe_rows(pair: PrimePair) -> list[dict]:
    """One row per m_i in (p_lo, p_hi); ``inside`` marks m_i <= midpoint."""
    p = pair.p_lo
    rows = []
    for m_i in range(p + 1, pair.p_hi):
        L = largest_multiple(p, m_i * m_i)
        cf = closed_form_L(p, m_i)
        rows.append({
            "m_i": m_i,
            "inside": m_i <= pair.midpoint,
            "L": L,
            "odd": L % 2 == 1,
            "closed_form": cf,
            "identity": L == cf,
            "chain": chain_check(p, m_i),
        })
    return rows


def probe_report(pair: PrimePair) -> dict:
    gv = gap_bound_check(pair)
    l2 = lemma2_check(pair)
    rows = probe_rows(pair)
    inside = [r for r in rows if r["inside"]]
    return {
        "pair": {"p_lo": pair.p_lo, "p_hi": pair.p_hi, "midpoint": pair.midpoint, "gap": pair.gap},
        "rows": rows,
        "parity_holds": all(r["odd"] for r in inside),
        "identity_holds": all(r["identity"] for r in inside),
        "theorem1_margin": gv.theorem1_margin,
        "eq14_margin": gv.eq14_margin,
        "lemma2_holds": l2.midpoint_bound_holds,
        "bertrand_holds": l2.bertrand_holds,
        "andrica_margin": andrica_check(pair).margin,
    }


def _parity_word(odd: bool) -> str:
    return "odd" if odd else "even"


def render_probe(rep: dict) -> str:
    pr = rep["pair"]
    lines = [
        f"pair ({pr['p_lo']}, {pr['p_hi']}), midpoint m = {pr['midpoint']}, gap {pr['gap']}",
        f"inside ({pr['p_lo']}, {pr['midpoint']}]:",
    ]
    rows = rep["rows"]
    for r in rows:
        if r is next((x for x in rows if not x["inside"]), None):
            lines.append(f"past the midpoint, ({pr['midpoint']}, {pr['p_hi']}):")
        ident = "=" if r["identity"] else "!="
        lines.append(f"  m_i={r['m_i']} {ARROW} L={r['L']} ({_parity_word(r['odd'])})"
                     f"  {ident} p(2m_i-p)={r['closed_form']}")
    lines += [
        f"parity holds on ({pr['p_lo']}, {pr['midpoint']}]: {'yes' if rep['parity_holds'] else 'no'}",
        f"closed form holds on ({pr['p_lo']}, {pr['midpoint']}]: {'yes' if rep['identity_holds'] else 'no'}",
        f"gap^2 < 4 p_lo margin {rep['theorem1_margin']}; m^2 < p_lo(p_hi+1) margin {rep['eq14_margin']}",
        f"2m-1 < 3 p_lo: {'yes' if rep['lemma2_holds'] else 'no'}; "
        f"p_hi < 2 p_lo: {'yes' if rep['bertrand_holds'] else 'no'}; "
        f"Andrica margin {rep['andrica_margin']}",
    ]
    return "\n".join(lines) + "\n"


DEMO_CHECKS = ("parity", "identity", "chain", "lemma2", "theorem1", "eq14", "andrica", "beyond_midpoint")


def run_demo(backend=None):
    """The (23, 29) walkthrough plus an engine scan of that single pair."""
    pair = PrimePair(23, 29)
    rep = probe_report(pair)
    summary = run_scan(ScanConfig(23, 24, checks=DEMO_CHECKS), backend=backend)
    by_mi = {r["m_i"]: r for r in rep["rows"]}
    reproduced = (
        by_mi[26]["L"] == 667 and by_mi[26]["odd"]
        and rep["parity_holds"]
        and by_mi[28]["L"] == 782 and not by_mi[28]["odd"]
    )
    return rep, summary, reproduced


def _emit(data: bytes, path: str | None):
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def execute(inv: CliInvocation) -> int:
    if inv.subcommand == "scan":
        summary = run_scan(inv.config, resume=inv.resume, backend=inv.backend)
        _emit(emit_report(summary, inv.format), inv.output_path)
        return exit_code(summary)

    if inv.subcommand == "probe":
        pair = PrimePair.starting_at(inv.prime)
        rep = probe_report(pair)
        if inv.format == "json":
            data = canonical_json(rep)
        elif inv.format == "csv":
            data = _rows_csv(rep["rows"])
        else:
            data = render_probe(rep).encode()
        _emit(data, inv.output_path)
        ok = rep["parity_holds"] and rep["identity_holds"] and rep["theorem1_margin"] > 0
        return EXIT_OK if ok else EXIT_COUNTEREXAMPLE

    rep, summary, reproduced = run_demo(inv.backend)
    if inv.format == "json":
        data = canonical_json({"walkthrough": rep, "reproduced": reproduced, "summary": summary.to_dict()})
    elif inv.format == "csv":
        data = _rows_csv(rep["rows"])
    else:
        data = (render_probe(rep) + "\n" + render_text(summary)
                + f"\nexample reproduced: {'yes' if reproduced else 'NO'}\n").encode()
    _emit(data, inv.output_path)
    return EXIT_OK if reproduced else EXIT_COUNTEREXAMPLE


def _rows_csv(rows) -> bytes:
    cols = ["m_i", "inside", "L", "odd", "closed_form", "identity", "chain"]
    out = [",".join(cols)]
    for r in rows:
        out.append(",".join(str(r[c]).lower() if isinstance(r[c], bool) else str(r[c]) for c in cols))
    return ("\n".join(out) + "\n").encode()


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        inv = parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    logging.basicConfig(level=logging.INFO if inv.extra.get("verbose") else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return execute(inv)
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except CheckpointMismatch as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CheckpointError as exc:
        print(f"checkpoint: {exc}", file=sys.stderr)
        return EXIT_IO
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ParityScanError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
