"""Sharded scans, deterministic merging and resumable checkpoints.

A scan covers the odd pairs with p_lo in [range_lo, range_hi) and, when the
legendre/oppermann checks are on, a separate range of square indices N.
Pairs belong to the shard that contains their p_lo; the kernel looks past
the shard end for p_hi, so every pair is counted exactly once without any
coordination between shards.

Shard summaries are merged in ascending shard order, and the merge is a
commutative monoid anyway, so the result never depends on worker count or
completion order.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass, field
from math import isqrt
from pathlib import Path
from typing import Callable, NamedTuple

from . import backend as _backend
from .codes import ALL_CHECKS, INVARIANTS, PAIR_CHECKS, SQUARE_CHECKS, check_mask
from .errors import CapacityError, CheckpointError, CheckpointMismatch, UsageError
from .exact import LIMIT, compare_sqrt_gaps, rank_key, rank_key_str
from .parity import closed_form_L, largest_multiple
from .primes import count_primes_open

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
ENGINE_VERSION = 1
CHECKPOINT_FORMAT = "parityscan-checkpoint"
CHECKPOINT_VERSION = 1
DEFAULT_SHARD_SIZE = 1 << 22
DEFAULT_CAP = 100


def canonical_json(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode()


# -- configuration ---------------------------------------------------------


@dataclass(frozen=True)
class ScanConfig:
    range_lo: int
    range_hi: int
    checks: frozenset = frozenset({"parity"})
    shard_size: int = DEFAULT_SHARD_SIZE
    worker_count: int = 1
    counterexample_cap: int = DEFAULT_CAP
    checkpoint_path: str | None = None
    # square-index range for legendre/oppermann, [n_lo, n_hi)
    n_lo: int | None = None
    n_hi: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "checks", frozenset(self.checks))

    @property
    def pair_checks(self) -> list[str]:
        return [c for c in PAIR_CHECKS if c in self.checks]

    @property
    def square_checks(self) -> list[str]:
        return [c for c in SQUARE_CHECKS if c in self.checks]

    def n_range(self) -> tuple[int, int] | None:
        if not self.square_checks:
            return None
        lo = 1 if self.n_lo is None else self.n_lo
        hi = isqrt(self.range_hi) if self.n_hi is None else self.n_hi
        return lo, max(lo, hi)

    def validate(self) -> "ScanConfig":
        unknown = self.checks - set(ALL_CHECKS)
        if unknown:
            raise UsageError(f"unknown checks: {', '.join(sorted(unknown))}")
        if not self.checks:
            raise UsageError("at least one check must be enabled")
        if self.range_lo < 3:
            raise UsageError("range_lo must be >= 3; (2, 3) is not an odd pair")
        if self.range_hi <= self.range_lo:
            raise UsageError(f"empty range [{self.range_lo}, {self.range_hi})")
        if self.range_hi > LIMIT:
            raise CapacityError(f"range end {self.range_hi} exceeds LIMIT 2**62")
        if self.shard_size < 2:
            raise UsageError("shard_size must be >= 2")
        if self.worker_count < 1:
            raise UsageError("worker_count must be >= 1")
        if self.counterexample_cap < 1:
            raise UsageError("counterexample_cap must be >= 1")
        nr = self.n_range()
        if nr is not None:
            lo, hi = nr
            if lo < 1:
                raise UsageError("n_lo must be >= 1")
            if hi > lo:
                last = hi - 1
                if "legendre" in self.checks and (last + 1) ** 2 > LIMIT:
                    raise CapacityError(f"(N+1)^2 for N={last} exceeds LIMIT")
                if "oppermann" in self.checks and last * (last + 1) > LIMIT:
                    raise CapacityError(f"N(N+1) for N={last} exceeds LIMIT")
        return self

    def identity(self) -> dict:
        """The fields that determine the result (not workers or paths)."""
        nr = self.n_range()
        return {
            "engine_version": ENGINE_VERSION,
            "range_lo": self.range_lo,
            "range_hi": self.range_hi,
            "checks": sorted(self.checks),
            "shard_size": self.shard_size,
            "counterexample_cap": self.counterexample_cap,
            "n_lo": None if nr is None else nr[0],
            "n_hi": None if nr is None else nr[1],
        }

    @property
    def digest(self) -> str:
        return _digest(self.identity())


def _digest(identity: dict) -> str:
    return hashlib.sha256(canonical_json(identity)).hexdigest()


class Shard(NamedTuple):
    index: int
    kind: str  # "pairs" or "squares"
    lo: int
    hi: int


def plan_shards(config: ScanConfig) -> list[Shard]:
    """Pair shards partitioning [range_lo, range_hi), then square-index shards.

    Square shards are sized so the sieved square-space per shard is about
    ``shard_size``.
    """
    config.validate()
    shards = []
    if config.pair_checks:
        lo = config.range_lo
        while lo < config.range_hi:
            hi = min(config.range_hi, lo + config.shard_size)
            shards.append(Shard(len(shards), "pairs", lo, hi))
            lo = hi
    nr = config.n_range()
    if nr is not None:
        n, n_hi = nr
        while n < n_hi:
            end = min(n_hi, n + max(1, config.shard_size // (2 * n + 1)))
            shards.append(Shard(len(shards), "squares", n, end))
            n = end
    return shards


# -- summaries -------------------------------------------------------------


@dataclass(frozen=True)
class Counterexample:
    check: str
    subject: int  # p_lo for pair checks, N for square checks
    p_hi: int | None
    details: dict

    @property
    def sort_key(self):
        return (self.subject, self.check, self.p_hi or 0, sorted(self.details.items()))

    def to_dict(self) -> dict:
        return {"check": self.check, "subject": self.subject, "p_hi": self.p_hi,
                "details": dict(self.details)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["check"], d["subject"], d["p_hi"], dict(d["details"]))


@dataclass(frozen=True)
class RangeSummary:
    config: dict
    config_digest: str
    pairs_checked: int = 0
    n_checked: int = 0
    counters: dict = field(default_factory=dict)  # check -> (holds, fails)
    divergence_count: int = 0
    divisions: int = 0
    max_gap: tuple | None = None  # (gap, p_lo)
    min_theorem1_margin: tuple | None = None  # (margin, p_lo)
    max_andrica_pair: tuple | None = None  # (p_lo, p_hi)
    counterexamples: tuple = ()
    suppressed: dict = field(default_factory=dict)
    invariant_violations: dict = field(default_factory=dict)

    @property
    def cap(self) -> int:
        return self.config["counterexample_cap"]

    @property
    def failure_total(self) -> int:
        return len(self.counterexamples) + sum(self.suppressed.values())

    def to_dict(self) -> dict:
        mg, mt, ma = self.max_gap, self.min_theorem1_margin, self.max_andrica_pair
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "config_digest": self.config_digest,
            "pairs_checked": self.pairs_checked,
            "n_checked": self.n_checked,
            "counters": {k: {"holds": h, "fails": f} for k, (h, f) in self.counters.items()},
            "divergence_count": self.divergence_count,
            "divisions": self.divisions,
            "extremes": {
                "max_gap": None if mg is None else {"gap": mg[0], "p_lo": mg[1]},
                "min_theorem1_margin": None if mt is None else {"margin": mt[0], "p_lo": mt[1]},
                "max_andrica_pair": None if ma is None else {
                    "p_lo": ma[0], "p_hi": ma[1], "rank_key": rank_key_str(rank_key(*ma))},
            },
            "counterexamples": [c.to_dict() for c in self.counterexamples],
            "suppressed": dict(self.suppressed),
            "invariant_violations": dict(self.invariant_violations),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RangeSummary":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise CheckpointError(f"unsupported summary schema {d.get('schema_version')!r}")
        ex = d["extremes"]
        mg, mt, ma = ex["max_gap"], ex["min_theorem1_margin"], ex["max_andrica_pair"]
        return cls(
            config=d["config"],
            config_digest=d["config_digest"],
            pairs_checked=d["pairs_checked"],
            n_checked=d["n_checked"],
            counters={k: (v["holds"], v["fails"]) for k, v in d["counters"].items()},
            divergence_count=d["divergence_count"],
            divisions=d["divisions"],
            max_gap=None if mg is None else (mg["gap"], mg["p_lo"]),
            min_theorem1_margin=None if mt is None else (mt["margin"], mt["p_lo"]),
            max_andrica_pair=None if ma is None else (ma["p_lo"], ma["p_hi"]),
            counterexamples=tuple(Counterexample.from_dict(c) for c in d["counterexamples"]),
            suppressed=dict(d["suppressed"]),
            invariant_violations=dict(d["invariant_violations"]),
        )


def empty_summary(config: ScanConfig) -> RangeSummary:
    ident = config.identity()
    return RangeSummary(ident, _digest(ident), counters={c: (0, 0) for c in ident["checks"]})


def _add_dicts(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return {k: out[k] for k in sorted(out)}


def _better_andrica(a, b):
    if a is None:
        return b
    if b is None:
        return a
    s = compare_sqrt_gaps(a[0], a[1], b[0], b[1])
    if s == 0:
        return min(a, b)
    return a if s > 0 else b


def merge_summaries(a: RangeSummary, b: RangeSummary) -> RangeSummary:
    if a.config_digest != b.config_digest:
        raise UsageError("cannot merge summaries of different scan configurations")
    counters = {}
    for k in sorted(set(a.counters) | set(b.counters)):
        ha, fa = a.counters.get(k, (0, 0))
        hb, fb = b.counters.get(k, (0, 0))
        counters[k] = (ha + hb, fa + fb)

    max_gap = a.max_gap if b.max_gap is None else b.max_gap if a.max_gap is None else \
        min(a.max_gap, b.max_gap, key=lambda t: (-t[0], t[1]))
    min_t1 = a.min_theorem1_margin if b.min_theorem1_margin is None else \
        b.min_theorem1_margin if a.min_theorem1_margin is None else \
        min(a.min_theorem1_margin, b.min_theorem1_margin)

    # keep the smallest `cap` subjects per check; the rest only count
    cap = a.cap
    by_check: dict[str, list] = {}
    for c in a.counterexamples + b.counterexamples:
        by_check.setdefault(c.check, []).append(c)
    kept, overflow = [], {}
    for check, items in by_check.items():
        items.sort(key=lambda c: c.sort_key)
        kept.extend(items[:cap])
        if len(items) > cap:
            overflow[check] = len(items) - cap
    kept.sort(key=lambda c: c.sort_key)
    suppressed = _add_dicts(_add_dicts(a.suppressed, b.suppressed), overflow)

    return RangeSummary(
        config=a.config,
        config_digest=a.config_digest,
        pairs_checked=a.pairs_checked + b.pairs_checked,
        n_checked=a.n_checked + b.n_checked,
        counters=counters,
        divergence_count=a.divergence_count + b.divergence_count,
        divisions=a.divisions + b.divisions,
        max_gap=max_gap,
        min_theorem1_margin=min_t1,
        max_andrica_pair=_better_andrica(a.max_andrica_pair, b.max_andrica_pair),
        counterexamples=tuple(kept),
        suppressed=suppressed,
        invariant_violations=_add_dicts(a.invariant_violations, b.invariant_violations),
    )


# -- shard execution ---------------------------------------------------------


def _details(check: str, p: int, q: int, aux: int) -> dict:
    if check == "parity":
        return {"m_i": aux, "L": largest_multiple(p, aux * aux)}
    if check == "identity":
        return {"m_i": aux, "L": largest_multiple(p, aux * aux), "closed_form": closed_form_L(p, aux)}
    if check == "beyond_midpoint":
        return {"m_i": aux, "L": largest_multiple(p, aux * aux)}
    if check == "chain":
        return {"m_i": aux}
    if check == "lemma1":
        return {"four_ac": 4 * p * q, "sum_squared": (p + q) ** 2}
    if check == "lemma2":
        m = (p + q) // 2
        return {"two_m_minus_1": 2 * m - 1, "three_p_lo": 3 * p, "bertrand_holds": not aux & 2}
    if check == "theorem1":
        return {"margin": 4 * p - (q - p) ** 2}
    if check == "eq14":
        m = (p + q) // 2
        return {"margin": p * (q + 1) - m * m}
    if check == "andrica":
        return {"margin": 4 * p - (q - p - 1) ** 2}
    if check in ("brocard", "legendre"):
        return {"count": aux}
    if check == "oppermann":
        n = p
        return {"lower_count": count_primes_open(n * (n - 1), n * n),
                "upper_count": count_primes_open(n * n, n * (n + 1))}
    return {"aux": aux}


def _summary_from_raw(raw: dict, config: dict, digest: str) -> RangeSummary:
    checks = config["checks"]
    counters = {}
    for code, name in enumerate(ALL_CHECKS):
        if name in checks:
            counters[name] = (raw["holds"][code], raw["fails"][code])

    records, recorded = [], {}
    for code, subject, p_hi, aux in raw["failures"]:
        name = ALL_CHECKS[code]
        records.append(Counterexample(name, subject, p_hi or None, _details(name, subject, p_hi, aux)))
        recorded[name] = recorded.get(name, 0) + 1
    suppressed = {}
    for name, (_, fails) in counters.items():
        extra = fails - recorded.get(name, 0)
        if extra:
            suppressed[name] = extra

    violations = {}
    for code, subject, p_hi, aux in raw["violation_records"]:
        name = "invariant:" + INVARIANTS[code]
        records.append(Counterexample(name, subject, p_hi or None, {"aux": aux}))
        recorded[name] = recorded.get(name, 0) + 1
    for code, n in enumerate(raw["violations"]):
        if n:
            name = "invariant:" + INVARIANTS[code]
            violations[INVARIANTS[code]] = n
            extra = n - recorded.get(name, 0)
            if extra:
                suppressed[name] = extra
            log.error("invariant %s violated %d times; this is a bug", INVARIANTS[code], n)

    min_t1 = raw["min_theorem1"]
    return RangeSummary(
        config=config,
        config_digest=digest,
        pairs_checked=raw["pairs"],
        n_checked=raw["n_subjects"],
        counters=counters,
        divergence_count=raw["divergence"],
        divisions=raw["divisions"],
        max_gap=None if raw["max_gap"] is None else tuple(raw["max_gap"]),
        min_theorem1_margin=None if min_t1 is None else (4 * min_t1[0] - min_t1[1] ** 2, min_t1[0]),
        max_andrica_pair=None if raw["andrica"] is None else tuple(raw["andrica"]),
        counterexamples=tuple(sorted(records, key=lambda c: c.sort_key)),
        suppressed={k: suppressed[k] for k in sorted(suppressed)},
        invariant_violations={k: violations[k] for k in sorted(violations)},
    )


def run_shard(shard: Shard, config: dict, backend: str | None = None) -> RangeSummary:
    """Scan one shard and return its summary."""
    kern = _backend.kernels if backend is None else _backend.load(backend)
    mask = check_mask(config["checks"])
    try:
        if shard.kind == "pairs":
            raw = kern.scan_pairs(shard.lo, shard.hi, mask & _PAIR_MASK, config["counterexample_cap"])
        else:
            raw = kern.scan_squares(shard.lo, shard.hi, mask & _SQUARE_MASK, config["counterexample_cap"])
    except CapacityError as exc:
        raise CapacityError(str(exc), shard=shard.index) from exc
    except OverflowError as exc:
        raise CapacityError(f"value out of 64-bit range: {exc}", shard=shard.index) from exc
    return _summary_from_raw(raw, config, _digest(config))


_PAIR_MASK = check_mask(PAIR_CHECKS)
_SQUARE_MASK = check_mask(SQUARE_CHECKS)


# -- checkpoints -------------------------------------------------------------


@dataclass(frozen=True)
class Checkpoint:
    config_digest: str
    completed_shards: frozenset
    partial_summary: RangeSummary


def checkpoint_save(state: Checkpoint, path) -> None:
    """Write atomically as canonical JSON with a SHA-256 over the payload."""
    payload = {
        "config_digest": state.config_digest,
        "completed_shards": sorted(state.completed_shards),
        "partial_summary": state.partial_summary.to_dict(),
    }
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "sha256": hashlib.sha256(canonical_json(payload)).hexdigest(),
        "payload": payload,
    }
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(canonical_json(doc))
    os.replace(tmp, path)


def checkpoint_load(path) -> Checkpoint:
    try:
        doc = json.loads(Path(path).read_bytes())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"checkpoint {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path} is not a parityscan checkpoint")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"checkpoint version {doc.get('version')!r} is not supported (expected {CHECKPOINT_VERSION})")
    payload = doc.get("payload")
    actual = hashlib.sha256(canonical_json(payload)).hexdigest()
    if actual != doc.get("sha256"):
        raise CheckpointError(
            f"checkpoint {path} failed its integrity check: stored sha256 {doc.get('sha256')}, computed {actual}")
    try:
        summary = RangeSummary.from_dict(payload["partial_summary"])
        return Checkpoint(payload["config_digest"], frozenset(payload["completed_shards"]), summary)
    except (KeyError, TypeError) as exc:
        raise CheckpointError(f"checkpoint {path} is missing field {exc}") from exc


# -- driver ------------------------------------------------------------------


def run_scan(
    config: ScanConfig,
    *,
    resume: bool = False,
    backend: str | None = None,
    on_shard: Callable[[int, int], None] | None = None,
) -> RangeSummary:
    """Run every enabled check over the configured range.

    With ``resume=True`` and an existing checkpoint, shards already recorded
    there are skipped; a checkpoint from a different configuration is
    refused. ``on_shard(index, total)`` is called after each shard is merged
    (and checkpointed).
    """
    config.validate()
    shards = plan_shards(config)
    ident = config.identity()
    digest = _digest(ident)
    summary = empty_summary(config)
    done: set[int] = set()

    ck_path = Path(config.checkpoint_path) if config.checkpoint_path else None
    if resume and ck_path is not None and ck_path.exists():
        ck = checkpoint_load(ck_path)
        if ck.config_digest != digest:
            raise CheckpointMismatch(
                f"checkpoint {ck_path} belongs to config {ck.config_digest[:12]}, not {digest[:12]}")
        summary, done = ck.partial_summary, set(ck.completed_shards)
        log.info("resuming: %d of %d shards already complete", len(done), len(shards))

    pending = [s for s in shards if s.index not in done]

    def commit(shard, part):
        nonlocal summary
        summary = merge_summaries(summary, part)
        done.add(shard.index)
        if ck_path is not None:
            checkpoint_save(Checkpoint(digest, frozenset(done), summary), ck_path)
        if on_shard is not None:
            on_shard(shard.index, len(shards))

    if config.worker_count == 1 or len(pending) <= 1:
        for shard in pending:
            commit(shard, run_shard(shard, ident, backend))
        return summary

    # merge strictly in ascending shard order; results that finish early wait
    ready: dict[int, RangeSummary] = {}
    order = iter(pending)
    nxt = next(order, None)
    pool = ProcessPoolExecutor(max_workers=config.worker_count)
    try:
        futures = {pool.submit(run_shard, s, ident, backend): s for s in pending}
        remaining = set(futures)
        while remaining:
            finished, remaining = wait(remaining, return_when=FIRST_COMPLETED)
            for fut in finished:
                ready[futures[fut].index] = fut.result()
            while nxt is not None and nxt.index in ready:
                commit(nxt, ready.pop(nxt.index))
                nxt = next(order, None)
    finally:
        pool.shutdown(wait=True, cancel_futures=True)
    return summary
