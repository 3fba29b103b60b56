"""Pure-Python kernels.

Produces exactly the same raw results as the compiled ``_kernels`` module
and is used whenever that extension is unavailable (or when
``PARITYSCAN_BACKEND=python``). Sieving uses bytearray slice assignment,
so it stays usable up to ~10**7; the per-pair loops are plain Python.
"""
from __future__ import annotations

from itertools import compress
from math import isqrt

from .codes import ALL_CHECKS, CHECK_CODE, INVARIANT_CODE, INVARIANTS
from .errors import CapacityError
from .exact import LIMIT, compare_sqrt_gaps, miller_rabin, rank_key

NAME = "python"
SEGMENT = 1 << 20  # odd entries per sieve segment
# above this many base-prime candidates, windows are filled by Miller-Rabin
BASE_MAX = 1 << 26

_C = CHECK_CODE
_V = INVARIANT_CODE


def base_primes(limit: int) -> list[int]:
    """Odd primes <= limit."""
    if limit < 3:
        return []
    size = (limit + 1) // 2  # index i <-> 2i + 1
    flags = bytearray(b"\x01") * size
    flags[0] = 0
    for i in range(1, (isqrt(limit) + 1) // 2 + 1):
        if flags[i]:
            p = 2 * i + 1
            start = p * p // 2
            if start < size:
                flags[start::p] = bytes((size - 1 - start) // p + 1)
    return [2 * i + 1 for i in compress(range(size), flags)]


def _base(limit: int):
    """Base primes for a window, or None when Miller-Rabin should fill it."""
    if limit > BASE_MAX:
        return None
    return base_primes(limit)


def _sieve_odd(start: int, n: int, base) -> bytearray:
    # seg[j] <-> start + 2j, start odd
    if base is None:
        return bytearray(miller_rabin(start + 2 * j) for j in range(n))
    seg = bytearray(b"\x01") * n
    end = start + 2 * n
    for p in base:
        pp = p * p
        if pp >= end:
            break
        if pp >= start:
            s = pp
        else:
            s = -(-start // p) * p
            if not s & 1:
                s += p
        j = (s - start) >> 1
        if j < n:
            seg[j::p] = bytes((n - 1 - j) // p + 1)
    if start == 1:
        seg[0] = 0
    return seg


def _segments(lo: int, hi: int, base):
    start = max(lo, 3) | 1
    while start < hi:
        n = min(SEGMENT, (hi - start + 1) // 2)
        yield start, n, _sieve_odd(start, n, base)
        start += 2 * n


def _primes_in(lo: int, hi: int, base):
    if lo <= 2 < hi:
        yield 2
    for start, n, seg in _segments(lo, hi, base):
        yield from compress(range(start, start + 2 * n, 2), seg)


def _count(lo: int, hi: int, base) -> int:
    c = 1 if lo <= 2 < hi else 0
    for _, _, seg in _segments(lo, hi, base):
        c += seg.count(1)
    return c


def is_prime(n: int) -> bool:
    return miller_rabin(n)


def next_prime(n: int) -> int:
    if n < 2:
        return 2
    q = n + 1 if n % 2 == 0 else n + 2
    while not miller_rabin(q):
        q += 2
    return q


def prev_prime(n: int) -> int:
    """Largest prime < n, or 0 if there is none."""
    if n <= 2:
        return 0
    if n == 3:
        return 2
    q = n - 1 if n % 2 == 0 else n - 2
    while q > 2 and not miller_rabin(q):
        q -= 2
    return q


def sieve_flags(lo: int, hi: int) -> bytes:
    out = bytearray(hi - lo)
    for q in _primes_in(lo, hi, _base(isqrt(max(hi - 1, 0)) + 1)):
        out[q - lo] = 1
    return bytes(out)


def primes_between(lo: int, hi: int) -> list[int]:
    return list(_primes_in(lo, hi, _base(isqrt(max(hi - 1, 0)) + 1)))


def count_primes(lo: int, hi: int) -> int:
    """Number of primes in [lo, hi)."""
    if hi <= lo:
        return 0
    return _count(lo, hi, _base(isqrt(hi - 1) + 1))


class _Recorder:
    def __init__(self, cap):
        self.cap = cap
        self.failures = []
        self.violation_records = []
        self._fcount = [0] * len(ALL_CHECKS)
        self._vcount = [0] * len(INVARIANTS)
        self.violations = self._vcount

    def fail(self, code, subject, p_hi, aux):
        if self._fcount[code] < self.cap:
            self.failures.append((code, subject, p_hi, aux))
        self._fcount[code] += 1

    def violate(self, code, subject, p_hi, aux):
        if self._vcount[code] < self.cap:
            self.violation_records.append((code, subject, p_hi, aux))
        self._vcount[code] += 1


def scan_pairs(lo: int, hi: int, mask: int, cap: int) -> dict:
    """Evaluate the enabled pair checks on every odd pair with p_lo in [lo, hi)."""
    on = [bool(mask >> i & 1) for i in range(len(ALL_CHECKS))]
    want_parity = on[_C["parity"]] or on[_C["identity"]]
    want_t1 = on[_C["theorem1"]] or on[_C["andrica"]]
    rec = _Recorder(cap)
    holds = [0] * len(ALL_CHECKS)
    fails = [0] * len(ALL_CHECKS)
    pairs = divisions = divergence = 0
    max_gap = None
    min_t1 = None  # (margin, p, gap)
    best = None  # (key, p, q)
    base = _base(isqrt(max(hi - 1, 0)) + 1)
    brocard_base = base
    brocard_limit = isqrt(max(hi - 1, 0)) + 1

    def tally(name, ok, p, q, aux):
        code = _C[name]
        if ok:
            holds[code] += 1
        else:
            fails[code] += 1
            rec.fail(code, p, q, aux)

    def visit(p, q):
        nonlocal pairs, divisions, divergence, max_gap, min_t1, best
        nonlocal brocard_base, brocard_limit
        pairs += 1
        g = q - p
        half = g >> 1
        m = p + half
        if max_gap is None or g > max_gap[0]:
            max_gap = (g, p)
        if want_parity:
            first_even = first_bad = 0
            for k in range(1, half + 1):
                mi = p + k
                qt = mi * mi // p
                divisions += 1
                odd = qt & 1
                ident = qt == mi + k
                if not odd and not first_even:
                    first_even = mi
                if not ident and not first_bad:
                    first_bad = mi
                if ident and not odd:
                    rec.violate(_V["identity_implies_parity"], p, q, mi)
                if ident != (k * k < p):
                    rec.violate(_V["identity_offset"], p, q, mi)
            if on[_C["parity"]]:
                tally("parity", not first_even, p, q, first_even)
            if on[_C["identity"]]:
                tally("identity", not first_bad, p, q, first_bad)
            if (not first_even) != (not first_bad):
                divergence += 1
        if on[_C["lemma1"]]:
            tally("lemma1", 4 * p * q < (p + q) ** 2, p, q, 0)
        if on[_C["lemma2"]]:
            aux = (0 if 2 * m - 1 < 3 * p else 1) | (0 if q < 2 * p else 2)
            tally("lemma2", not aux, p, q, aux)
        if on[_C["chain"]]:
            first = 0
            for k in range(1, half):
                mi = p + k
                ok = mi * mi < p * (mi + k + 1) < p * (mi + k + 2) < (mi + 1) ** 2
                if ok != (k * k < p):
                    rec.violate(_V["chain_equivalence"], p, q, mi)
                if not ok and not first:
                    first = mi
            tally("chain", not first, p, q, first)
        if want_t1:
            t1 = 4 * p - g * g
            if t1 == 0:
                rec.violate(_V["theorem1_nonzero"], p, q, 0)
            if on[_C["theorem1"]]:
                tally("theorem1", t1 > 0, p, q, 0)
                if min_t1 is None or t1 < min_t1[0]:
                    min_t1 = (t1, p, g)
        if on[_C["eq14"]]:
            tally("eq14", p * (q + 1) - m * m > 0, p, q, 0)
        if on[_C["andrica"]]:
            am = 4 * p - (g - 1) ** 2
            if am == 0:
                rec.violate(_V["andrica_strict"], p, q, 0)
            if t1 > 0 and am <= 0:
                rec.violate(_V["theorem1_implies_andrica"], p, q, 0)
            tally("andrica", am > 0, p, q, 0)
            key = rank_key(p, q)
            if best is None or key > best[0] + 2:
                best = (key, p, q)
            elif key + 2 >= best[0] and compare_sqrt_gaps(p, q, best[1], best[2]) > 0:
                best = (key, p, q)
        if on[_C["brocard"]]:
            if q * q > LIMIT:
                raise CapacityError(f"brocard window ({p}^2, {q}^2) exceeds LIMIT")
            if brocard_base is not None and brocard_limit < q:
                brocard_limit = 2 * q
                brocard_base = _base(brocard_limit)
            c = _count(p * p + 1, q * q, brocard_base)
            tally("brocard", c >= 4, p, q, c)
        if on[_C["beyond_midpoint"]]:
            first = 0
            for k in range(half + 1, g):
                mi = p + k
                qt = mi * mi // p
                divisions += 1
                if not qt & 1:
                    first = mi
                    break
            tally("beyond_midpoint", not first, p, q, first)

    prev = 0
    for q in _primes_in(max(lo, 3), hi, base):
        if prev:
            visit(prev, q)
        prev = q
    if prev:
        visit(prev, next_prime(prev))

    return {
        "pairs": pairs,
        "n_subjects": 0,
        "holds": holds,
        "fails": fails,
        "divergence": divergence,
        "divisions": divisions,
        "max_gap": max_gap,
        "min_theorem1": None if min_t1 is None else (min_t1[1], min_t1[2]),
        "andrica": None if best is None else (best[1], best[2]),
        "failures": rec.failures,
        "violations": rec.violations,
        "violation_records": rec.violation_records,
    }


def scan_squares(n_lo: int, n_hi: int, mask: int, cap: int) -> dict:
    """Evaluate legendre/oppermann for every N in [n_lo, n_hi)."""
    legendre = bool(mask >> _C["legendre"] & 1)
    oppermann = bool(mask >> _C["oppermann"] & 1)
    rec = _Recorder(cap)
    holds = [0] * len(ALL_CHECKS)
    fails = [0] * len(ALL_CHECKS)
    subjects = 0
    base = _base(n_hi + 2)
    for n in range(max(n_lo, 1), n_hi):
        subjects += 1
        sq = n * n
        if legendre:
            c = _count(sq + 1, (n + 1) ** 2, base)
            code = _C["legendre"]
            if c >= 1:
                holds[code] += 1
            else:
                fails[code] += 1
                rec.fail(code, n, 0, c)
            p = prev_prime(sq)
            if p and (sq - p) ** 2 < 4 * p and c == 0:
                rec.violate(_V["legendre_local"], n, 0, p)
        if oppermann and n >= 2:
            lower = _count(n * (n - 1) + 1, sq, base)
            upper = _count(sq + 1, n * (n + 1), base)
            code = _C["oppermann"]
            if lower >= 1 and upper >= 1:
                holds[code] += 1
            else:
                fails[code] += 1
                rec.fail(code, n, 0, min(lower, upper))
    return {
        "pairs": 0,
        "n_subjects": subjects,
        "holds": holds,
        "fails": fails,
        "divergence": 0,
        "divisions": 0,
        "max_gap": None,
        "min_theorem1": None,
        "andrica": None,
        "failures": rec.failures,
        "violations": rec.violations,
        "violation_records": rec.violation_records,
    }
