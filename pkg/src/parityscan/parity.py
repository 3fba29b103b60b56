"""Per-pair predicates around L(p, x), the largest multiple of p not exceeding x.

All arithmetic is on Python integers, so nothing here can overflow or round.
These functions are the reference ("brute") path; the scan kernels use the
quotient shortcut and are checked against this module in the tests.

Two facts drive the whole module. Write m_i = p + k. Then
floor(m_i**2 / p) = p + 2k + floor(k**2 / p), so

* L(p, m_i**2) is odd  iff  floor(k**2 / p) is even, and
* L(p, m_i**2) == p * (2 m_i - p)  iff  k**2 < p.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

from .errors import DomainError
from .exact import LIMIT, check_limit
from .primes import PrimePair

log = logging.getLogger(__name__)
_warned_degenerate = False


@dataclass(frozen=True)
class ParityVerdict:
    pair: PrimePair
    parity_holds: bool
    first_even_mi: int | None
    identity_holds: bool
    first_identity_violation_mi: int | None

    @property
    def divergent(self) -> bool:
        return self.parity_holds != self.identity_holds


@dataclass(frozen=True)
class GapVerdict:
    pair: PrimePair
    theorem1_margin: int
    eq14_margin: int

    @property
    def theorem1_holds(self) -> bool:
        return self.theorem1_margin > 0

    @property
    def eq14_holds(self) -> bool:
        return self.eq14_margin > 0


@dataclass(frozen=True)
class Lemma2Verdict:
    midpoint_bound_holds: bool  # 2m - 1 < 3 p_lo
    bertrand_holds: bool  # p_hi < 2 p_lo

    @property
    def holds(self) -> bool:
        return self.midpoint_bound_holds and self.bertrand_holds

    def __bool__(self):
        return self.holds


def largest_multiple(p: int, x: int) -> int:
    if p < 3:
        raise DomainError(f"p must be an odd prime >= 3, got {p}")
    if x < p:
        raise DomainError(f"no positive multiple of {p} is <= {x}")
    return p * (x // p)


def closed_form_L(p: int, m_i: int) -> int:
    """p * (2 m_i - p): the value L(p, m_i**2) takes when (m_i - p)**2 < p."""
    if m_i <= p:
        raise DomainError(f"m_i={m_i} must exceed p={p}")
    return p * (2 * m_i - p)


def quotient_parity(p: int, m_i: int) -> tuple[bool, bool]:
    """Fast path: one division gives (L odd, L equals the closed form).

    With p odd, L = p * q has the parity of q = floor(m_i**2 / p).
    """
    q = m_i * m_i // p
    return bool(q & 1), q == 2 * m_i - p


def parity_scan_pair(pair: PrimePair) -> ParityVerdict:
    """Check oddness of L and the closed form for every m_i in (p_lo, midpoint]."""
    p = pair.p_lo
    first_even = first_bad = None
    for m_i in range(p + 1, pair.midpoint + 1):
        L = largest_multiple(p, m_i * m_i)
        if L % 2 == 0 and first_even is None:
            first_even = m_i
        if L != closed_form_L(p, m_i) and first_bad is None:
            first_bad = m_i
    return ParityVerdict(pair, first_even is None, first_even, first_bad is None, first_bad)


def beyond_midpoint_probe(pair: PrimePair, m_i: int) -> int:
    """Parity (1 odd, 0 even) of L(p_lo, m_i**2) for midpoint < m_i < p_hi."""
    if not pair.midpoint < m_i < pair.p_hi:
        raise DomainError(
            f"m_i={m_i} is outside ({pair.midpoint}, {pair.p_hi}) for pair {pair.p_lo, pair.p_hi}"
        )
    return largest_multiple(pair.p_lo, m_i * m_i) % 2


def lemma1_check(a: int, c: int) -> bool:
    """4ac < (a + c)**2, i.e. a*c is below the square of their midpoint.

    False exactly when a == c; the half-integral midpoint case is covered by
    working with 2*midpoint.
    """
    global _warned_degenerate
    if a < 1 or c < 1:
        raise DomainError("lemma1_check needs positive integers")
    if a == c and not _warned_degenerate:
        _warned_degenerate = True
        log.info("lemma1_check(%d, %d): a == c gives ac == midpoint**2, reported false", a, c)
    return 4 * a * c < (a + c) ** 2


def lemma2_check(pair: PrimePair) -> Lemma2Verdict:
    m = pair.midpoint
    return Lemma2Verdict(2 * m - 1 < 3 * pair.p_lo, pair.p_hi < 2 * pair.p_lo)


def base_case_L(p: int) -> int:
    """p * (p + 2), the largest multiple of p not exceeding (p + 1)**2."""
    if p < 3:
        raise DomainError(f"p must be an odd prime >= 3, got {p}")
    v = p * (p + 2)
    assert p * p < v < (p + 1) ** 2
    assert v == largest_multiple(p, (p + 1) ** 2)
    return v


def chain_check(p: int, m_i: int) -> bool:
    """m_i**2 < p(2m_i - p) + p < p(2(m_i + 1) - p) < (m_i + 1)**2.

    Expanding, the first link is (m_i - p)**2 < p, the middle link is always
    true and the last is (m_i + 1 - p)**2 > 0; so the chain holds exactly
    when (m_i - p)**2 < p.
    """
    if m_i <= p:
        raise DomainError(f"m_i={m_i} must exceed p={p}")
    a = m_i * m_i
    b = p * (2 * m_i - p) + p
    c = p * (2 * (m_i + 1) - p)
    d = (m_i + 1) ** 2
    ok = a < b < c < d
    assert ok == ((m_i - p) ** 2 < p)
    return ok


def gap_bound_check(pair: PrimePair) -> GapVerdict:
    """Exact margins for gap < 2 sqrt(p_lo) and midpoint**2 < p_lo (p_hi + 1)."""
    p, q, m = pair.p_lo, pair.p_hi, pair.midpoint
    check_limit(q, "p_hi")
    t1 = 4 * p - pair.gap ** 2
    # 4p == gap**2 would make the prime p a perfect square
    assert t1 != 0
    return GapVerdict(pair, t1, p * (q + 1) - m * m)


def eq14_check(pair: PrimePair) -> bool:
    return gap_bound_check(pair).eq14_holds


__all__ = [
    "LIMIT",
    "GapVerdict",
    "Lemma2Verdict",
    "ParityVerdict",
    "base_case_L",
    "beyond_midpoint_probe",
    "chain_check",
    "closed_form_L",
    "eq14_check",
    "gap_bound_check",
    "largest_multiple",
    "lemma1_check",
    "lemma2_check",
    "parity_scan_pair",
    "quotient_parity",
]
