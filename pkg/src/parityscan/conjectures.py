"""Legendre, Andrica, Brocard and Oppermann as exact interval predicates.

Brocard and Oppermann are evaluated for context only; nothing in this
package derives them from the parity property.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import CapacityError, UsageError
from .exact import LIMIT, compare_sqrt_gaps, rank_key
from .primes import PrimePair, count_primes_open

Subject = Union[PrimePair, int]


@dataclass(frozen=True)
class IntervalVerdict:
    kind: str
    subject: Subject
    holds: bool
    witness_count: int | None = None
    margin: int | None = None
    counts: tuple[int, ...] = field(default=())


def legendre_check(N: int) -> IntervalVerdict:
    if N < 1:
        raise UsageError("legendre_check needs N >= 1")
    if (N + 1) ** 2 > LIMIT:
        raise CapacityError(f"(N+1)^2 for N={N} exceeds LIMIT")
    c = count_primes_open(N * N, (N + 1) ** 2)
    return IntervalVerdict("legendre", N, c >= 1, c)


def andrica_check(pair: PrimePair) -> IntervalVerdict:
    """sqrt(p_hi) - sqrt(p_lo) < 1, decided as (gap - 1)**2 < 4 p_lo."""
    margin = 4 * pair.p_lo - (pair.gap - 1) ** 2
    # equality would need 4 p_lo to be a perfect square
    assert margin != 0
    return IntervalVerdict("andrica", pair, margin > 0, margin=margin)


def brocard_check(pair: PrimePair) -> IntervalVerdict:
    if pair.p_hi ** 2 > LIMIT:
        raise CapacityError(f"p_hi^2 for {pair} exceeds LIMIT")
    c = count_primes_open(pair.p_lo ** 2, pair.p_hi ** 2)
    return IntervalVerdict("brocard", pair, c >= 4, c)


def oppermann_check(N: int) -> IntervalVerdict:
    if N < 2:
        raise UsageError("oppermann_check needs N >= 2")
    if N * (N + 1) > LIMIT:
        raise CapacityError(f"N(N+1) for N={N} exceeds LIMIT")
    lower = count_primes_open(N * (N - 1), N * N)
    upper = count_primes_open(N * N, N * (N + 1))
    return IntervalVerdict(
        "oppermann", N, lower >= 1 and upper >= 1, min(lower, upper), counts=(lower, upper)
    )


def andrica_rank_key(pair: PrimePair) -> int:
    """(sqrt(p_hi) - sqrt(p_lo)) scaled by 2**32, error below one unit.

    For ranking only; keys closer than two units must be settled with
    :func:`compare_andrica`.
    """
    return rank_key(pair.p_lo, pair.p_hi)


def compare_andrica(a: PrimePair, b: PrimePair) -> int:
    """Exact sign of (sqrt(a.p_hi) - sqrt(a.p_lo)) - (sqrt(b.p_hi) - sqrt(b.p_lo))."""
    return compare_sqrt_gaps(a.p_lo, a.p_hi, b.p_lo, b.p_hi)
