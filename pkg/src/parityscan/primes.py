"""Primes, consecutive odd-prime pairs and open-interval prime counts.

Everything here is backed by a segmented, odd-only sieve of Eratosthenes
(see the kernel modules) plus a deterministic Miller-Rabin test for isolated
point queries.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .backend import kernels
from .errors import CapacityError, UsageError
from .exact import LIMIT, miller_rabin

SEGMENT_SIZE = 1 << 20


@dataclass(frozen=True)
class PrimeWindow:
    """Primality flags for every integer in [lo, hi); ``flags[i]`` is 1 iff lo + i is prime."""

    lo: int
    hi: int
    flags: bytes

    def __contains__(self, n: int) -> bool:
        return self.lo <= n < self.hi and self.flags[n - self.lo] == 1

    def primes(self) -> list[int]:
        return [self.lo + i for i, f in enumerate(self.flags) if f]


@dataclass(frozen=True, order=True)
class PrimePair:
    """Two consecutive odd primes (p_lo, p_hi).

    Construction only checks the cheap structural invariants; use
    :meth:`starting_at` to build a pair from a prime with full validation.
    """

    p_lo: int
    p_hi: int

    def __post_init__(self):
        if self.p_lo < 3 or not (self.p_lo & 1 and self.p_hi & 1) or self.p_hi <= self.p_lo:
            raise UsageError(f"({self.p_lo}, {self.p_hi}) is not a pair of increasing odd primes")

    @property
    def gap(self) -> int:
        return self.p_hi - self.p_lo

    @property
    def midpoint(self) -> int:
        return (self.p_lo + self.p_hi) // 2

    @classmethod
    def starting_at(cls, p: int) -> "PrimePair":
        if p < 3 or not is_prime(p):
            raise UsageError(f"{p} is not an odd prime")
        return cls(p, next_prime(p))


def _check_range(lo: int, hi: int):
    if lo < 0 or lo >= hi:
        raise UsageError(f"empty or negative range [{lo}, {hi})")
    if hi > LIMIT:
        raise CapacityError(f"range end {hi} exceeds LIMIT 2**62")


def sieve_segment(lo: int, hi: int, segment_size: int = SEGMENT_SIZE) -> PrimeWindow:
    _check_range(lo, hi)
    if hi - lo > segment_size:
        raise UsageError(f"window width {hi - lo} exceeds segment size {segment_size}")
    return PrimeWindow(lo, hi, kernels.sieve_flags(lo, hi))


def is_prime(n: int) -> bool:
    if n < 0:
        raise UsageError("is_prime needs n >= 0")
    if n > LIMIT:
        raise CapacityError(f"{n} exceeds LIMIT 2**62")
    return miller_rabin(n)


def next_prime(n: int) -> int:
    return kernels.next_prime(n)


def prev_prime(n: int) -> int:
    """Largest prime below n, or 0 when n <= 2."""
    return kernels.prev_prime(n)


def iterate_pairs(lo: int, hi: int, chunk: int = 1 << 21) -> Iterator[PrimePair]:
    """Every odd pair with p_lo in [lo, hi), ascending.

    The last pair's p_hi is found past ``hi`` when needed. Pairs whose
    p_lo is below ``lo`` belong to the previous range and are never yielded.
    """
    if lo < 3:
        raise UsageError("pair enumeration starts at 3; (2, 3) is not an odd pair")
    _check_range(lo, hi)
    prev = 0
    start = lo
    while start < hi:
        end = min(hi, start + chunk)
        for q in kernels.primes_between(start, end):
            if prev:
                yield PrimePair(prev, q)
            prev = q
        start = end
    if prev:
        yield PrimePair(prev, next_prime(prev))


def count_primes_open(a: int, b: int) -> int:
    """|{q prime : a < q < b}|."""
    if a > b:
        raise UsageError(f"count_primes_open needs a <= b, got ({a}, {b})")
    if b > LIMIT:
        raise CapacityError(f"interval end {b} exceeds LIMIT 2**62")
    if b - a < 2:
        return 0
    return kernels.count_primes(max(a + 1, 0), b)
