"""Exact integer helpers used by both kernel backends and the reports.

Nothing here touches floating point.
"""
from __future__ import annotations

from math import isqrt

LIMIT = 1 << 62
# Andrica rank keys are sqrt values scaled by 2**RANK_SHIFT.
RANK_SHIFT = 32
RANK_SCALE = 1 << RANK_SHIFT


def check_limit(n: int, what: str = "value") -> int:
    from .errors import CapacityError

    if n > LIMIT:
        raise CapacityError(f"{what} {n} exceeds LIMIT 2**62")
    return n


def rank_key(p_lo: int, p_hi: int) -> int:
    """floor(sqrt(p_hi) * 2**32) - floor(sqrt(p_lo) * 2**32).

    Each floor loses less than one unit, so the key is within one unit
    (2**-32) of the true scaled difference.
    """
    return isqrt(p_hi << (2 * RANK_SHIFT)) - isqrt(p_lo << (2 * RANK_SHIFT))


def rank_key_str(key: int) -> str:
    return f"{key}/{RANK_SCALE}"


def _cmp_sqrt_minus_sqrt_vs(x: int, y: int, d: int) -> int:
    """Sign of sqrt(x) - sqrt(y) - d, for x, y >= 0 and integer d."""
    if d >= 0:
        # sqrt(x) vs d + sqrt(y); both sides non-negative
        e = x - d * d - y
        if e < 0:
            return -1
        lhs, rhs = e * e, 4 * d * d * y
    else:
        # sqrt(x) + |d| vs sqrt(y)
        f = y - x - d * d
        if f < 0:
            return 1
        lhs, rhs = 4 * d * d * x, f * f
    return (lhs > rhs) - (lhs < rhs)


def compare_sqrt_gaps(a_lo: int, a_hi: int, b_lo: int, b_hi: int) -> int:
    """Sign of (sqrt(a_hi) - sqrt(a_lo)) - (sqrt(b_hi) - sqrt(b_lo)), exactly.

    Rearranged to sqrt(a_hi) + sqrt(b_lo) versus sqrt(b_hi) + sqrt(a_lo) and
    squared twice, with the sign cases handled explicitly.
    """
    u, v = a_hi, b_lo
    s, t = b_hi, a_lo
    # u + v + 2 sqrt(uv)  vs  s + t + 2 sqrt(st)
    d = (s + t) - (u + v)
    return _cmp_sqrt_minus_sqrt_vs(4 * u * v, 4 * s * t, d)


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def miller_rabin(n: int) -> bool:
    """Deterministic for n < 3.3e24 with the first twelve prime bases."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while not d & 1:
        d >>= 1
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True
