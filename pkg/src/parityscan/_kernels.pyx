# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: odd-only segmented sieve and the per-pair predicate loop.

Mirrors ``_pykernels`` result for result. Squares and products are formed in
128-bit registers; the parity loop uses a 64-bit division while m_i < 2**32.
"""
from libc.stdlib cimport malloc, free
from libc.string cimport memset
from libc.math cimport sqrtl
from libcpp.vector cimport vector

from .codes import ALL_CHECKS, CHECK_CODE, INVARIANT_CODE, INVARIANTS
from .errors import CapacityError
from .exact import compare_sqrt_gaps

ctypedef unsigned long long u64
ctypedef unsigned char u8

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"
    ctypedef long long i128 "__int128"

NAME = "compiled"
SEGMENT = 1 << 20

cdef u64 SEG = 1 << 20
# above this many base-prime candidates, windows are filled by Miller-Rabin
cdef u64 BASE_MAX = 1 << 26
cdef u64 LIMIT = 1ULL << 62
cdef u64 TWO32 = 1ULL << 32

cdef int NCHECK = len(ALL_CHECKS)
cdef int NINV = len(INVARIANTS)

cdef int C_PARITY = CHECK_CODE["parity"]
cdef int C_IDENTITY = CHECK_CODE["identity"]
cdef int C_LEMMA1 = CHECK_CODE["lemma1"]
cdef int C_LEMMA2 = CHECK_CODE["lemma2"]
cdef int C_CHAIN = CHECK_CODE["chain"]
cdef int C_THEOREM1 = CHECK_CODE["theorem1"]
cdef int C_EQ14 = CHECK_CODE["eq14"]
cdef int C_ANDRICA = CHECK_CODE["andrica"]
cdef int C_BROCARD = CHECK_CODE["brocard"]
cdef int C_BEYOND = CHECK_CODE["beyond_midpoint"]
cdef int C_LEGENDRE = CHECK_CODE["legendre"]
cdef int C_OPPERMANN = CHECK_CODE["oppermann"]

cdef int V_IDENT_PARITY = INVARIANT_CODE["identity_implies_parity"]
cdef int V_IDENT_OFFSET = INVARIANT_CODE["identity_offset"]
cdef int V_CHAIN = INVARIANT_CODE["chain_equivalence"]
cdef int V_T1_ZERO = INVARIANT_CODE["theorem1_nonzero"]
cdef int V_ANDRICA_EQ = INVARIANT_CODE["andrica_strict"]
cdef int V_T1_ANDRICA = INVARIANT_CODE["theorem1_implies_andrica"]
cdef int V_LEGENDRE = INVARIANT_CODE["legendre_local"]


# -- integer primitives ---------------------------------------------------

cdef inline u64 mulmod(u64 a, u64 b, u64 m) nogil:
    return <u64>((<u128>a * b) % m)


cdef u64 powmod(u64 a, u64 e, u64 m) nogil:
    cdef u64 r = 1
    a %= m
    while e:
        if e & 1:
            r = mulmod(r, a, m)
        a = mulmod(a, a, m)
        e >>= 1
    return r


cdef u64[12] MR_BASES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]


cdef bint is_prime_u64(u64 n) nogil:
    cdef int i, r, s = 0
    cdef u64 d, x, a
    if n < 2:
        return False
    for i in range(12):
        if n % MR_BASES[i] == 0:
            return n == MR_BASES[i]
    d = n - 1
    while not (d & 1):
        d >>= 1
        s += 1
    for i in range(12):
        x = powmod(MR_BASES[i], d, n)
        if x == 1 or x == n - 1:
            continue
        for r in range(s - 1):
            x = mulmod(x, x, n)
            if x == n - 1:
                break
        else:
            return False
    return True


cdef u64 isqrt_u128(u128 n) nogil:
    # long double guess (64-bit mantissa on x86-64), then exact correction
    cdef u64 r = <u64>sqrtl(<long double>n)
    while <u128>r * r > n:
        r -= 1
    while (<u128>(r + 1)) * (r + 1) <= n:
        r += 1
    return r


cdef u64 isqrt_u64(u64 n) nogil:
    return isqrt_u128(<u128>n)


cdef vector[u64] odd_base_primes(u64 limit):
    cdef vector[u64] out
    cdef u64 size, i, j, p
    cdef u8* flags
    if limit < 3:
        return out
    size = (limit + 1) // 2
    flags = <u8*>malloc(size)
    if flags == NULL:
        raise MemoryError()
    memset(flags, 1, size)
    flags[0] = 0
    i = 1
    while (2 * i + 1) * (2 * i + 1) <= limit:
        if flags[i]:
            p = 2 * i + 1
            j = p * p // 2
            while j < size:
                flags[j] = 0
                j += p
        i += 1
    for i in range(1, size):
        if flags[i]:
            out.push_back(2 * i + 1)
    free(flags)
    return out


cdef void sieve_odd(u64 start, u64 n, u8* seg, vector[u64]& base) nogil:
    # seg[j] <-> start + 2j, start odd
    cdef u64 end = start + 2 * n
    cdef u64 p, pp, s, j
    cdef size_t i
    memset(seg, 1, n)
    for i in range(base.size()):
        p = base[i]
        pp = p * p
        if pp >= end:
            break
        if pp >= start:
            s = pp
        else:
            s = ((start + p - 1) // p) * p
            if not (s & 1):
                s += p
        j = (s - start) >> 1
        while j < n:
            seg[j] = 0
            j += p
    if start == 1:
        seg[0] = 0


cdef class _Sieve:
    """Base primes plus a reusable segment buffer.

    When the base would exceed BASE_MAX the window is filled by testing each
    odd candidate with Miller-Rabin instead.
    """
    cdef vector[u64] base
    cdef u64 limit
    cdef bint mr
    cdef u8* seg

    def __cinit__(self, u64 limit):
        self.seg = <u8*>malloc(SEG)
        if self.seg == NULL:
            raise MemoryError()
        self.limit = 0
        self.mr = False
        self.ensure(limit)

    def __dealloc__(self):
        free(self.seg)

    cdef void ensure(self, u64 limit):
        if limit <= self.limit or self.mr:
            return
        if limit > BASE_MAX:
            self.mr = True
            self.base.clear()
            return
        self.limit = 2 * limit if 2 * limit <= BASE_MAX else BASE_MAX
        self.base = odd_base_primes(self.limit)

    cdef void fill(self, u64 start, u64 n, u8* buf):
        cdef u64 j
        if self.mr:
            for j in range(n):
                buf[j] = is_prime_u64(start + 2 * j)
        else:
            sieve_odd(start, n, buf, self.base)

    cdef u64 count(self, u64 lo, u64 hi):
        """Primes in [lo, hi); base must reach isqrt(hi - 1)."""
        cdef u64 c = 0, start, n, j
        if hi <= lo:
            return 0
        if lo <= 2 < hi:
            c = 1
        start = (lo if lo > 3 else 3) | 1
        while start < hi:
            n = (hi - start + 1) // 2
            if n > SEG:
                n = SEG
            self.fill(start, n, self.seg)
            for j in range(n):
                c += self.seg[j]
            start += 2 * n
        return c


# -- point and window queries ---------------------------------------------

def is_prime(u64 n):
    return is_prime_u64(n)


def next_prime(u64 n):
    cdef u64 q
    if n < 2:
        return 2
    q = n + 1 if n % 2 == 0 else n + 2
    while not is_prime_u64(q):
        q += 2
    return q


cdef u64 prev_prime_u64(u64 n) nogil:
    cdef u64 q
    if n <= 2:
        return 0
    if n == 3:
        return 2
    q = n - 1 if n % 2 == 0 else n - 2
    while q > 2 and not is_prime_u64(q):
        q -= 2
    return q


def prev_prime(u64 n):
    """Largest prime < n, or 0 if there is none."""
    return prev_prime_u64(n)


def sieve_flags(u64 lo, u64 hi):
    cdef bytearray out = bytearray(hi - lo)
    cdef u8* o = out
    cdef _Sieve sv = _Sieve(isqrt_u64(hi - 1 if hi else 0) + 1)
    cdef u64 start, n, j
    if lo <= 2 < hi:
        o[2 - lo] = 1
    start = (lo if lo > 3 else 3) | 1
    while start < hi:
        n = (hi - start + 1) // 2
        if n > SEG:
            n = SEG
        sv.fill(start, n, sv.seg)
        for j in range(n):
            o[start + 2 * j - lo] = sv.seg[j]
        start += 2 * n
    return bytes(out)


def primes_between(u64 lo, u64 hi):
    cdef list out = []
    cdef _Sieve sv
    cdef u64 start, n, j
    if hi <= lo:
        return out
    sv = _Sieve(isqrt_u64(hi - 1) + 1)
    if lo <= 2 < hi:
        out.append(2)
    start = (lo if lo > 3 else 3) | 1
    while start < hi:
        n = (hi - start + 1) // 2
        if n > SEG:
            n = SEG
        sv.fill(start, n, sv.seg)
        for j in range(n):
            if sv.seg[j]:
                out.append(start + 2 * j)
        start += 2 * n
    return out


def count_primes(u64 lo, u64 hi):
    """Number of primes in [lo, hi)."""
    if hi <= lo:
        return 0
    cdef _Sieve sv = _Sieve(isqrt_u64(hi - 1) + 1)
    return sv.count(lo, hi)


# -- scanners --------------------------------------------------------------

cdef class _Scan:
    cdef u64 cap
    cdef bint on[16]
    cdef u64 holds[16]
    cdef u64 fails[16]
    cdef u64 viol[16]
    cdef list failures
    cdef list vrecords
    cdef u64 pairs, subjects, divisions, divergence
    cdef u64 max_gap, max_gap_p
    cdef bint have_t1
    cdef i128 min_t1
    cdef u64 min_t1_p, min_t1_g
    cdef bint have_best
    cdef u64 best_key, best_p, best_q
    cdef _Sieve sv
    cdef object cmp

    def __cinit__(self, u64 mask, u64 cap, u64 sieve_limit):
        cdef int i
        self.cap = cap
        for i in range(16):
            self.on[i] = (mask >> i) & 1
            self.holds[i] = 0
            self.fails[i] = 0
            self.viol[i] = 0
        self.failures = []
        self.vrecords = []
        self.pairs = self.subjects = self.divisions = self.divergence = 0
        self.max_gap = self.max_gap_p = 0
        self.have_t1 = False
        self.have_best = False
        self.sv = _Sieve(sieve_limit)
        self.cmp = compare_sqrt_gaps

    cdef void tally(self, int code, bint ok, u64 subject, u64 p_hi, u64 aux):
        if ok:
            self.holds[code] += 1
        else:
            if self.fails[code] < self.cap:
                self.failures.append((code, subject, p_hi, aux))
            self.fails[code] += 1

    cdef void violate(self, int code, u64 subject, u64 p_hi, u64 aux):
        if self.viol[code] < self.cap:
            self.vrecords.append((code, subject, p_hi, aux))
        self.viol[code] += 1

    cdef void visit(self, u64 p, u64 q) except *:
        cdef u64 g = q - p
        cdef u64 half = g >> 1
        cdef u64 m = p + half
        cdef u64 k, mi, qt, first_even, first_bad, first, aux, key, c
        cdef bint odd, ident, ok
        cdef u128 a, b, cc, d
        cdef i128 t1 = 0, am
        self.pairs += 1
        if g > self.max_gap:
            self.max_gap = g
            self.max_gap_p = p
        if self.on[C_PARITY] or self.on[C_IDENTITY]:
            first_even = first_bad = 0
            for k in range(1, half + 1):
                mi = p + k
                if mi < TWO32:
                    qt = (mi * mi) // p
                else:
                    qt = <u64>((<u128>mi * mi) // p)
                self.divisions += 1
                odd = qt & 1
                ident = qt == mi + k
                if not odd and not first_even:
                    first_even = mi
                if not ident and not first_bad:
                    first_bad = mi
                if ident and not odd:
                    self.violate(V_IDENT_PARITY, p, q, mi)
                if ident != ((<u128>k * k) < p):
                    self.violate(V_IDENT_OFFSET, p, q, mi)
            if self.on[C_PARITY]:
                self.tally(C_PARITY, first_even == 0, p, q, first_even)
            if self.on[C_IDENTITY]:
                self.tally(C_IDENTITY, first_bad == 0, p, q, first_bad)
            if (first_even == 0) != (first_bad == 0):
                self.divergence += 1
        if self.on[C_LEMMA1]:
            self.tally(C_LEMMA1, 4 * (<u128>p) * q < (<u128>(p + q)) * (p + q), p, q, 0)
        if self.on[C_LEMMA2]:
            aux = (0 if 2 * m - 1 < 3 * p else 1) | (0 if q < 2 * p else 2)
            self.tally(C_LEMMA2, aux == 0, p, q, aux)
        if self.on[C_CHAIN]:
            first = 0
            for k in range(1, half):
                mi = p + k
                a = <u128>mi * mi
                b = <u128>p * (mi + k + 1)
                cc = <u128>p * (mi + k + 2)
                d = <u128>(mi + 1) * (mi + 1)
                ok = a < b and b < cc and cc < d
                if ok != ((<u128>k * k) < p):
                    self.violate(V_CHAIN, p, q, mi)
                if not ok and not first:
                    first = mi
            self.tally(C_CHAIN, first == 0, p, q, first)
        if self.on[C_THEOREM1] or self.on[C_ANDRICA]:
            t1 = 4 * (<i128>p) - (<i128>g) * g
            if t1 == 0:
                self.violate(V_T1_ZERO, p, q, 0)
            if self.on[C_THEOREM1]:
                self.tally(C_THEOREM1, t1 > 0, p, q, 0)
                if not self.have_t1 or t1 < self.min_t1:
                    self.have_t1 = True
                    self.min_t1 = t1
                    self.min_t1_p = p
                    self.min_t1_g = g
        if self.on[C_EQ14]:
            self.tally(C_EQ14, (<i128>p) * (q + 1) - (<i128>m) * m > 0, p, q, 0)
        if self.on[C_ANDRICA]:
            am = 4 * (<i128>p) - (<i128>(g - 1)) * (g - 1)
            if am == 0:
                self.violate(V_ANDRICA_EQ, p, q, 0)
            if t1 > 0 and am <= 0:
                self.violate(V_T1_ANDRICA, p, q, 0)
            self.tally(C_ANDRICA, am > 0, p, q, 0)
            key = isqrt_u128((<u128>q) << 64) - isqrt_u128((<u128>p) << 64)
            if not self.have_best or key > self.best_key + 2:
                self.have_best = True
                self.best_key, self.best_p, self.best_q = key, p, q
            elif key + 2 >= self.best_key and self.cmp(p, q, self.best_p, self.best_q) > 0:
                self.best_key, self.best_p, self.best_q = key, p, q
        if self.on[C_BROCARD]:
            if q >= TWO32 or q * q > LIMIT:
                raise CapacityError(f"brocard window ({p}^2, {q}^2) exceeds LIMIT")
            self.sv.ensure(q)
            c = self.sv.count(p * p + 1, q * q)
            self.tally(C_BROCARD, c >= 4, p, q, c)
        if self.on[C_BEYOND]:
            first = 0
            for k in range(half + 1, g):
                mi = p + k
                if mi < TWO32:
                    qt = (mi * mi) // p
                else:
                    qt = <u64>((<u128>mi * mi) // p)
                self.divisions += 1
                if not (qt & 1):
                    first = mi
                    break
            self.tally(C_BEYOND, first == 0, p, q, first)

    cdef void visit_square(self, u64 n) except *:
        cdef u64 sq = n * n, c, lower, upper, p
        self.subjects += 1
        if self.on[C_LEGENDRE]:
            c = self.sv.count(sq + 1, (n + 1) * (n + 1))
            self.tally(C_LEGENDRE, c >= 1, n, 0, c)
            p = prev_prime_u64(sq)
            if p and (<u128>(sq - p)) * (sq - p) < 4 * (<u128>p) and c == 0:
                self.violate(V_LEGENDRE, n, 0, p)
        if self.on[C_OPPERMANN] and n >= 2:
            lower = self.sv.count(n * (n - 1) + 1, sq)
            upper = self.sv.count(sq + 1, n * (n + 1))
            self.tally(C_OPPERMANN, lower >= 1 and upper >= 1, n, 0,
                       lower if lower < upper else upper)

    cdef dict result(self):
        cdef int i
        return {
            "pairs": self.pairs,
            "n_subjects": self.subjects,
            "holds": [self.holds[i] for i in range(NCHECK)],
            "fails": [self.fails[i] for i in range(NCHECK)],
            "divergence": self.divergence,
            "divisions": self.divisions,
            "max_gap": (self.max_gap, self.max_gap_p) if self.pairs else None,
            "min_theorem1": (self.min_t1_p, self.min_t1_g) if self.have_t1 else None,
            "andrica": (self.best_p, self.best_q) if self.have_best else None,
            "failures": self.failures,
            "violations": [self.viol[i] for i in range(NINV)],
            "violation_records": self.vrecords,
        }


def scan_pairs(u64 lo, u64 hi, u64 mask, u64 cap):
    """Evaluate the enabled pair checks on every odd pair with p_lo in [lo, hi)."""
    cdef _Scan sc = _Scan(mask, cap, isqrt_u64(hi - 1 if hi else 0) + 1)
    cdef u64 start, n, j, q, prev = 0
    # sc.sv.seg is reused by brocard counting, so sieve into a private buffer
    cdef u8* buf = <u8*>malloc(SEG)
    if buf == NULL:
        raise MemoryError()
    try:
        start = (lo if lo > 3 else 3) | 1
        while start < hi:
            n = (hi - start + 1) // 2
            if n > SEG:
                n = SEG
            sc.sv.fill(start, n, buf)
            for j in range(n):
                if buf[j]:
                    q = start + 2 * j
                    if prev:
                        sc.visit(prev, q)
                    prev = q
            start += 2 * n
    finally:
        free(buf)
    if prev:
        sc.visit(prev, next_prime(prev))
    return sc.result()


def scan_squares(u64 n_lo, u64 n_hi, u64 mask, u64 cap):
    """Evaluate legendre/oppermann for every N in [n_lo, n_hi)."""
    cdef _Scan sc = _Scan(mask, cap, n_hi + 2)
    cdef u64 n
    for n in range(n_lo if n_lo > 1 else 1, n_hi):
        sc.visit_square(n)
    return sc.result()
