"""Exact arithmetic substrate: primality, sieving, factorization, li.

Everything here is deterministic.  Rationals are ``fractions.Fraction``
(exported as ``BigRational``): exact, always in lowest terms, positive
denominator.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from itertools import compress
from math import isqrt

import numpy as np

from .errors import CapacityError, DomainError

BigRational = Fraction

# Strong-pseudoprime witnesses: deterministic for all n < 3.3 * 10**24,
# hence for every 64-bit input.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)

DEFAULT_SEGMENT_SIZE = 1 << 20
# sieve_primes refuses limits whose base sieve would not fit in memory
MAX_BASE_PRIME = 1 << 27
# SieveTable keeps one monolithic smallest-prime-factor array up to here
FULL_SPF_LIMIT = 1 << 24

_EULER_GAMMA = Decimal("0.57721566490153286060651209008240243104215933593992")


def is_prime(n: int) -> bool:
    """Deterministic primality for all 64-bit inputs (Miller-Rabin with a
    fixed witness set, trial division first for small factors)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = (d & -d).bit_length() - 1
    d >>= r
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _simple_prime_list(limit: int) -> list[int]:
    """Monolithic odd-only sieve, used for base primes of the segmented one."""
    if limit < 2:
        return []
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    flags[4::2] = bytearray(len(range(4, limit + 1, 2)))
    for p in range(3, isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p::2 * p] = bytearray(len(range(p * p, limit + 1, 2 * p)))
    return [i for i in range(limit + 1) if flags[i]]


def sieve_primes(limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE):
    """Yield the primes in [2, limit], increasing, one segment at a time.

    Memory stays bounded by one segment plus the base primes up to
    sqrt(limit); limits whose base sieve exceeds the budget raise
    CapacityError.
    """
    if limit < 2:
        raise DomainError(f"sieve limit must be >= 2, got {limit}")
    if segment_size < 64:
        raise DomainError("segment_size too small")
    base_limit = isqrt(limit)
    if base_limit > MAX_BASE_PRIME:
        raise CapacityError(
            f"limit {limit} needs base primes to {base_limit}, over the "
            f"{MAX_BASE_PRIME} budget")
    yield 2
    odd_base = _simple_prime_list(base_limit)[1:]
    lo = 3
    while lo <= limit:
        hi = min(lo + 2 * (segment_size - 1), limit)
        if hi % 2 == 0:
            hi -= 1
        if hi < lo:
            break
        size = (hi - lo) // 2 + 1
        seg = bytearray([1]) * size
        for p in odd_base:
            if p * p > hi:
                break
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            first = (start - lo) // 2
            seg[first::p] = bytearray(len(range(first, size, p)))
        yield from compress(range(lo, hi + 1, 2), seg)
        lo = hi + 2


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as ((prime, exponent), ...) with primes increasing."""

    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise DomainError(f"malformed factorization {self.factors}")
            last = p

    @property
    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p ** e
        return out

    @property
    def omega(self) -> int:
        """Number of distinct prime divisors."""
        return len(self.factors)

    @property
    def max_prime_power(self) -> int:
        """Largest prime power exactly dividing the value (1 for value 1)."""
        return max((p ** e for p, e in self.factors), default=1)

    def valuation(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def divisors(self) -> list[int]:
        """All divisors, sorted ascending."""
        out = [1]
        for p, e in self.factors:
            out = [d * p ** k for d in out for k in range(e + 1)]
        out.sort()
        return out


class SieveTable:
    """Smallest-prime-factor lookups up to ``limit``.

    Small limits get one monolithic array; larger ones build fixed-size
    segments on demand and keep a bounded cache.  Immutable once built,
    safe for concurrent readers.
    """

    def __init__(self, limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE,
                 max_cached_segments: int = 64):
        if limit < 1:
            raise DomainError(f"table limit must be >= 1, got {limit}")
        self.limit = limit
        self.segment_size = segment_size
        self._max_cached = max_cached_segments
        self._segments: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()
        if limit <= FULL_SPF_LIMIT:
            self._spf = self._build_full(limit)
            self._base = None
        else:
            self._spf = None
            self._base = _simple_prime_list(isqrt(limit))

    @staticmethod
    def _build_full(limit: int) -> np.ndarray:
        spf = np.zeros(limit + 1, dtype=np.uint32)
        for p in range(2, isqrt(limit) + 1):
            if spf[p] == 0:
                block = spf[p * p::p]
                block[block == 0] = p
        return spf

    def _segment_for(self, n: int) -> tuple[int, np.ndarray]:
        idx = n // self.segment_size
        seg = self._segments.get(idx)
        if seg is None:
            with self._lock:
                seg = self._segments.get(idx)
                if seg is None:
                    lo = idx * self.segment_size
                    hi = min(lo + self.segment_size, self.limit + 1)
                    seg = np.zeros(hi - lo, dtype=np.uint32)
                    for p in self._base:
                        if p * p >= hi:
                            break
                        start = max(p * p, ((lo + p - 1) // p) * p)
                        block = seg[start - lo::p]
                        block[block == 0] = p
                    if len(self._segments) >= self._max_cached:
                        self._segments.pop(next(iter(self._segments)))
                    self._segments[idx] = seg
        return idx * self.segment_size, seg

    def smallest_prime_factor(self, n: int) -> int:
        """Least prime divisor of n (n itself when n is prime); n >= 2."""
        if not 2 <= n <= self.limit:
            if n > self.limit:
                raise CapacityError(f"{n} exceeds table limit {self.limit}")
            raise DomainError(f"smallest_prime_factor needs n >= 2, got {n}")
        if self._spf is not None:
            p = int(self._spf[n])
        else:
            lo, seg = self._segment_for(n)
            p = int(seg[n - lo])
        return p if p else n


def factorize(n: int, table: SieveTable) -> Factorization:
    """Full factorization of 1 <= n <= table.limit; factorize(1) is empty."""
    if n == 0:
        raise DomainError("cannot factor 0")
    if n < 0:
        raise DomainError(f"cannot factor negative {n}")
    if n > table.limit:
        raise CapacityError(f"{n} exceeds table limit {table.limit}")
    factors = []
    while n > 1:
        p = table.smallest_prime_factor(n)
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        factors.append((p, e))
    return Factorization(tuple(factors))


def li_approx(n: int) -> float:
    """Logarithmic integral li(n), relative error well under 1e-9.

    Evaluated as Ei(log n) from the exponential-integral power series
    around log n, carried in 40-digit decimal arithmetic internally.
    """
    if n < 3:
        raise DomainError(f"li_approx needs n >= 3, got {n}")
    with localcontext() as ctx:
        ctx.prec = 40
        y = Decimal(n).ln()
        total = _EULER_GAMMA + y.ln()
        term = Decimal(1)
        k = 0
        tiny = Decimal(10) ** -35
        while True:
            k += 1
            term = term * y / k
            add = term / k
            total += add
            if abs(add) < tiny and k > int(y):
                break
        return float(total)


_cache: dict[tuple[str, int], np.ndarray] = {}
_CACHE_SLOTS = 8


def _cached(kind: str, limit: int, build) -> np.ndarray:
    key = (kind, limit)
    arr = _cache.get(key)
    if arr is None:
        arr = build(limit)
        if len(_cache) >= _CACHE_SLOTS:
            _cache.pop(next(iter(_cache)))
        _cache[key] = arr
    return arr


def _build_flags(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return flags


def prime_flags(limit: int) -> np.ndarray:
    """Boolean array, True at prime indices (vectorized Eratosthenes,
    monolithic; independent of the segmented stream)."""
    return _cached("flags", limit, _build_flags)


def prime_array(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (cached)."""
    return _cached("primes", limit,
                   lambda n: np.flatnonzero(prime_flags(n)).astype(np.int64))


def reciprocal_sum(values) -> Fraction:
    """Exact sum of 1/v over the given positive integers (pairwise tree)."""
    vals = list(values)
    if not vals:
        return Fraction(0)
    frs = [Fraction(1, int(v)) for v in vals]
    while len(frs) > 1:
        nxt = [frs[i] + frs[i + 1] for i in range(0, len(frs) - 1, 2)]
        if len(frs) % 2:
            nxt.append(frs[-1])
        frs = nxt
    return frs[0]


def prime_reciprocal_sum(primes) -> tuple[int, int]:
    """Exact (numerator, denominator) of sum of 1/p over distinct primes.

    The denominators are pairwise coprime, so the pairwise merge never
    needs a gcd; the returned pair is already in lowest terms.
    """
    items = [(1, int(p)) for p in primes]
    if not items:
        return (0, 1)
    while len(items) > 1:
        nxt = []
        for i in range(0, len(items) - 1, 2):
            a, b = items[i]
            c, d = items[i + 1]
            nxt.append((a * d + c * b, b * d))
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


def balanced_product(values) -> int:
    """Product of the integers, multiplied in a balanced tree."""
    vals = [int(v) for v in values]
    if not vals:
        return 1
    while len(vals) > 1:
        nxt = [vals[i] * vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]
