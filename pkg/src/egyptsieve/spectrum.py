"""Desk-scale density measurements over shifted primes.

Counts are exact set cardinalities (no sampling).  Conditions are the
four filter conditions on n = p - h: friability of the largest prime
power, the omega window around loglog n, and the two divisor windows.
Bulk operations run on sieve arrays; ``classify`` reproduces the same
verdicts one prime at a time from its factorization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .arith import (
    SieveTable,
    _cached,
    balanced_product,
    factorize,
    is_prime,
    li_approx,
    prime_array,
    prime_flags,
    prime_reciprocal_sum,
    reciprocal_sum,
)
from .errors import CapacityError, DomainError

# The asymptotic omega-window tolerance is vacuous at desk scale (no
# integer omega sits within 0.1% of loglog n below 1e8), so the desk
# default is 1/2; both constants are recorded in every report.
OMEGA_TOL_ASYMPTOTIC = Fraction(1, 1000)
OMEGA_TOL_DESK = Fraction(1, 2)

# smallest n whose loglog (natural logs) exceeds 1; below this the
# omega-window statistics are undefined and elements are excluded
MIN_OMEGA_N = 16

MAX_WINDOW_PRIMES = 25


def _build_omega(limit: int) -> np.ndarray:
    om = np.zeros(limit + 1, dtype=np.int8)
    for p in prime_array(limit).tolist():
        om[p::p] += 1
    return om


def omega_array(limit: int) -> np.ndarray:
    """omega(n) for all n <= limit (number of distinct prime factors)."""
    return _cached("omega", limit, _build_omega)


def _build_maxpp(limit: int) -> np.ndarray:
    mp = np.ones(limit + 1, dtype=np.int64)
    for p in prime_array(limit).tolist():
        q = p
        while q <= limit:
            np.maximum(mp[q::q], q, out=mp[q::q])
            q *= p
    return mp


def max_prime_power_array(limit: int) -> np.ndarray:
    """Largest prime power exactly dividing n, for all n <= limit."""
    return _cached("maxpp", limit, _build_maxpp)


def _as_fraction(x) -> Fraction:
    """Exact rational view of a parameter given as int, Fraction, str or
    decimal-literal float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x))


def _exceeds_power(value: int, base: int, expo: Fraction) -> bool:
    """Exact test of value > base**expo for positive integers.

    Floats decide away from the boundary; near it (or for tiny inputs)
    the comparison falls back to integer powers, so ties at equality are
    classified exactly.
    """
    if base <= 1:
        return value > 1
    a, b = expo.numerator, expo.denominator
    lhs = b * math.log(value)
    rhs = a * math.log(base)
    if abs(lhs - rhs) > 1e-9 * max(abs(lhs), abs(rhs), 1.0) and b > 64:
        return lhs > rhs
    if b <= 64:
        return value ** b > base ** a
    return lhs > rhs


@dataclass(frozen=True)
class ShiftParams:
    """Shift h and progression modulus q, with gcd(|h|, q) = 1."""

    h: int
    q: int = 1

    def __post_init__(self):
        if self.h == 0:
            raise DomainError("shift h must be nonzero")
        if self.q < 1:
            raise DomainError(f"modulus q must be >= 1, got {self.q}")
        if gcd(abs(self.h), self.q) != 1:
            raise DomainError(
                f"gcd(|h|, q) must be 1, got h={self.h} q={self.q}")


@dataclass(frozen=True)
class FilterParams:
    """Parameters of the four filter conditions.

    epsilon: friability exponent; omega_tol: relative omega window;
    delta: deviation threshold; [y, w) and [4w, z): divisor windows.
    """

    epsilon: Fraction = Fraction(1, 10)
    omega_tol: Fraction = OMEGA_TOL_DESK
    delta: Fraction = Fraction(1, 2)
    y: Fraction = Fraction(4)
    w: Fraction = Fraction(8)
    z: Fraction = Fraction(64)

    def __post_init__(self):
        for name in ("epsilon", "omega_tol", "delta", "y", "w", "z"):
            object.__setattr__(self, name, _as_fraction(getattr(self, name)))
        if not 0 < self.epsilon < 1:
            raise DomainError(f"epsilon must be in (0,1), got {self.epsilon}")
        if self.omega_tol <= 0 or self.delta <= 0:
            raise DomainError("omega_tol and delta must be positive")
        if self.y < 4:
            raise DomainError(f"y must be >= 4, got {self.y}")
        if not self.y <= self.w:
            raise DomainError("need y <= w")
        if not 4 * self.w <= self.z:
            raise DomainError("need 4w <= z")


@dataclass(frozen=True)
class ConditionVerdicts:
    """Booleans for the four filter conditions, in order."""

    friable: bool
    omega_window: bool
    d1: bool
    d2: bool


@dataclass(frozen=True)
class ShiftedPrimeRecord:
    p: int
    n: int
    omega: int
    max_prime_power: int
    d1_witness: int | None
    d2_witness: int | None
    verdicts: ConditionVerdicts


@dataclass(frozen=True)
class DensityReport:
    """Exact count of a condition set within an arithmetic progression.

    relative_density = count / normalizer where the normalizer is
    #{p <= N : p = h (mod q), p - h >= q}; baseline carries the shape
    the corresponding asymptotic statement predicts, with no implied
    constant.  reciprocal_sum is the exact sum of 1/n over the counted
    set, n = p - h.
    """

    N: int
    params: dict
    count: int
    normalizer: int
    relative_density: float
    baseline: float
    reciprocal_sum: Fraction
    excluded: int = 0


@dataclass(frozen=True)
class SieveEstimate:
    """Inclusion-exclusion bookkeeping: |A_d| = f(d) X + R_d exactly."""

    X: Fraction
    f: dict
    remainders: dict
    main_term: float
    exact_count: int


def _progression(N: int, shift: ShiftParams) -> np.ndarray:
    """Primes p <= N with p = h (mod q) and p - h >= q."""
    primes = prime_array(N)
    sel = (primes % shift.q) == (shift.h % shift.q)
    sel &= primes - shift.h >= shift.q
    return primes[sel]


def classify(p: int, shift: ShiftParams, filt: FilterParams,
             table: SieveTable) -> ShiftedPrimeRecord:
    """Per-prime dossier for n = (p - h) / q with the four condition
    verdicts; witnesses recorded when the divisor windows are hit."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p % shift.q != shift.h % shift.q:
        raise DomainError(f"{p} is not {shift.h} mod {shift.q}")
    if p - shift.h < shift.q:
        raise DomainError(f"need p - h >= q, got p={p}")
    n = (p - shift.h) // shift.q
    fz = factorize(n, table)
    mpp = fz.max_prime_power
    friable = not _exceeds_power(mpp, n, 1 - filt.epsilon)
    if n >= MIN_OMEGA_N:
        ll = math.log(math.log(n))
        omega_ok = abs(fz.omega - ll) <= float(filt.omega_tol) * ll
    else:
        omega_ok = False
    d1 = d2 = None
    lo2 = 4 * filt.w
    for d in fz.divisors():
        if d1 is None and filt.y <= d < filt.w:
            d1 = d
        if d2 is None and lo2 <= d < filt.z:
            d2 = d
    return ShiftedPrimeRecord(
        p=p, n=n, omega=fz.omega, max_prime_power=mpp,
        d1_witness=d1, d2_witness=d2,
        verdicts=ConditionVerdicts(friable, omega_ok, d1 is not None,
                                   d2 is not None))


def friability_density(N: int, shift: ShiftParams, epsilon) -> DensityReport:
    """Relative density of primes whose n = p - h has a prime-power
    divisor exceeding n**(1 - epsilon); baseline is epsilon itself."""
    if N < 100:
        raise DomainError("need N >= 100")
    eps = _as_fraction(epsilon)
    if not 0 <= eps <= 1:
        raise DomainError(f"epsilon must be in [0,1], got {epsilon}")
    primes = _progression(N, shift)
    narr = (primes - shift.h).astype(np.int64)
    normalizer = len(narr)
    if eps == 0 or normalizer == 0:
        bad = np.zeros(len(narr), dtype=bool)
    else:
        mpp = max_prime_power_array(int(narr.max()))[narr]
        multi = narr >= 2
        lhs = np.log(mpp.astype(np.float64))
        rhs = float(1 - eps) * np.log(np.maximum(narr, 2).astype(np.float64))
        bad = (lhs > rhs + 1e-9) & multi
        near = (np.abs(lhs - rhs) <= 1e-9) & multi
        for i in np.flatnonzero(near):
            bad[i] = _exceeds_power(int(mpp[i]), int(narr[i]), 1 - eps)
    count = int(bad.sum())
    return DensityReport(
        N=N,
        params={"h": shift.h, "q": shift.q, "epsilon": str(eps)},
        count=count,
        normalizer=normalizer,
        relative_density=count / normalizer if normalizer else 0.0,
        baseline=float(eps),
        reciprocal_sum=reciprocal_sum(narr[bad].tolist()),
    )


def omega_deviation_density(N: int, shift: ShiftParams, delta) -> DensityReport:
    """Relative density of |omega(n) - loglog n| >= delta * loglog n over
    n = p - h >= 16; smaller n are excluded from both sides and counted
    in ``excluded``.  The asymptotic baseline is 0."""
    if N < 100:
        raise DomainError("need N >= 100")
    delta = _as_fraction(delta)
    if delta < 0:
        raise DomainError("delta must be >= 0")
    primes = _progression(N, shift)
    narr = (primes - shift.h).astype(np.int64)
    keep = narr >= MIN_OMEGA_N
    excluded = int((~keep).sum())
    m = narr[keep]
    if len(m):
        om = omega_array(int(m.max()))[m].astype(np.float64)
        ll = np.log(np.log(m.astype(np.float64)))
        dev = np.abs(om - ll) >= float(delta) * ll
    else:
        dev = np.zeros(0, dtype=bool)
    count = int(dev.sum())
    return DensityReport(
        N=N,
        params={"h": shift.h, "q": shift.q, "delta": str(delta)},
        count=count,
        normalizer=len(m),
        relative_density=count / len(m) if len(m) else 0.0,
        baseline=0.0,
        reciprocal_sum=reciprocal_sum(m[dev].tolist()),
        excluded=excluded,
    )


def halberstam_variance(N: int, shift: ShiftParams) -> float:
    """Second-moment ratio sum (omega(p-h) - loglog N)^2 over all primes
    p <= N with p - h >= 2, divided by pi(N) loglog N.

    The statistic ranges over all primes (the modulus q of the shift
    plays no role here); omega sums are exact integers, combined with
    the loglog N center in one float step at the end.
    """
    if N < 100:
        raise DomainError("need N >= 100")
    primes = prime_array(N)
    narr = (primes - shift.h).astype(np.int64)
    m = narr[narr >= 2]
    if len(m) == 0:
        return 0.0
    om = omega_array(int(m.max()))[m].astype(np.int64)
    s1 = int(om.sum())
    s2 = int((om * om).sum())
    c = math.log(math.log(N))
    total = s2 - 2 * c * s1 + c * c * len(m)
    return total / (len(primes) * c)


def divisor_window_density(N: int, shift: ShiftParams, y, z) -> DensityReport:
    """Relative density of primes whose n = p - h has no prime factor in
    the closed window [y, z]; baseline log y / log z."""
    if N < 100:
        raise DomainError("need N >= 100")
    y = _as_fraction(y)
    z = _as_fraction(z)
    if not 4 <= y < z:
        raise DomainError(f"need 4 <= y < z, got y={y} z={z}")
    primes = _progression(N, shift)
    narr = (primes - shift.h).astype(np.int64)
    if len(narr):
        top = int(narr.max())
        window = [int(p) for p in prime_array(min(top, int(z)))
                  if y <= p <= z]
        marked = np.zeros(top + 1, dtype=bool)
        for q in window:
            marked[q::q] = True
        good = ~marked[narr]
    else:
        good = np.zeros(0, dtype=bool)
    count = int(good.sum())
    return DensityReport(
        N=N,
        params={"h": shift.h, "q": shift.q, "y": str(y), "z": str(z)},
        count=count,
        normalizer=len(narr),
        relative_density=count / len(narr) if len(narr) else 0.0,
        baseline=math.log(float(y)) / math.log(float(z)),
        reciprocal_sum=reciprocal_sum(narr[good].tolist()),
    )


def _subset_counts(A, window_primes):
    """Enumerate squarefree d | P(z) with |A_d| possibly nonzero.

    Yields (d, mu, |A_d|).  Subsets whose product exceeds max(A) are
    pruned; they contribute zero to the count.
    """
    if isinstance(A, tuple) and len(A) == 2:
        lo, hi = A
        if lo > hi:
            raise DomainError(f"empty interval {A}")

        def count_div(d):
            return hi // d - (lo - 1) // d

        top = hi
    else:
        arr = np.asarray(list(A), dtype=np.int64)
        if len(arr) == 0:
            raise DomainError("empty set")
        if int(arr.min()) < 1:
            raise DomainError("set elements must be positive")

        def count_div(d):
            return int((arr % d == 0).sum())

        top = int(arr.max())

    out = []

    def rec(i, d, mu):
        out.append((d, mu, count_div(d)))
        for j in range(i, len(window_primes)):
            nd = d * window_primes[j]
            if nd > top:
                break
            rec(j + 1, nd, -mu)

    rec(0, 1, 1)
    return out


def legendre_sieve_count(A, window_primes, X=None, density=None) -> SieveEstimate:
    """Exact inclusion-exclusion count of elements of A coprime to all
    window primes, with the sieve bookkeeping |A_d| = f(d) X + R_d.

    A is an inclusive interval (lo, hi) or an explicit collection of
    positive integers.  f defaults to d -> 1/d and X to |A|; R_d values
    are exact rationals.  Counts are re-verified by a direct scan when
    |A| <= 1e6.
    """
    window_primes = sorted(set(int(p) for p in window_primes))
    if len(window_primes) > MAX_WINDOW_PRIMES:
        raise CapacityError(
            f"{len(window_primes)} window primes exceed the "
            f"{MAX_WINDOW_PRIMES} budget (2^k inclusion-exclusion terms)")
    for p in window_primes:
        if not is_prime(p):
            raise DomainError(f"window element {p} is not prime")

    if isinstance(A, tuple) and len(A) == 2:
        size = A[1] - A[0] + 1
    else:
        A = list(A)
        size = len(A)
    if size > 10 ** 8:
        raise CapacityError(f"set of size {size} exceeds the 1e8 budget")
    if X is None:
        X = Fraction(size)
    else:
        X = Fraction(X)
    if density is None:
        density = lambda p: Fraction(1, p)

    fmap = {p: Fraction(density(p)) for p in window_primes}
    counts = _subset_counts(A, window_primes)
    exact = 0
    remainders = {}
    for d, mu, cnt in counts:
        exact += mu * cnt
        fd = Fraction(1)
        dd = d
        for p in window_primes:
            if dd % p == 0:
                fd *= fmap[p]
                dd //= p
        remainders[d] = cnt - fd * X
    main = X
    for p in window_primes:
        main *= (1 - fmap[p])

    if size <= 10 ** 6:
        if isinstance(A, tuple):
            elems = range(A[0], A[1] + 1)
        else:
            elems = A
        scan = sum(1 for n in elems
                   if all(n % p for p in window_primes))
        if scan != exact:
            raise RuntimeError(
                f"inclusion-exclusion {exact} disagrees with scan {scan}")

    return SieveEstimate(X=X, f=fmap, remainders=remainders,
                         main_term=float(main), exact_count=exact)


def prime_count_ap(N: int, d: int, h: int) -> tuple[int, float]:
    """Exact count of primes p <= N with p = h (mod d), next to the
    expected li(N) / phi(d)."""
    if N < 100:
        raise DomainError("need N >= 100")
    if d < 1:
        raise DomainError("need d >= 1")
    if gcd(abs(h) % d if d > 1 else 0, d) != 1:
        raise DomainError(f"residue {h} shares a factor with modulus {d}")
    primes = prime_array(N)
    count = int(((primes % d) == (h % d)).sum())
    phi = sum(1 for k in range(1, d + 1) if gcd(k, d) == 1)
    return count, li_approx(N) / phi


def mertens_product(w: int, shifted: bool = False, lo: int = 2) -> Fraction:
    """Exact product of (1 - 1/p) over primes lo <= p <= w; with
    ``shifted`` the factors are (1 - 1/(p - 1)), for window products
    over shifted moduli (then lo must be at least 3)."""
    if w < 2:
        raise DomainError("need w >= 2")
    if shifted and lo < 3:
        raise DomainError("shifted product needs lo >= 3 (p = 2 gives 0)")
    ps = [int(p) for p in prime_array(w) if p >= lo]
    if not ps:
        return Fraction(1)
    if shifted:
        num = balanced_product(p - 2 for p in ps)
        den = balanced_product(p - 1 for p in ps)
    else:
        num = balanced_product(p - 1 for p in ps)
        den = balanced_product(ps)
    return Fraction(num, den)


def log_density(shift: ShiftParams, N: int, predicate) -> tuple[float, float]:
    """(sum of 1/p over the progression subset) / loglog N, and the
    count over N / log N.  The reciprocal sum is exact until one final
    float division."""
    if N < 100:
        raise DomainError("need N >= 100")
    primes = [int(p) for p in _progression(N, shift) if predicate(int(p))]
    if not primes:
        return 0.0, 0.0
    num, den = prime_reciprocal_sum(primes)
    loglog = math.log(math.log(N))
    return (num / den) / loglog, len(primes) / (N / math.log(N))


def interval_reciprocal_sum(N: int) -> Fraction:
    """Exact sum of 1/p over primes in the closed interval [N/2, N]."""
    if N < 4:
        raise DomainError("need N >= 4")
    primes = [int(p) for p in prime_array(N) if 2 * p >= N]
    num, den = prime_reciprocal_sum(primes)
    return Fraction(num, den)


@dataclass(frozen=True)
class HypothesisReport:
    """Which subset-selection hypotheses hold for a record set at scale N.

    condition_counts / condition_all cover the four per-element filter
    conditions; the remaining fields are the set-level hypotheses
    (exact reciprocal-sum threshold, per-element divisor pair
    y <= d1, 4 d1 <= d2 <= z, prime powers <= N^(1-eps), the
    [99/100, 2] loglog N omega window, the element range, and the
    window constraint z <= (log N)^(1/500)).
    """

    n_records: int
    reciprocal_sum: Fraction
    sum_threshold: float
    sum_ok: bool
    divisor_pair_ok: bool
    prime_power_ok: bool
    omega_window_ok: bool
    range_ok: bool
    window_ok: bool
    condition_counts: dict = field(default_factory=dict)
    condition_all: dict = field(default_factory=dict)


def _trial_divisors(n: int) -> list[int]:
    out = [1]
    m = n
    f = 2
    while f * f <= m:
        if m % f == 0:
            e = 0
            while m % f == 0:
                m //= f
                e += 1
            out = [d * f ** k for d in out for k in range(e + 1)]
        f += 1 if f == 2 else 2
    if m > 1:
        out = [d * m ** k for d in out for k in range(2)]
    return sorted(out)


def check_hypotheses(records, N: int, filt: FilterParams) -> HypothesisReport:
    """Evaluate the subset-selection hypotheses for the n-values of the
    given records; empty record lists report every hypothesis false."""
    records = list(records)
    log_n = math.log(N)
    threshold = 2 / float(filt.y) + log_n ** (-1 / 200)
    if not records:
        return HypothesisReport(
            n_records=0, reciprocal_sum=Fraction(0), sum_threshold=threshold,
            sum_ok=False, divisor_pair_ok=False, prime_power_ok=False,
            omega_window_ok=False, range_ok=False, window_ok=False,
            condition_counts={k: 0 for k in (1, 2, 3, 4)},
            condition_all={k: False for k in (1, 2, 3, 4)})

    rsum = reciprocal_sum(r.n for r in records)
    sum_ok = float(rsum) >= threshold

    c = float(filt.epsilon) / 4
    lo_range = N ** (1 - c)
    llN = math.log(log_n)
    pair_ok = True
    power_ok = True
    omega_ok = True
    range_ok = True
    for r in records:
        divs = _trial_divisors(r.n)
        found = False
        for d1 in divs:
            if d1 < filt.y:
                continue
            if any(4 * d1 <= d2 <= filt.z for d2 in divs):
                found = True
                break
        pair_ok &= found
        power_ok &= not _exceeds_power(r.max_prime_power, N, 1 - filt.epsilon)
        omega_ok &= (99 / 100) * llN <= r.omega <= 2 * llN
        range_ok &= lo_range <= r.n <= N

    counts = {
        1: sum(r.verdicts.friable for r in records),
        2: sum(r.verdicts.omega_window for r in records),
        3: sum(r.verdicts.d1 for r in records),
        4: sum(r.verdicts.d2 for r in records),
    }
    return HypothesisReport(
        n_records=len(records),
        reciprocal_sum=rsum,
        sum_threshold=threshold,
        sum_ok=sum_ok,
        divisor_pair_ok=pair_ok,
        prime_power_ok=power_ok,
        omega_window_ok=omega_ok,
        range_ok=range_ok,
        window_ok=float(filt.z) <= log_n ** (1 / 500),
        condition_counts=counts,
        condition_all={k: v == len(records) for k, v in counts.items()},
    )
