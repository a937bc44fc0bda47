"""Egyptian-fraction decompositions over shifted primes.

Finds finite prime sets S with sum of 1/(p - h) over S equal to a
target rational, exactly.  The search cascade:

1. subset-sum DP over divisor pools of smooth moduli (weights L/(p-h)
   for (p-h) | L, solved on a big-integer bitset),
2. recursive unit splitting 1/k = 1/(k+1) + 1/(k(k+1)) feeding 1.,
3. pair-cancellation assembly: denominators p - h = e * q with one
   large prime q are combined in pairs with q | e1 + e2, so each pair
   contributes a q-free value; direct smooth denominators and pairs
   then feed one subset-sum DP over a high-exponent assembly modulus,
4. greedy largest-fraction steps with DP retries on the residual.

Every returned decomposition is re-checked by the independent verifier
before it leaves this module.  A failed search raises SearchExhausted
and never claims nonexistence beyond its explicit pool.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .arith import is_prime, prime_array, prime_flags
from .errors import (
    CapacityError,
    DomainError,
    MergeInsufficient,
    ObstructionError,
    SearchExhausted,
)

_SMOOTH_BASIS = (2, 3, 5, 7, 11, 13)


@dataclass(frozen=True)
class SearchBudget:
    """Resource bounds for the decomposition search.

    moduli are the base smooth moduli for divisor-pool DP (scaled to
    multiples of the target denominator as needed); max_dp_target caps
    the bitset length; the assembly_* fields configure the
    pair-cancellation stage.
    """

    max_prime: int = 10 ** 8
    max_terms: int = 256
    max_dp_target: int = 10 ** 8
    moduli: tuple[int, ...] = (27720, 360360, 720720, 4324320)
    assembly_modulus: int = 43243200          # 2^6 3^3 5^2 7 11 13
    assembly_prime_limit: int = 10 ** 8
    allow_unit_denominator: bool = True
    split_depth: int = 3

    def __post_init__(self):
        if self.max_prime < 2 or any(m < 1 for m in self.moduli):
            raise DomainError("malformed budget")


DEFAULT_BUDGET = SearchBudget()


@dataclass(frozen=True)
class Decomposition:
    """Target = sum of 1/(p - h) over the strictly increasing primes."""

    h: int
    target: Fraction
    primes: tuple[int, ...]

    @property
    def denominators(self) -> tuple[int, ...]:
        return tuple(p - self.h for p in self.primes)


@dataclass(frozen=True)
class PartialSolution:
    """Disjoint parts, each an exact identity sum 1/(p-h) = value."""

    h: int
    parts: tuple[tuple[Fraction, tuple[int, ...]], ...]


@dataclass(frozen=True)
class VerificationResult:
    valid: bool
    reason: str | None = None


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of the congruence gate gcd(|h|, den(x)) = 1.

    When obstructed, ``witness`` is a prime dividing both |h| and the
    target denominator; at most one pool denominator (p = witness) is
    divisible by it, so every achievable sum has witness-adic valuation
    at least ``valuation_floor``.  Targets below the floor are provably
    unrepresentable; other obstructed targets are merely uncertified.
    """

    feasible: bool
    witness: int | None = None
    valuation_floor: int | None = None
    target_valuation: int | None = None
    provably_impossible: bool = False
    explanation: str = "feasible"


def verify(d: Decomposition) -> VerificationResult:
    """Independent certificate check: primality, strict increase,
    positive denominators, exact rational sum."""
    try:
        target = Fraction(d.target)
    except (TypeError, ValueError):
        return VerificationResult(False, f"target {d.target!r} not rational")
    if target <= 0:
        return VerificationResult(False, f"target {target} not positive")
    last = 0
    for p in d.primes:
        if p <= last:
            return VerificationResult(
                False, f"primes not strictly increasing at {p}")
        last = p
        if not is_prime(p):
            return VerificationResult(False, f"{p} not prime")
        if p - d.h < 1:
            return VerificationResult(False, f"denominator {p - d.h} < 1")
    total = Fraction(0)
    for p in d.primes:
        total += Fraction(1, p - d.h)
    if total != target:
        return VerificationResult(False, f"sum {total} != target {target}")
    return VerificationResult(True)


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0 and n:
        n //= p
        v += 1
    return v


def feasibility_check(x, h: int) -> FeasibilityResult:
    """Congruence gate: feasible iff gcd(|h|, den(x)) = 1; otherwise an
    obstruction certificate with a witness prime and valuation floor."""
    x = Fraction(x)
    if x <= 0:
        raise DomainError(f"target must be positive, got {x}")
    if h == 0:
        raise DomainError("shift h must be nonzero")
    g = gcd(abs(h), x.denominator)
    if g == 1:
        return FeasibilityResult(feasible=True)
    witnesses = []
    f = 2
    gg = g
    while f * f <= gg:
        if gg % f == 0:
            witnesses.append(f)
            while gg % f == 0:
                gg //= f
        f += 1
    if gg > 1:
        witnesses.append(gg)
    chosen = None
    for ell in witnesses:
        floor = -_valuation(ell - h, ell) if ell - h >= 1 else 0
        v = -_valuation(x.denominator, ell)
        if chosen is None:
            chosen = (ell, floor, v, v < floor)
        if v < floor:
            chosen = (ell, floor, v, True)
            break
    ell, floor, v, provable = chosen
    expl = (
        f"gcd(|h|={abs(h)}, den={x.denominator}) = {g} > 1: only p = {ell} "
        f"can give a denominator divisible by {ell}, so every achievable "
        f"sum has {ell}-adic valuation >= {floor}; target has {v}"
        + (" (provably unrepresentable)" if provable else ""))
    return FeasibilityResult(
        feasible=False, witness=ell, valuation_floor=floor,
        target_valuation=v, provably_impossible=provable, explanation=expl)


def _gate(x, h: int) -> Fraction:
    x = Fraction(x)
    res = feasibility_check(x, h)
    if not res.feasible:
        raise ObstructionError(res)
    return x


def _factor_modulus(L: int) -> list[tuple[int, int]]:
    out = []
    m = L
    f = 2
    while f * f <= m and f <= 10 ** 6:
        if m % f == 0:
            e = 0
            while m % f == 0:
                m //= f
                e += 1
            out.append((f, e))
        f += 1 if f == 2 else 2
    if m > 1:
        if not is_prime(m):
            raise DomainError(f"modulus {L} has an intractable factor {m}")
        out.append((m, 1))
    return out


def _divisors_of(L: int) -> list[int]:
    divs = [1]
    for p, e in _factor_modulus(L):
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    divs.sort()
    return divs


def smooth_pool(h: int, L: int, budget: SearchBudget = DEFAULT_BUDGET,
                exclude=frozenset()) -> list[tuple[int, int]]:
    """(weight L/(p-h), p) for primes p <= max_prime with (p-h) | L,
    p - h >= 1, p unused; sorted by decreasing weight."""
    pool = []
    for d in _divisors_of(L):
        if d == 1 and not budget.allow_unit_denominator:
            continue
        p = d + h
        if p < 2 or p > budget.max_prime or p in exclude:
            continue
        if is_prime(p):
            pool.append((L // d, p))
    pool.sort(key=lambda t: (-t[0], t[1]))
    return pool


def _bitset_subset_sum(weights: list[int], target: int,
                       max_snapshots: int = 24) -> list[int] | None:
    """Indices of a subset of the positive weights summing exactly to
    target, or None.  Big-integer bitset DP; snapshots every ``stride``
    items bound memory, the backtrack recomputes inside a stride with
    masks capped at the current residual, and prefers solutions made of
    early items.
    """
    n = len(weights)
    if target == 0:
        return []
    if n == 0:
        return None
    stride = max(8, -(-n // max_snapshots))
    cap = (1 << (target + 1)) - 1
    dp = 1
    snaps = {0: 1}
    hit_at = None
    for i, w in enumerate(weights):
        dp = (dp | (dp << w)) & cap
        if (i + 1) % stride == 0:
            snaps[i + 1] = dp
        if dp.bit_length() == target + 1:
            hit_at = i
            break
    if hit_at is None:
        return None

    def prefix_bit(i: int, t: int) -> bool:
        """Bit t of the DP over weights[0:i]."""
        base = (i // stride) * stride
        while base not in snaps:
            base -= stride
        mask = snaps[base] & ((1 << (t + 1)) - 1)
        for j in range(base, i):
            mask = (mask | (mask << weights[j])) & ((1 << (t + 1)) - 1)
        return bool((mask >> t) & 1)

    chosen = []
    t = target
    for i in range(hit_at, -1, -1):
        if t == 0:
            break
        w = weights[i]
        if w > t:
            continue
        if prefix_bit(i, t):
            continue
        chosen.append(i)
        t -= w
    if t != 0:
        raise RuntimeError("subset-sum backtrack lost the target")
    return chosen


def smooth_dp_decompose(x, h: int, L: int,
                        budget: SearchBudget = DEFAULT_BUDGET,
                        exclude=frozenset()) -> Decomposition:
    """Exact subset-sum over the divisor pool of L: finds primes with
    (p - h) | L whose reciprocals sum to x.

    Raises SearchExhausted when no subset of this pool works (that
    outcome is proven for the pool, never a global claim).
    """
    x = _gate(x, h)
    if L % x.denominator != 0:
        raise DomainError(f"den({x}) does not divide modulus {L}")
    target = x * L
    if target.denominator != 1:
        raise DomainError(f"target {x} * {L} is not integral")
    target = int(target)
    if target > budget.max_dp_target:
        raise DomainError(
            f"DP target {target} exceeds budget {budget.max_dp_target}")
    pool = smooth_pool(h, L, budget, exclude)
    weight_total = sum(w for w, _ in pool)
    if weight_total < target:
        raise SearchExhausted(
            f"pool weight {weight_total} below target {target}",
            pool_size=len(pool), weight_total=weight_total, target=target,
            proven_absent_in_pool=True)
    idx = _bitset_subset_sum([w for w, _ in pool], target)
    if idx is None:
        raise SearchExhausted(
            f"no subset of the {len(pool)}-element pool hits {target}",
            pool_size=len(pool), weight_total=weight_total, target=target,
            proven_absent_in_pool=True)
    primes = tuple(sorted(pool[i][1] for i in idx))
    dec = Decomposition(h=h, target=x, primes=primes)
    check = verify(dec)
    if not check.valid:
        raise RuntimeError(f"internal: DP produced invalid result: {check.reason}")
    return dec


def greedy_decompose(x, h: int, budget: SearchBudget = DEFAULT_BUDGET,
                     exclude=frozenset()) -> Decomposition:
    """Repeatedly subtract the largest available 1/(p - h) <= remainder
    (smallest admissible p); succeeds only when the remainder reaches
    exactly zero within max_terms."""
    x = _gate(x, h)
    rem = x
    chosen: list[int] = []
    used = set(exclude)
    while rem > 0:
        if len(chosen) >= budget.max_terms:
            raise SearchExhausted(
                f"greedy used {budget.max_terms} terms, remainder {rem}")
        d0 = -(-rem.denominator // rem.numerator)    # ceil(1/rem)
        if d0 < 1:
            d0 = 1
        if d0 == 1 and not budget.allow_unit_denominator:
            d0 = 2
        p = max(d0 + h, 2)
        while True:
            if p > budget.max_prime:
                raise SearchExhausted(
                    f"greedy ran past max_prime {budget.max_prime}, "
                    f"remainder {rem}")
            if p not in used and p - h >= d0 and is_prime(p):
                break
            p += 1
        used.add(p)
        chosen.append(p)
        rem -= Fraction(1, p - h)
    dec = Decomposition(h=h, target=x, primes=tuple(sorted(chosen)))
    check = verify(dec)
    if not check.valid:
        raise RuntimeError(f"internal: greedy produced invalid result: {check.reason}")
    return dec


def _assembly_items(h: int, modulus: int, exclude, prime_limit: int):
    """Item list for the assembly DP: exact values with primes behind them.

    Every prime p <= prime_limit is classified by d = p - h = e * q with
    e the 13-smooth part.  q = 1 and e | modulus gives a direct item of
    value 1/e.  Prime q > 13 gives a pairing candidate; two candidates
    with q | e1 + e2 combine into one item of q-free value
    (e1 + e2) / (q e1 e2).  Only items whose value times the modulus is
    integral are kept.
    """
    flags = prime_flags(prime_limit)
    primes = prime_array(prime_limit)
    div_arr = np.array(_divisors_of(modulus), dtype=np.int64)
    direct: list[tuple[Fraction, tuple[int, ...]]] = []
    q_rows = []
    excl_arr = np.array(sorted(exclude), dtype=np.int64) if exclude else None
    for lo in range(0, len(primes), 1 << 20):
        chunk = primes[lo:lo + (1 << 20)]
        if excl_arr is not None:
            chunk = chunk[~np.isin(chunk, excl_arr)]
        d = chunk - h
        ok = d >= 1
        chunk, d = chunk[ok], d[ok]
        rest = d.copy()
        for f in _SMOOTH_BASIS:
            while True:
                m = rest % f == 0
                if not m.any():
                    break
                rest[m] //= f
        e = d // rest
        smooth_e = np.isin(e, div_arr)
        dmask = smooth_e & (rest == 1)
        for ev, pv in zip(e[dmask].tolist(), chunk[dmask].tolist()):
            direct.append((Fraction(1, ev), (pv,)))
        pmask = smooth_e & (rest > _SMOOTH_BASIS[-1]) & flags[rest]
        q_rows.append(np.stack(
            [rest[pmask], e[pmask], chunk[pmask]], axis=1))
    items = direct
    rows = np.concatenate(q_rows) if q_rows else np.empty((0, 3), np.int64)
    order = np.lexsort((rows[:, 2], rows[:, 1], rows[:, 0]))
    rows = rows[order]
    bounds = np.flatnonzero(np.diff(rows[:, 0], prepend=-1, append=-1))
    for bi in range(len(bounds) - 1):
        grp = rows[bounds[bi]:bounds[bi + 1]]
        if len(grp) < 2:
            continue
        q = int(grp[0, 0])
        by_res: dict[int, list[tuple[int, int]]] = {}
        for _, ev, pv in grp.tolist():
            by_res.setdefault(ev % q, []).append((ev, pv))
        for r in sorted(by_res):
            if r == 0:
                continue
            comp = (q - r) % q
            if comp < r or comp not in by_res:
                continue
            if comp == r:
                cl = sorted(by_res[r])
                matched = zip(cl[::2], cl[1::2])
            else:
                matched = zip(sorted(by_res[r]), sorted(by_res[comp]))
            for (e1, p1), (e2, p2) in matched:
                v = Fraction(e1 + e2, q * e1 * e2)
                if (v * modulus).denominator == 1:
                    items.append((v, (p1, p2)))
    return items


def _assembly_decompose(x: Fraction, h: int, exclude,
                        budget: SearchBudget) -> Decomposition:
    """Pair-cancellation assembly: one subset-sum DP over direct smooth
    items plus q-cancelling pairs, at a high-exponent modulus."""
    M = budget.assembly_modulus
    k = x.denominator
    if M % k != 0:
        M = M // gcd(M, k) * k
    target = x * M
    if target.denominator != 1 or int(target) > budget.max_dp_target:
        raise SearchExhausted(
            f"assembly target for {x} exceeds DP budget", target=str(x))
    target = int(target)
    limit = min(budget.max_prime, budget.assembly_prime_limit)
    items = _assembly_items(h, M, exclude, limit)
    pool = []
    for v, ps in items:
        w = v * M
        if w.denominator == 1 and v <= x:
            pool.append((int(w), ps))
    pool.sort(key=lambda t: (t[0], t[1]))    # mass-cheap items preferred
    weight_total = sum(w for w, _ in pool)
    if weight_total < target:
        raise SearchExhausted(
            f"assembly items carry weight {weight_total} < {target}",
            pool_size=len(pool), weight_total=weight_total, target=target)
    idx = _bitset_subset_sum([w for w, _ in pool], target)
    if idx is None:
        raise SearchExhausted(
            f"assembly DP found no subset for {target}",
            pool_size=len(pool), weight_total=weight_total, target=target)
    primes: list[int] = []
    for i in idx:
        primes.extend(pool[i][1])
    dec = Decomposition(h=h, target=x, primes=tuple(sorted(primes)))
    check = verify(dec)
    if not check.valid:
        raise RuntimeError(f"internal: assembly produced invalid result: {check.reason}")
    return dec


def _dp_moduli(t: Fraction, budget: SearchBudget) -> list[int]:
    k = t.denominator
    out = []
    for L in budget.moduli:
        for M in (L // gcd(L, k) * k, L * k):
            if M not in out and (t * M).denominator == 1 \
                    and t * M <= budget.max_dp_target:
                out.append(M)
    return out


def _solve_single(t: Fraction, h: int, used: set, budget: SearchBudget,
                  depth: int = 0) -> list[int]:
    """One subtarget of the cascade; returns the primes used."""
    for M in _dp_moduli(t, budget):
        try:
            return list(smooth_dp_decompose(t, h, M, budget,
                                            exclude=frozenset(used)).primes)
        except SearchExhausted:
            continue
    if depth < budget.split_depth and t.numerator == 1:
        k = t.denominator
        try:
            first = _solve_single(Fraction(1, k + 1), h, used, budget,
                                  depth + 1)
            rest = _solve_single(Fraction(1, k * (k + 1)), h,
                                 used | set(first), budget, depth + 1)
            return first + rest
        except SearchExhausted:
            pass
    if depth == 0:
        try:
            return list(_assembly_decompose(t, h, frozenset(used),
                                            budget).primes)
        except SearchExhausted:
            pass
    # greedy steps on the residual, retrying the divisor-pool DP after each
    rem = t
    extra: list[int] = []
    local = set(used)
    while rem > 0 and len(extra) < budget.max_terms:
        d0 = max(1, -(-rem.denominator // rem.numerator))
        if d0 == 1 and not budget.allow_unit_denominator:
            d0 = 2
        p = max(d0 + h, 2)
        while p <= budget.max_prime and (
                p in local or p - h < d0 or not is_prime(p)):
            p += 1
        if p > budget.max_prime:
            break
        local.add(p)
        extra.append(p)
        rem -= Fraction(1, p - h)
        if rem == 0:
            return extra
        for M in _dp_moduli(rem, budget):
            try:
                dec = smooth_dp_decompose(rem, h, M, budget,
                                          exclude=frozenset(local))
                return extra + list(dec.primes)
            except SearchExhausted:
                continue
    raise SearchExhausted(f"all strategies exhausted for subtarget {t}",
                          target=str(t))


def decompose(x, h: int, budget: SearchBudget = DEFAULT_BUDGET,
              exclude=frozenset()) -> Decomposition:
    """Full cascade: x = m + r/q is split into m unit targets and r
    targets 1/q, solved with pairwise disjoint prime sets and merged.

    Raises ObstructionError at the feasibility gate and SearchExhausted
    when every strategy runs out of budget (never a nonexistence claim).
    """
    x = _gate(x, h)
    m = int(x)
    frac = x - m
    subtargets = [Fraction(1)] * m
    if frac:
        subtargets += [Fraction(1, frac.denominator)] * frac.numerator
    used = set(exclude)
    primes: list[int] = []
    for t in subtargets:
        got = _solve_single(t, h, used, budget)
        used.update(got)
        primes.extend(got)
    dec = Decomposition(h=h, target=x, primes=tuple(sorted(primes)))
    check = verify(dec)
    if not check.valid:
        raise RuntimeError(f"internal: cascade produced invalid result: {check.reason}")
    return dec


def r_fold_disjoint(x, h: int, r: int,
                    budget: SearchBudget = DEFAULT_BUDGET,
                    exclude=frozenset()) -> list[Decomposition]:
    """r decompositions of x with pairwise disjoint prime sets; each
    search excludes all previously used primes."""
    if r < 1:
        raise DomainError(f"need r >= 1, got {r}")
    used = set(exclude)
    out = []
    for _ in range(r):
        dec = decompose(x, h, budget, exclude=frozenset(used))
        used.update(dec.primes)
        out.append(dec)
    return out


def merge_by_pigeonhole(parts: PartialSolution) -> Decomposition:
    """Union d disjoint parts of value 1/d into a decomposition of 1.

    Picks the smallest d whose value occurs at least d times; raises
    MergeInsufficient (with the value multiset) when none does.
    """
    seen: set[int] = set()
    by_d: dict[int, list[tuple[int, ...]]] = {}
    for value, members in parts.parts:
        value = Fraction(value)
        if value.numerator != 1 or value.denominator < 1:
            raise DomainError(f"part value {value} is not of shape 1/d")
        got = Fraction(0)
        for p in members:
            if p in seen:
                raise DomainError(f"prime {p} appears in two parts")
            seen.add(p)
            if p - parts.h < 1:
                raise DomainError(f"denominator {p - parts.h} < 1")
            got += Fraction(1, p - parts.h)
        if got != value:
            raise DomainError(
                f"part {members} sums to {got}, not {value}")
        by_d.setdefault(value.denominator, []).append(tuple(members))
    counts = {d: len(v) for d, v in by_d.items()}
    for d in sorted(by_d):
        if counts[d] >= d:
            primes: list[int] = []
            for members in by_d[d][:d]:
                primes.extend(members)
            dec = Decomposition(h=parts.h, target=Fraction(1),
                                primes=tuple(sorted(primes)))
            check = verify(dec)
            if not check.valid:
                raise RuntimeError(f"internal: merge produced invalid result: {check.reason}")
            return dec
    raise MergeInsufficient(counts)
