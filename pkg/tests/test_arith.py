import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from egyptsieve.arith import (
    Factorization,
    SieveTable,
    balanced_product,
    factorize,
    is_prime,
    li_approx,
    prime_array,
    prime_flags,
    prime_reciprocal_sum,
    reciprocal_sum,
    sieve_primes,
)
from egyptsieve.errors import CapacityError, DomainError

from conftest import naive_factor, naive_is_prime


class TestSievePrimes:
    def test_limit_10(self):
        assert list(sieve_primes(10)) == [2, 3, 5, 7]

    def test_limit_2(self):
        assert list(sieve_primes(2)) == [2]

    def test_limit_below_2(self):
        with pytest.raises(DomainError):
            list(sieve_primes(1))

    def test_capacity(self):
        with pytest.raises(CapacityError):
            list(sieve_primes((1 << 28) ** 2))

    def test_against_trial_division(self):
        assert list(sieve_primes(10 ** 4)) == \
            [n for n in range(2, 10 ** 4 + 1) if naive_is_prime(n)]

    def test_count_1e6_against_independent_sieve(self):
        # the monolithic vectorized sieve is a separate implementation
        count = sum(1 for _ in sieve_primes(10 ** 6))
        assert count == 78498
        assert count == int(prime_flags(10 ** 6).sum())

    def test_segment_boundaries(self):
        # tiny segments force many boundary crossings
        assert list(sieve_primes(10 ** 4, segment_size=64)) == \
            list(sieve_primes(10 ** 4))


class TestIsPrime:
    def test_two(self):
        assert is_prime(2)

    def test_one(self):
        assert not is_prime(1)

    def test_mersenne_61(self):
        # Lucas-Lehmer is the independent certificate for 2^61 - 1
        m = 2 ** 61 - 1
        s = 4
        for _ in range(61 - 2):
            s = (s * s - 2) % m
        assert s == 0
        assert is_prime(m)

    def test_agrees_with_sieve_to_1e6(self):
        flags = prime_flags(10 ** 6)
        mism = [n for n in range(10 ** 6 + 1) if is_prime(n) != bool(flags[n])]
        assert mism == []

    def test_carmichael_and_square(self):
        assert not is_prime(561)
        assert not is_prime(3215031751)
        assert not is_prime(9 ** 20)


class TestFactorize:
    def test_12(self, table6):
        assert factorize(12, table6).factors == ((2, 2), (3, 1))

    def test_prime_input(self, table6):
        assert factorize(97, table6).factors == ((97, 1),)

    def test_720720_multiplies_back(self, table6):
        fz = factorize(720720, table6)
        assert fz.factors == ((2, 4), (3, 2), (5, 1), (7, 1), (11, 1), (13, 1))
        assert fz.value == 720720

    def test_one(self, table6):
        fz = factorize(1, table6)
        assert fz.factors == ()
        assert fz.omega == 0
        assert fz.max_prime_power == 1

    def test_zero(self, table6):
        with pytest.raises(DomainError):
            factorize(0, table6)

    def test_beyond_limit(self, table6):
        with pytest.raises(CapacityError):
            factorize(10 ** 6 + 1, table6)

    def test_round_trip_full_range(self, table6):
        for n in range(2, 10 ** 6 + 1):
            assert factorize(n, table6).value == n

    def test_segmented_table_agrees(self, table6):
        big = SieveTable((1 << 24) + 2 ** 20)
        for n in (2, 97, 720720, 999983, (1 << 24) + 7, (1 << 24) + 2 ** 20):
            assert factorize(n, big).factors == tuple(naive_factor(n))

    def test_divisors(self, table6):
        assert factorize(12, table6).divisors() == [1, 2, 3, 4, 6, 12]
        assert factorize(1, table6).divisors() == [1]

    def test_max_prime_power(self, table6):
        assert factorize(12, table6).max_prime_power == 4
        assert factorize(97, table6).max_prime_power == 97

    def test_malformed_rejected(self):
        with pytest.raises(DomainError):
            Factorization(((3, 1), (2, 1)))
        with pytest.raises(DomainError):
            Factorization(((2, 0),))


class TestOmegaAdditivity:
    @given(st.integers(2, 10 ** 3), st.integers(2, 10 ** 3))
    @settings(max_examples=150, deadline=None)
    def test_additive_on_coprime(self, table6, m, n):
        assume(math.gcd(m, n) == 1)
        fm, fn, fmn = (factorize(k, table6) for k in (m, n, m * n))
        assert fmn.omega == fm.omega + fn.omega


class TestLiApprox:
    @staticmethod
    def _li_quadrature(n):
        """Composite Simpson on int_2^n dt/log t in u = log t, plus li(2)."""
        li2 = 1.0451637801174927848445888891946131365226155781512
        a, b = math.log(2), math.log(n)
        steps = 20000
        h = (b - a) / steps
        total = 0.0
        for i in range(steps):
            u0 = a + i * h
            u1 = u0 + h
            um = (u0 + u1) / 2
            f0 = math.exp(u0) / u0
            fm = math.exp(um) / um
            f1 = math.exp(u1) / u1
            total += (f0 + 4 * fm + f1) * h / 6
        return total + li2

    def test_1e6_against_quadrature(self):
        val = li_approx(10 ** 6)
        ref = self._li_quadrature(10 ** 6)
        assert abs(val - ref) / ref < 1e-9
        assert val == pytest.approx(78627.549159, abs=1e-3)

    def test_1e8_against_quadrature(self):
        val = li_approx(10 ** 8)
        ref = self._li_quadrature(10 ** 8)
        assert abs(val - ref) / ref < 1e-9
        assert val == pytest.approx(5762209.375448, abs=1e-2)

    def test_monotone(self):
        assert li_approx(2 * 10 ** 4) > li_approx(10 ** 4)

    def test_domain(self):
        with pytest.raises(DomainError):
            li_approx(2)


class TestExactRationals:
    @given(st.integers(1, 1 << 256), st.integers(1, 1 << 256),
           st.integers(1, 1 << 256), st.integers(1, 1 << 256))
    @settings(max_examples=100, deadline=None)
    def test_add_sub_roundtrip(self, a, b, c, d):
        x = Fraction(a, b)
        y = Fraction(c, d)
        assert (x + y) - y == x

    def test_reciprocal_sum_matches_naive(self):
        vals = [12, 10, 10, 7, 360360]
        assert reciprocal_sum(vals) == sum(Fraction(1, v) for v in vals)
        assert reciprocal_sum([]) == 0

    def test_prime_reciprocal_sum(self):
        num, den = prime_reciprocal_sum([2, 3, 5, 7])
        assert Fraction(num, den) == Fraction(1, 2) + Fraction(1, 3) \
            + Fraction(1, 5) + Fraction(1, 7)
        assert math.gcd(num, den) == 1

    def test_balanced_product(self):
        assert balanced_product([]) == 1
        assert balanced_product([7]) == 7
        assert balanced_product(range(1, 11)) == math.factorial(10)
