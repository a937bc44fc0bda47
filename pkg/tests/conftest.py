import pytest

from egyptsieve.arith import SieveTable, prime_array
from egyptsieve.spectrum import ShiftParams


@pytest.fixture(scope="session")
def table6():
    return SieveTable(10 ** 6)


@pytest.fixture(scope="session")
def primes6():
    return prime_array(10 ** 6)


@pytest.fixture(scope="session")
def shift_plus1():
    return ShiftParams(h=1, q=1)


def naive_factor(n):
    """Independent trial-division factorization used as the test oracle."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            e = 0
            while n % f == 0:
                n //= f
                e += 1
            out.append((f, e))
        f += 1 if f == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def naive_is_prime(n):
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True
