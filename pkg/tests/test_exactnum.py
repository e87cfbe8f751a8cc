from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cayley_salmon.exactnum import (
    DEFAULT_PRIMES,
    REFERENCE_PRIME,
    DuplicatePrimeError,
    NotInvertibleError,
    PrimeField,
    crt_combine,
    hadamard_bound,
    is_prime,
    primes_for_bound,
    rational_reconstruction,
)


def test_inverse_of_two_mod_6361():
    F = PrimeField(REFERENCE_PRIME)
    assert F.inv(2) == 3181
    assert F.mul(2, 3181) == 1


def test_wraparound():
    assert PrimeField(6361).add(6360, 1) == 0


def test_small_inverse():
    assert PrimeField(7).inv(3) == 5


def test_zero_has_no_inverse():
    with pytest.raises(NotInvertibleError):
        PrimeField(7).inv(0)


@pytest.mark.parametrize("n", [0, 1, 4, 6361 * 7, 2**31 - 3])
def test_rejects_nonprime(n):
    with pytest.raises(ValueError):
        PrimeField(n)


def test_default_primes_are_prime_and_int64_safe():
    assert len(set(DEFAULT_PRIMES)) == 2
    for p in DEFAULT_PRIMES:
        assert is_prime(p)
        assert PrimeField(p).int64_safe


def test_reduces_fractions():
    F = PrimeField(7)
    assert F(Fraction(1, 3)) == 5
    assert F(-1) == 6
    with pytest.raises(NotInvertibleError):
        F(Fraction(1, 7))


def test_field_is_immutable():
    F = PrimeField(7)
    with pytest.raises(AttributeError):
        F.p = 11


def test_crt_small():
    assert crt_combine([(1, 3), (2, 5)]) == 7


@pytest.mark.parametrize("p", [2, 7, 6361])
def test_crt_zero(p):
    assert crt_combine([(0, p)]) == 0


def test_crt_minus_one_and_even():
    x = crt_combine([(6360, 6361), (0, 2)])
    assert x == 6360
    assert x % 6361 == 6360 and x % 2 == 0


def test_crt_symmetric():
    assert crt_combine([(6360, 6361)], symmetric=True) == -1


def test_crt_duplicate_prime():
    with pytest.raises(DuplicatePrimeError):
        crt_combine([(1, 7), (2, 7)])


@given(st.integers(-10**15, 10**15))
def test_crt_roundtrip(x):
    ps = list(DEFAULT_PRIMES)
    assert crt_combine([(x % p, p) for p in ps], symmetric=True) == x


@given(st.integers(-1000, 1000), st.integers(1, 1000))
def test_rational_reconstruction_roundtrip(n, d):
    m = DEFAULT_PRIMES[0]
    q = Fraction(n, d)
    a = q.numerator * pow(q.denominator, -1, m) % m
    assert rational_reconstruction(a, m) == q


def test_hadamard_and_prime_budget():
    rows = [[3, 4], [0, 5]]
    assert hadamard_bound(rows) >= 15
    ps = primes_for_bound(10**30)
    assert len(set(ps)) == len(ps)
    prod = 1
    for p in ps:
        assert is_prime(p)
        prod *= p
    assert prod > 2 * 10**30


_q = st.fractions(max_denominator=10**6).filter(lambda x: x.denominator % 6361 != 0)


@given(_q, _q)
def test_reduction_is_a_ring_homomorphism(a, b):
    F = PrimeField(6361)
    assert F(a + b) == F.add(F(a), F(b))
    assert F(a * b) == F.mul(F(a), F(b))
    assert F(a - b) == F.sub(F(a), F(b))
    if F(b):
        assert F(a / b) == F.div(F(a), F(b))
