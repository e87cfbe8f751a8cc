"""Exact arithmetic: word-size prime fields, CRT lifting, rational reconstruction.

Rationals are plain :class:`fractions.Fraction` values, which are always kept
in lowest terms with a positive denominator.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt, prod
from typing import Iterable, Sequence

# Small reference prime: the default for the heavy quintic computations, and
# handy for fast, readable residues in tests.
REFERENCE_PRIME = 6361

# Default working primes. Both are below 2**31 so products of two residues
# fit in a signed 64-bit integer, which the vectorized elimination relies on.
DEFAULT_PRIMES = (2147483647, 2147483629)

INT64_SAFE_BOUND = 1 << 31


class NotInvertibleError(ZeroDivisionError):
    """Raised when inverting zero (or a non-unit) modulo p."""


class DuplicatePrimeError(ValueError):
    pass


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def previous_prime(n: int) -> int:
    """Largest prime strictly below n."""
    n -= 1
    while n > 2 and not is_prime(n):
        n -= 1
    return n


class PrimeField:
    """The field GF(p) for an odd word-size prime p.

    Elements are plain Python ints in ``[0, p)``.
    """

    __slots__ = ("p",)

    def __init__(self, p: int):
        p = int(p)
        if p <= 2 or p.bit_length() > 64 or not is_prime(p):
            raise ValueError(f"{p} is not an odd word-size prime")
        object.__setattr__(self, "p", p)

    def __setattr__(self, name, value):
        raise AttributeError("PrimeField is immutable")

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("GF", self.p))

    def __call__(self, x) -> int:
        """Reduce an int or Fraction into the field."""
        if isinstance(x, Fraction):
            return x.numerator % self.p * self.inv(x.denominator % self.p) % self.p
        return int(x) % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise NotInvertibleError(f"0 has no inverse modulo {self.p}")
        return pow(a, -1, self.p)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.p

    def symmetric(self, a: int) -> int:
        """Representative in (-p/2, p/2]."""
        a %= self.p
        return a - self.p if a > self.p // 2 else a

    @property
    def int64_safe(self) -> bool:
        return self.p < INT64_SAFE_BOUND


def crt_combine(residues: Iterable[tuple[int, int]], symmetric: bool = False) -> int:
    """Combine ``(value, prime)`` pairs into the unique integer modulo the product.

    With ``symmetric=True`` the result lies in ``(-M/2, M/2]``.
    """
    pairs = [(int(v), int(q)) for v, q in residues]
    moduli = [q for _, q in pairs]
    if len(set(moduli)) != len(moduli):
        raise DuplicatePrimeError(f"duplicate moduli in {moduli}")
    x, m = 0, 1
    for v, q in pairs:
        # x + m*t == v (mod q)
        t = (v - x) * pow(m, -1, q) % q
        x += m * t
        m *= q
    x %= m
    if symmetric and x > m // 2:
        x -= m
    return x


def rational_reconstruction(a: int, m: int, bound: int | None = None) -> Fraction | None:
    """Find n/d == a (mod m) with |n|, d <= bound via the half-extended Euclid.

    Returns None when no such fraction exists. The default bound is
    ``isqrt(m // 2)``, which makes the answer unique when it exists.
    """
    a %= m
    if bound is None:
        bound = isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def hadamard_bound(rows: Sequence[Sequence[int]]) -> int:
    """Upper bound on |det| of an integer matrix (product of row norms, rounded up)."""
    b = 1
    for row in rows:
        b *= isqrt(sum(x * x for x in row)) + 1
    return b


def primes_for_bound(bound: int, start: int = DEFAULT_PRIMES[0]) -> list[int]:
    """Distinct primes below ``start`` whose product exceeds ``2 * bound``."""
    out: list[int] = []
    q = start + 1
    while prod(out) <= 2 * bound:
        q = previous_prime(q)
        out.append(q)
    return out
