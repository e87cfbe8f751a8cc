"""Sparse multivariate polynomials over Q or GF(p).

Variables come from a fixed universe: curve coefficients ``C[i,j,k]``, line
coordinates ``v1..v3`` and ``u1..u3``, the quartic letters ``a..o`` and free
parameters ``t0, t1, ...``. A monomial is a tuple of ``(VarId, exponent)``
pairs sorted by ``VarId``; a polynomial is a dict from monomials to nonzero
coefficients, so equal polynomials have equal term maps.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

from .exactnum import PrimeField

KIND_C, KIND_V, KIND_U, KIND_LETTER, KIND_PARAM = range(5)

LETTERS = "abcdefghijklmno"


class VarId(NamedTuple):
    kind: int
    index: tuple[int, ...]

    def __str__(self) -> str:
        if self.kind == KIND_C:
            return "C[%d,%d,%d]" % self.index
        if self.kind == KIND_V:
            return f"v{self.index[0]}"
        if self.kind == KIND_U:
            return f"u{self.index[0]}"
        if self.kind == KIND_LETTER:
            return LETTERS[self.index[0]]
        return f"t{self.index[0]}"


def Cvar(i: int, j: int, k: int) -> VarId:
    if min(i, j, k) < 0:
        raise ValueError(f"negative exponent in C[{i},{j},{k}]")
    return VarId(KIND_C, (i, j, k))


def Vvar(axis: int) -> VarId:
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 1..3, got {axis}")
    return VarId(KIND_V, (axis,))


def Uvar(axis: int) -> VarId:
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 1..3, got {axis}")
    return VarId(KIND_U, (axis,))


def letter(ch: str) -> VarId:
    return VarId(KIND_LETTER, (LETTERS.index(ch),))


def param(idx: int) -> VarId:
    return VarId(KIND_PARAM, (idx,))


def exponent_triples(d: int) -> list[tuple[int, int, int]]:
    """All (i, j, k) with i+j+k = d, in the documented graded-lex order."""
    return [(i, j, d - i - j) for i in range(d, -1, -1) for j in range(d - i, -1, -1)]


# Quartic letters a..o name the quartic slots in this order.
QUARTIC_SLOTS = exponent_triples(4)


def enumerate_monomials(degree: int, nvars: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total ``degree`` in ``nvars`` variables.

    Order is graded lex with x1 > x2 > ... (descending lexicographic on the
    exponent vector), e.g. for degree 2 in 3 variables::

        (2,0,0) (1,1,0) (1,0,1) (0,2,0) (0,1,1) (0,0,2)
    """
    if degree < 0 or nvars < 1:
        raise ValueError("need degree >= 0 and nvars >= 1")
    if nvars == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        for rest in enumerate_monomials(degree - first, nvars - 1):
            out.append((first,) + rest)
    return out


def count_monomials(degree: int, nvars: int) -> int:
    return comb(degree + nvars - 1, nvars - 1)


Monomial = tuple  # tuple[tuple[VarId, int], ...]
Ring = Union[PrimeField, None]  # None means Q (ints and Fractions)


class RingMismatchError(TypeError):
    pass


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for var, e in b:
        d[var] = d.get(var, 0) + e
    return tuple(sorted(d.items()))


def _norm_q(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class MultiPoly:
    """Immutable sparse polynomial.

    ``ring`` is None for rational coefficients or a :class:`PrimeField`.
    """

    __slots__ = ("terms", "ring", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None, ring: Ring = None):
        clean: dict = {}
        if terms:
            for mono, c in terms.items():
                mono = tuple(sorted((v, e) for v, e in mono if e))
                c = ring(c) if ring is not None else _norm_q(c)
                if mono in clean:
                    c = clean[mono] + c
                    if ring is not None:
                        c %= ring.p
                    else:
                        c = _norm_q(c)
                if c:
                    clean[mono] = c
                else:
                    clean.pop(mono, None)
        self.terms = clean
        self.ring = ring
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, ring: Ring) -> "MultiPoly":
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.ring = ring
        obj._hash = None
        return obj

    # constructors
    @classmethod
    def const(cls, c, ring: Ring = None) -> "MultiPoly":
        return cls({(): c}, ring)

    @classmethod
    def var(cls, v: VarId, ring: Ring = None) -> "MultiPoly":
        return cls({((v, 1),): 1}, ring)

    @classmethod
    def linear(cls, coeffs: Sequence, variables: Sequence[VarId], ring: Ring = None) -> "MultiPoly":
        return cls({((v, 1),): c for v, c in zip(variables, coeffs)}, ring)

    # basic protocol
    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            if self.is_constant():
                return self.constant_term() == (other % self.ring.p if self.ring else other)
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        tag = "Q" if self.ring is None else f"GF({self.ring.p})"
        return f"MultiPoly[{tag}]({to_text(self)})"

    def __str__(self) -> str:
        return to_text(self)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_term(self):
        return self.terms.get((), 0)

    def variables(self) -> list[VarId]:
        return sorted({v for mono in self.terms for v, _ in mono})

    # arithmetic
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.ring != self.ring:
                raise RingMismatchError(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.const(other, self.ring)
        raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")

    def _reduce(self, c):
        return c % self.ring.p if self.ring is not None else _norm_q(c)

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = self._reduce(out.get(mono, 0) + c)
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return MultiPoly._raw(out, self.ring)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw({m: self._reduce(-c) for m, c in self.terms.items()}, self.ring)

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                out[m] = out.get(m, 0) + ca * cb
        return MultiPoly._raw({m: c for m, c in ((m, self._reduce(c)) for m, c in out.items()) if c}, self.ring)

    __rmul__ = __mul__

    def scale(self, s) -> "MultiPoly":
        if self.ring is not None:
            s = self.ring(s)
        return MultiPoly._raw(
            {m: c for m, c in ((m, self._reduce(c * s)) for m, c in self.terms.items()) if c}, self.ring
        )

    def __pow__(self, e: int) -> "MultiPoly":
        if e < 0:
            raise ValueError("negative power")
        result = MultiPoly.const(1, self.ring)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # conversions
    def reduce_mod(self, field: PrimeField) -> "MultiPoly":
        if self.ring is not None:
            raise RingMismatchError("already a GF(p) polynomial")
        return MultiPoly({m: field(c) for m, c in self.terms.items()}, field)

    def split_by(self, kinds: Iterable[int]) -> dict[Monomial, "MultiPoly"]:
        """Group terms by their part in variables of the given kinds.

        Returns ``{monomial in those variables: cofactor polynomial}``.
        """
        kinds = set(kinds)
        out: dict[Monomial, dict] = {}
        for mono, c in self.terms.items():
            key = tuple((v, e) for v, e in mono if v.kind in kinds)
            rest = tuple((v, e) for v, e in mono if v.kind not in kinds)
            out.setdefault(key, {})[rest] = c
        return {k: MultiPoly._raw(t, self.ring) for k, t in out.items()}

    def substitute(self, mapping: Mapping[VarId, "MultiPoly"]) -> "MultiPoly":
        """Replace variables by polynomials; unmapped variables are kept."""
        result = MultiPoly(ring=self.ring)
        cache: dict = {}
        for mono, c in self.terms.items():
            term = MultiPoly.const(c, self.ring)
            for v, e in mono:
                if v in mapping:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = mapping[v] ** e
                    term = term * cache[key]
                else:
                    term = term * MultiPoly({((v, e),): 1}, self.ring)
            result = result + term
        return result


def poly_add(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    return a + b


def poly_mul(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    return a * b


def poly_pow(a: MultiPoly, e: int) -> MultiPoly:
    return a ** e


# gradings

@dataclass(frozen=True)
class Grading:
    deg_C: int
    deg_v: int
    overline_deg: tuple[int, int, int]


@dataclass(frozen=True)
class Inhomogeneous:
    witness: tuple[Monomial, Monomial]


def monomial_grading(mono: Monomial) -> Grading:
    """Gradings of a monomial; letters count as their quartic slot, u and t are ignored."""
    dc = dv = 0
    w = [0, 0, 0]
    for var, e in mono:
        if var.kind == KIND_C:
            trip = var.index
        elif var.kind == KIND_LETTER:
            trip = QUARTIC_SLOTS[var.index[0]]
        elif var.kind == KIND_V:
            dv += e
            w[var.index[0] - 1] += e
            continue
        else:
            continue
        dc += e
        for t in range(3):
            w[t] += e * trip[t]
    return Grading(dc, dv, (w[0], w[1], w[2]))


def grade_of(f: MultiPoly) -> Grading | Inhomogeneous | None:
    """Common grading of all terms, an :class:`Inhomogeneous` report, or None for f = 0."""
    first = None
    for mono in f.terms:
        g = monomial_grading(mono)
        if first is None:
            first = (mono, g)
        elif g != first[1]:
            return Inhomogeneous((first[0], mono))
    return None if first is None else first[1]


# evaluation

class MissingVariableError(KeyError):
    pass


def evaluate(f: MultiPoly, assignment: Mapping[VarId, object]):
    """Exact term-sum evaluation. Values may be ints or Fractions."""
    p = f.ring.p if f.ring is not None else None
    powers: dict = {}
    total = 0
    for mono, c in f.terms.items():
        t = c
        for v, e in mono:
            key = (v, e)
            pw = powers.get(key)
            if pw is None:
                try:
                    x = assignment[v]
                except KeyError:
                    raise MissingVariableError(f"no value for variable {v}") from None
                if p is not None:
                    x = f.ring(x)
                    pw = pow(x, e, p)
                else:
                    pw = x ** e
                powers[key] = pw
            t = t * pw
            if p is not None:
                t %= p
        total += t
    if p is not None:
        return total % p
    return _norm_q(total)


# text serialization

def _coef_text(c) -> str:
    return str(c)


def _mono_text(mono: Monomial) -> str:
    return "*".join(str(v) if e == 1 else f"{v}^{e}" for v, e in mono)


def to_text(f: MultiPoly) -> str:
    """Serialize as ``coeff*var^e*...`` terms joined by ``+``/``-``."""
    if not f.terms:
        return "0"
    parts = []
    for mono in sorted(f.terms, key=_text_order):
        c = f.terms[mono]
        if f.ring is not None:
            c = f.ring.symmetric(c)
        neg = c < 0
        a = -c if neg else c
        body = _mono_text(mono)
        if not body:
            s = _coef_text(a)
        elif a == 1:
            s = body
        else:
            s = f"{_coef_text(a)}*{body}"
        parts.append(("-" if neg else "+", s))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, s in parts[1:]:
        out += f" {sign} {s}"
    return out


def _text_order(mono: Monomial):
    # v-part descending (matches matrix column order), then the rest
    ve = [0, 0, 0]
    rest = []
    for v, e in mono:
        if v.kind == KIND_V:
            ve[v.index[0] - 1] = e
        else:
            rest.append((v, -e))
    return (-sum(ve), [-x for x in ve], rest)


_VAR_RE = re.compile(r"C\[(\d+),(\d+),(\d+)\]|([vut])(\d+)|([a-o])")
_TERM_SPLIT = re.compile(r"\s*([+-])\s*")


class ParseError(ValueError):
    pass


def _parse_var(tok: str) -> VarId:
    m = _VAR_RE.fullmatch(tok)
    if not m:
        raise ParseError(f"unknown variable {tok!r}")
    if m.group(1) is not None:
        return Cvar(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    if m.group(4) is not None:
        kind, idx = m.group(4), int(m.group(5))
        if kind == "t":
            return param(idx)
        return Vvar(idx) if kind == "v" else Uvar(idx)
    return letter(m.group(6))


def from_text(s: str, ring: Ring = None) -> MultiPoly:
    """Inverse of :func:`to_text`."""
    s = s.strip()
    if not s:
        raise ParseError("empty polynomial text")
    if s[0] not in "+-":
        s = "+" + s
    pieces = _TERM_SPLIT.split(s)
    terms: dict = {}
    # pieces: ['', sign, term, sign, term, ...]
    if pieces[0].strip():
        raise ParseError(f"unexpected text {pieces[0]!r}")
    for sign, body in zip(pieces[1::2], pieces[2::2]):
        if not body:
            raise ParseError("dangling sign")
        coef = Fraction(1)
        mono: dict = {}
        for factor in body.split("*"):
            factor = factor.strip()
            if re.fullmatch(r"\d+(/\d+)?", factor):
                coef *= Fraction(factor)
                continue
            name, _, exp = factor.partition("^")
            e = int(exp) if exp else 1
            v = _parse_var(name)
            mono[v] = mono.get(v, 0) + e
        if sign == "-":
            coef = -coef
        key = tuple(sorted(mono.items()))
        terms[key] = terms.get(key, 0) + coef
    return MultiPoly(terms, ring)
