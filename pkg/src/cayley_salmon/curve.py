"""Plane curves, the u^4 h + v w decomposition, and coordinate changes.

Curves use the plain monomial convention ``P = sum C_ijk x1^i x2^j x3^k``
(no binomial factors). Homogeneous forms in x are stored as dicts
``{(i, j, k): coeff}``; coefficients are ints/Fractions over Q or ints mod p
when a :class:`PrimeField` is given.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exactnum import PrimeField
from .polycore import exponent_triples

Form = dict  # {(i, j, k): coeff}


def _red(c, ring: PrimeField | None):
    if ring is None:
        if isinstance(c, Fraction) and c.denominator == 1:
            return c.numerator
        return c
    return ring(c)


def form_mul(a: Mapping, b: Mapping, ring: PrimeField | None = None) -> Form:
    out: dict = {}
    for ea, ca in a.items():
        if not ca:
            continue
        for eb, cb in b.items():
            if not cb:
                continue
            e = (ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2])
            out[e] = out.get(e, 0) + ca * cb
    return {e: _red(c, ring) for e, c in out.items() if _red(c, ring)}


def form_add(a: Mapping, b: Mapping, ring: PrimeField | None = None) -> Form:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + c
    return {e: _red(c, ring) for e, c in out.items() if _red(c, ring)}


def form_pow(a: Mapping, e: int, ring: PrimeField | None = None) -> Form:
    out: Form = {(0, 0, 0): 1}
    for _ in range(e):
        out = form_mul(out, a, ring)
    return out


def linear_form(w: Sequence) -> Form:
    return {(1, 0, 0): w[0], (0, 1, 0): w[1], (0, 0, 1): w[2]}


def form_degree_ok(f: Mapping, d: int) -> bool:
    return all(sum(e) == d for e, c in f.items() if c)


def eval_form(f: Mapping, x: Sequence, ring: PrimeField | None = None):
    total = 0
    for (i, j, k), c in f.items():
        total += c * x[0] ** i * x[1] ** j * x[2] ** k
    return _red(total, ring)


def cross(a: Sequence, b: Sequence) -> tuple:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


@dataclass(frozen=True)
class PlaneCurve:
    r: int
    coeffs: Mapping[tuple[int, int, int], object]
    ring: PrimeField | None = None

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f"degree must be positive, got {self.r}")
        clean = {}
        for e, c in self.coeffs.items():
            e = tuple(int(x) for x in e)
            if len(e) != 3 or min(e) < 0 or sum(e) != self.r:
                raise ValueError(f"exponent {e} does not fit degree {self.r}")
            c = _red(c, self.ring)
            if c:
                clean[e] = c
        object.__setattr__(self, "coeffs", clean)

    def __getitem__(self, e) -> object:
        return self.coeffs.get(tuple(e), 0)

    def slots(self) -> list[tuple[int, int, int]]:
        return exponent_triples(self.r)

    def vector(self) -> list:
        """Coefficients in slot order (all (r+1)(r+2)/2 entries)."""
        return [self[e] for e in self.slots()]

    def form(self) -> Form:
        return dict(self.coeffs)

    def __call__(self, x: Sequence):
        return eval_form(self.coeffs, x, self.ring)

    def gradient(self, x: Sequence) -> tuple:
        g = [0, 0, 0]
        for (i, j, k), c in self.coeffs.items():
            ex = (i, j, k)
            for t in range(3):
                if ex[t]:
                    d = list(ex)
                    d[t] -= 1
                    g[t] += ex[t] * c * x[0] ** d[0] * x[1] ** d[1] * x[2] ** d[2]
        return tuple(_red(c, self.ring) for c in g)

    def scaled(self, lam) -> "PlaneCurve":
        return PlaneCurve(self.r, {e: c * lam for e, c in self.coeffs.items()}, self.ring)

    def reduce_mod(self, field_: PrimeField) -> "PlaneCurve":
        return PlaneCurve(self.r, {e: field_(c) for e, c in self.coeffs.items()}, field_)


@dataclass(frozen=True)
class DecompositionWitness:
    """P = u^4 h + v w with u, v linear, deg h = r-4, deg w = r-1."""

    r: int
    u: tuple
    h: Mapping = field(default_factory=dict)
    v: tuple = (0, 0, 0)
    w: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(self.u))
        object.__setattr__(self, "v", tuple(self.v))
        object.__setattr__(self, "h", {tuple(e): c for e, c in self.h.items()})
        object.__setattr__(self, "w", {tuple(e): c for e, c in self.w.items()})


class DegreeMismatchError(ValueError):
    pass


class DegenerateWitnessError(ValueError):
    """u and v are proportional, so they do not meet in a single point."""


def compose_curve(wit: DecompositionWitness, ring: PrimeField | None = None) -> PlaneCurve:
    r = wit.r
    if r < 4:
        raise DegreeMismatchError(f"degree {r} < 4")
    if len(wit.u) != 3 or len(wit.v) != 3:
        raise DegreeMismatchError("u and v must be linear forms with 3 coefficients")
    if not form_degree_ok(wit.h, r - 4) or not form_degree_ok(wit.w, r - 1):
        raise DegreeMismatchError(f"h must have degree {r - 4} and w degree {r - 1}")
    u4 = form_pow(linear_form(wit.u), 4, ring)
    P = form_add(form_mul(u4, wit.h, ring), form_mul(linear_form(wit.v), wit.w, ring), ring)
    return PlaneCurve(r, P, ring)


@dataclass(frozen=True)
class TangencyReport:
    passed: bool
    point: tuple
    value: object
    gradient: tuple


def tangency_oracle(wit: DecompositionWitness, ring: PrimeField | None = None) -> TangencyReport:
    """Check P(X) = 0 and grad P(X) parallel to v at X = u x v.

    A vanishing gradient (singular point) counts as parallel.
    """
    X = cross(wit.u, wit.v)
    if ring is not None:
        X = tuple(ring(c) for c in X)
    if not any(X):
        raise DegenerateWitnessError("u and v are proportional")
    P = compose_curve(wit, ring)
    val = P(X)
    grad = P.gradient(X)
    par = cross(grad, wit.v)
    if ring is not None:
        par = tuple(ring(c) for c in par)
    return TangencyReport(val == 0 and not any(par), X, val, grad)


def det3(g: Sequence[Sequence]) -> object:
    return (
        g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
        - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
    )


class SingularMatrixError(ValueError):
    pass


def act_linear(g: Sequence[Sequence], P: PlaneCurve) -> PlaneCurve:
    """The curve x -> P(g x).

    This is a right action: act_linear(g, act_linear(h, P)) == act_linear(h @ g, P).
    """
    if P.ring is not None:
        d = P.ring(det3(g))
    else:
        d = det3(g)
    if d == 0:
        raise SingularMatrixError("g is singular")
    rows = [linear_form(row) for row in g]
    powers = [[form_pow(rows[t], e, P.ring) for e in range(P.r + 1)] for t in range(3)]
    out: Form = {}
    for (i, j, k), c in P.coeffs.items():
        term = form_mul(form_mul(powers[0][i], powers[1][j], P.ring), powers[2][k], P.ring)
        for e, t in term.items():
            out[e] = out.get(e, 0) + c * t
    return PlaneCurve(P.r, out, P.ring)


def matmul3(a, b):
    return [[sum(a[i][t] * b[t][j] for t in range(3)) for j in range(3)] for i in range(3)]


# random data

def _draw(rng: random.Random, ring: PrimeField | None, bound: int):
    if ring is None:
        return rng.randint(-bound, bound)
    return rng.randrange(ring.p)


def random_curve(r: int, ring: PrimeField | None = None, seed: int = 0, bound: int = 10**6) -> PlaneCurve:
    rng = random.Random(f"curve:{r}:{seed}")
    return PlaneCurve(r, {e: _draw(rng, ring, bound) for e in exponent_triples(r)}, ring)


def random_witness(r: int, ring: PrimeField | None = None, seed: int = 0, bound: int = 50) -> DecompositionWitness:
    """Random witness with u and v independent."""
    rng = random.Random(f"witness:{r}:{seed}")
    while True:
        u = tuple(_draw(rng, ring, bound) for _ in range(3))
        v = tuple(_draw(rng, ring, bound) for _ in range(3))
        X = cross(u, v)
        if ring is not None:
            X = tuple(ring(c) for c in X)
        if any(X):
            break
    h = {e: _draw(rng, ring, bound) for e in exponent_triples(r - 4)}
    w = {e: _draw(rng, ring, bound) for e in exponent_triples(r - 1)}
    return DecompositionWitness(r, u, h, v, w)


def random_undulation_curve(r: int, ring: PrimeField | None = None, seed: int = 0,
                            bound: int = 50) -> tuple[PlaneCurve, DecompositionWitness]:
    wit = random_witness(r, ring, seed, bound)
    return compose_curve(wit, ring), wit


# restriction to a line

def line_points(v: Sequence) -> tuple[tuple, tuple]:
    """Two independent points spanning the line v . x = 0."""
    if v[2]:
        return (v[2], 0, -v[0]), (0, v[2], -v[1])
    if v[1]:
        return (v[1], -v[0], 0), (0, 0, 1)
    if v[0]:
        return (0, 1, 0), (0, 0, 1)
    raise ValueError("zero vector is not a line")


def restrict_to_line(P: PlaneCurve, v: Sequence) -> list:
    """Coefficients [c_0, ..., c_r] of P(s A + t B) = sum c_i s^i t^(r-i)."""
    A, B = line_points(v)
    # x = s A + t B; each x_t is a binary linear form, stored as {s_exp: coeff}
    lin = [{1: A[t], 0: B[t]} for t in range(3)]

    def bmul(a, b):
        out: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                out[ea + eb] = out.get(ea + eb, 0) + ca * cb
        return out

    def bpow(a, e):
        out = {0: 1}
        for _ in range(e):
            out = bmul(out, a)
        return out

    coeffs = [0] * (P.r + 1)
    for (i, j, k), c in P.coeffs.items():
        for se, val in bmul(bmul(bpow(lin[0], i), bpow(lin[1], j)), bpow(lin[2], k)).items():
            coeffs[se] += c * val
    return [_red(c, P.ring) for c in coeffs]


def _upoly_trim(a: list) -> list:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _upoly_rem(a: list, b: list) -> list:
    a = [Fraction(x) for x in a]
    while len(a) >= len(b):
        q = a[-1] / b[-1]
        shift = len(a) - len(b)
        for t in range(len(b)):
            a[shift + t] -= q * b[t]
        a = _upoly_trim(a)
    return a


def _upoly_gcd(a: list, b: list) -> list:
    a, b = _upoly_trim(a), _upoly_trim(b)
    while b:
        a, b = b, _upoly_rem(a, b)
    return a


def _upoly_deriv(a: list) -> list:
    return [i * a[i] for i in range(1, len(a))]


def max_root_multiplicity(binary: Sequence) -> int | float:
    """Largest multiplicity of a root of sum c_i s^i t^(r-i) over an algebraic closure.

    Returns ``inf`` for the zero form (the line is a component of the curve).
    Exact for rational coefficients.
    """
    c = list(binary)
    if not any(c):
        return float("inf")
    r = len(c) - 1
    # root t = 0, i.e. (1 : 0): number of vanishing top coefficients
    best = 0
    for i in range(r, -1, -1):
        if c[i]:
            break
        best += 1
    q = _upoly_trim(c)  # q(z) = p(z, 1)
    g = q
    k = 0
    deriv = q
    while len(g) > 1:
        k += 1
        deriv = _upoly_deriv(deriv)
        g = _upoly_gcd(g, deriv)
    return max(best, k)


# JSON formats

def _num_text(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def curve_to_json(P: PlaneCurve) -> dict:
    return {
        "format": 1,
        "r": P.r,
        "coeffs": {"%d,%d,%d" % e: _num_text(c) for e, c in sorted(P.coeffs.items(), reverse=True)},
    }


class CurveFormatError(ValueError):
    pass


def _parse_form(d: Mapping) -> Form:
    if not isinstance(d, Mapping):
        raise CurveFormatError("coefficients must be a JSON object")
    out = {}
    for key, val in d.items():
        try:
            e = tuple(int(x) for x in key.split(","))
            out[e] = Fraction(val)
        except (ValueError, AttributeError, ZeroDivisionError) as exc:
            raise CurveFormatError(f"bad entry {key!r}: {val!r}") from exc
        if len(e) != 3:
            raise CurveFormatError(f"bad exponent key {key!r}")
    return out


def curve_from_json(obj: Mapping) -> PlaneCurve:
    if not isinstance(obj, Mapping) or "r" not in obj:
        raise CurveFormatError("curve JSON must be an object with an 'r' field")
    if obj.get("format", 1) != 1:
        raise CurveFormatError(f"unsupported format {obj.get('format')}")
    try:
        return PlaneCurve(int(obj["r"]), _parse_form(obj.get("coeffs", {})))
    except CurveFormatError:
        raise
    except (ValueError, TypeError) as exc:
        raise CurveFormatError(str(exc)) from exc


def witness_to_json(wit: DecompositionWitness) -> dict:
    def form(f):
        return {"%d,%d,%d" % e: _num_text(c) for e, c in sorted(f.items(), reverse=True)}

    return {
        "format": 1,
        "r": wit.r,
        "u": [_num_text(c) for c in wit.u],
        "h": form(wit.h),
        "v": [_num_text(c) for c in wit.v],
        "w": form(wit.w),
    }


def witness_from_json(obj: Mapping) -> DecompositionWitness:
    try:
        return DecompositionWitness(
            int(obj["r"]),
            tuple(Fraction(c) for c in obj["u"]),
            _parse_form(obj.get("h", {})),
            tuple(Fraction(c) for c in obj["v"]),
            _parse_form(obj.get("w", {})),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise CurveFormatError(f"bad witness JSON: {exc}") from exc


def load_curve(path) -> PlaneCurve:
    with open(path) as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CurveFormatError(f"{path}: not valid JSON ({exc.msg})") from exc
    return curve_from_json(obj)
