"""The 21x21 undulation matrix of plane quartics and its determinant.

Rows are the three polynomials v_i * phi (C-degree 2) and eighteen
polynomials of C-degree 3, all of v-degree 5; columns are the 21 degree-5
monomials in v1, v2, v3 in graded-lex order. The determinant vanishes exactly
when the quartic has an undulation line, and it equals the Cayley-Salmon
invariant up to one global constant fixed by the choice of rows.

The shipped rows use the letters a..o for the quartic coefficients, scaled
by multinomial factors: b = C[3,1,0]/4, e = C[2,1,1]/12, and so on.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from math import factorial, gcd, lcm
from pathlib import Path
from typing import Sequence

from .curve import PlaneCurve, max_root_multiplicity, restrict_to_line
from .exactnum import DEFAULT_PRIMES, REFERENCE_PRIME, PrimeField
from .idealgen import (
    ComponentSpec,
    c_monomials,
    complement_basis,
    component_basis,
    membership_failures,
)
from .linalg import bareiss_det, det_modp, nullspace_q
from .polycore import (
    KIND_C,
    KIND_LETTER,
    KIND_V,
    LETTERS,
    QUARTIC_SLOTS,
    Cvar,
    MultiPoly,
    Vvar,
    enumerate_monomials,
    exponent_triples,
    from_text,
    grade_of,
    letter,
    monomial_grading,
)

V5 = [tuple(e) for e in enumerate_monomials(5, 3)]
QUARTIC_DEGREE = 60  # 6 (r - 3)(3 r - 2) at r = 4


def multinomial(e: Sequence[int]) -> int:
    return factorial(sum(e)) // (factorial(e[0]) * factorial(e[1]) * factorial(e[2]))


# letter -> (slot, divisor): letter = C[slot] / divisor
LETTER_MAP = {LETTERS[i]: (slot, multinomial(slot)) for i, slot in enumerate(QUARTIC_SLOTS)}


class AppendixError(ValueError):
    pass


class NotQuarticError(ValueError):
    pass


@dataclass
class UndulationMatrix:
    """Rows of the undulation matrix as polynomials in (coefficients, v).

    ``rows`` hold polynomials in the letters a..o (appendix) or in C (pipeline);
    ``entries[i][j]`` is the coefficient of the j-th degree-5 v-monomial in row i.
    """

    tags: list[str]
    rows: list[MultiPoly]
    source: tuple
    ring: PrimeField | None = None
    phi: MultiPoly | None = None
    r: int = 4
    entries: list[list[MultiPoly]] = field(init=False, repr=False)

    def __post_init__(self):
        vdeg = monomial_grading(next(iter(self.rows[0].terms))).deg_v if self.rows and self.rows[0] else 5
        self.columns = [tuple(e) for e in enumerate_monomials(vdeg, 3)]
        self.entries = [_row_entries(f, self.columns) for f in self.rows]

    @property
    def size(self) -> int:
        return len(self.rows)

    def row_degrees(self) -> list[int]:
        return [grade_of(f).deg_C for f in self.rows]


def _row_entries(f: MultiPoly, columns=V5) -> list[MultiPoly]:
    parts = f.split_by([KIND_V])
    out = []
    for ve in columns:
        key = tuple((Vvar(a + 1), e) for a, e in enumerate(ve) if e)
        out.append(parts.get(key, MultiPoly(ring=f.ring)))
    if len(parts) > sum(1 for x in out if x):
        raise AppendixError("row is not homogeneous in v")
    return out


def letters_to_C(f: MultiPoly) -> MultiPoly:
    """Rewrite a polynomial in a..o over Q in terms of the quartic coefficients C."""
    if f.ring is not None:
        raise ValueError("letters_to_C expects a rational polynomial")
    terms = {}
    for mono, c in f.terms.items():
        den = 1
        new = []
        for var, e in mono:
            if var.kind == KIND_LETTER:
                slot, d = LETTER_MAP[LETTERS[var.index[0]]]
                den *= d ** e
                new.append((Cvar(*slot), e))
            else:
                new.append((var, e))
        terms[tuple(new)] = Fraction(c, den)
    return MultiPoly(terms)


# loading

def default_appendix_path() -> Path:
    return Path(str(resources.files("cayley_salmon") / "data" / "appendix.txt"))


def read_appendix(path=None) -> dict[str, MultiPoly]:
    """Parse the dataset into {'phi': ..., 'alpha1': ..., 'beta18': ...}; checks the sha256 header."""
    path = Path(path) if path is not None else default_appendix_path()
    try:
        text = path.read_text()
    except OSError as exc:
        raise AppendixError(f"cannot read {path}: {exc}") from exc
    head, _, body = text.partition("\n")
    if not head.startswith("# sha256 "):
        raise AppendixError(f"{path}: missing checksum header")
    digest = hashlib.sha256(body.encode()).hexdigest()
    if head.split()[2] != digest:
        raise AppendixError(f"{path}: checksum mismatch (file corrupted or edited)")
    out = {}
    for lineno, line in enumerate(body.splitlines(), start=2):
        if not line.strip() or line.startswith("#"):
            continue
        lhs, sep, rhs = line.partition(":")
        if not sep:
            raise AppendixError(f"{path}:{lineno}: expected '<kind> <index> : <polynomial>'")
        kind, idx = lhs.split()
        if kind not in ("phi", "alpha", "beta"):
            raise AppendixError(f"{path}:{lineno}: unknown row kind {kind!r}")
        out[kind if kind == "phi" else f"{kind}{int(idx)}"] = from_text(rhs)
    return out


def load_appendix(path=None, validate: bool = True, primes: Sequence[int] = DEFAULT_PRIMES,
                  samples: int = 100) -> UndulationMatrix:
    polys = read_appendix(path)
    tags = [f"alpha{i}" for i in range(1, 4)] + [f"beta{i}" for i in range(1, 19)]
    missing = [t for t in tags + ["phi"] if t not in polys]
    if missing:
        raise AppendixError(f"appendix is missing rows {missing}")
    M = UndulationMatrix(tags, [polys[t] for t in tags], ("appendix",), None, polys["phi"])
    if validate:
        problems = validate_appendix(M, primes, samples)
        if problems:
            raise AppendixError("; ".join(problems))
    return M


def validate_appendix(M: UndulationMatrix, primes: Sequence[int] = DEFAULT_PRIMES, samples: int = 100) -> list[str]:
    """Return a list of problems (empty when the dataset is consistent)."""
    problems = []
    for i in range(1, 4):
        if M.rows[i - 1] != MultiPoly.var(Vvar(i)) * M.phi:
            problems.append(f"alpha{i} != v{i} * phi")
    for tag, f in zip(M.tags, M.rows):
        g = grade_of(f)
        want = (2, 5) if tag.startswith("alpha") else (3, 5)
        if g is None or not hasattr(g, "deg_C") or (g.deg_C, g.deg_v) != want:
            problems.append(f"{tag}: grading {g}, expected (deg_C, deg_v) = {want}")
    rows_C = [letters_to_C(f) for f in M.rows]
    for p in primes:
        field_ = PrimeField(p)
        bad = membership_failures([f.reduce_mod(field_) for f in rows_C], 4, p, samples, seed=0, salt=11)
        problems.extend(f"{M.tags[i]}: fails sampled membership constraints mod {p}" for i in bad)
    return problems


# numeric evaluation

@dataclass
class _Compiled:
    """Entries as integer-coefficient sums over C-monomials, with per-row scales."""

    terms: list[list[list[tuple[int, tuple[int, ...]]]]]
    row_scale: list[int]
    monomials: dict[int, list[tuple[int, ...]]]
    r: int = 4


_COMPILED: dict[int, _Compiled] = {}


def _compile(M: UndulationMatrix) -> _Compiled:
    key = id(M)
    if key in _COMPILED:
        return _COMPILED[key]
    slot_of = {t: s for s, t in enumerate(exponent_triples(M.r))}
    terms, scales = [], []
    degrees: set[int] = set()
    for row in M.entries:
        crow = [letters_to_C(e) if M.ring is None and _has_letters(e) else e for e in row]
        L = 1
        if M.ring is None:
            for e in crow:
                for c in e.terms.values():
                    if isinstance(c, Fraction):
                        L = lcm(L, c.denominator)
        scales.append(L)
        trow = []
        for e in crow:
            lst = []
            for mono, c in e.terms.items():
                idx = []
                for var, k in mono:
                    if var.kind != KIND_C:
                        raise ValueError(f"unexpected variable {var} in matrix entry")
                    idx.extend([slot_of[var.index]] * k)
                degrees.add(len(idx))
                lst.append((int(c * L) if M.ring is None else int(c), tuple(sorted(idx))))
            trow.append(lst)
        terms.append(trow)
    comp = _Compiled(terms, scales, {d: list(c_monomials(M.r, d)) for d in degrees}, M.r)
    _COMPILED[key] = comp
    return comp


def _has_letters(f: MultiPoly) -> bool:
    return any(var.kind == KIND_LETTER for mono in f.terms for var, _ in mono)


def _monomial_values(vec: Sequence[int], degrees, p: int | None, r: int = 4) -> dict:
    vals = {(): 1}
    for d in range(1, max(degrees, default=0) + 1):
        for mono in c_monomials(r, d):
            v = vals[mono[:-1]] * vec[mono[-1]]
            vals[mono] = v % p if p else v
    return vals


def _eval_compiled(comp: _Compiled, vec: Sequence[int], p: int | None = None) -> list[list[int]]:
    vals = _monomial_values(vec, comp.monomials, p, comp.r)
    out = []
    for trow in comp.terms:
        row = []
        for lst in trow:
            s = 0
            for c, mono in lst:
                s += c * vals[mono]
            row.append(s % p if p else s)
        out.append(row)
    return out


def _require_quartic(P: PlaneCurve) -> None:
    if P.r != 4:
        raise NotQuarticError(f"the undulation matrix is defined for quartics, got degree {P.r}")


def assemble(M: UndulationMatrix, P: PlaneCurve) -> list[list]:
    """Numeric matrix at the curve P: exact rationals for the appendix matrix, residues for GF(p) matrices."""
    _require_quartic(P)
    comp = _compile(M)
    if M.ring is not None:
        vec = [M.ring(c) for c in P.vector()]
        return _eval_compiled(comp, vec, M.ring.p)
    if P.ring is not None:
        raise ValueError("rational matrix needs a rational curve; use assemble_modp for GF(p) curves")
    vec = [Fraction(c) for c in P.vector()]
    D = lcm(*(c.denominator for c in vec))
    ints = [int(c * D) for c in vec]
    raw = _eval_compiled(comp, ints)
    out = []
    for row, L, deg in zip(raw, comp.row_scale, _row_degs(M)):
        s = L * D ** deg
        out.append([Fraction(x, s) for x in row])
    return out


def _row_degs(M: UndulationMatrix) -> list[int]:
    return [monomial_grading(next(iter(f.terms))).deg_C for f in M.rows]


def assemble_modp(M: UndulationMatrix, P: PlaneCurve, field_: PrimeField) -> list[list[int]]:
    """Matrix entries reduced mod p at a curve with coefficients in GF(p) (or rational, reduced)."""
    if P.r != M.r:
        raise ValueError(f"matrix is for degree {M.r}, curve has degree {P.r}")
    if M.ring is not None and M.ring != field_:
        raise ValueError(f"matrix lives over {M.ring}, not {field_}")
    comp = _compile(M)
    vec = [field_(c) for c in P.vector()]
    raw = _eval_compiled(comp, vec, field_.p)
    if M.ring is None:
        return [[x * field_.inv(L) % field_.p for x in row] for row, L in zip(raw, comp.row_scale)]
    return raw


def det_modp_at(M: UndulationMatrix, P: PlaneCurve, field_: PrimeField) -> int:
    return det_modp(assemble_modp(M, P, field_), field_.p)


def quartic_value(M: UndulationMatrix, P: PlaneCurve):
    """Exact determinant of the assembled matrix (int or Fraction)."""
    _require_quartic(P)
    if M.ring is not None:
        raise ValueError("exact value needs the rational (appendix) matrix")
    comp = _compile(M)
    vec = [Fraction(c) for c in P.vector()]
    D = lcm(*(c.denominator for c in vec))
    raw = _eval_compiled(comp, [int(c * D) for c in vec])
    d = bareiss_det(raw)
    scale = 1
    for L in comp.row_scale:
        scale *= L
    scale *= D ** sum(_row_degs(M))
    q = Fraction(d, scale)
    return q.numerator if q.denominator == 1 else q


# kernel lines

@dataclass
class LineRecovery:
    lines: list[tuple]
    kernel_dim: int
    diagnostic: str | None = None


class NonsingularMatrixError(ValueError):
    pass


def veronese_preimage(x: Sequence) -> tuple | None:
    """V with x proportional to the degree-5 monomials of V, or None."""
    pure = {0: V5.index((5, 0, 0)), 1: V5.index((0, 5, 0)), 2: V5.index((0, 0, 5))}
    a = max(pure, key=lambda t: abs(x[pure[t]]))
    x0 = x[pure[a]]
    if x0 == 0:
        return None
    V = [Fraction(0)] * 3
    V[a] = Fraction(1)
    for b in range(3):
        if b != a:
            e = [0, 0, 0]
            e[a], e[b] = 4, 1
            V[b] = Fraction(x[V5.index(tuple(e))]) / x0
    for mono, val in zip(V5, x):
        want = x0 * V[0] ** mono[0] * V[1] ** mono[1] * V[2] ** mono[2]
        if want != val:
            return None
    return _primitive(V)


def _primitive(V: Sequence[Fraction]) -> tuple:
    D = lcm(*(Fraction(c).denominator for c in V))
    ints = [int(c * D) for c in V]
    g = gcd(*ints)
    ints = [c // g for c in ints]
    first = next(c for c in ints if c)
    if first < 0:
        ints = [-c for c in ints]
    return tuple(ints)


def undulation_line_from_kernel(Mnum: Sequence[Sequence], P: PlaneCurve | None = None) -> LineRecovery:
    """Read undulation lines off the kernel of a singular numeric undulation matrix."""
    kernel = nullspace_q(Mnum)
    if not kernel:
        raise NonsingularMatrixError("matrix is nonsingular; there is no kernel to read lines from")
    lines = []
    for x in kernel:
        V = veronese_preimage(x)
        if V is None:
            continue
        if P is not None and max_root_multiplicity(restrict_to_line(P, V)) < 4:
            continue
        if V not in lines:
            lines.append(V)
    diag = None
    if not lines:
        diag = f"non-Veronese kernel (dimension {len(kernel)})"
    elif len(kernel) > 1:
        diag = f"kernel dimension {len(kernel)}; only basis vectors were tested"
    return LineRecovery(lines, len(kernel), diag)


@dataclass
class InvariantReport:
    value: int | Fraction
    verdict: str
    lines: list[tuple] = field(default_factory=list)
    diagnostic: str | None = None

    def to_json(self) -> dict:
        v = Fraction(self.value)
        return {
            "format": 1,
            "value": str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}",
            "verdict": self.verdict,
            "lines": [[str(c) for c in V] for V in self.lines],
            **({"diagnostic": self.diagnostic} if self.diagnostic else {}),
        }


_APPENDIX: UndulationMatrix | None = None


def appendix_matrix() -> UndulationMatrix:
    """The shipped matrix, loaded once (checksum checked, full validation skipped)."""
    global _APPENDIX
    if _APPENDIX is None:
        _APPENDIX = load_appendix(validate=False)
    return _APPENDIX


def invariant_quartic(P: PlaneCurve, M: UndulationMatrix | None = None, recover_lines: bool = True) -> InvariantReport:
    """Exact undulation invariant of a rational quartic (up to the global constant of the matrix)."""
    _require_quartic(P)
    M = M or appendix_matrix()
    value = quartic_value(M, P)
    if value != 0:
        return InvariantReport(value, "nonzero")
    if not recover_lines:
        return InvariantReport(0, "zero")
    rec = undulation_line_from_kernel(assemble(M, P), P)
    return InvariantReport(0, "zero", rec.lines, rec.diagnostic)


# matrix rebuilt from the ideal

def pipeline_matrix(prime: int = DEFAULT_PRIMES[0], seed: int = 0) -> UndulationMatrix:
    """Rebuild the 21 rows over GF(p): a basis of I_{2,5} and a complement of C * I_{2,5} in I_{3,5}."""
    small = component_basis(ComponentSpec(4, 2, 5, p=prime, seed=seed))
    big = component_basis(ComponentSpec(4, 3, 5, p=prime, seed=seed))
    if len(small) != 3:
        raise RuntimeError(f"dim I_2,5 = {len(small)}, expected 3")
    comp = complement_basis(big, small)
    rows = small.polys + comp.polys
    tags = [f"alpha{i}" for i in range(1, len(small) + 1)] + [f"beta{i}" for i in range(1, len(comp.polys) + 1)]
    return UndulationMatrix(tags, rows, ("pipeline", prime, seed), PrimeField(prime))


def build_quintic_matrix(prime: int = REFERENCE_PRIME, seed: int = 0, budget: float | None = None,
                         checkpoint=None, heavy: bool = False) -> UndulationMatrix:
    """36x36 quintic analogue: I_{2,7} plus a complement of S^4(C) * I_{2,7} inside I_{6,7}.

    Needs an 8.3 million column solve; refuses to run without ``heavy=True``.
    """
    if not heavy:
        raise RuntimeError("the quintic matrix needs heavy=True (hours of compute, many GB of memory)")
    small = component_basis(ComponentSpec(5, 2, 7, p=prime, seed=seed))
    if checkpoint is not None or budget is not None:
        from .idealgen import solve_spec
        solve_spec(ComponentSpec(5, 6, 7, p=prime, seed=seed), checkpoint=checkpoint, budget=budget,
                   keep_nullspace=False)
    big = component_basis(ComponentSpec(5, 6, 7, p=prime, seed=seed))
    comp = complement_basis(big, small)
    rows = small.polys + comp.polys
    tags = [f"alpha{i}" for i in range(1, len(small) + 1)] + [f"beta{i}" for i in range(1, len(comp.polys) + 1)]
    return UndulationMatrix(tags, rows, ("pipeline", prime, seed), PrimeField(prime), r=5)


def appendix_modp(M: UndulationMatrix, field_: PrimeField) -> UndulationMatrix:
    """The appendix rows rewritten in C and reduced mod p."""
    rows = [letters_to_C(f).reduce_mod(field_) for f in M.rows]
    return UndulationMatrix(list(M.tags), rows, ("appendix-mod", field_.p), field_)
