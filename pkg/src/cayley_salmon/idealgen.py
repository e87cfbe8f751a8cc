"""Graded components of the undulation ideal as nullspaces of sampled linear systems.

An unknown polynomial f(C, v) with fixed C-degree n and v-degree m lies in
the ideal iff f(s(u,h,v,w), v) = 0 for all u, h, v, w, where s(u,h,v,w) are
the coefficients of u^4 h + v w. Each random draw of (u, h, v, w) over GF(p)
gives one linear equation on the coefficients of f.

The ideal is stable under the diagonal torus (x_i -> t_i x_i), so it splits
into cells of fixed overline-degree. Every cell is solved independently;
a graded component is the direct sum of its cells.
"""

from __future__ import annotations

import json
import logging
import math
import os
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .exactnum import DEFAULT_PRIMES, INT64_SAFE_BOUND, PrimeField
from .linalg import EchelonAccumulator, SparseMatrix, matmul_modp, rref_modp
from .polycore import (
    KIND_C,
    KIND_V,
    Cvar,
    MultiPoly,
    Vvar,
    enumerate_monomials,
    exponent_triples,
)

log = logging.getLogger(__name__)

BLOCK = 64


class UnsaturatedError(RuntimeError):
    """Rank did not stabilize within the row budget."""


class SamplingArtifactError(RuntimeError):
    """A computed basis element failed fresh membership checks."""


class SeedMismatchError(RuntimeError):
    """Different seeds or primes gave different dimensions."""


class BudgetExhausted(RuntimeError):
    def __init__(self, msg: str, checkpoint: str | None = None):
        super().__init__(msg)
        self.checkpoint = checkpoint


@dataclass(frozen=True)
class ComponentSpec:
    """Graded component I_{n,m} (or the refined cell with overline-degree ``weight``) for degree-r curves."""

    r: int
    n: int
    m: int
    weight: tuple[int, int, int] | None = None
    p: int = DEFAULT_PRIMES[0]
    seed: int = 0
    oversample: float = 1.25

    def __post_init__(self):
        if self.r < 4:
            raise ValueError(f"curve degree must be >= 4, got {self.r}")
        if self.n < 0 or self.m < 0:
            raise ValueError("n and m must be nonnegative")
        if self.weight is not None:
            w = tuple(int(x) for x in self.weight)
            if len(w) != 3 or min(w) < 0:
                raise ValueError(f"bad weight {self.weight}")
            if sum(w) != self.r * self.n + self.m:
                raise ValueError(
                    f"weight {w} sums to {sum(w)}, expected r*n + m = {self.r * self.n + self.m}"
                )
            object.__setattr__(self, "weight", w)
        PrimeField(self.p)
        if self.oversample < 1:
            raise ValueError("oversample must be >= 1")

    @classmethod
    def refined(cls, r: int, n: int, weight: Sequence[int], **kw) -> "ComponentSpec":
        return cls(r, n, sum(weight) - r * n, tuple(weight), **kw)

    def with_(self, **kw) -> "ComponentSpec":
        d = dict(r=self.r, n=self.n, m=self.m, weight=self.weight, p=self.p, seed=self.seed,
                 oversample=self.oversample)
        d.update(kw)
        return ComponentSpec(**d)


# columns

@lru_cache(maxsize=None)
def c_monomials(r: int, n: int) -> tuple[tuple[int, ...], ...]:
    """Degree-n monomials in the C variables as sorted slot-index tuples, in graded-lex order."""
    nslots = len(exponent_triples(r))
    out = []
    for ex in enumerate_monomials(n, nslots):
        idx = []
        for s, e in enumerate(ex):
            idx.extend([s] * e)
        out.append(tuple(idx))
    return tuple(out)


@lru_cache(maxsize=None)
def graded_columns(r: int, n: int, m: int) -> tuple[tuple[tuple[int, ...], tuple[int, int, int]], ...]:
    """Columns of I_{n,m}: (C-monomial, v-exponent) pairs, C-monomial major, v-monomial minor."""
    vm = [tuple(e) for e in enumerate_monomials(m, 3)]
    return tuple((cm, ve) for cm in c_monomials(r, n) for ve in vm)


def column_weight(r: int, col) -> tuple[int, int, int]:
    slots = exponent_triples(r)
    cm, ve = col
    w = list(ve)
    for s in cm:
        for t in range(3):
            w[t] += slots[s][t]
    return (w[0], w[1], w[2])


@lru_cache(maxsize=None)
def refined_cells(r: int, n: int, m: int) -> dict[tuple[int, int, int], tuple[int, ...]]:
    """Map overline-degree -> indices of graded columns in that cell (cells in descending weight order)."""
    cells: dict = {}
    for i, col in enumerate(graded_columns(r, n, m)):
        cells.setdefault(column_weight(r, col), []).append(i)
    return {w: tuple(cells[w]) for w in sorted(cells, reverse=True)}


def spec_columns(spec: ComponentSpec) -> list:
    cols = graded_columns(spec.r, spec.n, spec.m)
    if spec.weight is None:
        return list(cols)
    return [cols[i] for i in refined_cells(spec.r, spec.n, spec.m).get(spec.weight, ())]


def column_to_monomial(r: int, col):
    slots = exponent_triples(r)
    cm, ve = col
    mono: dict = {}
    for s in cm:
        v = Cvar(*slots[s])
        mono[v] = mono.get(v, 0) + 1
    for a in range(3):
        if ve[a]:
            mono[Vvar(a + 1)] = ve[a]
    return tuple(sorted(mono.items()))


def monomial_to_column(r: int, mono) -> tuple:
    slot_of = {t: s for s, t in enumerate(exponent_triples(r))}
    cm: list[int] = []
    ve = [0, 0, 0]
    for var, e in mono:
        if var.kind == KIND_C:
            cm.extend([slot_of[var.index]] * e)
        elif var.kind == KIND_V:
            ve[var.index[0] - 1] += e
        else:
            raise ValueError(f"variable {var} is not a C or v variable")
    return (tuple(sorted(cm)), tuple(ve))


# sampling

@lru_cache(maxsize=None)
def _mul_plan(da: int, db: int) -> tuple:
    ta, tb = exponent_triples(da), exponent_triples(db)
    tgt = {e: i for i, e in enumerate(exponent_triples(da + db))}
    return tuple(
        (i, j, tgt[(a[0] + b[0], a[1] + b[1], a[2] + b[2])]) for i, a in enumerate(ta) for j, b in enumerate(tb)
    )


def _batch_form_mul(A: np.ndarray, da: int, B: np.ndarray, db: int, p: int) -> np.ndarray:
    out = np.zeros((A.shape[0], len(exponent_triples(da + db))), dtype=A.dtype)
    for i, j, t in _mul_plan(da, db):
        out[:, t] = (out[:, t] + A[:, i] * B[:, j] % p) % p
    return out


def compose_batch(u, h, v, w, r: int, p: int) -> np.ndarray:
    """Coefficients of u^4 h + v w for a batch of witnesses (rows), in slot order."""
    u2 = _batch_form_mul(u, 1, u, 1, p)
    u4 = _batch_form_mul(u2, 2, u2, 2, p)
    return (_batch_form_mul(u4, 4, h, r - 4, p) + _batch_form_mul(v, 1, w, r - 1, p)) % p


class SamplePool:
    """Deterministic random points (C, v) on the undulation incidence variety over GF(p).

    Row i depends only on (r, p, seed, salt, i // 64), never on the order of requests.
    """

    def __init__(self, r: int, p: int, seed: int = 0, salt: int = 0):
        self.r, self.p, self.seed, self.salt = r, p, seed, salt
        self._blocks: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def _block(self, b: int):
        if b not in self._blocks:
            rng = np.random.default_rng([self.seed, self.salt, self.r, self.p, b])
            nh = len(exponent_triples(self.r - 4))
            nw = len(exponent_triples(self.r - 1))

            def draw(k):
                x = rng.integers(0, self.p, size=(BLOCK, k), dtype=np.uint64)
                return x.astype(np.int64) if self.p < INT64_SAFE_BOUND else x.astype(object)

            u, v, h, w = draw(3), draw(3), draw(nh), draw(nw)
            self._blocks[b] = (compose_batch(u, h, v, w, self.r, self.p), v)
        return self._blocks[b]

    def get(self, start: int, count: int) -> tuple[np.ndarray, np.ndarray]:
        first, last = start // BLOCK, (start + count - 1) // BLOCK
        Cs, Vs = zip(*(self._block(b) for b in range(first, last + 1)))
        C = np.vstack(Cs)[start - first * BLOCK:][:count]
        V = np.vstack(Vs)[start - first * BLOCK:][:count]
        return C, V


def eval_columns(cols: Sequence, C: np.ndarray, V: np.ndarray, p: int) -> np.ndarray:
    """Values of the column monomials at sampled points: shape (npoints, ncols)."""
    N = C.shape[0]
    if not cols:
        return np.zeros((N, 0), dtype=C.dtype)
    n = len(cols[0][0])
    cidx = np.array([cm for cm, _ in cols], dtype=np.int64).reshape(len(cols), n)
    vexp = np.array([ve for _, ve in cols], dtype=np.int64)
    out = np.ones((N, len(cols)), dtype=C.dtype)
    for t in range(n):
        out = out * C[:, cidx[:, t]] % p
    maxe = int(vexp.max()) if vexp.size else 0
    for a in range(3):
        pw = np.ones((N, maxe + 1), dtype=C.dtype)
        for e in range(1, maxe + 1):
            pw[:, e] = pw[:, e - 1] * V[:, a] % p
        out = out * pw[:, vexp[:, a]] % p
    return out


def constraint_rows(spec: ComponentSpec, start: int, count: int, pool: SamplePool | None = None) -> np.ndarray:
    pool = pool or SamplePool(spec.r, spec.p, spec.seed)
    C, V = pool.get(start, count)
    rows = eval_columns(spec_columns(spec), C, V, spec.p)
    if rows.shape[1] and not rows.any(axis=1).all():
        raise RuntimeError("zero constraint row: evaluation bug")
    return rows


def default_rows(ncols: int, oversample: float = 1.25) -> int:
    return max(math.ceil(oversample * ncols), ncols + 50)


def build_constraints(spec: ComponentSpec, nrows: int | None = None) -> SparseMatrix:
    """The sampled system for ``spec`` as a sparse GF(p) matrix (materializes every row)."""
    ncols = len(spec_columns(spec))
    nrows = default_rows(ncols, spec.oversample) if nrows is None else nrows
    return SparseMatrix.from_dense(constraint_rows(spec, 0, nrows), spec.p)


# solving

@dataclass
class CellResult:
    weight: tuple[int, int, int] | None
    columns: list
    rank: int
    rows_used: int
    nullspace: np.ndarray  # shape (dim, ncols), canonical

    @property
    def dim(self) -> int:
        return len(self.columns) - self.rank


def solve_columns(cols: list, r: int, p: int, pool: SamplePool, oversample: float = 1.25,
                  max_factor: float = 4.0, weight=None) -> CellResult:
    """Rank-saturating solve: add row batches until one batch leaves the rank unchanged."""
    ncols = len(cols)
    if ncols == 0:
        return CellResult(weight, cols, 0, 0, np.zeros((0, 0), dtype=np.int64))
    acc = EchelonAccumulator(ncols, p)
    used = default_rows(ncols, oversample)
    C, V = pool.get(0, used)
    acc.add(eval_columns(cols, C, V, p))
    batch = max(50, ncols // 4)
    budget = int(max_factor * ncols) + 200
    while acc.rank < ncols:
        if used + batch > budget:
            raise UnsaturatedError(f"cell {weight}: rank {acc.rank}/{ncols} not stable after {used} rows")
        C, V = pool.get(used, batch)
        used += batch
        if acc.add(eval_columns(cols, C, V, p)) == 0:
            break
    return CellResult(weight, cols, acc.rank, used, acc.nullspace())


def solve_spec(spec: ComponentSpec, pool: SamplePool | None = None, checkpoint: str | os.PathLike | None = None,
               budget: float | None = None, keep_nullspace: bool = True) -> list[CellResult]:
    """Solve every torus cell of ``spec`` (or its single cell when refined)."""
    pool = pool or SamplePool(spec.r, spec.p, spec.seed)
    cells = refined_cells(spec.r, spec.n, spec.m)
    allcols = graded_columns(spec.r, spec.n, spec.m)
    weights = [spec.weight] if spec.weight is not None else list(cells)
    done: dict = {}
    if checkpoint and os.path.exists(checkpoint):
        with open(checkpoint) as fh:
            state = json.load(fh)
        if state.get("spec") == _spec_key(spec):
            done = {tuple(json.loads(k)): v for k, v in state["cells"].items()}
    t0 = time.monotonic()
    solved = 0
    out = []
    for w in weights:
        cols = [allcols[i] for i in cells.get(w, ())]
        if w in done and not keep_nullspace:
            out.append(CellResult(w, cols, done[w]["rank"], done[w]["rows"], np.zeros((0, len(cols)), np.int64)))
            continue
        # at least one new cell per run, so resuming always makes progress
        if budget is not None and solved and time.monotonic() - t0 > budget:
            _write_checkpoint(checkpoint, spec, done)
            raise BudgetExhausted(f"budget of {budget}s exhausted after {len(done)} cells", str(checkpoint))
        res = solve_columns(cols, spec.r, spec.p, pool, spec.oversample, weight=w)
        log.debug("cell %s: %d cols, rank %d, dim %d", w, len(cols), res.rank, res.dim)
        if not keep_nullspace:
            res.nullspace = np.zeros((0, len(cols)), np.int64)
        out.append(res)
        solved += 1
        done[w] = {"rank": res.rank, "rows": res.rows_used, "dim": res.dim}
        if checkpoint:
            _write_checkpoint(checkpoint, spec, done)
    return out


def _spec_key(spec: ComponentSpec) -> list:
    return [spec.r, spec.n, spec.m, list(spec.weight) if spec.weight else None, spec.p, spec.seed]


def _write_checkpoint(path, spec, done) -> None:
    if not path:
        return
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump({"format": 1, "spec": _spec_key(spec),
                   "cells": {json.dumps(list(w)): v for w, v in done.items()}}, fh)
    os.replace(tmp, path)


def component_dim(spec: ComponentSpec, **kw) -> int:
    kw.setdefault("keep_nullspace", False)
    return sum(c.dim for c in solve_spec(spec, **kw))


def confirm_dim(spec: ComponentSpec, primes: Iterable[int] = DEFAULT_PRIMES, seeds: Iterable[int] = (0, 1)) -> int:
    """component_dim for every (prime, seed); raises SeedMismatchError unless all agree."""
    dims = {(p, s): component_dim(spec.with_(p=p, seed=s)) for p in primes for s in seeds}
    values = set(dims.values())
    if len(values) != 1:
        raise SeedMismatchError(f"{spec}: dimensions disagree {dims}")
    return values.pop()


def solve_direct(spec: ComponentSpec) -> CellResult:
    """Solve the whole graded system at once, ignoring the cell split (cross-check for small specs)."""
    pool = SamplePool(spec.r, spec.p, spec.seed)
    return solve_columns(spec_columns(spec), spec.r, spec.p, pool, spec.oversample, weight=spec.weight)


# bases

@dataclass
class ComponentBasis:
    spec: ComponentSpec
    polys: list[MultiPoly]
    cells: list[CellResult] = field(repr=False, default_factory=list)

    def __len__(self) -> int:
        return len(self.polys)

    def vectors(self) -> list[dict]:
        """Each basis element as {column: coeff}."""
        return [poly_to_columns(f, self.spec.r) for f in self.polys]


def vector_to_poly(vec, cols: Sequence, r: int, field_: PrimeField) -> MultiPoly:
    return MultiPoly({column_to_monomial(r, cols[i]): int(vec[i]) for i in np.flatnonzero(vec)}, field_)


def poly_to_columns(f: MultiPoly, r: int) -> dict:
    return {monomial_to_column(r, mono): c for mono, c in f.terms.items()}


def eval_poly_batch(f: MultiPoly, r: int, C: np.ndarray, V: np.ndarray, p: int) -> np.ndarray:
    """Values of a C/v polynomial at sampled points."""
    by_deg: dict[int, tuple[list, list]] = {}
    for mono, c in f.terms.items():
        col = monomial_to_column(r, mono)
        cs, ks = by_deg.setdefault(len(col[0]), ([], []))
        cs.append(col)
        ks.append(int(c) % p)
    total = np.zeros(C.shape[0], dtype=C.dtype)
    for cols, ks in by_deg.values():
        vals = eval_columns(cols, C, V, p)
        total = (total + matmul_modp(vals, np.array(ks, dtype=vals.dtype).reshape(-1, 1), p)[:, 0]) % p
    return total


def membership_failures(polys: Sequence[MultiPoly], r: int, p: int, count: int = 100, seed: int = 0,
                        salt: int = 7) -> list[int]:
    """Indices of polynomials that do not vanish on ``count`` fresh points of the incidence variety."""
    pool = SamplePool(r, p, seed, salt=salt)
    C, V = pool.get(0, count)
    return [i for i, f in enumerate(polys) if eval_poly_batch(f, r, C, V, p).any()]


def component_basis(spec: ComponentSpec, verify_rows: int = 100) -> ComponentBasis:
    """Canonical basis of the component as GF(p) polynomials, re-verified on fresh points."""
    field_ = PrimeField(spec.p)
    cells = solve_spec(spec)
    allcols = graded_columns(spec.r, spec.n, spec.m)
    pos = {c: i for i, c in enumerate(allcols)}
    keyed = []
    for cell in cells:
        piv_free = [int(np.flatnonzero(row)[-1]) for row in cell.nullspace] if cell.dim else []
        for row, f in zip(cell.nullspace, piv_free):
            # the canonical vector's free column carries the 1 and is its last nonzero entry
            keyed.append((pos[cell.columns[f]], vector_to_poly(row, cell.columns, spec.r, field_)))
    keyed.sort(key=lambda t: t[0])
    polys = [f for _, f in keyed]
    bad = membership_failures(polys, spec.r, spec.p, verify_rows, spec.seed, salt=1 + spec.seed)
    if bad:
        raise SamplingArtifactError(f"{len(bad)} basis elements failed fresh checks (first: {bad[0]})")
    return ComponentBasis(spec, polys, cells)


@dataclass
class Complement:
    product_dim: int
    polys: list[MultiPoly]
    cell_dims: dict  # weight -> complement dimension
    product_cell_dims: dict


def complement_basis(big: ComponentBasis, small: ComponentBasis) -> Complement:
    """Canonical complement of span{q * a : a in small, q a C-monomial of degree big.n - small.n} inside big.

    Per torus cell: the product span is put in RREF, every basis vector of
    ``big`` is reduced modulo it, and the residues are put in RREF.
    """
    r, p = big.spec.r, big.spec.p
    k = big.spec.n - small.spec.n
    if small.spec.r != r or small.spec.p != p or k < 1 or big.spec.m != small.spec.m:
        raise ValueError("need bases of I_{n+k,m} and I_{n,m} (k >= 1) for the same curve degree and prime")
    field_ = PrimeField(p)
    cells = refined_cells(r, big.spec.n, big.spec.m)
    allcols = graded_columns(r, big.spec.n, big.spec.m)
    slots = exponent_triples(r)
    multipliers = []
    for cm in c_monomials(r, k):
        mono: dict = {}
        for s in cm:
            mono[Cvar(*slots[s])] = mono.get(Cvar(*slots[s]), 0) + 1
        multipliers.append(MultiPoly({tuple(sorted(mono.items())): 1}, field_))
    products_by_cell: dict = {}
    for f in small.polys:
        for q in multipliers:
            g = f * q
            vec = poly_to_columns(g, r)
            w = column_weight(r, next(iter(vec)))
            products_by_cell.setdefault(w, []).append(vec)
    big_by_cell: dict = {}
    for f in big.polys:
        vec = poly_to_columns(f, r)
        big_by_cell.setdefault(column_weight(r, next(iter(vec))), []).append(vec)

    polys = []
    cell_dims = {}
    prod_dims = {}
    total_prod = 0
    for w, idx in cells.items():
        cols = [allcols[i] for i in idx]
        local = {c: t for t, c in enumerate(cols)}

        def dense(vecs):
            A = np.zeros((len(vecs), len(cols)), dtype=np.int64 if p < INT64_SAFE_BOUND else object)
            for i, vec in enumerate(vecs):
                for c, val in vec.items():
                    A[i, local[c]] = val
            return A

        P = dense(products_by_cell.get(w, []))
        B = dense(big_by_cell.get(w, []))
        RP, pp = rref_modp(P, p) if len(P) else (P, [])
        RB, pb = rref_modp(B, p) if len(B) else (B, [])
        if len(P):
            joint, _ = rref_modp(np.vstack([RB, RP]), p)
            if len(joint) != len(pb):
                raise ValueError(f"cell {w}: products are not inside the big component")
        total_prod += len(pp)
        prod_dims[w] = len(pp)
        if not len(B):
            continue
        resid = B.copy() % p
        for row, c in zip(RP, pp):
            coef = resid[:, c].copy()
            if coef.any():
                resid = (resid - np.outer(coef, row) % p) % p
        RC, _ = rref_modp(resid, p)
        cell_dims[w] = len(RC)
        polys.extend(vector_to_poly(row, cols, r, field_) for row in RC)
    return Complement(total_prod, polys, cell_dims, prod_dims)


def refined_dims_triangle(r: int, n: int, m: int, p: int = DEFAULT_PRIMES[0], seed: int = 0) -> dict:
    """Dimensions of every refined component with m1+m2+m3 = r*n + m (zero where no monomials exist)."""
    total = r * n + m
    dims = {tuple(w): 0 for w in exponent_triples(total)}
    spec = ComponentSpec(r, n, m, p=p, seed=seed)
    for cell in solve_spec(spec, keep_nullspace=False):
        dims[cell.weight] = cell.dim
    return dims
