"""Exact linear algebra over GF(p) and Q.

Elimination over GF(p) is vectorized with numpy. For p < 2**31 entries are
kept in int64 (every product of two residues fits); larger word-size primes
fall back to object arrays with Python ints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .exactnum import INT64_SAFE_BOUND, PrimeField, crt_combine, hadamard_bound, primes_for_bound


def _dtype(p: int):
    return np.int64 if p < INT64_SAFE_BOUND else object


def as_modp(a, p: int) -> np.ndarray:
    """Copy ``a`` into a 2-D array of residues mod p."""
    arr = np.array(a, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    arr = arr % p
    return arr.astype(_dtype(p)) if p < INT64_SAFE_BOUND else arr


# GF(p) sparse matrices

@dataclass(frozen=True)
class SparseMatrix:
    """Row-major sparse matrix over GF(p); each row is ``(cols, vals)`` with sorted cols."""

    nrows: int
    ncols: int
    rows: tuple
    p: int

    @classmethod
    def from_dense(cls, a, p: int) -> "SparseMatrix":
        arr = as_modp(a, p) if not (isinstance(a, np.ndarray) and a.ndim == 2) else np.asarray(a) % p
        rows = []
        for row in arr:
            nz = np.flatnonzero(row)
            rows.append((tuple(int(c) for c in nz), tuple(int(row[c]) for c in nz)))
        return cls(arr.shape[0], arr.shape[1], tuple(rows), p)

    @classmethod
    def from_triplets(cls, nrows: int, ncols: int, triplets: Iterable[tuple[int, int, int]], p: int) -> "SparseMatrix":
        acc: list[dict] = [dict() for _ in range(nrows)]
        for r, c, v in triplets:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise IndexError(f"entry ({r}, {c}) outside {nrows}x{ncols}")
            acc[r][c] = (acc[r].get(c, 0) + v) % p
        rows = []
        for d in acc:
            cols = sorted(c for c, v in d.items() if v)
            rows.append((tuple(cols), tuple(d[c] for c in cols)))
        return cls(nrows, ncols, tuple(rows), p)

    @property
    def nnz(self) -> int:
        return sum(len(c) for c, _ in self.rows)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=_dtype(self.p))
        for i, (cols, vals) in enumerate(self.rows):
            for c, v in zip(cols, vals):
                out[i, c] = v
        return out

    def matvec(self, x: Sequence[int]) -> list[int]:
        return [sum(v * int(x[c]) for c, v in zip(cols, vals)) % self.p for cols, vals in self.rows]

    def permute_rows(self, order: Sequence[int]) -> "SparseMatrix":
        return SparseMatrix(self.nrows, self.ncols, tuple(self.rows[i] for i in order), self.p)


def dump_triplets(M: SparseMatrix, fh) -> None:
    """Write ``# format 1 modulus p``, ``nrows ncols nnz``, then ``row col value`` lines (0-based)."""
    fh.write(f"# format 1 modulus {M.p}\n")
    fh.write(f"{M.nrows} {M.ncols} {M.nnz}\n")
    for i, (cols, vals) in enumerate(M.rows):
        for c, v in zip(cols, vals):
            fh.write(f"{i} {c} {v}\n")


def load_triplets(fh, p: int | None = None) -> SparseMatrix:
    header = None
    entries = []
    for line in fh:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if "modulus" in parts and p is None:
                p = int(parts[parts.index("modulus") + 1])
            continue
        nums = [int(x) for x in line.split()]
        if header is None:
            header = nums
        else:
            entries.append(tuple(nums))
    if header is None or p is None:
        raise ValueError("triplet file needs a header and a modulus")
    nrows, ncols, nnz = header
    if len(entries) != nnz:
        raise ValueError(f"header says {nnz} entries, found {len(entries)}")
    return SparseMatrix.from_triplets(nrows, ncols, entries, p)


# elimination

def _rref_unblocked(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Textbook Gauss-Jordan, one pivot at a time. Kept as a reference for the blocked version."""
    A = np.array(a, dtype=_dtype(p), copy=True) % p
    m, n = A.shape
    r = 0
    pivots: list[int] = []
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i], c:] = A[[i, r], c:]
        piv = int(A[r, c])
        if piv != 1:
            A[r, c:] = A[r, c:] * pow(piv, -1, p) % p
        col = A[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            A[hit, c:] = (A[hit, c:] - np.outer(col[hit], A[r, c:]) % p) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def _panel_pivots(P: np.ndarray, p: int) -> list[tuple[int, int]]:
    """Greedy (column, row) pivots of a panel, lowest available row first."""
    P = P.copy()
    avail = np.ones(P.shape[0], dtype=bool)
    out = []
    for c in range(P.shape[1]):
        cand = np.flatnonzero((P[:, c] != 0) & avail)
        if cand.size == 0:
            continue
        i = int(cand[0])
        avail[i] = False
        out.append((c, i))
        rest = cand[1:]
        if rest.size:
            f = P[rest, c] * pow(int(P[i, c]), -1, p) % p
            P[rest, c:] = (P[rest, c:] - np.outer(f, P[i, c:]) % p) % p
        if not avail.any():
            break
    return out


def _inverse_modp(X: np.ndarray, p: int) -> np.ndarray:
    k = X.shape[0]
    aug = np.hstack([X % p, np.eye(k, dtype=X.dtype)])
    R, piv = _rref_unblocked(aug, p)
    if piv[:k] != list(range(k)) or len(piv) < k:
        raise ArithmeticError("singular pivot block")
    return R[:, k:]


def rref_modp(a: np.ndarray, p: int, block: int = 48) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p. Returns (nonzero rows of the RREF, pivot columns).

    Pivot columns are the greedy column profile of the row space, so the
    result depends only on the row space. Columns are processed in panels;
    the trailing update is one modular matrix product per panel.
    """
    A = np.array(a, dtype=_dtype(p), copy=True) % p
    m, n = A.shape
    r = 0
    pivots: list[int] = []
    for c0 in range(0, n, block):
        if r == m:
            break
        c1 = min(c0 + block, n)
        local = _panel_pivots(A[r:, c0:c1], p)
        if not local:
            continue
        pcols = [c0 + c for c, _ in local]
        S = [r + i for _, i in local]
        Sset = set(S)
        others = [i for i in range(m) if i not in Sset]
        Xinv = _inverse_modp(A[np.ix_(S, pcols)], p)
        Y = matmul_modp(Xinv, A[S, c0:], p)
        if others:
            coef = A[np.ix_(others, pcols)]
            A[others, c0:] = (A[others, c0:] - matmul_modp(coef, Y, p)) % p
        k = len(S)
        before = [i for i in others if i < r]
        after = [i for i in others if i >= r]
        newA = np.empty_like(A)
        newA[:r] = A[before]
        newA[r:r + k, :c0] = 0
        newA[r:r + k, c0:] = Y
        newA[r + k:] = A[after]
        A = newA
        pivots.extend(pcols)
        r += k
    return A[:r], pivots


def nullspace_from_rref(R: np.ndarray, pivots: Sequence[int], ncols: int, p: int) -> np.ndarray:
    """Canonical nullspace basis: one vector per free column f, with 1 at f and 0 at other free columns."""
    piv = set(pivots)
    free = [c for c in range(ncols) if c not in piv]
    N = np.zeros((len(free), ncols), dtype=_dtype(p))
    for t, f in enumerate(free):
        N[t, f] = 1
        if len(pivots):
            N[t, list(pivots)] = (-R[:, f]) % p
    return N


def rank_nullspace(M, p: int | None = None) -> tuple[int, np.ndarray]:
    """Rank and canonical nullspace basis of a GF(p) matrix.

    ``M`` is a :class:`SparseMatrix` or a dense array (then ``p`` is required).
    The basis rows satisfy ``M @ x == 0`` and rank + nullity == ncols.
    """
    if isinstance(M, SparseMatrix):
        p = M.p
        dense = M.to_dense()
        ncols = M.ncols
    else:
        if p is None:
            raise ValueError("modulus required for dense input")
        dense = as_modp(M, p)
        ncols = dense.shape[1]
    R, pivots = rref_modp(dense, p)
    return len(pivots), nullspace_from_rref(R, pivots, ncols, p)


class EchelonAccumulator:
    """Row space of a growing set of rows, kept in RREF."""

    def __init__(self, ncols: int, p: int):
        self.ncols = ncols
        self.p = p
        self.R = np.zeros((0, ncols), dtype=_dtype(p))
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add(self, rows: np.ndarray) -> int:
        """Add rows, return the rank increase."""
        before = self.rank
        if self.rank == self.ncols or rows.shape[0] == 0:
            return 0
        self.R, self.pivots = rref_modp(np.vstack([self.R, rows % self.p]), self.p)
        return self.rank - before

    def nullspace(self) -> np.ndarray:
        return nullspace_from_rref(self.R, self.pivots, self.ncols, self.p)


def matmul_modp(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """a @ b mod p, exact.

    For p < 2**31 both factors are split into 16-bit halves and multiplied
    in float64, where every partial sum stays below 2**53 for inner
    dimensions up to 2**20.
    """
    if p >= INT64_SAFE_BOUND or a.shape[1] > (1 << 20):
        return np.array(np.dot(a.astype(object), b.astype(object)) % p, dtype=object) if p >= INT64_SAFE_BOUND \
            else np.vstack([matmul_modp(a[i:i + 1], b, p) for i in range(a.shape[0])])
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    if a.shape[1] <= 64:
        # 2**16 * 2**31 * 64 = 2**53: splitting only the left factor is exact
        bf = b.astype(np.float64)
        lo = ((a & 0xFFFF).astype(np.float64) @ bf).astype(np.int64) % p
        hi = ((a >> 16).astype(np.float64) @ bf).astype(np.int64) % p
        return (hi * 65536 + lo) % p
    al =(a & 0xFFFF).astype(np.float64)
    ah = (a >> 16).astype(np.float64)
    bl = (b & 0xFFFF).astype(np.float64)
    bh = (b >> 16).astype(np.float64)
    ll = (al @ bl).astype(np.int64) % p
    mid = (al @ bh).astype(np.int64) % p + (ah @ bl).astype(np.int64) % p
    hh = (ah @ bh).astype(np.int64) % p
    two32 = (1 << 32) % p
    return (hh * two32 % p + mid % p * 65536 % p + ll) % p


# determinants

def det_modp(M: Sequence[Sequence[int]], p: int) -> int:
    """Determinant over GF(p) by Gaussian elimination."""
    A = [[int(x) % p for x in row] for row in M]
    n = len(A)
    det = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det = det * A[c][c] % p
        inv = pow(A[c][c], -1, p)
        for i in range(c + 1, n):
            f = A[i][c] * inv % p
            if f:
                Ai, Ac = A[i], A[c]
                for j in range(c, n):
                    Ai[j] = (Ai[j] - f * Ac[j]) % p
    return det % p


def bareiss_det(M: Sequence[Sequence[int]]) -> int:
    """Fraction-free determinant of an integer matrix."""
    A = [list(map(int, row)) for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        akk = A[k][k]
        Ak = A[k]
        for i in range(k + 1, n):
            Ai = A[i]
            aik = Ai[k]
            for j in range(k + 1, n):
                Ai[j] = (akk * Ai[j] - aik * Ak[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


def clear_denominators(M: Sequence[Sequence]) -> tuple[list[list[int]], int]:
    """Scale each row to integers. Returns (integer matrix, product of row scales)."""
    out = []
    scale = 1
    for row in M:
        L = 1
        for x in row:
            if isinstance(x, Fraction):
                L = lcm(L, x.denominator)
        out.append([int(x * L) for x in row])
        scale *= L
    return out, scale


def det_exact(M: Sequence[Sequence], field: PrimeField | None = None):
    """Exact determinant over Q (Bareiss on the row-cleared integer matrix) or over GF(p)."""
    if any(len(row) != len(M) for row in M):
        raise ValueError("matrix must be square")
    if field is not None:
        return det_modp([[field(x) for x in row] for row in M], field.p)
    ints, scale = clear_denominators(M)
    d = bareiss_det(ints)
    if scale == 1:
        return d
    q = Fraction(d, scale)
    return q.numerator if q.denominator == 1 else q


def det_crt(M: Sequence[Sequence[int]]) -> int:
    """Integer determinant via residues mod enough primes and CRT (independent of Bareiss)."""
    bound = hadamard_bound(M)
    primes = primes_for_bound(bound)
    return crt_combine([(det_modp(M, q), q) for q in primes], symmetric=True)


def rref_q(M: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    A = [[Fraction(x) for x in row] for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    r = 0
    pivots = []
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A[:r], pivots


def nullspace_q(M: Sequence[Sequence]) -> list[list[Fraction]]:
    """Canonical exact nullspace basis over Q (same normalization as the GF(p) version)."""
    n = len(M[0])
    R, pivots = rref_q(M)
    piv = set(pivots)
    basis = []
    for f in (c for c in range(n) if c not in piv):
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, pc in zip(R, pivots):
            x[pc] = -row[f]
        basis.append(x)
    return basis
