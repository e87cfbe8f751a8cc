import io
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cayley_salmon.exactnum import DEFAULT_PRIMES, PrimeField
from cayley_salmon.linalg import (
    EchelonAccumulator,
    SparseMatrix,
    _rref_unblocked,
    bareiss_det,
    det_crt,
    det_exact,
    det_modp,
    dump_triplets,
    load_triplets,
    matmul_modp,
    nullspace_q,
    rank_nullspace,
    rref_modp,
)

P = DEFAULT_PRIMES[0]


def test_zero_matrix():
    r, N = rank_nullspace(np.zeros((3, 3), dtype=np.int64), 7)
    assert r == 0
    assert (N == np.eye(3, dtype=np.int64)).all()


def test_identity():
    r, N = rank_nullspace(np.eye(3, dtype=np.int64), 7)
    assert r == 3 and N.shape[0] == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.integers(0, 2**32), st.sampled_from([2, 7, 6361, P]))
def test_rank_nullity(m, n, seed, p):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, min(m, n) + 1))
    A = matmul_modp(rng.integers(0, p, (m, k)), rng.integers(0, p, (k, n)), p)
    r, N = rank_nullspace(A, p)
    assert r + N.shape[0] == n
    assert r <= k
    if N.size:
        assert not matmul_modp(A, N.T, p).any()


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 120), st.integers(1, 120), st.integers(0, 2**32))
def test_blocked_matches_reference(m, n, seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, 13, (m, n)) * (rng.random((m, n)) < 0.3)
    R1, p1 = rref_modp(A, 13, block=8)
    R2, p2 = _rref_unblocked(A, 13)
    assert p1 == p2 and (R1 == R2).all()


def test_accumulator_matches_one_shot():
    rng = np.random.default_rng(0)
    A = matmul_modp(rng.integers(0, P, (60, 25)), rng.integers(0, P, (25, 50)), P)
    acc = EchelonAccumulator(50, P)
    inc = [acc.add(A[i:i + 20]) for i in range(0, 60, 20)]
    assert sum(inc) == acc.rank == 25
    assert inc[-1] == 0
    _, N = rank_nullspace(A, P)
    assert (acc.nullspace() == N).all()


def test_matmul_exact_at_extremes():
    for k in (1, 64, 65, 500):
        a = np.full((2, k), P - 1)
        b = np.full((k, 2), P - 1)
        ref = (a.astype(object) @ b.astype(object)) % P
        assert (matmul_modp(a, b, P) == ref).all()


def test_sparse_roundtrip():
    rng = np.random.default_rng(1)
    A = rng.integers(0, 6361, (7, 9)) * (rng.random((7, 9)) < 0.4)
    M = SparseMatrix.from_dense(A, 6361)
    assert (M.to_dense() == A).all()
    buf = io.StringIO()
    dump_triplets(M, buf)
    buf.seek(0)
    assert buf.getvalue().startswith("# format 1 modulus 6361")
    M2 = load_triplets(buf)
    assert (M2.to_dense() == A).all() and M2.p == 6361


def test_identity_det():
    I = [[int(i == j) for j in range(21)] for i in range(21)]
    assert bareiss_det(I) == 1
    assert det_modp(I, 6361) == 1


def test_repeated_row_det():
    rng = random.Random(0)
    M = [[rng.randint(-9, 9) for _ in range(6)] for _ in range(6)]
    M[3] = list(M[1])
    assert bareiss_det(M) == 0
    assert det_exact(M) == 0


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(st.integers(-10**6, 10**6), min_size=5, max_size=5), min_size=5, max_size=5))
def test_bareiss_vs_crt(M):
    assert bareiss_det(M) == det_crt(M)


def test_rational_det_and_nullspace():
    from fractions import Fraction as Q
    M = [[Q(1, 2), Q(1, 3)], [Q(1), Q(2, 3)]]
    assert det_exact(M) == 0
    N = nullspace_q(M)
    assert len(N) == 1
    assert all(sum(a * b for a, b in zip(row, N[0])) == 0 for row in M)


def test_det_mod_field():
    M = [[2, 1], [1, 1]]
    assert det_exact(M, PrimeField(7)) == 1
