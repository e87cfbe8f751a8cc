"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (lines are printed even when
output is captured) or directly with ``python tests/test_acceptance.py``.
All comparisons are exact: dimensions, determinants and ratios are
integers or field elements, so the tolerance is zero everywhere.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from itertools import permutations

import pytest

from cayley_salmon.curve import (
    DegenerateWitnessError,
    act_linear,
    max_root_multiplicity,
    random_curve,
    random_undulation_curve,
    random_witness,
    restrict_to_line,
    tangency_oracle,
)
from cayley_salmon.exactnum import DEFAULT_PRIMES, PrimeField
from cayley_salmon.idealgen import (
    ComponentSpec,
    SeedMismatchError,
    complement_basis,
    component_basis,
    confirm_dim,
    refined_dims_triangle,
)
from cayley_salmon.undulation import (
    QUARTIC_DEGREE,
    appendix_matrix,
    appendix_modp,
    det_modp_at,
    invariant_quartic,
    load_appendix,
    pipeline_matrix,
    quartic_value,
    validate_appendix,
)

PRIMES = list(DEFAULT_PRIMES)
SEEDS = [0, 1]

QUARTIC_TABLE = {
    **{(n, m): 0 for n in (0, 1) for m in range(8)},
    **{(2, m): d for m, d in enumerate([0, 0, 0, 0, 1, 3, 21, 45])},
    **{(3, m): d for m, d in enumerate([0, 0, 0, 0, 15, 63, 325])},
}
QUINTIC_TABLE = {(2, 5): 0, (3, 5): 0, (2, 6): 6, (2, 7): 15, (3, 6): 126, (3, 7): 315}


def report(capsys, number: int, ok: bool, text: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}: {text}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    assert ok, line


def _dims_table(r, table):
    bad = []
    for (n, m), want in table.items():
        try:
            got = confirm_dim(ComponentSpec(r, n, m), PRIMES, SEEDS if r == 4 else [0])
        except SeedMismatchError as exc:
            bad.append(f"I_{n},{m}: {exc}")
            continue
        if got != want:
            bad.append(f"I_{n},{m} = {got}, expected {want}")
    return bad


def check_1(capsys=None):
    t = time.monotonic()
    bad = _dims_table(4, QUARTIC_TABLE)
    report(capsys, 1, not bad, f"quartic dimension table, {len(QUARTIC_TABLE)} entries x 2 primes x 2 seeds "
           f"({time.monotonic() - t:.0f}s) {'; '.join(bad)}")


def check_2(capsys=None):
    t = time.monotonic()
    bad = _dims_table(5, QUINTIC_TABLE)
    report(capsys, 2, not bad, f"quintic dimensions {sorted(QUINTIC_TABLE.values())} x 2 primes "
           f"({time.monotonic() - t:.0f}s) {'; '.join(bad)}")


def check_3(capsys=None):
    M = load_appendix(validate=False)
    problems = validate_appendix(M, PRIMES, samples=100)
    report(capsys, 3, not problems and M.size == 21,
           f"21 shipped rows: gradings, alpha = v*phi, 100 membership rows x 2 primes {'; '.join(problems)}")


def check_4(capsys=None, count=1000):
    M = appendix_matrix()
    nonzero, slowest, missing_line = [], 0.0, []
    for s in range(count):
        P, W = random_undulation_curve(4, None, s, bound=50)
        t = time.monotonic()
        rep = invariant_quartic(P, M, recover_lines=False)
        slowest = max(slowest, time.monotonic() - t)
        if rep.value != 0:
            nonzero.append(s)
        elif s < 50:
            lines = invariant_quartic(P, M).lines
            if not any(all(a * W.v[k] == b * W.v[j] for j, a in enumerate(L) for k, b in enumerate(L))
                       for L in lines):
                missing_line.append(s)
    ok = not nonzero and not missing_line and slowest < 1.0
    report(capsys, 4, ok, f"{count} witness quartics give exactly 0 (slowest {slowest * 1000:.0f} ms; "
           f"witness line recovered for the first 50) nonzero={nonzero[:5]} missing={missing_line[:5]}")


def check_5(capsys=None, count=1000):
    M = appendix_matrix()
    unexplained, zeros = [], 0
    for s in range(count):
        P = random_curve(4, None, 100000 + s, bound=10**6)
        rep = invariant_quartic(P, M)
        if rep.value == 0:
            zeros += 1
            if not rep.lines or any(max_root_multiplicity(restrict_to_line(P, L)) < 4 for L in rep.lines):
                unexplained.append(s)
    report(capsys, 5, not unexplained,
           f"{count} random quartics, coefficients in [-1e6, 1e6]: {count - zeros} nonzero, "
           f"{zeros} zero with a verified undulation line, unexplained={unexplained[:5]}")


def check_6(capsys=None, count=100):
    M = appendix_matrix()
    rng = random.Random("homogeneity")
    bad = []
    for s in range(count):
        P = random_curve(4, None, 200000 + s, bound=1000)
        lam = Fraction(rng.choice([-1, 1]) * rng.randint(1, 50), rng.randint(1, 50))
        if quartic_value(M, P.scaled(lam)) != lam ** QUARTIC_DEGREE * quartic_value(M, P):
            bad.append(s)
    report(capsys, 6, not bad, f"value(lam P) = lam^60 value(P) for {count} pairs, failures={bad[:5]}")


def random_unimodular(rng: random.Random, shears: int = 12):
    g = [[int(i == j) for j in range(3)] for i in range(3)]
    for _ in range(rng.randint(1, shears)):
        i, j = rng.sample(range(3), 2)
        c = rng.choice([-3, -2, -1, 1, 2, 3])
        g = [[g[a][b] + (c * g[j][b] if a == i else 0) for b in range(3)] for a in range(3)]
    return g


def check_7(capsys=None, ngroups=100, ncurves=10):
    M = appendix_matrix()
    rng = random.Random("sl3")
    curves = [random_curve(4, None, 300000 + s, bound=100) for s in range(ncurves)]
    values = [quartic_value(M, P) for P in curves]
    bad = []
    for t in range(ngroups):
        g = random_unimodular(rng)
        for P, v in zip(curves, values):
            if quartic_value(M, act_linear(g, P)) != v:
                bad.append(t)
                break
    report(capsys, 7, not bad and all(values),
           f"value(g P) = value(P) for {ngroups} unimodular g x {ncurves} curves, failures={bad[:5]}")


def check_8(capsys=None, ncurves=20):
    M = appendix_matrix()
    ratios = {}
    for p in PRIMES:
        F = PrimeField(p)
        PM = pipeline_matrix(p, seed=0)
        AM = appendix_modp(M, F)
        seen = set()
        for s in range(ncurves):
            C = random_curve(4, F, 400000 + s)
            a, b = det_modp_at(AM, C, F), det_modp_at(PM, C, F)
            seen.add(F.div(b, a) if a else None)
        ratios[p] = seen
    ok = all(len(v) == 1 and None not in v and 0 not in v for v in ratios.values())
    report(capsys, 8, ok, f"det(rebuilt)/det(shipped) constant and nonzero over {ncurves} curves: "
           + ", ".join(f"p={p}: {sorted(map(str, v))[:3]}" for p, v in ratios.items()))


def check_9(capsys=None):
    p = PRIMES[0]
    small = component_basis(ComponentSpec(4, 2, 5, p=p))
    big = component_basis(ComponentSpec(4, 3, 5, p=p))
    comp = complement_basis(big, small)
    tri = refined_dims_triangle(4, 3, 5, p)
    cd = comp.cell_dims
    per_cell = all(comp.product_cell_dims.get(w, 0) + cd.get(w, 0) == d for w, d in tri.items())
    symmetric = all(cd.get(tuple(w[i] for i in perm), 0) == d for w, d in cd.items() for perm in permutations(range(3)))
    ok = (comp.product_dim == 45 and len(comp.polys) == 18 and sum(tri.values()) == 63
          and sum(cd.values()) == 18 and per_cell and symmetric)
    report(capsys, 9, ok, f"product span {comp.product_dim}, complement {len(comp.polys)}, "
           f"I_3,5 triangle total {sum(tri.values())}, complement cells sum {sum(cd.values())} "
           f"(= 15 + 3, permutation-symmetric: {symmetric}, cellwise 45 + 18: {per_cell})")


def check_10(capsys=None, count=1000):
    failed, used, s = [], 0, 0
    while used < count:
        W = random_witness(4, None, 500000 + s)
        s += 1
        try:
            rep = tangency_oracle(W)
        except DegenerateWitnessError:
            continue
        used += 1
        if not rep.passed:
            failed.append(s - 1)
    report(capsys, 10, not failed, f"P(X) = 0 and grad P(X) parallel to v at X = u x v for {count} witnesses, "
           f"failures={failed[:5]}")


@pytest.mark.slow
def test_criterion_01_quartic_dims(capsys):
    check_1(capsys)


@pytest.mark.slow
def test_criterion_02_quintic_dims(capsys):
    check_2(capsys)


def test_criterion_03_appendix(capsys):
    check_3(capsys)


def test_criterion_04_vanishing(capsys):
    check_4(capsys)


def test_criterion_05_generic_nonvanishing(capsys):
    check_5(capsys)


def test_criterion_06_homogeneity(capsys):
    check_6(capsys)


def test_criterion_07_sl3_invariance(capsys):
    check_7(capsys)


def test_criterion_08_cross_construction(capsys):
    check_8(capsys)


def test_criterion_09_structure_counts(capsys):
    check_9(capsys)


def test_criterion_10_tangency(capsys):
    check_10(capsys)


if __name__ == "__main__":
    failures = 0
    for k in range(1, 11):
        try:
            globals()[f"check_{k}"]()
        except AssertionError:
            failures += 1
    sys.exit(1 if failures else 0)
