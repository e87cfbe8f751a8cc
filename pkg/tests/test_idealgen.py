import json
from math import comb

import numpy as np
import pytest

from cayley_salmon.exactnum import DEFAULT_PRIMES, REFERENCE_PRIME, PrimeField
from cayley_salmon.idealgen import (
    BudgetExhausted,
    ComponentSpec,
    SamplePool,
    build_constraints,
    complement_basis,
    component_basis,
    component_dim,
    confirm_dim,
    graded_columns,
    membership_failures,
    poly_to_columns,
    refined_cells,
    refined_dims_triangle,
    solve_spec,
)
from cayley_salmon.polycore import Cvar, MultiPoly, exponent_triples, grade_of

P0 = DEFAULT_PRIMES[0]


def test_column_counts():
    assert len(graded_columns(4, 2, 4)) == comb(16, 2) * comb(6, 2) == 1800
    assert len(graded_columns(4, 3, 5)) == comb(17, 3) * comb(7, 2) == 14280


def test_cells_partition_columns():
    cells = refined_cells(4, 2, 5)
    idx = sorted(i for c in cells.values() for i in c)
    assert idx == list(range(len(graded_columns(4, 2, 5))))
    assert all(sum(w) == 4 * 2 + 5 for w in cells)


def test_refined_spec_rejects_bad_weight():
    with pytest.raises(ValueError):
        ComponentSpec(4, 2, 5, (5, 4, 3))
    with pytest.raises(ValueError):
        ComponentSpec(3, 2, 5)


def test_sample_pool_is_order_independent():
    a = SamplePool(4, P0, seed=3)
    b = SamplePool(4, P0, seed=3)
    C1, V1 = a.get(100, 50)
    b.get(0, 300)
    C2, V2 = b.get(100, 50)
    assert (C1 == C2).all() and (V1 == V2).all()


def test_constraint_rows_kill_phi():
    from cayley_salmon.undulation import appendix_matrix, letters_to_C

    F = PrimeField(P0)
    phi = letters_to_C(appendix_matrix().phi).reduce_mod(F)
    spec = ComponentSpec(4, 2, 4, p=P0)
    A = build_constraints(spec, 300).to_dense()
    cols = graded_columns(4, 2, 4)
    coeffs = poly_to_columns(phi, 4)
    x = np.zeros(len(cols), dtype=np.int64)
    pos = {c: i for i, c in enumerate(cols)}
    for col, c in coeffs.items():
        x[pos[col]] = c
    assert not (A.astype(object) @ x.astype(object) % P0).any()


@pytest.mark.parametrize("n,m,d", [(2, 4, 1), (2, 5, 3), (1, 4, 0), (2, 3, 0), (3, 3, 0), (0, 5, 0)])
def test_small_quartic_dims(n, m, d):
    assert component_dim(ComponentSpec(4, n, m)) == d


def test_quintic_small_dims():
    assert component_dim(ComponentSpec(5, 2, 6)) == 6
    assert component_dim(ComponentSpec(5, 2, 5)) == 0


def test_confirm_across_primes_and_seeds():
    assert confirm_dim(ComponentSpec(4, 2, 5), [P0, REFERENCE_PRIME], [0, 1, 2]) == 3


def test_phi_proportional_to_basis():
    from cayley_salmon.undulation import appendix_matrix, letters_to_C

    F = PrimeField(REFERENCE_PRIME)
    B = component_basis(ComponentSpec(4, 2, 4, p=REFERENCE_PRIME))
    assert len(B) == 1
    f = B.polys[0]
    phi = letters_to_C(appendix_matrix().phi).reduce_mod(F)
    mono, c = next(iter(f.terms.items()))
    assert phi.scale(F.div(c, phi.terms[mono])) == f


def test_alpha_span():
    from cayley_salmon.linalg import rank_nullspace
    from cayley_salmon.undulation import appendix_matrix, letters_to_C

    F = PrimeField(P0)
    B = component_basis(ComponentSpec(4, 2, 5, p=P0))
    alphas = [letters_to_C(f).reduce_mod(F) for f in appendix_matrix().rows[:3]]
    cols = graded_columns(4, 2, 5)
    pos = {c: i for i, c in enumerate(cols)}

    def vec(f):
        x = np.zeros(len(cols), dtype=np.int64)
        for col, c in poly_to_columns(f, 4).items():
            x[pos[col]] = c
        return x

    both = np.array([vec(f) for f in B.polys + alphas])
    r, _ = rank_nullspace(both, P0)
    assert r == 3


def test_basis_is_homogeneous_and_canonical():
    B = component_basis(ComponentSpec(4, 2, 5))
    for f in B.polys:
        g = grade_of(f)
        assert (g.deg_C, g.deg_v) == (2, 5)
    assert component_basis(ComponentSpec(4, 2, 5)).polys == B.polys


def test_ideal_property():
    F = PrimeField(P0)
    B = component_basis(ComponentSpec(4, 2, 5))
    prods = [f * MultiPoly.var(Cvar(*s), F) for f in B.polys for s in exponent_triples(4)[::5]]
    assert membership_failures(prods, 4, P0, count=100, seed=5) == []
    # a polynomial outside the ideal is caught
    assert membership_failures([prods[0] + MultiPoly.var(Cvar(4, 0, 0), F) ** 3], 4, P0) == [0]


def test_refined_triangle_of_alpha():
    tab = refined_dims_triangle(4, 2, 5)
    assert sum(tab.values()) == 3
    # phi has overline-degree (4, 4, 4); v_i shifts it by e_i
    nz = {w for w, d in tab.items() if d}
    assert nz == {(5, 4, 4), (4, 5, 4), (4, 4, 5)}


def test_complement_requires_matching_specs():
    small = component_basis(ComponentSpec(4, 2, 4))
    with pytest.raises(ValueError):
        complement_basis(small, small)


def test_checkpoint_and_budget(tmp_path):
    spec = ComponentSpec(4, 2, 5)
    ck = tmp_path / "ck.json"
    with pytest.raises(BudgetExhausted) as ei:
        solve_spec(spec, checkpoint=ck, budget=0.0, keep_nullspace=False)
    # the first cell always runs before the budget is checked again
    state = json.loads(ck.read_text())
    assert ei.value.checkpoint == str(ck)
    assert len(state["cells"]) >= 1
    res = solve_spec(spec, checkpoint=ck, keep_nullspace=False)
    assert sum(c.dim for c in res) == 3


@pytest.mark.slow
def test_complement_with_quadratic_multipliers():
    # q * phi for the 120 quadratic C-monomials q are independent (phi != 0)
    small = component_basis(ComponentSpec(4, 2, 4))
    big = component_basis(ComponentSpec(4, 4, 4))
    comp = complement_basis(big, small)
    assert comp.product_dim == 120
    assert len(comp.polys) == len(big) - 120
