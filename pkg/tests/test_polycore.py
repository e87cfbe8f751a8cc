from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cayley_salmon.exactnum import PrimeField
from cayley_salmon.polycore import (
    Cvar,
    Grading,
    Inhomogeneous,
    MissingVariableError,
    MultiPoly,
    ParseError,
    RingMismatchError,
    Vvar,
    count_monomials,
    enumerate_monomials,
    evaluate,
    from_text,
    grade_of,
    letter,
    to_text,
)

v1, v2, v3 = (MultiPoly.var(Vvar(i)) for i in (1, 2, 3))


def test_difference_of_squares():
    assert (v1 + v2) * (v1 - v2) == v1**2 - v2**2


def test_zero_power_is_one():
    assert MultiPoly.var(Vvar(1)) ** 0 == MultiPoly.const(1)


def test_binomial_coefficient():
    f = (v1 + v2) ** 4
    assert f.terms[((Vvar(1), 2), (Vvar(2), 2))] == 6


def test_no_zero_terms_stored():
    f = v1 - v1
    assert not f and len(f) == 0


def test_grading_of_c_quadratic_times_v5():
    f = MultiPoly.var(Cvar(0, 4, 0)) * MultiPoly.var(Cvar(0, 0, 4)) * v1**5
    assert grade_of(f) == Grading(2, 5, (5, 4, 4))


def test_grading_single_generator():
    assert grade_of(MultiPoly.var(Cvar(4, 0, 0))) == Grading(1, 0, (4, 0, 0))


def test_inhomogeneous_witness():
    g = grade_of(v1 + MultiPoly.var(Cvar(4, 0, 0)))
    assert isinstance(g, Inhomogeneous)
    monos = {m for m in g.witness}
    assert monos == {((Vvar(1), 1),), ((Cvar(4, 0, 0), 1),)}


def test_grading_of_zero_is_none():
    assert grade_of(MultiPoly()) is None


@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(1, 3)), min_size=1, max_size=4),
       st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)))
def test_v_degree_identity(cs, ve):
    # deg_v = m1 + m2 + m3 - r * deg_C for every monomial (r = 4)
    f = MultiPoly.const(1)
    for i, j, e in cs:
        if i + j <= 4:
            f = f * MultiPoly.var(Cvar(i, j, 4 - i - j)) ** e
    for a, e in enumerate(ve):
        f = f * MultiPoly.var(Vvar(a + 1)) ** e
    g = grade_of(f)
    assert g.deg_v == sum(g.overline_deg) - 4 * g.deg_C


def test_evaluate_rational():
    assert evaluate(v1**2 + v2, {Vvar(1): 2, Vvar(2): 3}) == 7


def test_evaluate_constant_term_at_zero():
    f = v1 * v2 + 5
    assert evaluate(f, {Vvar(1): 0, Vvar(2): 0}) == 5


def test_evaluate_missing_variable():
    with pytest.raises(MissingVariableError):
        evaluate(v1 + v2, {Vvar(1): 1})


def test_phi_coefficient_reading():
    from cayley_salmon.undulation import appendix_matrix

    phi = appendix_matrix().phi
    vals = {letter(ch): 0 for ch in "abcdefghijklmno"}
    vals.update({letter("k"): 1, letter("o"): 1, letter("m"): 1})
    vals.update({Vvar(1): 1, Vvar(2): 0, Vvar(3): 0})
    assert evaluate(phi, vals) == 4


@pytest.mark.parametrize("d,n", [(5, 21), (7, 36), (0, 1), (4, 15)])
def test_monomial_counts(d, n):
    assert count_monomials(d, 3) == n
    assert len(enumerate_monomials(d, 3)) == n


def test_grlex_order():
    assert enumerate_monomials(2, 3) == [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]


def test_ring_mismatch():
    F = PrimeField(7)
    with pytest.raises(RingMismatchError):
        MultiPoly.var(Vvar(1), F) + MultiPoly.var(Vvar(1), PrimeField(11))


def test_modular_reduction():
    F = PrimeField(7)
    f = MultiPoly.var(Vvar(1), F) * 8
    assert f == MultiPoly.var(Vvar(1), F)


_polys = st.lists(
    st.tuples(st.fractions(max_denominator=20).filter(lambda x: x != 0),
              st.sampled_from(["C[4,0,0]", "C[1,2,1]", "v1", "v2^3", "a", "k*o", "C[0,0,4]^2*v3"])),
    max_size=6)


@given(_polys)
def test_text_roundtrip(terms):
    f = MultiPoly()
    for c, mono in terms:
        f = f + from_text(mono) * Fraction(c)
    assert from_text(to_text(f)) == f


def test_text_format():
    f = from_text("3*C[4,0,0]^2*v1 - 3/4*v2")
    assert f.terms[((Cvar(4, 0, 0), 2), (Vvar(1), 1))] == 3
    assert f.terms[((Vvar(2), 1),)] == Fraction(-3, 4)


@pytest.mark.parametrize("bad", ["3**v1", "C[4,0]", "x1", "v1 +"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        from_text(bad)
