from __future__ import annotations

import math

import pytest
import sympy
from hypothesis import given, settings, strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from corpus import LSETS, lset
from lmatrix.fields import field_make, prime_field
from lmatrix.relations import (
    IntRelation,
    LSet,
    RelationError,
    algebraic_integer_of_inverse,
    bezout,
    hermite_rows,
    integer_solvable,
    normalize_min_negatives,
    point_criterion,
    primitive_relation,
    primitive_system,
    relation_obstruction,
    relation_to_differences,
    smith_normal_form,
    verify_certificate,
    verify_solution,
)
from lmatrix.search import primitive_relation_box_search

QQ = field_make("QQ")

matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=m, max_size=m)))


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_smith_form_matches_sympy(M):
    S = smith_normal_form(M)
    ours = [abs(x) for x in S.diagonal]
    theirs = [abs(x) for x in sympy_snf(sympy.Matrix(M), domain=sympy.ZZ).diagonal() if x]
    assert ours == theirs
    for a, b in zip(ours, ours[1:]):
        assert b % a == 0


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_hermite_spans_same_lattice(M):
    H = hermite_rows(M)
    assert len(H) == sympy.Matrix(M).rank()
    # same lattice: Smith diagonals agree
    if H:
        assert smith_normal_form(H).diagonal == smith_normal_form(M).diagonal


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=5))
def test_bezout(values):
    g, c = bezout(values)
    assert g == math.gcd(*values)
    assert sum(a * b for a, b in zip(c, values)) == g


@settings(max_examples=60, deadline=None)
@given(matrices, st.data())
def test_integer_solver_solution_or_certificate(M, data):
    b = data.draw(st.lists(st.integers(-9, 9), min_size=len(M), max_size=len(M)))
    res = integer_solvable(M, b)
    if res.solvable:
        assert verify_solution(M, b, res.solution)
    else:
        assert verify_certificate(M, b, res.certificate)


def test_canonical_relation_on_1_3_8():
    L = LSet(QQ, (QQ(1), QQ(3), QQ(8)))
    rel = primitive_relation(L).relation
    assert rel.A == (-1, 3, -1)
    assert normalize_min_negatives(rel).A == (4, -4, 1)
    box = primitive_relation_box_search(L, 4)
    assert box.relation.A == (4, -4, 1)


def test_relation_validation():
    L = LSet(QQ, (QQ(1), QQ(2)))
    with pytest.raises(RelationError, match="sum to"):
        IntRelation((1, 1), L)
    with pytest.raises(RelationError, match="not a relation"):
        IntRelation((3, -2), L)
    with pytest.raises(RelationError):
        LSet(QQ, (QQ(1), QQ(1)))


@pytest.mark.parametrize("desc,elems", LSETS, ids=[" ".join(e) for _, e in LSETS])
def test_engine_agrees_with_box_oracle(desc, elems):
    L = lset(desc, elems)
    res = primitive_relation(L)
    box = primitive_relation_box_search(L, 10, order="min_norm")
    assert res.exists == (box.relation is not None)
    if res.exists:
        IntRelation(res.relation.A, L)
        assert res.relation.norm <= box.relation.norm
    else:
        M, b = primitive_system(L)
        assert verify_certificate(M, b, res.certificate)
        assert relation_obstruction(L) == res.certificate


def test_prime_field_relations():
    F = prime_field(7)
    L = LSet(F, (F(1), F(3)))
    rel = primitive_relation(L).relation
    assert sum(rel.A) == 1 and sum(a * x for a, x in zip(rel.A, L.elems)) == F.zero
    assert primitive_relation_box_search(L, 5).relation.A == (-2, 3)


def test_differences_form():
    K = field_make("QQ[t]/(t^2-2)")
    L = lset("QQ[t]/(t^2-2)", ["1", "t", "t-1"])
    D = relation_to_differences(IntRelation((1, -1, 1), L))
    assert D.S == 2
    assert D.B == {(0, 1): 1, (2, 0): 1}


def test_point_criterion():
    pc = point_criterion([2])
    assert pc.holds and pc.witness == [2, -1]
    assert not point_criterion([3, 5]).holds


def test_inverse_algebraic_integer():
    # 1/(1 - sqrt 2) = -1 - sqrt 2, root of x^2 + 2x - 1
    assert algebraic_integer_of_inverse("x^2-2") == (-1, 2, 1)
    # 1/(1 - 1/2) = 2
    assert algebraic_integer_of_inverse((-1, 2)) == (-2, 1)
    # alpha = 3: lambda = -1/2 is not integral
    assert algebraic_integer_of_inverse("x-3") is None
    with pytest.raises(RelationError):
        algebraic_integer_of_inverse("x^2-1")
