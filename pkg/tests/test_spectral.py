from __future__ import annotations

import pytest
import sympy

from corpus import DIGRAPHS, QUAD, lset
from lmatrix.fields import field_make
from lmatrix.linalg import eigen_multiplicity
from lmatrix.matrix import ExactMatrix
from lmatrix.relations import LSet
from lmatrix.spectral import (
    MonomialIndex,
    SpectralError,
    amplify,
    companion,
    digraph_pipeline,
    en_roundtrip_ok,
    en_translate,
    make_plan,
    polyrel_matrix,
    shifted_terms,
)

QQ = field_make("QQ")
x = sympy.Symbol("x")


@pytest.mark.parametrize("f", ["x^2-2", "x^3-x-1", "x-5", "x^4+3x-7"])
def test_companion_characteristic_polynomial(f):
    C = companion(f)
    S = sympy.Matrix(C.rows, C.cols, [int(v) for v in C.entries])
    assert sympy.expand(S.charpoly(x).as_expr()) == sympy.expand(sympy.sympify(f.replace("^", "**").replace("3x", "3*x")))


def test_companion_layout():
    assert companion("x^2-2").to_rows() == [[0, 2], [1, 0]]
    assert [r[-1] for r in companion("x^3-x-1").to_rows()] == [1, 1, 0]
    with pytest.raises(SpectralError, match="monic"):
        companion("2x^2-1")


@pytest.mark.parametrize("f,n", DIGRAPHS)
def test_digraph_pipeline(f, n):
    r = digraph_pipeline(f, n)
    D = r.matrix
    d = len(r.minpoly) - 1
    assert D.shape == (n, n)
    assert not D.lmatrix_violations([D.ctx.zero, D.ctx.one], diagonal=0)
    assert eigen_multiplicity(D, r.lam) == r.multiplicity
    assert max(r.lower, 0) <= r.multiplicity <= n // d
    assert en_roundtrip_ok(D, r.lam, r.multiplicity)


def test_digraph_sqrt2_numbers():
    r = digraph_pipeline("x^2-2", 50)
    assert r.multiplicity == 12
    assert r.details["patch_ranks"] == {"0": 0, "1": 9, "2": 13}


def test_digraph_rejects_reducible():
    with pytest.raises(SpectralError, match="reducible"):
        digraph_pipeline("x^2-1", 10)


def test_en_translate():
    D = ExactMatrix.from_rows(QQ, [[0, 1], [1, 0]])
    assert en_translate(D, 2).to_rows() == [[0, 3], [3, 0]]


def test_amplify_integer_progenitor():
    # progenitor with eigenvalue 1 of multiplicity 1 over L = {0, 1}
    M = ExactMatrix.from_rows(QQ, [[0, 1], [1, 0]])
    plan = make_plan(M, LSet(QQ, (QQ(0), QQ(1)), allow_zero=True), 9)
    res = amplify(plan, 1)
    A = res.matrix
    assert A.shape == (18, 18)
    assert A.is_symmetric()
    assert not A.lmatrix_violations([QQ(0), QQ(1)], diagonal=0)
    assert res.multiplicity >= res.lower_fine >= res.lower_coarse
    assert res.multiplicity == eigen_multiplicity(A, 1)


def test_amplify_needs_zero_in_L():
    M = ExactMatrix.from_rows(QQ, [[0, 1], [1, 0]])
    with pytest.raises(SpectralError):
        make_plan(M, LSet(QQ, (QQ(1),)), 3)


def test_monomial_index_and_shift():
    idx = MonomialIndex(2, 3)
    assert idx.monomials == ((2, 0), (1, 1), (0, 2))
    assert MonomialIndex.pred((1, 1, 1)) == ((1, 0, 1), 1)
    with pytest.raises(SpectralError):
        MonomialIndex.pred((3, 0))
    # x2^2 -> (x2 + x1)^2
    assert shifted_terms(2, {(0, 2): 1}) == {(2, 0): 1, (1, 1): 2, (0, 2): 1}


def test_polyrel_progenitor():
    L = lset(QUAD, ["1", "t"])
    pr = polyrel_matrix("2*x1^2 - x2^2", L)
    K = L.ctx
    a = K.parse("t-1")
    assert pr.matrix.to_rows() == [[2 * a, a], [a, K.zero]]
    assert pr.identities == {"first": ["-1", "0"], "second": "1"}
    assert pr.eigen_rank == 1
    assert eigen_multiplicity(pr.matrix, K.one) == 1


def test_polyrel_preconditions():
    L = lset(QUAD, ["1", "t"])
    with pytest.raises(SpectralError, match="not homogeneous"):
        polyrel_matrix("x1^2 - x2", L)
    with pytest.raises(SpectralError, match="must be 1"):
        polyrel_matrix("x1^2 - x2^2", L)
    with pytest.raises(SpectralError, match="must be 0"):
        polyrel_matrix("2*x1^2 - x1*x2", L)
