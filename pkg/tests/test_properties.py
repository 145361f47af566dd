"""Hypothesis property tests for the structural invariants of each module."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

from hypothesis import assume, given, settings, strategies as st

from corpus import CONSTRUCTIONS, build_instance
from lmatrix.fields import field_make, prime_field
from lmatrix.geometry import all_vectors, enumerate_points, hyperplane_of, is_orthogonal, span
from lmatrix.linalg import (
    bareiss_det,
    eigen_multiplicity,
    entrywise_apply,
    exact_rank,
    rank_mod_p,
    uppbound_dense,
    uppbound_sparse,
)
from lmatrix.matrix import ExactMatrix
from lmatrix.relations import (
    IntRelation,
    LSet,
    point_criterion,
    primitive_relation,
    primitive_system,
    relation_to_differences,
    verify_certificate,
)
from lmatrix.search import SearchSpec, min_rank, n_of_r, primitive_relation_box_search
from lmatrix.vanishing import MultiPoly, pattern_det, vanishing_order

QQ = field_make("QQ")
SLOW = settings(max_examples=40, deadline=None)


@st.composite
def low_rank_int(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    r = draw(st.integers(0, min(n, 3)))
    ent = st.integers(-3, 3)
    U = draw(st.lists(st.lists(ent, min_size=r, max_size=r), min_size=n, max_size=n))
    V = draw(st.lists(st.lists(ent, min_size=n, max_size=n), min_size=r, max_size=r))
    return [[sum(U[i][k] * V[k][j] for k in range(r)) for j in range(n)] for i in range(n)]


@st.composite
def polynomial(draw):
    deg = draw(st.integers(0, 3))
    coeffs = draw(st.lists(st.integers(-4, 4), min_size=deg, max_size=deg))
    return coeffs + [draw(st.integers(1, 4))]


# linear algebra ---------------------------------------------------------------

@SLOW
@given(low_rank_int(10), polynomial(), st.sampled_from(["QQ", "GF(101)", "GF(7)"]))
def test_entrywise_rank_bounds(rows, f, field):
    M = ExactMatrix.from_rows(field_make(field), rows)
    out = entrywise_apply(f, M)
    r0, r1 = exact_rank(M), exact_rank(out)
    ctx = M.ctx
    fc = [ctx(c) for c in f]
    degrees = [i for i, c in enumerate(fc) if c]
    deg = max(degrees)
    assert r1 <= uppbound_dense(r0, deg)
    assert r1 <= uppbound_sparse(r0, degrees)


@SLOW
@given(low_rank_int(), st.sampled_from([2, 3, 5, 7, 101]))
def test_mod_p_rank_never_exceeds_rational_rank(rows, p):
    M = ExactMatrix.from_rows(QQ, rows)
    assert rank_mod_p(rows, p) <= exact_rank(M)


@SLOW
@given(low_rank_int(), st.integers(-3, 3))
def test_multiplicity_plus_rank(rows, lam):
    M = ExactMatrix.from_rows(QQ, rows)
    assert eigen_multiplicity(M, lam) + exact_rank(M.shift_diagonal(lam)) == M.rows


@SLOW
@given(low_rank_int(), st.randoms(use_true_random=False),
       st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(bool))
def test_rank_permutation_and_dilation_invariant(rows, rnd, t):
    M = ExactMatrix.from_rows(QQ, rows)
    n = M.rows
    pr, pc = list(range(n)), list(range(n))
    rnd.shuffle(pr)
    rnd.shuffle(pc)
    assert exact_rank(M.submatrix(pr, pc)) == exact_rank(M) == exact_rank(M.scale(Fraction(t)))


# geometry -----------------------------------------------------------------------

@SLOW
@given(st.sampled_from([2, 3, 5]), st.integers(2, 3), st.data())
def test_span_is_canonical_and_hyperplanes_projective(q, d, data):
    vecs = data.draw(st.lists(st.tuples(*[st.integers(0, q - 1)] * d), min_size=1, max_size=3))
    S = span(vecs, q, d)
    if S.basis:
        assert span(S.basis, q, d) == S
    z = data.draw(st.tuples(*[st.integers(0, q - 1)] * d).filter(any))
    c = data.draw(st.integers(1, q - 1))
    cz = tuple(c * x % q for x in z)
    assert hyperplane_of(z, q) == hyperplane_of(cz, q)
    assert is_orthogonal(S, z) == is_orthogonal(S, cz)


def test_point_hyperplane_duality():
    for q, d in [(2, 3), (3, 3), (5, 3), (3, 4)]:
        pts = enumerate_points(q, d)
        assert len({hyperplane_of(P.rep, q) for P in pts}) == len(pts) == (q ** d - 1) // (q - 1)


# relations ----------------------------------------------------------------------

@SLOW
@given(st.lists(st.integers(-12, 12), min_size=2, max_size=3, unique=True))
def test_random_integer_sets_agree_with_box(vals):
    L = LSet(QQ, tuple(QQ(v) for v in vals), allow_zero=True)
    res = primitive_relation(L)
    box = primitive_relation_box_search(L, 10)
    if box.relation is not None:
        assert res.exists
    if not res.exists:
        assert box.relation is None
        M, b = primitive_system(L)
        assert verify_certificate(M, b, res.certificate)
    else:
        D = relation_to_differences(IntRelation(res.relation.A, L))
        assert D.S == sum(D.B.values())


@SLOW
@given(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=5), min_size=1, max_size=2))
def test_point_criterion_matches_box(v):
    pc = point_criterion(v)
    # Q(x) = A_0 + sum A_i x_i with Q(v) = 0 and Q(1,...,1) = 1 in a small box
    found = False
    for A in itertools.product(range(-8, 9), repeat=len(v)):
        A0 = 1 - sum(A)
        if A0 + sum(a * x for a, x in zip(A, v)) == 0:
            found = True
            break
    if found:
        assert pc.holds
    if pc.holds:
        A0, *A = pc.witness
        assert A0 + sum(a * x for a, x in zip(A, v)) == 0 and A0 + sum(A) == 1


# constructions ------------------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(st.sampled_from(range(len(CONSTRUCTIONS))), st.data())
def test_entries_translation_invariant(idx, data):
    entry = CONSTRUCTIONS[idx]
    rep = build_instance(entry)
    q = entry[4]
    d = round(math.log(rep.size, q))
    vecs = all_vectors(q, d)
    pos = {v: i for i, v in enumerate(vecs)}
    vec = st.tuples(*[st.integers(0, q - 1)] * d)
    x, y, t = data.draw(vec), data.draw(vec), data.draw(vec)

    def shift(v):
        return tuple((a + b) % q for a, b in zip(v, t))
    M = rep.matrix
    assert M[pos[y], pos[x]] == M[pos[shift(y)], pos[shift(x)]]


# vanishing ----------------------------------------------------------------------

@SLOW
@given(st.integers(-3, 3), st.integers(0, 5), st.lists(st.integers(-3, 3), min_size=1, max_size=4))
def test_univariate_order_exact(a, m, g):
    G = MultiPoly(1, {(i,): c for i, c in enumerate(g)})
    assume(G and G.evaluate([a]) != 0)
    P = MultiPoly(1, {(1,): 1, (0,): -a}) ** m * G
    assert vanishing_order(P, [a]) == m


@SLOW
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4), st.lists(st.integers(-3, 3), min_size=1, max_size=4),
       st.integers(-2, 2), st.integers(-2, 2))
def test_order_of_product_at_least_order_of_factor(p, r, a, b):
    P = MultiPoly(2, {(i, 0): c for i, c in enumerate(p)}) * MultiPoly.parse("x1 - x2")
    R = MultiPoly(2, {(0, j): c for j, c in enumerate(r) if c})
    assume(P and R)
    assert vanishing_order(P * R, [a, b]) >= vanishing_order(P, [a, b])


@SLOW
@given(st.integers(2, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(1, 3), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_pattern_det_interpolation_matches_cofactor(pat):
    # pattern_det itself raises if the interpolated and cofactor determinants disagree
    P = pattern_det(pat, 3, cross_check=True)
    assert P.is_homogeneous()
    # spot check at an integer point against the numeric determinant
    pt = [2, -1, 3]
    n = len(pat)
    assert P.evaluate(pt) == bareiss_det([[0 if i == j else pt[pat[i][j] - 1] for j in range(n)]
                                          for i in range(n)])


# search -------------------------------------------------------------------------

@settings(max_examples=10, deadline=None)
@given(st.sampled_from([("-1", "1"), ("1",), ("1", "2"), ("0", "1")]), st.integers(0, 3))
def test_n_of_r_properties(elems, r):
    L = LSet(QQ, tuple(QQ(x) for x in elems), allow_zero=True)
    a = n_of_r(L, r, 4)
    b = n_of_r(L, r + 1, 4)
    c = n_of_r(L, r, 3)
    assert a.n <= b.n and c.n <= a.n
    assert a.n >= a.n0
    if a.witness is not None:
        assert exact_rank(a.witness) <= r
        assert not a.witness.lmatrix_violations(L.elems, diagonal=0)


def test_min_rank_witness_reverifies():
    L = LSet(QQ, (QQ(1), QQ(2)))
    res = min_rank(SearchSpec(L, 3))
    assert exact_rank(res.witness) == res.rank
    assert not res.witness.lmatrix_violations(L.elems, diagonal=0)


def test_prime_field_sets_agree_with_box():
    for p in (5, 7, 11):
        F = prime_field(p)
        for a, b in itertools.combinations(range(1, p), 2):
            L = LSet(F, (F(a), F(b)))
            assert primitive_relation(L).exists == (primitive_relation_box_search(L, p).relation is not None)
