from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from lmatrix.geometry import (
    GeometryError,
    ProjPoint,
    all_vectors,
    count_points,
    enumerate_points,
    hyperplane_of,
    is_orthogonal,
    normalize,
    span,
    zero_subspace,
)


@pytest.mark.parametrize("q,d", [(2, 3), (3, 3), (5, 2), (3, 4)])
def test_point_count(q, d):
    pts = enumerate_points(q, d)
    assert len(pts) == count_points(q, d) == (q ** d - 1) // (q - 1)
    assert [p.rep for p in pts] == sorted(p.rep for p in pts)


def test_fano_plane_lines():
    # each line of PG(2,2) has 3 points and each point lies on 3 lines
    pts = enumerate_points(2, 3)
    lines = {hyperplane_of(z.rep, 2) for z in pts}
    assert len(lines) == 7
    for line in lines:
        assert sum(line.contains_vector(p.rep) for p in pts) == 3


def test_bad_inputs():
    with pytest.raises(GeometryError):
        enumerate_points(4, 2)
    with pytest.raises(GeometryError):
        normalize((0, 0), 3)
    with pytest.raises(GeometryError):
        ProjPoint(3, 2, (2, 1))
    with pytest.raises(GeometryError):
        hyperplane_of((0, 0, 0), 5)


def _members(W):
    return {v for v in all_vectors(W.q, W.d) if W.contains_vector(v)}


vecs3 = st.lists(st.tuples(*[st.integers(0, 2)] * 3), max_size=3)


@settings(max_examples=60, deadline=None)
@given(vecs3, vecs3)
def test_dimension_formula_against_brute_force(a, b):
    q, d = 3, 3
    U = span(a, q, d) if a else zero_subspace(q, d)
    W = span(b, q, d) if b else zero_subspace(q, d)
    mu, mw = _members(U), _members(W)
    assert len(mu) == q ** U.dim
    assert len(mu & mw) == q ** U.meet_dim(W)
    assert U.join(W).dim + U.meet_dim(W) == U.dim + W.dim
    assert U.contains(zero_subspace(q, d))


@settings(max_examples=40, deadline=None)
@given(st.tuples(*[st.integers(0, 4)] * 3).filter(any))
def test_hyperplane_is_orthogonal_complement(z):
    q = 5
    H = hyperplane_of(z, q)
    assert H.dim == 2
    assert _members(H) == {v for v in all_vectors(q, 3) if sum(x * y for x, y in zip(v, z)) % q == 0}
    assert is_orthogonal(H, z)


def test_vector_order_is_lex():
    assert all_vectors(2, 2) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert list(itertools.islice(all_vectors(3, 2), 4)) == [(0, 0), (0, 1), (0, 2), (1, 0)]
