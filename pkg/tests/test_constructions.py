from __future__ import annotations

import math

import pytest

from corpus import CONSTRUCTIONS, QUAD, build_instance, lset
from lmatrix.constructions import (
    ConstructionError,
    PhiAssignment,
    block_compose,
    construct_fivethirds,
    construct_square,
    construct_subset_incidence,
    construct_threehalves,
    construct_xy3,
    extend_to_size,
    grassmann_construct,
)
from lmatrix.fields import field_make
from lmatrix.fourier import FourierUnavailable, group_function_from_points, translation_invariant_rank
from lmatrix.geometry import enumerate_points, zero_subspace
from lmatrix.linalg import exact_rank

QQ = field_make("QQ")
IDS = [f"{e[0]}-{'_'.join(e[2])}-q{e[4]}" + (f"-s{e[5]}" if e[5] is not None else "") for e in CONSTRUCTIONS]


@pytest.mark.parametrize("entry", CONSTRUCTIONS, ids=IDS)
def test_contract_and_fourier_oracle(entry):
    rep = build_instance(entry)
    M = rep.matrix
    q = entry[4]
    d = round(math.log(rep.size, q))
    assert q ** d == rep.size
    assert M.is_symmetric()
    assert all(M[i, i] == rep.lam for i in range(M.rows))
    assert rep.lam == M.ctx.zero
    assert not M.lmatrix_violations(rep.declared_L.elems, diagonal=rep.lam)
    assert rep.rank is not None and rep.rank <= rep.rank_upper
    expected_upper = sum(q ** W.dim for W, _ in rep.phi.support)
    assert rep.rank_upper == expected_upper
    g = group_function_from_points(rep.point_values, rep.lam, q, d)
    assert translation_invariant_rank(g, q, d, M.ctx) == rep.rank


def test_square_numbers():
    L = lset("QQ", ["1", "2"])
    rep = construct_square(L, (2, -1), 5)
    assert (rep.size, rep.rank, rep.rank_upper) == (25, 9, 11)
    assert rep.choices["order"] == ["2", "1"]


def test_threehalves_case_counts():
    rep = construct_threehalves(lset(QUAD, ["1", "t", "t-1"]), (1, -1, 1), 5)
    assert rep.case_counts == {"case1": 20, "case2": 1, "case3": 2, "case4": 8}
    assert sum(rep.case_counts.values()) == 31  # points of the projective plane of order 5


def test_fivethirds_case_counts_and_seed():
    rep = construct_fivethirds(lset("QQ", ["1", "2", "3"]), (3, -3, 1), 3, seed=0)
    assert rep.case_counts == {"case1": 4, "case2": 77, "case3": 4, "case4": 0, "case5": 24, "case6": 12}
    assert sum(rep.case_counts.values()) == 121
    assert rep.seed == 0
    again = construct_fivethirds(lset("QQ", ["1", "2", "3"]), (3, -3, 1), 3, seed=0)
    assert again.matrix == rep.matrix


def test_construction_preconditions():
    L = lset("QQ", ["1", "3", "8"])
    with pytest.raises(ConstructionError, match="negative coefficients"):
        construct_square(L, (-1, 3, -1), 11)
    with pytest.raises(ConstructionError, match="q <= S"):
        construct_square(lset("QQ", ["1", "2"]), (2, -1), 2)
    with pytest.raises(ConstructionError, match="not prime"):
        construct_square(lset("QQ", ["1", "2"]), (2, -1), 9)
    with pytest.raises(ConstructionError, match="q too small"):
        construct_threehalves(L, (4, -4, 1), 2)
    with pytest.raises(ConstructionError, match="degenerate"):
        construct_xy3(1, 1, 3)
    with pytest.raises(ConstructionError, match="degenerate"):
        construct_xy3(1, 2, 3)  # 3x = x + y
    with pytest.raises(ConstructionError, match="degenerate"):
        construct_xy3(1, -1, 3)


def test_subset_incidence():
    rep = construct_subset_incidence(7, 3)
    assert rep.size == 35 and rep.rank <= 8
    assert set(rep.matrix.histogram()) <= {QQ(1), QQ(2), QQ(3)}
    with pytest.raises(ConstructionError):
        construct_subset_incidence(3, 3)


def test_phi_json_round_trip_and_outside_L():
    q, d = 3, 2
    P = enumerate_points(q, d)[0]
    phi = PhiAssignment(q, d, 1, QQ, ((zero_subspace(q, d), QQ(1)), (P.subspace, QQ(1))))
    assert PhiAssignment.from_json_obj(phi.to_json_obj()) == phi
    assert phi.rank_upper == 1 + q
    with pytest.raises(ConstructionError, match="outside L"):
        grassmann_construct(phi, declared_L=lset("QQ", ["1"]))


def test_block_compose_rank():
    A = construct_square(lset("QQ", ["1", "2"]), (2, -1), 3).matrix
    B = construct_square(lset("QQ", ["1", "2"]), (2, -1), 5).matrix
    C = block_compose(A, B, 1)
    assert C.shape == (34, 34)
    assert exact_rank(C) <= exact_rank(A) + exact_rank(B) + 2


def test_extend_to_size():
    ext = extend_to_size("square", 30, {"L": lset("QQ", ["1", "2"]), "A": (2, -1)})
    assert ext.q == 7 and ext.matrix.shape == (30, 30)
    assert ext.rank_sub <= ext.rank_full <= ext.full.rank_upper


def test_fourier_refuses_cyclotomic_overlap():
    # Q(sqrt 5) lies inside Q(zeta_5)
    K = field_make("QQ[t]/(t^2-5)")
    g = {v: K.zero for v in [(a, b) for a in range(5) for b in range(5)]}
    with pytest.raises(FourierUnavailable):
        translation_invariant_rank(g, 5, 2, K)
