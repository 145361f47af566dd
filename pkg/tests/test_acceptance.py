"""End-to-end acceptance checks, one test per criterion, each under its time limit."""
from __future__ import annotations

import itertools
import random
import time
from contextlib import contextmanager

from corpus import CONSTRUCTIONS, DIGRAPHS, LSETS, QUAD, build_instance, lset
from lmatrix.constructions import (
    construct_fivethirds,
    construct_square,
    construct_subset_incidence,
    construct_threehalves,
)
from lmatrix.fields import field_make, prime_field
from lmatrix.linalg import certified_rank, entrywise_apply, uppbound_dense, uppbound_sparse
from lmatrix.matrix import ExactMatrix
from lmatrix.relations import IntRelation, LSet, primitive_relation, primitive_system, verify_certificate
from lmatrix.search import SearchSpec, min_rank, n_of_r, primitive_relation_box_search
from lmatrix.spectral import digraph_pipeline, polytobetter_pipeline
from lmatrix.vanishing import MultiPoly, genupper_witness, hasse_constant, hasse_derivative, vanishing_order

QQ = field_make("QQ")


@contextmanager
def limit(seconds):
    t0 = time.perf_counter()
    yield
    took = time.perf_counter() - t0
    print(f"  elapsed {took:.2f} s (limit {seconds} s)")
    assert took < seconds, f"took {took:.1f} s, limit {seconds} s"


def _equivalent_pm(W, M) -> bool:
    """W = D1 P M P^T D2 off the diagonal for a permutation P and sign diagonals D1, D2."""
    n = len(M)
    for perm in itertools.permutations(range(n)):
        for s in itertools.product((1, -1), repeat=n):
            for t in itertools.product((1, -1), repeat=n):
                if all(W[i][j] == s[i] * t[j] * M[perm[i]][perm[j]]
                       for i in range(n) for j in range(n) if i != j):
                    return True
    return False


def test_criterion_01_n2_pm1():
    """N(2, {-1,1}) = 3 by exhaustive search."""
    with limit(1):
        L = lset("QQ", ["-1", "1"])
        res = min_rank(SearchSpec(L, 3))
        assert res.rank == 2
        reference = [[0, 1, 1], [1, 0, -1], [1, 1, 0]]
        assert _equivalent_pm([[int(x) for x in r] for r in res.witness.to_rows()], reference)
        out = n_of_r(L, 2, 4)
        assert out.n == 3
        F2 = prime_field(2)
        over_f2 = n_of_r(LSet(F2, (F2.one,)), 2, 4).n
        assert out.n <= over_f2 <= 2 + 1


def test_criterion_02_construction_contract():
    """Every corpus construction: symmetric, diagonal lambda, entries in L, rank <= sum q^dim W."""
    kinds = set()
    assert len(CONSTRUCTIONS) >= 20
    for entry in CONSTRUCTIONS:
        rep = build_instance(entry)
        M = rep.matrix
        q = entry[4]
        kinds.add(entry[0])
        assert M.is_symmetric()
        assert all(M[i, i] == rep.lam for i in range(M.rows))
        Ls = set(rep.declared_L.elems)
        assert all(M[i, j] in Ls for i in range(M.rows) for j in range(M.cols) if i != j)
        cert = certified_rank(M)
        assert cert.rank is not None
        assert cert.rank <= sum(q ** W.dim for W, _ in rep.phi.support)
    assert kinds == {"square", "threehalves", "fivethirds", "xy3"}


def test_criterion_03_quadratic_growth():
    """L = {1,2}: rank <= 1 + 2q at size q^2, ratios increasing, > 5 at q = 13."""
    with limit(30):
        L = lset("QQ", ["1", "2"])
        ratios = []
        for q in (5, 7, 11, 13):
            rep = construct_square(L, (2, -1), q)
            assert rep.size == q * q
            assert rep.rank <= 1 + 2 * q
            ratios.append(rep.size / rep.rank)
        assert all(a < b for a, b in zip(ratios, ratios[1:]))
        assert ratios[-1] > 5


def test_criterion_04_threehalves():
    """{1, sqrt2, sqrt2 - 1}, relation (1,-1,1), q = 5."""
    with limit(60):
        q, S = 5, 2
        L = lset(QUAD, ["1", "t", "t-1"])
        rep = construct_threehalves(L, (1, -1, 1), q)
        M = rep.matrix
        assert rep.size == 125
        assert rep.lam == M.ctx.zero and all(M[i, i] == M.ctx.zero for i in range(125))
        assert not M.lmatrix_violations(L.elems, diagonal=0)
        assert rep.rank <= 1 + S * q + (S + 1) * q * q


def test_criterion_05_fivethirds():
    """{1,2,3}, relation (3,-3,1), q = 3, seed 0: six hyperplane cases checked."""
    with limit(120):
        rep = construct_fivethirds(lset("QQ", ["1", "2", "3"]), (3, -3, 1), 3, seed=0)
        assert rep.size == 243
        assert set(rep.case_counts) == {f"case{i}" for i in range(1, 7)}
        assert sum(rep.case_counts.values()) == (3 ** 5 - 1) // 2  # every hyperplane classified
        assert rep.rank is not None and rep.rank <= rep.rank_upper


def test_criterion_06_digraph_multiplicity():
    """x^2 - 2 at n = 50: 11 <= m <= 25; m <= n/d on every pipeline output."""
    with limit(30):
        r = digraph_pipeline("x^2-2", 50)
        assert 11 <= r.multiplicity <= 25
        for f, n in DIGRAPHS:
            out = digraph_pipeline(f, n)
            assert out.multiplicity <= n // (len(out.minpoly) - 1)


def test_criterion_07_entrywise_bounds():
    """200 random (M, f) over F_101: both binomial bounds hold."""
    with limit(10):
        F = prime_field(101)
        rng = random.Random(2024)
        for trial in range(200):
            n = rng.randint(1, 12)
            r = rng.randint(0, min(n, 4))
            U = [[rng.randrange(101) for _ in range(r)] for _ in range(n)]
            V = [[rng.randrange(101) for _ in range(n)] for _ in range(r)]
            rows = [[sum(U[i][k] * V[k][j] for k in range(r)) for j in range(n)] for i in range(n)]
            M = ExactMatrix.from_rows(F, rows)
            deg = rng.randint(0, 3)
            if trial % 2:
                # sparse: a single monomial, optionally plus a constant
                coeffs = [rng.randrange(101) if trial % 4 == 1 else 0] + [0] * deg
                coeffs[deg] = rng.randint(1, 100)
            else:
                coeffs = [rng.randrange(101) for _ in range(deg)] + [rng.randint(1, 100)]
            rep = entrywise_apply(coeffs, M, verify=True)
            degrees = [i for i, c in enumerate(coeffs) if c % 101]
            assert rep.rank_after <= uppbound_dense(rep.rank_before, deg)
            assert rep.rank_after <= uppbound_sparse(rep.rank_before, degrees)


def test_criterion_08_hasse_facts():
    """Taylor identity on 50 evaluations over Q and F_7; composition constant; x^p in char p."""
    with limit(5):
        F7 = prime_field(7)
        rng = random.Random(8)
        for ctx in (QQ, F7):
            for _ in range(50):
                k = rng.randint(1, 2)
                terms = {}
                for _ in range(4):
                    e = tuple(rng.randint(0, 8) for _ in range(k))
                    terms[e] = ctx(rng.randint(-6, 6))
                P = MultiPoly(k, terms)
                x = [ctx(rng.randint(-9, 9)) for _ in range(k)]
                z = [ctx(rng.randint(-9, 9)) for _ in range(k)]
                lhs = P.evaluate([a + b for a, b in zip(x, z)], ctx)
                rhs = ctx.zero
                for i in itertools.product(range(17), repeat=k):
                    zi = ctx.one
                    for zt, it in zip(z, i):
                        zi = zi * zt ** it
                    rhs = rhs + hasse_derivative(P, i).evaluate(x, ctx) * zi
                assert lhs == rhs
                i = tuple(rng.randint(0, 3) for _ in range(k))
                j = tuple(rng.randint(0, 3) for _ in range(k))
                ij = tuple(a + b for a, b in zip(i, j))
                assert hasse_derivative(hasse_derivative(P, i), j) == \
                    hasse_derivative(P, ij) * hasse_constant(i, j)
        Xp = MultiPoly(1, {(7,): F7.one})
        assert not hasse_derivative(Xp, (1,))
        assert hasse_derivative(Xp, (7,)) == MultiPoly(1, {(0,): F7.one})


def test_criterion_09_genupper_witness():
    """Witness from the size-9 square construction over {1,2}."""
    with limit(60):
        rep = construct_square(lset("QQ", ["1", "2"]), (2, -1), 3)
        assert rep.size == 9
        w = genupper_witness(rep.matrix, [1, 2])
        P = w.P
        assert P.is_homogeneous() and P.is_integral()
        assert P.evaluate([1, 1]) == 1
        assert vanishing_order(P, [1, 2]) >= rep.size - (rep.rank + 1)


def test_criterion_10_relation_engine_vs_box():
    """30 L-sets: existence agrees with the bound-10 box oracle; relations and certificates re-verify."""
    with limit(30):
        assert len(LSETS) == 30
        kinds = set()
        for desc, elems in LSETS:
            L = lset(desc, elems)
            kinds.add(desc if desc != "QQ" else ("int" if L.is_integral() else "rational"))
            res = primitive_relation(L)
            box = primitive_relation_box_search(L, 10)
            assert res.exists == (box.relation is not None), elems
            if res.exists:
                IntRelation(res.relation.A, L)
            else:
                M, b = primitive_system(L)
                assert verify_certificate(M, b, res.certificate)
        assert {"int", "rational", QUAD} <= kinds


def test_criterion_11_subset_incidence():
    """kJ - A^T A with r = 7, k = 3."""
    with limit(5):
        rep = construct_subset_incidence(7, 3)
        M = rep.matrix
        assert M.shape == (35, 35)
        assert all(M[i, j] in {QQ(1), QQ(2), QQ(3)} for i in range(35) for j in range(35) if i != j)
        assert certified_rank(M).rank <= 8


def test_criterion_12_polytobetter():
    """2 x1^2 - x2^2 over {1, sqrt2}, l = 25: size/rank > 1.4."""
    with limit(60):
        L = lset(QUAD, ["1", "t"])
        res = polytobetter_pipeline("2*x1^2 - x2^2", L, 25)
        M = res.matrix
        K = M.ctx
        assert M.shape == (50, 50)
        assert not M.lmatrix_violations(L.elems, diagonal=0)
        assert res.relation.eigen_rank < res.relation.matrix.rows  # 1 is an eigenvalue
        assert res.relation.alpha1 == K.one
        slack = sum(res.amplified.patch_ranks[b] for b in res.relation.matrix.entries) + 1
        assert res.rank == certified_rank(M).rank
        assert res.rank <= 25 + slack
        print(f"  size {M.rows}, rank {res.rank}, ratio {res.ratio:.3f}")
        assert res.ratio > 1.4
