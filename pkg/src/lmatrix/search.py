"""Exhaustive searches over tiny instances.

These are deliberately naive: they enumerate every candidate and compute
exact ranks, so they serve as ground truth for the cleverer routines.
Every scan is bounded by the shared enumeration budget.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import budget as _budget
from .fields import FieldCtx
from .linalg import bareiss_rank, exact_rank
from .matrix import ExactMatrix
from .relations import IntRelation, LSet


@dataclass(frozen=True)
class SearchSpec:
    L: LSet
    n: int
    symmetric_only: bool = False

    @property
    def ctx(self) -> FieldCtx:
        return self.L.ctx

    @property
    def free_cells(self) -> list:
        n = self.n
        if self.symmetric_only:
            return [(i, j) for i in range(n) for j in range(i + 1, n)]
        return [(i, j) for i in range(n) for j in range(n) if i != j]

    @property
    def cost(self) -> int:
        return self.L.k ** len(self.free_cells)


@dataclass
class MinRankResult:
    rank: int
    witness: ExactMatrix
    rank_with_ones: int | None = None
    witness_with_ones: ExactMatrix | None = None
    visited: int = 0


def _rank_fn(ctx: FieldCtx, L: LSet):
    """Fast exact rank for small matrices with entries in L."""
    if ctx.kind == "rational":
        den = 1
        for a in L.elems:
            den = den * a.denominator // math.gcd(den, a.denominator)
        scaled = {a: int(a * den) for a in L.elems}
        scaled[ctx.zero] = 0
        one = den

        def rank(rows, ones=False):
            ints = [[scaled[x] for x in r] + ([one] if ones else []) for r in rows]
            return bareiss_rank(ints)
        return rank

    def rank(rows, ones=False):
        M = ExactMatrix.from_rows(ctx, rows)
        return exact_rank(M.augment_ones() if ones else M)
    return rank


def min_rank(spec: SearchSpec, with_ones: bool = False) -> MinRankResult:
    """Smallest rank over all L-matrices of size n (first witness in enumeration order)."""
    if spec.n < 1:
        raise ValueError("n must be positive")
    _budget.require(spec.cost, f"enumerating {spec.L.k}^{len(spec.free_cells)} matrices")
    ctx = spec.ctx
    n = spec.n
    rank = _rank_fn(ctx, spec.L)
    cells = spec.free_cells
    best = best_w = None
    best1 = best1_w = None
    visited = 0
    for choice in itertools.product(spec.L.elems, repeat=len(cells)):
        rows = [[ctx.zero] * n for _ in range(n)]
        for (i, j), x in zip(cells, choice):
            rows[i][j] = x
            if spec.symmetric_only:
                rows[j][i] = x
        visited += 1
        r = rank(rows)
        if best is None or r < best:
            best, best_w = r, rows
        if with_ones:
            r1 = rank(rows, ones=True)
            if best1 is None or r1 < best1:
                best1, best1_w = r1, rows
        elif best == 0:
            break
    res = MinRankResult(best, ExactMatrix.from_rows(ctx, best_w), visited=visited)
    if with_ones:
        res.rank_with_ones = best1
        res.witness_with_ones = ExactMatrix.from_rows(ctx, best1_w)
    return res


@dataclass
class NOfR:
    n: int
    n0: int
    n_max: int
    witness: ExactMatrix | None = None
    witness_n0: ExactMatrix | None = None
    per_size: dict = field(default_factory=dict)  # n -> (min rank, min rank with ones)


def n_of_r(L: LSet, r: int, n_max: int, symmetric_only: bool = False) -> NOfR:
    """Largest n <= n_max with an L-matrix of rank <= r, and the same for rank of (M|1)."""
    if r < 0 or n_max < 1:
        raise ValueError("need r >= 0 and n_max >= 1")
    out = NOfR(0, 0, n_max)
    for n in range(1, n_max + 1):
        spec = SearchSpec(L, n, symmetric_only)
        res = min_rank(spec, with_ones=True)
        out.per_size[n] = (res.rank, res.rank_with_ones)
        ok = res.rank <= r
        ok0 = res.rank_with_ones <= r
        if ok:
            out.n, out.witness = n, res.witness
        if ok0:
            out.n0, out.witness_n0 = n, res.witness_with_ones
        # principal submatrices keep both ranks small, so failure is final
        if not ok and not ok0:
            break
    return out


@dataclass
class BoxResult:
    relation: IntRelation | None
    solutions: list = field(default_factory=list)
    visited: int = 0


_ORDERS = {
    # fewest negative coefficients, then smallest max-norm, then lex
    "min_negatives": lambda A: (sum(1 for a in A if a < 0), max(map(abs, A)), A),
    # smallest max-norm, then lex (the relation engine's canonical choice)
    "min_norm": lambda A: (max(map(abs, A)), A),
}


def _integer_system(L: LSet):
    ctx = L.ctx
    if ctx.kind == "prime":
        return np.array([[x.v for x in L.elems]], dtype=np.int64), ctx.p
    coords = [ctx.coords(x) for x in L.elems]
    rows = []
    for c in range(len(coords[0])):
        row = [Fraction(coords[i][c]) for i in range(L.k)]
        den = 1
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
        rows.append([int(x * den) for x in row])
    return np.array(rows, dtype=object), 0


def primitive_relation_box_search(L: LSet, bound: int, order: str = "min_negatives",
                                  all_solutions: bool = False) -> BoxResult:
    """Scan every A with |A_i| <= bound for sum A = 1 and sum A_i alpha_i = 0."""
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    if order not in _ORDERS:
        raise ValueError(f"unknown order {order!r}")
    k = L.k
    _budget.require(k * (2 * bound + 1) ** k, f"box search with bound {bound} on {k} elements")
    C, p = _integer_system(L)
    rng = np.arange(-bound, bound + 1, dtype=np.int64)
    sols = []
    visited = 0
    # the first k-1 coordinates range over the box; sum = 1 fixes the last
    for head in itertools.product(range(-bound, bound + 1), repeat=max(k - 2, 0)):
        if k == 1:
            grid = np.zeros((1, 0), dtype=np.int64)
        else:
            grid = np.array([list(head) + [x] for x in rng], dtype=np.int64)
        last = 1 - grid.sum(axis=1)
        A = np.concatenate([grid, last[:, None]], axis=1)
        A = A[np.abs(last) <= bound]
        visited += len(rng) if k > 1 else 1
        if not len(A):
            continue
        if p:
            ok = (A @ C[0]) % p == 0
        else:
            prod = A.astype(object) @ C.T
            ok = np.array([not any(row) for row in np.atleast_2d(prod)], dtype=bool)
        for row in A[ok]:
            sols.append(tuple(int(x) for x in row))
    if not sols:
        return BoxResult(None, [], visited)
    key = _ORDERS[order]
    sols.sort(key=key)
    rel = IntRelation(sols[0], L)
    return BoxResult(rel, sols if all_solutions else [sols[0]], visited)
