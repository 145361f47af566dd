"""Integer relations on a finite set L of field elements.

A primitive relation is an integer vector A with sum(A) = 1 and
sum(A_i * alpha_i) = 0. The tools here compute the lattice of all integer
relations, find (or refute, with a certificate) primitive relations, and
massage relations into the shapes the constructions need.

Indices are 0-based throughout: ``A[0]`` is the coefficient of ``L[0]``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from . import budget as _budget
from .fields import FieldCtx, field_make
from .polystr import format_univariate, parse_univariate


class RelationError(ValueError):
    pass


# --------------------------------------------------------------------------
# data types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LSet:
    ctx: FieldCtx
    elems: tuple
    allow_zero: bool = False

    def __post_init__(self):
        ctx = field_make(self.ctx)
        object.__setattr__(self, "ctx", ctx)
        elems = tuple(ctx(x) for x in self.elems)
        object.__setattr__(self, "elems", elems)
        if len(set(elems)) != len(elems):
            raise RelationError("elements of L must be distinct")
        if not self.allow_zero and any(not x for x in elems):
            raise RelationError("0 must not belong to L")

    @classmethod
    def of(cls, ctx, *elems, allow_zero: bool = False) -> "LSet":
        return cls(field_make(ctx), tuple(elems), allow_zero)

    @property
    def k(self) -> int:
        return len(self.elems)

    def __len__(self):
        return len(self.elems)

    def __iter__(self):
        return iter(self.elems)

    def __getitem__(self, i):
        return self.elems[i]

    def reorder(self, perm) -> "LSet":
        return LSet(self.ctx, tuple(self.elems[i] for i in perm), self.allow_zero)

    def strings(self) -> list:
        return [self.ctx.fmt(x) for x in self.elems]

    def is_integral(self) -> bool:
        if self.ctx.kind == "rational":
            return all(x.denominator == 1 for x in self.elems)
        if self.ctx.kind == "numberfield":
            return all(x.is_rational() and x.c[0].denominator == 1 for x in self.elems)
        return False

    def as_ints(self) -> list:
        if not self.is_integral():
            raise RelationError("L is not a set of integers")
        if self.ctx.kind == "numberfield":
            return [int(x.c[0]) for x in self.elems]
        return [int(x) for x in self.elems]


@dataclass(frozen=True)
class IntRelation:
    """Integer vector A with sum(A) = 1 and sum(A_i alpha_i) = 0, checked on construction."""

    A: tuple
    L: LSet

    def __post_init__(self):
        A = tuple(int(a) for a in self.A)
        object.__setattr__(self, "A", A)
        if len(A) != self.L.k:
            raise RelationError(f"relation has {len(A)} coefficients, L has {self.L.k} elements")
        if sum(A) != 1:
            raise RelationError(f"coefficients of {A} sum to {sum(A)}, not 1")
        ctx = self.L.ctx
        total = ctx.zero
        for a, x in zip(A, self.L.elems):
            if a:
                total = total + x * a
        if total:
            raise RelationError(f"{A} is not a relation: sum A_i alpha_i = {ctx.fmt(total)}")

    @property
    def negatives(self) -> list:
        return [i for i, a in enumerate(self.A) if a < 0]

    @property
    def norm(self) -> int:
        return max(abs(a) for a in self.A)


# --------------------------------------------------------------------------
# integer matrix normal forms
# --------------------------------------------------------------------------

def _identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _matmul(A, B):
    Bt = list(zip(*B)) if B else []
    return [[sum(a * b for a, b in zip(r, c)) for c in Bt] for r in A]


@dataclass
class SmithForm:
    D: list
    U: list
    V: list
    rank: int

    @property
    def diagonal(self) -> list:
        return [self.D[i][i] for i in range(self.rank)]


def smith_normal_form(M) -> SmithForm:
    """U*M*V = D with U, V unimodular and D diagonal with d_1 | d_2 | ..., d_i > 0.

    Classic reduction: move the smallest nonzero entry to the pivot, clear its
    row and column by division with remainder, repeat; fix divisibility by
    adding a row when needed. The identity U*M*V = D is re-verified.
    """
    A = [list(map(int, r)) for r in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, c):  # row_dst += c * row_src
        A[dst] = [x + c * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, c):  # col_dst += c * col_src
        for r in A:
            r[dst] += c * r[src]
        for r in V:
            r[dst] += c * r[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        dirty = True
            if dirty:
                cands = [(abs(A[i][t]), i, None) for i in range(t + 1, m) if A[i][t]]
                cands += [(abs(A[t][j]), None, j) for j in range(t + 1, n) if A[t][j]]
                _, i, j = min(cands, key=lambda c: c[0])
                if i is not None:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    res = SmithForm(A, U, V, t)
    if m and n and _matmul(_matmul(U, [list(map(int, r)) for r in M]), V) != A:
        raise AssertionError("Smith form verification failed")
    return res


def hermite_rows(rows) -> list:
    """Row-style Hermite normal form; returns the nonzero rows.

    Pivots are positive and entries above each pivot are reduced into
    [0, pivot). Spans the same lattice as ``rows``.
    """
    A = [list(map(int, r)) for r in rows if any(r)]
    if not A:
        return []
    n = len(A[0])
    out = []
    r = 0
    for c in range(n):
        # gcd-combine all rows r.. in column c into row r
        for i in range(r + 1, len(A)):
            if A[i][c]:
                a, b = A[r][c], A[i][c]
                g, x, y = _ext_gcd(a, b)
                ra, rb = A[r], A[i]
                A[r] = [x * u + y * v for u, v in zip(ra, rb)]
                A[i] = [(a // g) * v - (b // g) * u for u, v in zip(ra, rb)]
        if r < len(A) and A[r][c]:
            if A[r][c] < 0:
                A[r] = [-x for x in A[r]]
            p = A[r][c]
            for i in range(r):
                f = A[i][c] // p
                if f:
                    A[i] = [x - f * y for x, y in zip(A[i], A[r])]
            r += 1
            if r == len(A):
                break
    out = [row for row in A[:r] if any(row)]
    return out


def _ext_gcd(a: int, b: int):
    """(g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def bezout(values) -> tuple:
    """(g, coeffs) with sum(c*v) = g = gcd(values) >= 0."""
    g = 0
    coeffs = []
    for v in values:
        g2, x, y = _ext_gcd(g, v)
        coeffs = [c * x for c in coeffs] + [y]
        g = g2
    return g, coeffs


# --------------------------------------------------------------------------
# integer linear systems
# --------------------------------------------------------------------------

class NoIntegerSolution(RelationError):
    def __init__(self, certificate):
        super().__init__("no integer solution")
        self.certificate = certificate


@dataclass
class SolveResult:
    solution: list | None = None
    certificate: list | None = None

    @property
    def solvable(self) -> bool:
        return self.solution is not None


def _clear_rows(M, b):
    ints, rhs, scales = [], [], []
    for row, bi in zip(M, b):
        vals = [Fraction(x) for x in row] + [Fraction(bi)]
        den = 1
        for x in vals:
            den = den * x.denominator // math.gcd(den, x.denominator)
        ints.append([int(x * den) for x in vals[:-1]])
        rhs.append(int(vals[-1] * den))
        scales.append(den)
    return ints, rhs, scales


def integer_solvable(M, b) -> SolveResult:
    """Integer z with M z = b, or a rational w with w^T M integral and w^T b not.

    Exactly one of ``solution`` / ``certificate`` is set in the result.
    """
    M = [list(r) for r in M]
    b = list(b)
    if len(M) != len(b):
        raise ValueError("M and b have different numbers of rows")
    m = len(M)
    n = len(M[0]) if m else 0
    if m == 0:
        return SolveResult(solution=[0] * n)
    ints, rhs, scales = _clear_rows(M, b)
    S = smith_normal_form(ints)
    Ub = [sum(u * x for u, x in zip(row, rhs)) for row in S.U]
    y = [0] * n
    wprime = None
    for i in range(m):
        if i < S.rank:
            d = S.D[i][i]
            if Ub[i] % d:
                wprime = [Fraction(u, d) for u in S.U[i]]
                break
            y[i] = Ub[i] // d
        elif Ub[i]:
            wprime = [Fraction(u, 2 * Ub[i]) for u in S.U[i]]
            break
    if wprime is None:
        z = [sum(v * yy for v, yy in zip(row, y)) for row in S.V]
        return SolveResult(solution=z)
    # translate the certificate back to the unscaled rows
    w = [wp * s for wp, s in zip(wprime, scales)]
    return SolveResult(certificate=w)


def verify_solution(M, b, z) -> bool:
    return all(sum(Fraction(a) * x for a, x in zip(row, z)) == Fraction(bi) for row, bi in zip(M, b))


def verify_certificate(M, b, w) -> bool:
    """w^T M integral and w^T b not integral."""
    n = len(M[0]) if M else 0
    for j in range(n):
        if Fraction(sum(Fraction(wi) * Fraction(M[i][j]) for i, wi in enumerate(w))).denominator != 1:
            return False
    wb = sum(Fraction(wi) * Fraction(bi) for wi, bi in zip(w, b))
    return wb.denominator != 1


# --------------------------------------------------------------------------
# relation lattice
# --------------------------------------------------------------------------

def coordinate_system(L: LSet):
    """Rational constraint rows C with C A = 0 iff sum A_i alpha_i = 0.

    For F_p, returns rows over the integers plus an extra column for p,
    flagged by the second return value.
    """
    ctx = L.ctx
    if ctx.kind == "prime":
        return [[x.v for x in L.elems] + [ctx.p]], True
    coords = [ctx.coords(x) for x in L.elems]
    dim = len(coords[0]) if coords else 1
    rows = [[coords[i][c] for i in range(L.k)] for c in range(dim)]
    rows = [r for r in rows if any(r)]
    return rows, False


def integer_kernel(rows, keep: int | None = None) -> list:
    """Hermite-reduced basis of the integer kernel of a rational matrix.

    With ``keep`` the kernel vectors are projected onto their first ``keep``
    coordinates (used for congruences, where the last unknown absorbs p).
    """
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else (keep or 0)
    if not rows or not any(any(r) for r in rows):
        gens = _identity(ncols)
    else:
        ints, _, _ = _clear_rows(rows, [0] * len(rows))
        S = smith_normal_form(ints)
        gens = [[S.V[i][j] for i in range(ncols)] for j in range(S.rank, ncols)]
    if keep is not None:
        gens = [g[:keep] for g in gens]
    return hermite_rows(gens)


def relation_lattice(L: LSet) -> list:
    """A Hermite-reduced basis of {A in Z^k : sum A_i alpha_i = 0}."""
    rows, modular = coordinate_system(L)
    if not rows:
        return _identity(L.k)
    return integer_kernel(rows, keep=L.k if modular else None)


# --------------------------------------------------------------------------
# primitive relations
# --------------------------------------------------------------------------

@dataclass
class RelationResult:
    relation: IntRelation | None
    certificate: list | None = None
    system: tuple = ()
    lattice: list = field(default_factory=list)
    exhaustive: bool = True

    @property
    def exists(self) -> bool:
        return self.relation is not None


def primitive_system(L: LSet):
    """(M, b) with integer solutions of M A = b exactly the primitive relations."""
    rows, modular = coordinate_system(L)
    k = L.k
    if modular:
        M = [list(rows[0]), [1] * k + [0]]
        b = [0, 1]
    else:
        M = [list(r) for r in rows] + [[1] * k]
        b = [0] * len(rows) + [1]
    return M, b


def _free_coordinates(basis: list, k: int) -> list:
    """Lexicographically first coordinate set on which the lattice projects injectively."""
    chosen: list = []
    for c in range(k):
        trial = chosen + [c]
        sub = sympy.Matrix([[row[j] for j in trial] for row in basis])
        if sub.rank() == len(trial):
            chosen = trial
        if len(chosen) == len(basis):
            break
    return chosen


def _size_reduce(z: list, basis: list) -> list:
    """Greedy: subtract lattice vectors while the infinity norm (then l1) drops."""
    z = list(z)

    def key(v):
        return (max(map(abs, v)) if v else 0, sum(map(abs, v)))

    improved = True
    while improved:
        improved = False
        for b in basis:
            for sgn in (1, -1):
                while True:
                    cand = [x - sgn * y for x, y in zip(z, b)]
                    if key(cand) < key(z):
                        z = cand
                        improved = True
                    else:
                        break
    return z


def _search_coset(z0: list, basis: list, free: list, max_norm: int, cost_cap: int):
    """Min-infinity-norm, lex-least vector of z0 + span_Z(basis), norms up to max_norm.

    Vectors of the coset are determined by their values on ``free``; we scan
    those values in growing boxes.
    """
    rho = len(basis)
    k = len(z0)
    if rho == 0:
        return z0, True
    BF = sympy.Matrix([[row[j] for j in free] for row in basis])  # rho x rho
    det = int(BF.det())
    adj = [[int(x) for x in row] for row in BF.adjugate().tolist()]
    z0F = [z0[j] for j in free]
    spent = 0
    for N in range(0, max_norm + 1):
        size = (2 * N + 1) ** rho
        spent += size
        if spent > cost_cap:
            return None, False
        grids = np.array(list(itertools.product(range(-N, N + 1), repeat=rho)), dtype=object)
        diff = grids - np.array(z0F, dtype=object)
        num = diff.dot(np.array(adj, dtype=object))  # c = diff * BF^{-1} = diff*adj/det
        ok = np.all(num % det == 0, axis=1)
        if not ok.any():
            continue
        c = num[ok] // det
        Z = c.dot(np.array(basis, dtype=object)) + np.array(z0, dtype=object)
        norms = np.max(np.abs(Z), axis=1)
        good = Z[norms <= N]
        if len(good):
            best = min(tuple(int(x) for x in row) for row in good)
            return list(best), True
    return None, True


def primitive_relation(L: LSet, max_cost: int | None = None) -> RelationResult:
    """Find a primitive relation on L, or certify that none exists.

    The returned relation is the lexicographically least among those of
    minimal infinity norm. If the search budget runs out a (valid but
    possibly non-minimal) size-reduced relation is returned with
    ``exhaustive=False``.
    """
    M, b = primitive_system(L)
    res = integer_solvable(M, b)
    if not res.solvable:
        return RelationResult(None, certificate=res.certificate, system=(M, b))
    k = L.k
    z = res.solution[:k]
    modular = L.ctx.kind == "prime"
    basis = integer_kernel(M, keep=k if modular else None)
    z = _size_reduce(z, basis)
    free = _free_coordinates(basis, k)
    cap = max_cost if max_cost is not None else min(_budget.budget(), 2_000_000)
    best, complete = _search_coset(z, basis, free, max(abs(x) for x in z), cap)
    if best is None:
        best = z
    rel = IntRelation(tuple(best), L)
    return RelationResult(rel, system=(M, b), lattice=basis, exhaustive=complete)


def relation_obstruction(L: LSet):
    """The infeasibility certificate w if L has no primitive relation, else None."""
    return primitive_relation(L).certificate


# --------------------------------------------------------------------------
# reshaping relations
# --------------------------------------------------------------------------

def _primitive_int_vector(v) -> list:
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // math.gcd(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return [x // g for x in ints] if g else ints


def normalize_min_negatives(rel: IntRelation) -> IntRelation:
    """Reduce an integer-set relation to one with at most one negative coefficient.

    Repeatedly: take the first pair of negative positions (i, j) and the
    smallest other index m, solve B_i + B_j + B_m = 0 and
    alpha_i B_i + alpha_j B_j + alpha_m B_m = 0, orient B so two entries
    are positive, and add the smallest multiple s*B that makes both of those
    coordinates nonnegative.
    """
    L = rel.L
    vals = L.as_ints()
    A = list(rel.A)
    while True:
        neg = [i for i, a in enumerate(A) if a < 0]
        if len(neg) <= 1:
            return IntRelation(tuple(A), L)
        if L.k < 3:
            raise RelationError("need at least three elements to reduce negatives")
        i, j = neg[0], neg[1]
        m = next(x for x in range(L.k) if x not in (i, j))
        ai, aj, am = vals[i], vals[j], vals[m]
        B = _primitive_int_vector([am - aj, ai - am, aj - ai])  # on (i, j, m)
        if sum(1 for x in B if x > 0) < 2:
            B = [-x for x in B]
        idx = (i, j, m)
        pos = [(t, B[n]) for n, t in enumerate(idx) if B[n] > 0]
        # smallest s >= 1 with A_t + s*B_t >= 0 on both positive positions
        s = max([1] + [-(A[t] // bt) for t, bt in pos])
        for n, t in enumerate(idx):
            A[t] += s * B[n]
        IntRelation(tuple(A), L)  # re-verify each step


@dataclass
class Differences:
    B: dict  # (i, i') -> positive int, 0-based indices
    S: int


def relation_to_differences(rel: IntRelation) -> Differences:
    """Rewrite as alpha_0 + sum B[i,i'] (alpha_i - alpha_i') = 0 with B >= 0."""
    B = {}
    for i, a in enumerate(rel.A):
        if i == 0 or a == 0:
            continue
        if a > 0:
            B[(i, 0)] = a
        else:
            B[(0, i)] = -a
    L = rel.L
    total = L.elems[0]
    for (i, ip), v in B.items():
        total = total + (L.elems[i] - L.elems[ip]) * v
    if total:
        raise RelationError("difference form does not sum to zero")
    return Differences(B, sum(B.values()))


# --------------------------------------------------------------------------
# point criterion and the |L| = 2 algebraic-integer test
# --------------------------------------------------------------------------

@dataclass
class PointCriterion:
    holds: bool
    gcd: int
    witness: list | None  # (A_0, A_1, ..., A_k): Q(x) = A_0 + sum A_i x_i


def point_criterion(v) -> PointCriterion:
    """Is there an integral degree-one Q with Q(v) = 0 and Q(1,...,1) = 1?"""
    v = [Fraction(x) for x in v]
    diffs = [x.denominator - x.numerator for x in v]
    g, coeffs = bezout(diffs)
    if g != 1:
        return PointCriterion(False, g, None)
    A = [c * x.denominator for c, x in zip(coeffs, v)]
    A0 = 1 - sum(A)
    wit = [A0] + A
    assert A0 + sum(a * x for a, x in zip(A, v)) == 0 and sum(wit) == 1
    return PointCriterion(True, g, wit)


def algebraic_integer_of_inverse(minpoly) -> tuple | None:
    """Minimal polynomial of 1/(1 - alpha) if it is monic integral, else None.

    ``minpoly`` is the minimal polynomial g of alpha (string or coefficients,
    low degree first). With lambda = 1/(1 - alpha), alpha = (lambda - 1)/lambda
    and lambda^d g((lambda-1)/lambda) = sum g_i (lambda-1)^i lambda^(d-i).
    Returns integer coefficients low degree first.
    """
    g = parse_univariate(minpoly) if isinstance(minpoly, str) else tuple(Fraction(c) for c in minpoly)
    d = len(g) - 1
    if d < 1:
        raise RelationError("minimal polynomial must have degree >= 1")
    x = sympy.Symbol("x")
    gp = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(g)], x)
    if not gp.is_irreducible:
        raise RelationError(f"{format_univariate(g, 'x')} is not irreducible")
    if sum(g) == 0:
        raise RelationError("alpha = 1, so 1/(1 - alpha) is undefined")
    lam = sympy.Symbol("lam")
    h = sum(sympy.Rational(c.numerator, c.denominator) * (lam - 1) ** i * lam ** (d - i)
            for i, c in enumerate(g))
    hp = sympy.Poly(sympy.expand(h), lam)
    lead = hp.LC()
    coeffs = [sympy.Rational(c) / lead for c in reversed(hp.all_coeffs())]
    if all(c.q == 1 for c in coeffs):
        return tuple(int(c) for c in coeffs)
    return None
