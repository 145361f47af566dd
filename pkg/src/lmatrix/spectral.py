"""Matrices with a prescribed eigenvalue of large multiplicity.

* :func:`companion` - integer matrix with a given characteristic polynomial.
* :func:`amplify` - tensor a small matrix with I_l and patch every block
  beta*I_l by a low-rank correction so all entries land in L.
* :func:`digraph_pipeline` - {0,1}-matrices with eigenvalue lambda of
  multiplicity close to n / deg(lambda).
* :func:`polyrel_matrix` / :func:`polytobetter_pipeline` - a small matrix
  with eigenvalue alpha_1 built from a homogeneous polynomial relation on L,
  amplified into an L-matrix whose size beats its rank by a constant factor.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .constructions import extend_to_size
from .fields import FieldCtx, field_make, number_field
from .linalg import InvariantViolation, certified_rank, eigen_multiplicity, exact_rank
from .matrix import ExactMatrix
from .polystr import format_univariate, parse_multivariate, parse_univariate
from .relations import IntRelation, LSet, integer_solvable


class SpectralError(ValueError):
    pass


# --------------------------------------------------------------------------
# companion matrices
# --------------------------------------------------------------------------

def _int_poly(f) -> tuple:
    coeffs = parse_univariate(f) if isinstance(f, str) else tuple(Fraction(c) for c in f)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if len(coeffs) < 2:
        raise SpectralError("polynomial must have degree >= 1")
    if any(c.denominator != 1 for c in coeffs):
        raise SpectralError(f"{format_univariate(coeffs, 'x')} has non-integer coefficients")
    if coeffs[-1] != 1:
        raise SpectralError(f"{format_univariate(coeffs, 'x')} is not monic")
    return tuple(int(c) for c in coeffs)


def companion(f, ctx="QQ") -> ExactMatrix:
    """Ones on the subdiagonal, -a_0 .. -a_{d-1} down the last column."""
    a = _int_poly(f)
    d = len(a) - 1
    rows = [[0] * d for _ in range(d)]
    for i in range(1, d):
        rows[i][i - 1] = 1
    for i in range(d):
        rows[i][d - 1] = -a[i]
    return ExactMatrix.from_rows(field_make(ctx), rows)


# --------------------------------------------------------------------------
# amplification
# --------------------------------------------------------------------------

@dataclass
class Patch:
    beta: object
    coeffs: tuple  # beta = sum coeffs[i] * alpha_i over the nonzero elements of L
    construction: str | None = None
    relation: tuple = ()
    q: int | None = None
    matrix: ExactMatrix | None = None  # Q_beta = Q'_beta - beta J
    rank: int = 0


@dataclass
class AmplifyPlan:
    progenitor: ExactMatrix
    L: LSet
    l: int
    patches: dict = field(default_factory=dict)

    @property
    def alphas(self) -> tuple:
        return tuple(x for x in self.L.elems if x)


def lattice_coefficients(beta, alphas, ctx: FieldCtx) -> tuple:
    """Integers A with beta = sum A_i alpha_i, or raise with the obstruction."""
    if not beta:
        return (0,) * len(alphas)
    if ctx.kind == "prime":
        a0 = alphas[0]
        return (int((beta * a0 ** -1).v),) + (0,) * (len(alphas) - 1)
    cols = [ctx.coords(a) for a in alphas]
    b = ctx.coords(beta)
    M = [[cols[j][i] for j in range(len(alphas))] for i in range(len(b))]
    res = integer_solvable(M, b)
    if not res.solvable:
        raise SpectralError(
            f"{ctx.fmt(beta)} is not an integer combination of L; certificate {res.certificate}"
        )
    return tuple(int(z) for z in res.solution)


def _patch_construction(rel: IntRelation) -> str:
    return "square" if len(rel.negatives) <= 1 else "threehalves"


def make_plan(progenitor: ExactMatrix, L: LSet, l: int, known: dict | None = None) -> AmplifyPlan:
    """Decide how every nonzero progenitor entry beta is patched.

    ``known`` may map beta to its integer coefficients over the nonzero
    elements of L; otherwise they are solved for.
    """
    ctx = L.ctx
    if progenitor.ctx != ctx:
        raise SpectralError(f"progenitor over {progenitor.ctx}, L over {ctx}")
    if not progenitor.is_square:
        raise SpectralError("progenitor must be square")
    if ctx.zero not in L.elems:
        raise SpectralError("L must contain 0")
    if l < 1:
        raise SpectralError("l must be positive")
    plan = AmplifyPlan(progenitor, L, l)
    alphas = plan.alphas
    if not alphas:
        raise SpectralError("L needs a nonzero element")
    known = known or {}
    for beta in sorted(set(progenitor.entries), key=ctx.fmt):
        A = tuple(known[beta]) if beta in known else lattice_coefficients(beta, alphas, ctx)
        check = ctx.zero
        for a, x in zip(A, alphas):
            check = check + x * a
        if check != beta:
            raise SpectralError(f"coefficients {A} do not give {ctx.fmt(beta)}")
        patch = Patch(beta, A)
        if beta:
            Lb = LSet(ctx, (beta,) + tuple(beta + a for a in alphas), allow_zero=True)
            rel = IntRelation((1 + sum(A),) + tuple(-a for a in A), Lb)
            patch.construction = _patch_construction(rel)
            patch.relation = rel.A
        plan.patches[beta] = patch
    return plan


def _build_patch(plan: AmplifyPlan, patch: Patch) -> None:
    ctx = plan.L.ctx
    l = plan.l
    if not patch.beta:
        patch.matrix = ExactMatrix.zeros(ctx, l)
        patch.rank = 0
        return
    alphas = plan.alphas
    beta = patch.beta
    Lb = LSet(ctx, (beta,) + tuple(beta + a for a in alphas), allow_zero=True)
    ext = extend_to_size(patch.construction, l, {"L": Lb, "A": patch.relation}, check_rank=False)
    Qp = ext.matrix
    patch.q = ext.q
    Q = Qp - ExactMatrix.ones(ctx, l).scale(beta)
    patch.matrix = Q
    patch.rank = exact_rank(Q)


@dataclass
class AmplifyResult:
    matrix: ExactMatrix
    plan: AmplifyPlan
    lam: object = None
    progenitor_multiplicity: int | None = None
    multiplicity: int | None = None
    lower_fine: int | None = None
    lower_coarse: int | None = None
    patch_ranks: dict = field(default_factory=dict)

    def report(self) -> dict:
        ctx = self.plan.L.ctx
        return {
            "size": self.matrix.rows,
            "l": self.plan.l,
            "lambda": None if self.lam is None else ctx.fmt(self.lam),
            "progenitor_multiplicity": self.progenitor_multiplicity,
            "multiplicity_exact": self.multiplicity,
            "lower_bound_blocks": self.lower_fine,
            "lower_bound_max": self.lower_coarse,
            "patch_ranks": {ctx.fmt(b): r for b, r in self.patch_ranks.items()},
            "patches": {ctx.fmt(b): {"construction": p.construction, "q": p.q,
                                      "relation": list(p.relation)}
                        for b, p in self.plan.patches.items() if p.beta},
        }


def amplify(plan: AmplifyPlan, lam=None, exact: bool = True) -> AmplifyResult:
    """Replace each block beta*I_l of M (x) I_l by beta*I_l + Q_beta."""
    M, L, l = plan.progenitor, plan.L, plan.l
    ctx = L.ctx
    for p in plan.patches.values():
        if p.matrix is None:
            _build_patch(plan, p)
    n = M.rows
    N = n * l
    ents = [ctx.zero] * (N * N)
    for a in range(n):
        for b in range(n):
            beta = M[a, b]
            Q = plan.patches[beta].matrix
            for i in range(l):
                base = (a * l + i) * N + b * l
                row = Q.entries[i * l:(i + 1) * l]
                for j in range(l):
                    ents[base + j] = row[j] + beta if i == j else row[j]
    out = ExactMatrix.trusted(ctx, N, N, ents)
    bad = out.lmatrix_violations(L.elems, diagonal=0)
    if bad:
        i, j = bad[0]
        raise InvariantViolation(f"amplified entry ({i},{j}) = {ctx.fmt(out[i, j])} is outside L")
    if M.is_symmetric() and all(p.matrix.is_symmetric() for p in plan.patches.values()) \
            and not out.is_symmetric():
        raise InvariantViolation("amplification broke symmetry")
    res = AmplifyResult(out, plan, lam, patch_ranks={b: p.rank for b, p in plan.patches.items()})
    if lam is not None:
        lam = ctx(lam)
        res.lam = lam
        m = eigen_multiplicity(M, lam)
        res.progenitor_multiplicity = m
        patched = [plan.patches[x].rank for x in M.entries]
        res.lower_fine = l * m - sum(patched)
        res.lower_coarse = l * m - n * n * max(patched)
        if exact:
            res.multiplicity = eigen_multiplicity(out, lam)
            if res.multiplicity < res.lower_fine or res.lower_fine < res.lower_coarse:
                raise InvariantViolation("multiplicity falls below the block bound")
    return res


# --------------------------------------------------------------------------
# {0,1}-matrices with a prescribed eigenvalue
# --------------------------------------------------------------------------

def en_translate(M: ExactMatrix, lam) -> ExactMatrix:
    """M + lam (J - I)."""
    ctx = M.ctx
    lam = ctx(lam)
    n = M.rows
    return M + (ExactMatrix.ones(ctx, n) - ExactMatrix.identity(ctx, n)).scale(lam)


def en_roundtrip_ok(D: ExactMatrix, lam, multiplicity: int) -> bool:
    """rank(D + lam(J - I)) lies within one of n - m."""
    r = exact_rank(en_translate(D, lam))
    return abs(r - (D.rows - multiplicity)) <= 1


@dataclass
class DigraphResult:
    matrix: ExactMatrix
    minpoly: tuple
    lam: object
    multiplicity: int
    lower: int
    upper: int
    c: float
    details: dict = field(default_factory=dict)

    def report(self) -> dict:
        return {
            "size": self.matrix.rows,
            "minpoly": format_univariate(self.minpoly, "x"),
            "lambda": self.matrix.ctx.fmt(self.lam),
            "field": self.matrix.ctx.descriptor,
            "multiplicity_exact": self.multiplicity,
            "lower_bound": self.lower,
            "upper_bound": self.upper,
            "c": self.c,
            **self.details,
        }


def digraph_pipeline(minpoly, n: int) -> DigraphResult:
    """A {0,1}-matrix of size n with eigenvalue lambda (root of ``minpoly``) of large multiplicity."""
    f = _int_poly(minpoly)
    d = len(f) - 1
    if n < 1:
        raise SpectralError("n must be positive")
    x = sympy.Symbol("x")
    if not sympy.Poly(list(reversed(f)), x).is_irreducible:
        raise SpectralError(f"{format_univariate(f, 'x')} is reducible over Q")
    if d == 1:
        return _digraph_integer(f, n)
    K = number_field(format_univariate(f, "t"))
    lam = K.gen()
    C = companion(f, K)
    L = LSet(K, (K.zero, K.one), allow_zero=True)
    l = -(-n // d)
    plan = make_plan(C, L, l)
    amp = amplify(plan, lam, exact=False)
    D = amp.matrix if amp.matrix.rows == n else amp.matrix.principal(n)
    m = eigen_multiplicity(D, lam)
    lower = amp.lower_fine - (l * d - n)
    upper = n // d
    if m < lower:
        raise InvariantViolation(f"multiplicity {m} below the guaranteed {lower}")
    if m > upper:
        raise InvariantViolation(f"multiplicity {m} exceeds n/d = {upper}")
    c = (n / d - m) / math.sqrt(n)
    details = {"l": l, "patch_ranks": {K.fmt(b): r for b, r in amp.patch_ranks.items()},
               "patches": amp.report()["patches"]}
    return DigraphResult(D, f, lam, m, lower, upper, c, details)


def _digraph_integer(f: tuple, n: int) -> DigraphResult:
    Q = field_make("QQ")
    a = -f[0]
    lam = Q(a)
    Lp = LSet(Q, (lam, lam + 1), allow_zero=True)
    rel = (1 + a, -a)
    ext = extend_to_size("square", n, {"L": Lp, "A": rel})
    N = ext.matrix
    rho = ext.rank_sub
    D = N - (ExactMatrix.ones(Q, n) - ExactMatrix.identity(Q, n)).scale(lam)
    bad = D.lmatrix_violations([Q.zero, Q.one], diagonal=0)
    if bad:
        raise InvariantViolation(f"translated entry {bad[0]} is not 0 or 1")
    m = eigen_multiplicity(D, lam)
    lower = n - rho - 1
    if m < lower or m > n:
        raise InvariantViolation(f"multiplicity {m} outside [{lower}, {n}]")
    c = (n - m) / math.sqrt(n)
    details = {"q": ext.q, "square_rank": rho}
    return DigraphResult(D, f, lam, m, lower, n, c, details)


# --------------------------------------------------------------------------
# polynomial relations
# --------------------------------------------------------------------------

def _terms_of(P, k: int | None = None) -> tuple[int, dict]:
    if isinstance(P, str):
        return parse_multivariate(P, k)
    if isinstance(P, tuple) and len(P) == 2 and isinstance(P[1], dict):
        return P[0], {tuple(e): Fraction(c) for e, c in P[1].items()}
    if hasattr(P, "terms") and hasattr(P, "k"):
        return P.k, {tuple(e): Fraction(c) for e, c in P.terms.items()}
    raise SpectralError(f"cannot read a polynomial from {P!r}")


@dataclass
class MonomialIndex:
    k: int
    d: int
    monomials: tuple = ()
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.k < 1 or self.d < 1:
            raise SpectralError("need k >= 1 and d >= 1")
        mons = [e for e in itertools.product(range(self.d), repeat=self.k) if sum(e) == self.d - 1]
        mons.sort(reverse=True)  # x1^(d-1) first
        self.monomials = tuple(mons)
        self.index = {m: i for i, m in enumerate(mons)}

    @property
    def size(self) -> int:
        return len(self.monomials)

    @property
    def top(self) -> tuple:
        return (self.d - 1,) + (0,) * (self.k - 1)

    @staticmethod
    def pred(m: tuple) -> tuple[tuple, int]:
        """(pred(m), i_m) with i_m the smallest 0-based index >= 1 occurring in m."""
        i = next((j for j in range(1, len(m)) if m[j] > 0), None)
        if i is None:
            raise SpectralError(f"{m} is a power of x1 and has no predecessor")
        p = list(m)
        p[i] -= 1
        return tuple(p), i


def shifted_terms(k: int, terms: dict) -> dict:
    """Coefficients of P(x1, x2 + x1, ..., xk + x1)."""
    out: dict = {}
    for e, c in terms.items():
        # expand prod_{i>=1} (x_i + x_1)^{e_i}
        parts = [range(ei + 1) for ei in e[1:]]
        for js in itertools.product(*parts):
            coef = c
            x1 = e[0]
            mon = [0] * k
            for i, (ei, j) in enumerate(zip(e[1:], js), start=1):
                coef *= math.comb(ei, j)
                mon[i] = j
                x1 += ei - j
            mon[0] = x1
            mon = tuple(mon)
            out[mon] = out.get(mon, 0) + coef
    return {m: c for m, c in out.items() if c}


def _mono_eval(m, point, ctx):
    v = ctx.one
    for x, e in zip(point, m):
        if e:
            v = v * x ** e
    return v


@dataclass
class PolyRelation:
    matrix: ExactMatrix
    index: MonomialIndex
    alpha1: object
    L_prime: LSet
    coefficients: dict  # entry value -> integer coefficients over alpha'_2..alpha'_k
    shifted: dict
    identities: dict = field(default_factory=dict)
    eigen_rank: int | None = None


def polyrel_matrix(P, L: LSet) -> PolyRelation:
    """Small matrix over the integer span of L' with eigenvalue alpha_1.

    The column x1^(d-1) of the second summand collects -c_m * alpha'_{i_m}
    over every degree-d monomial m != x1^d, including those whose
    predecessor is x1^(d-1); that is what makes (m(alpha))_m a left
    eigenvector.
    """
    ctx = L.ctx
    k, terms = _terms_of(P, L.k)
    if k != L.k:
        raise SpectralError(f"P has {k} variables, L has {L.k} elements")
    if not terms:
        raise SpectralError("P is the zero polynomial")
    degs = {sum(e) for e in terms}
    if len(degs) != 1:
        raise SpectralError("P is not homogeneous")
    d = degs.pop()
    if d < 2:
        raise SpectralError(f"P has degree {d}; degree >= 2 is required")
    if any(Fraction(c).denominator != 1 for c in terms.values()):
        raise SpectralError("P must have integer coefficients")
    at_ones = sum(terms.values())
    if at_ones != 1:
        raise SpectralError(f"P(1,...,1) = {at_ones}, must be 1")
    al = L.elems
    at_L = ctx.zero
    for e, c in terms.items():
        at_L = at_L + _mono_eval(e, al, ctx) * int(c)
    if at_L:
        raise SpectralError(f"P(alpha) = {ctx.fmt(at_L)}, must be 0")
    a1 = al[0]
    ap = [ctx.zero] + [a - a1 for a in al[1:]]  # alpha'_i (index 0 unused)
    Qt = shifted_terms(k, terms)
    idx = MonomialIndex(k, d)
    sz = idx.size
    top = idx.top
    # integer coefficient vectors over alpha'_2..alpha'_k
    zero = (0,) * (k - 1)
    C1 = [[zero] * sz for _ in range(sz)]
    C2 = [[zero] * sz for _ in range(sz)]

    def unit(i, c=1):
        v = [0] * (k - 1)
        v[i - 1] = c
        return tuple(v)

    def add(u, v):
        return tuple(a + b for a, b in zip(u, v))

    for mp in idx.monomials:
        if mp == top:
            continue
        m = (mp[0] + 1,) + mp[1:]
        pm, im = idx.pred(m)
        C1[idx.index[pm]][idx.index[mp]] = unit(im)
    col = idx.index[top]
    for mbar, c in Qt.items():
        if mbar[0] == d:
            continue
        pm, im = idx.pred(mbar)
        r = idx.index[pm]
        C2[r][col] = add(C2[r][col], unit(im, -int(c)))

    def value(v):
        s = ctx.zero
        for i, a in enumerate(v, start=1):
            if a:
                s = s + ap[i] * a
        return s

    coeffs = {}
    rows = []
    for r in range(sz):
        row = []
        for c in range(sz):
            v = add(C1[r][c], C2[r][c])
            x = value(v)
            coeffs.setdefault(x, v)
            row.append(x)
        rows.append(row)
    M = ExactMatrix.from_rows(ctx, rows)
    # left eigenvector identities
    point = [a1] + ap[1:]
    vec = [_mono_eval(m, point, ctx) for m in idx.monomials]
    M1 = ExactMatrix.from_rows(ctx, [[value(C1[r][c]) for c in range(sz)] for r in range(sz)])
    M2col = [value(C2[r][col]) for r in range(sz)]
    ident1 = []
    for c in range(sz):
        s = ctx.zero
        for r in range(sz):
            s = s + vec[r] * M1[r, c]
        s = s - a1 * vec[c]
        want = -(a1 ** d) if c == col else ctx.zero
        if s != want:
            raise InvariantViolation(f"first column identity fails at {idx.monomials[c]}")
        ident1.append(ctx.fmt(s))
    s2 = ctx.zero
    for r in range(sz):
        s2 = s2 + vec[r] * M2col[r]
    if s2 != a1 ** d - at_L:
        raise InvariantViolation("second column identity fails")
    Lp = LSet(ctx, (ctx.zero,) + tuple(ap[1:]), allow_zero=True)
    res = PolyRelation(M, idx, a1, Lp, coeffs, Qt,
                       identities={"first": ident1, "second": ctx.fmt(s2)})
    res.eigen_rank = exact_rank(M.shift_diagonal(a1))
    if res.eigen_rank >= sz:
        raise InvariantViolation(f"{ctx.fmt(a1)} is not an eigenvalue of the relation matrix")
    return res


@dataclass
class PolyToBetterResult:
    matrix: ExactMatrix
    relation: PolyRelation
    amplified: AmplifyResult
    rank: int
    rank_upper: int

    @property
    def ratio(self) -> float:
        return self.matrix.rows / self.rank if self.rank else math.inf

    def report(self) -> dict:
        ctx = self.matrix.ctx
        return {
            "size": self.matrix.rows,
            "rank_certified": self.rank,
            "rank_upper": self.rank_upper,
            "ratio": self.ratio,
            "progenitor": [[ctx.fmt(x) for x in r] for r in self.relation.matrix.to_rows()],
            "histogram": {ctx.fmt(v): c for v, c in self.matrix.histogram().items()},
            **{k: v for k, v in self.amplified.report().items() if k != "size"},
        }


def polytobetter_pipeline(P, L: LSet, l: int) -> PolyToBetterResult:
    """An L-matrix of size l * C(d+k-2, k-1) whose rank is about l * (C(d+k-2, k-1) - 1)."""
    pr = polyrel_matrix(P, L)
    ctx = L.ctx
    plan = make_plan(pr.matrix, pr.L_prime, l, known=pr.coefficients)
    amp = amplify(plan, pr.alpha1)
    Ml = amp.matrix
    n = Ml.rows
    out = en_translate(Ml, pr.alpha1)
    bad = out.lmatrix_violations(L.elems, diagonal=0)
    if bad:
        i, j = bad[0]
        raise InvariantViolation(f"entry ({i},{j}) = {ctx.fmt(out[i, j])} is outside L")
    rank = certified_rank(out).rank
    upper = n - amp.lower_fine + 1
    if rank > upper:
        raise InvariantViolation(f"rank {rank} exceeds {upper}")
    return PolyToBetterResult(out, pr, amp, rank, upper)
