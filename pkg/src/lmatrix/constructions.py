"""Low-rank L-matrices built from functions on subspaces of F_q^d.

Given phi on subspaces of dimension <= s, the matrix indexed by F_q^d with
entry(y, x) = sum of phi(W) over W contained in (x - y)^perp (and the full sum
on the diagonal) is symmetric, depends only on x - y, and has rank at most
sum_W q^(dim W). Each named construction picks phi so that every hyperplane
sum lands in L and the diagonal sum is 0.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import sympy

from .fields import FieldCtx, field_make
from .geometry import (
    Subspace,
    dot,
    enumerate_points,
    hyperplane_of,
    normalize,
    span,
    zero_subspace,
)
from .linalg import (
    InvariantViolation,
    RankBounds,
    RankCertificate,
    certified_rank,
    exact_rank,
    rank_bounds_modular,
)
from .matrix import ExactMatrix, MatrixError
from .relations import IntRelation, LSet, relation_to_differences


class ConstructionError(ValueError):
    pass


# --------------------------------------------------------------------------
# phi and the generic engine
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiAssignment:
    q: int
    d: int
    s: int
    ctx: FieldCtx
    support: tuple  # ((Subspace, value), ...), zero values dropped

    def __post_init__(self):
        ctx = field_make(self.ctx)
        object.__setattr__(self, "ctx", ctx)
        if not self.s < self.d:
            raise ConstructionError(f"need s < d, got s={self.s}, d={self.d}")
        seen = set()
        clean = []
        for W, val in self.support:
            if W.q != self.q or W.d != self.d:
                raise ConstructionError(f"subspace {W} does not live in F_{self.q}^{self.d}")
            if W.dim > self.s:
                raise ConstructionError(f"subspace {W} has dimension {W.dim} > s = {self.s}")
            if W in seen:
                raise ConstructionError(f"subspace {W} assigned twice")
            seen.add(W)
            val = ctx(val)
            if val:
                clean.append((W, val))
        object.__setattr__(self, "support", tuple(clean))

    @property
    def lam(self):
        total = self.ctx.zero
        for _, v in self.support:
            total = total + v
        return total

    @property
    def rank_upper(self) -> int:
        return sum(self.q ** W.dim for W, _ in self.support)

    def hyperplane_value(self, z):
        """sum of phi(W) over W inside z^perp."""
        total = self.ctx.zero
        for W, val in self.support:
            if all(dot(w, z, self.q) == 0 for w in W.basis):
                total = total + val
        return total

    def to_json_obj(self) -> dict:
        return {
            "q": self.q, "d": self.d, "s": self.s, "field": self.ctx.descriptor,
            "support": [{"basis": W.to_json(), "value": self.ctx.fmt(v)} for W, v in self.support],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "PhiAssignment":
        ctx = field_make(obj["field"])
        q, d = int(obj["q"]), int(obj["d"])
        sup = []
        for item in obj["support"]:
            W = span([tuple(b) for b in item["basis"]], q, d)
            if W.dim != len(item["basis"]):
                raise ConstructionError(f"basis {item['basis']} is not independent")
            sup.append((W, ctx.parse(str(item["value"]))))
        return cls(q, d, int(obj["s"]), ctx, tuple(sup))


@dataclass
class ConstructionReport:
    matrix: ExactMatrix
    declared_L: LSet
    lam: object
    rank_upper: int
    phi: PhiAssignment | None = None
    point_values: dict = field(default_factory=dict)
    rank_certified: RankCertificate | None = None
    bounds: RankBounds | None = None
    choices: dict = field(default_factory=dict)
    case_counts: dict = field(default_factory=dict)
    seed: int | None = None
    name: str = "phi"

    @property
    def size(self) -> int:
        return self.matrix.rows

    @property
    def entry_histogram(self) -> Counter:
        return self.matrix.histogram()

    @property
    def rank(self) -> int | None:
        return self.rank_certified.rank if self.rank_certified else None

    def verify(self) -> None:
        """Symmetric, constant diagonal lambda, off-diagonal entries in L, rank within bound."""
        M = self.matrix
        if not M.is_symmetric():
            raise InvariantViolation("constructed matrix is not symmetric")
        bad = M.lmatrix_violations(self.declared_L.elems, diagonal=self.lam)
        if bad:
            i, j = bad[0]
            raise InvariantViolation(
                f"entry ({i},{j}) = {M.ctx.fmt(M[i, j])} breaks the (L, lambda) pattern"
            )
        r = self.rank_certified
        if r is not None and r.lower > self.rank_upper:
            raise InvariantViolation(f"rank {r.lower} exceeds the bound {self.rank_upper}")
        if self.bounds is not None and self.bounds.lower > self.rank_upper:
            raise InvariantViolation(f"modular rank {self.bounds.lower} exceeds {self.rank_upper}")

    def summary(self) -> dict:
        ctx = self.matrix.ctx
        out = {
            "construction": self.name,
            "size": self.size,
            "lambda": ctx.fmt(self.lam),
            "L": self.declared_L.strings(),
            "rank_upper": self.rank_upper,
            "rank_certified": None,
            "histogram": {ctx.fmt(k): v for k, v in sorted(self.entry_histogram.items(),
                                                          key=lambda kv: ctx.fmt(kv[0]))},
            "choices": self.choices,
            "seed": self.seed,
        }
        if self.rank_certified is not None:
            rc = self.rank_certified
            out["rank_certified"] = {"rank": rc.rank, "lower": rc.lower, "upper": rc.upper,
                                     "method": rc.method}
        if self.bounds is not None:
            out["rank_modular"] = {"lower": self.bounds.lower,
                                   "per_prime": {str(p): r for p, r in self.bounds.per_prime.items()}}
        if self.case_counts:
            out["cases"] = self.case_counts
        return out


_CODE_CACHE: dict = {}


def _class_codes(q: int, d: int):
    """(codes, reps): codes[y, x] = index of the point of x - y (0 on the diagonal)."""
    key = (q, d)
    if key in _CODE_CACHE:
        return _CODE_CACHE[key]
    pts = enumerate_points(q, d)
    index = {P.rep: i + 1 for i, P in enumerate(pts)}
    N = q ** d
    table = np.zeros(N, dtype=np.int32)
    for code, v in enumerate(itertools.product(range(q), repeat=d)):
        if any(v):
            table[code] = index[normalize(v, q)]
    X = np.array(list(itertools.product(range(q), repeat=d)), dtype=np.int32)
    weights = q ** np.arange(d - 1, -1, -1, dtype=np.int64)
    xcode = X.astype(np.int64) @ weights
    codes = np.empty((N, N), dtype=np.int32)
    for y in range(N):
        diff = (X - X[y]) % q
        codes[y] = table[diff.astype(np.int64) @ weights]
    del xcode
    reps = [P.rep for P in pts]
    if len(_CODE_CACHE) > 8:
        _CODE_CACHE.clear()
    _CODE_CACHE[key] = (codes, reps)
    return codes, reps


def grassmann_construct(phi: PhiAssignment, declared_L=None, cert: str = "exact",
                        primes=(101, 103), name: str = "phi") -> ConstructionReport:
    """Build the matrix of ``phi``; rows/columns indexed by F_q^d in lex order."""
    q, d, ctx = phi.q, phi.d, phi.ctx
    codes, reps = _class_codes(q, d)
    lam = phi.lam
    values = [lam] + [phi.hyperplane_value(z) for z in reps]
    point_values = dict(zip(reps, values[1:]))
    N = q ** d
    flat = [values[c] for c in codes.ravel().tolist()]
    M = ExactMatrix.trusted(ctx, N, N, flat)
    if declared_L is None:
        declared_L = LSet(ctx, tuple(sorted(set(values[1:]), key=ctx.fmt)), allow_zero=True)
    rep = ConstructionReport(M, declared_L, lam, phi.rank_upper, phi, point_values, name=name)
    missing = [z for z, v in point_values.items() if v not in set(declared_L.elems)]
    if missing:
        raise ConstructionError(
            f"hyperplane sum {ctx.fmt(point_values[missing[0]])} at {missing[0]} lies outside L"
        )
    certify(rep, cert, primes)
    rep.verify()
    return rep


def certify(rep: ConstructionReport, mode: str = "exact", primes=(101, 103)) -> None:
    """Attach rank information: 'exact', 'modular' (lower bounds) or 'bound' (none)."""
    M = rep.matrix
    if mode == "bound":
        return
    if mode == "exact":
        blown = M.rows * M.ctx.degree
        if blown <= 1200:
            rep.rank_certified = certified_rank(M)
            return
        mode = "modular"
    if mode == "modular":
        width = min(M.cols, rep.rank_upper + 8)
        rep.bounds = rank_bounds_modular(M, primes, sketch_width=width)
        return
    raise ValueError(f"unknown certification mode {mode!r}")


# --------------------------------------------------------------------------
# named constructions
# --------------------------------------------------------------------------

def _relation_for(L: LSet, A) -> IntRelation:
    if isinstance(A, IntRelation):
        if A.L != L:
            return IntRelation(A.A, L)
        return A
    return IntRelation(tuple(A), L)


def construct_square(L: LSet, A, q: int, cert: str = "exact") -> ConstructionReport:
    """Rank <= 1 + S q construction of size q^2 from a relation with at most one negative coefficient.

    The negative coefficient (if any) is moved to the front; S is the sum of
    the remaining coefficients and S distinct points of P^1 are taken in lex order.
    """
    rel = _relation_for(L, A)
    neg = rel.negatives
    if len(neg) > 1:
        raise ConstructionError(
            f"relation {rel.A} has {len(neg)} negative coefficients; reordering cannot fix that"
        )
    perm = list(range(L.k))
    if neg:
        perm.remove(neg[0])
        perm.insert(0, neg[0])
    alphas = [L.elems[i] for i in perm]
    coeffs = [rel.A[i] for i in perm]
    S = sum(coeffs[1:])
    if not sympy.isprime(q):
        raise ConstructionError(f"q = {q} is not prime")
    if q <= S:
        raise ConstructionError(f"q <= S ({q} <= {S}): not enough points on the projective line")
    pts = enumerate_points(q, 2)
    ctx = L.ctx
    a1 = alphas[0]
    support = [(zero_subspace(q, 2), a1)]
    used = []
    it = iter(pts)
    for i in range(1, L.k):
        for _ in range(coeffs[i]):
            P = next(it)
            support.append((P.subspace, alphas[i] - a1))
            used.append({"point": list(P.rep), "element": ctx.fmt(alphas[i])})
    phi = PhiAssignment(q, 2, 1, ctx, tuple(support))
    rep = grassmann_construct(phi, L, cert, name="square")
    rep.choices = {"order": [ctx.fmt(a) for a in alphas], "relation": coeffs, "S": S,
                   "points": used}
    if rep.lam != 0:
        raise InvariantViolation("square construction produced a nonzero diagonal")
    return rep


def construct_threehalves(L: LSet, A, q: int, cert: str = "exact") -> ConstructionReport:
    """Rank O(q^2) construction of size q^3 from an arbitrary primitive relation."""
    rel = _relation_for(L, A)
    diff = relation_to_differences(rel)
    S = diff.S
    if not sympy.isprime(q):
        raise ConstructionError(f"q = {q} is not prime")
    if q + 1 < S:
        raise ConstructionError(f"q too small: need q + 1 >= S = {S}, got q = {q}")
    ctx = L.ctx
    al = L.elems
    a1 = al[0]
    line = hyperplane_of((1, 0, 0), q)  # the line x_0 = 0
    pts = enumerate_points(q, 3)
    on = [P for P in pts if P.rep[0] == 0]
    off = [P for P in pts if P.rep[0] != 0]
    phi_l = ctx.zero
    for (i, ip), b in sorted(diff.B.items()):
        phi_l = phi_l + (a1 - al[ip]) * b
    support = [(zero_subspace(q, 3), a1), (line, phi_l)]
    triples = []  # (p, qpt, line, i, i')
    k_on, k_off = iter(on), iter(off)
    for (i, ip), b in sorted(diff.B.items()):
        for _ in range(b):
            p, qp = next(k_on), next(k_off)
            ln = span([p.rep, qp.rep], q, 3)
            support.append((p.subspace, al[ip] - a1))
            support.append((ln, al[i] - al[ip]))
            triples.append((p, qp, ln, i, ip))
    phi = PhiAssignment(q, 3, 2, ctx, tuple(support))
    rep = grassmann_construct(phi, L, cert, name="threehalves")
    rep.case_counts = _threehalves_cases(rep, line, triples, L)
    rep.choices = {
        "S": S,
        "differences": [[i, ip, b] for (i, ip), b in sorted(diff.B.items())],
        "line": line.to_json(),
        "p_points": [list(t[0].rep) for t in triples],
        "q_points": [list(t[1].rep) for t in triples],
    }
    if rep.lam != 0:
        raise InvariantViolation("threehalves construction produced a nonzero diagonal")
    return rep


def _threehalves_cases(rep, line, triples, L) -> dict:
    """Recompute each hyperplane value from the four-case analysis and compare."""
    al = L.elems
    counts = Counter({f"case{i}": 0 for i in range(1, 5)})
    for z, val in rep.point_values.items():
        H = hyperplane_of(z, line.q)
        if H == line:
            case, expect = "case2", al[0]
        else:
            hit = [t for t in triples if H.contains(t[0].subspace)]
            if not hit:
                case, expect = "case1", al[0]
            else:
                if len(hit) > 1:
                    raise InvariantViolation(f"hyperplane {H} meets the line in two p-points")
                p, qp, ln, i, ip = hit[0]
                if H == ln:
                    case, expect = "case3", al[i]
                else:
                    case, expect = "case4", al[ip]
        if val != expect:
            raise InvariantViolation(f"{case} at hyperplane {z}: got {L.ctx.fmt(val)}")
        counts[case] += 1
    return dict(sorted(counts.items()))


def _random_flat(rng, q: int, d: int, dim: int) -> Subspace:
    while True:
        rows = [tuple(int(x) for x in rng.integers(0, q, size=d)) for _ in range(dim)]
        W = span(rows, q, d)
        if W.dim == dim:
            return W


def construct_fivethirds(L: LSet, A, q: int, seed: int = 0, cert: str = "exact",
                         max_tries: int = 20000) -> ConstructionReport:
    """Size q^5 construction from a relation with at most two negative coefficients.

    Positions are reordered to (free, negative, positives...). The f-flats are
    drawn from ``numpy.random.default_rng(seed)`` until the independence
    conditions hold.
    """
    rel = _relation_for(L, A)
    neg = rel.negatives
    zero = [i for i, a in enumerate(rel.A) if a == 0]
    pos = [i for i, a in enumerate(rel.A) if a > 0]
    if not neg or len(neg) > 2:
        raise ConstructionError(f"relation {rel.A} needs one or two negative coefficients")
    # position 1 gets a negative coefficient; position 0 takes whatever remains
    if len(neg) == 2:
        first, second = neg[0], neg[1]
    else:
        second = neg[0]
        rest = zero + pos
        first = rest[0] if not zero else zero[0]
    perm = [first, second] + [i for i in range(L.k) if i not in (first, second)]
    coeffs = [rel.A[i] for i in perm]
    if any(c < 0 for c in coeffs[2:]):
        raise ConstructionError("too many negative coefficients for this construction")
    ctx = L.ctx
    al = [L.elems[i] for i in perm]
    B = -coeffs[1]
    # B + 1 line/point pairs: with only B of them the diagonal sum is alpha_2 - alpha_1
    nl = B + 1
    fcount = [(i, coeffs[i]) for i in range(2, L.k) if coeffs[i] > 0]
    if not sympy.isprime(q):
        raise ConstructionError(f"q = {q} is not prime")
    if nl > q + 1:
        raise ConstructionError(f"need B + 1 <= q + 1 distinct hyperplanes through V (B={B}, q={q})")
    d = 5
    V = span([(0, 0, 1, 0, 0), (0, 0, 0, 1, 0), (0, 0, 0, 0, 1)], q, d)
    # lines inside V, lex order of their canonical bases
    vpts = V.points()
    lines_v = sorted({span([a, b], q, d) for a, b in itertools.combinations(vpts, 2)},
                     key=lambda W: W.basis)
    lines = lines_v[:nl]
    # points outside V with pairwise distinct hyperplanes V + p
    ppts = []
    seen = set()
    for P in enumerate_points(q, d):
        if V.contains_vector(P.rep):
            continue
        H = V.join(P.subspace)
        if H in seen:
            continue
        seen.add(H)
        ppts.append(P)
        if len(ppts) == nl:
            break
    rng = np.random.default_rng(seed)
    flats = []
    tries = 0
    for i, cnt in fcount:
        for _ in range(cnt):
            while True:
                tries += 1
                if tries > max_tries:
                    raise ConstructionError(
                        f"sampling budget exhausted choosing f-flats (q={q}, seed={seed})"
                    )
                f = _random_flat(rng, q, d, 3)
                if all(f.join(l).dim == d for l in lines) \
                        and all(not f.contains(p.subspace) for p in ppts) \
                        and all(f.join(g).dim == d for g, _ in flats):
                    flats.append((f, i))
                    break
    _check_independence(lines, ppts, [f for f, _ in flats], d)
    a1, a2 = al[0], al[1]
    support = [(zero_subspace(q, d), a1), (V, (a2 - a1) * (1 - nl))]
    for l, p in zip(lines, ppts):
        support.append((l, a2 - a1))
        support.append((l.join(p.subspace), a1 - a2))
    for f, i in flats:
        support.append((f, al[i] - a1))
    phi = PhiAssignment(q, d, 3, ctx, tuple(support))
    rep = grassmann_construct(phi, L, cert, name="fivethirds")
    rep.seed = seed
    rep.case_counts = _fivethirds_cases(rep, lines, ppts, flats, al, q)
    rep.choices = {
        "order": [ctx.fmt(a) for a in al], "relation": coeffs, "B": B, "pairs": nl,
        "V": V.to_json(),
        "lines": [l.to_json() for l in lines],
        "p_points": [list(p.rep) for p in ppts],
        "f_flats": [f.to_json() for f, _ in flats],
        "samples": tries,
    }
    if rep.lam != 0:
        raise InvariantViolation("fivethirds construction produced a nonzero diagonal")
    return rep


def _check_independence(lines, ppts, flats, d) -> None:
    for f in flats:
        for l in lines:
            if f.join(l).dim != d:
                raise InvariantViolation("an f-flat and an l-line fail to span")
        for p in ppts:
            if f.contains(p.subspace):
                raise InvariantViolation("an f-flat contains a p-point")
    for f, g in itertools.combinations(flats, 2):
        if f.join(g).dim != d:
            raise InvariantViolation("two f-flats fail to span")


def _fivethirds_cases(rep, lines, ppts, flats, al, q) -> dict:
    counts = Counter({f"case{i}": 0 for i in range(1, 7)})
    ctx = rep.matrix.ctx
    for z, val in rep.point_values.items():
        H = hyperplane_of(z, q)
        fin = [i for f, i in flats if H.contains(f)]
        lin = [j for j, l in enumerate(lines) if H.contains(l)]
        pin = [j for j, p in enumerate(ppts) if H.contains(p.subspace)]
        if fin:
            if len(fin) > 1 or lin:
                raise InvariantViolation(f"hyperplane {z} holds an f-flat and more")
            case, expect = "case1", al[fin[0]]
        elif not lin:
            case, expect = "case2", al[0]
        elif len(lin) >= 2:
            if pin:
                case, expect = "case3", al[0]
            else:
                case, expect = "case4", al[1]
        else:
            j = lin[0]
            if j in pin:
                case, expect = "case6", al[0]
            else:
                case, expect = "case5", al[1]
        if val != expect:
            raise InvariantViolation(f"{case} at hyperplane {z}: got {ctx.fmt(val)}")
        counts[case] += 1
    return dict(sorted(counts.items()))


def construct_xy3(x, y, q: int, ctx="QQ", cert: str = "exact") -> ConstructionReport:
    """{x+y, 3x, 3y}-matrix of size q^4 and rank <= 1 + 4q + 6q^2."""
    ctx = field_make(ctx)
    x, y = ctx(x), ctx(y)
    named = {"x+y": x + y, "3x": 3 * x, "3y": 3 * y}
    for a, b in itertools.combinations(named, 2):
        if named[a] == named[b]:
            raise ConstructionError(f"L degenerate: {b} = {a}")
    for nm, v in named.items():
        if not v:
            raise ConstructionError(f"L degenerate: {nm} = 0")
    if not sympy.isprime(q):
        raise ConstructionError(f"q = {q} is not prime")
    L = LSet(ctx, (x + y, 3 * x, 3 * y))
    d = 4
    # four spanning points: greedily the lex-first independent ones
    chosen = []
    for P in enumerate_points(q, d):
        if span([c.rep for c in chosen] + [P.rep], q, d).dim == len(chosen) + 1:
            chosen.append(P)
            if len(chosen) == 4:
                break
    p = [c.rep for c in chosen]
    u, w = 2 * x - y, 2 * y - x
    s1, s2 = x - 2 * y, y - 2 * x
    support = [
        (zero_subspace(q, d), x + y),
        (span([p[0]], q, d), u), (span([p[2]], q, d), u),
        (span([p[1]], q, d), w), (span([p[3]], q, d), w),
        (span([p[0], p[1]], q, d), s1), (span([p[1], p[3]], q, d), s1),
        (span([p[2], p[3]], q, d), s1),
        (span([p[1], p[2]], q, d), s2), (span([p[0], p[2]], q, d), s2),
        (span([p[0], p[3]], q, d), s2),
    ]
    phi = PhiAssignment(q, d, 2, ctx, tuple(support))
    rep = grassmann_construct(phi, L, cert, name="xy3")
    rep.choices = {"points": [list(v) for v in p], "x": ctx.fmt(x), "y": ctx.fmt(y)}
    if rep.lam != 0:
        raise InvariantViolation("xy3 construction produced a nonzero diagonal")
    return rep


def construct_subset_incidence(r: int, k: int, cert: str = "exact") -> ConstructionReport:
    """kJ - A^T A for the r x C(r,k) incidence matrix A of k-subsets (lex order)."""
    if not 1 <= k < r:
        raise ConstructionError(f"need 1 <= k < r, got r={r}, k={k}")
    subsets = [frozenset(c) for c in itertools.combinations(range(r), k)]
    n = len(subsets)
    ctx = field_make("QQ")
    ents = [k - len(a & b) for a in subsets for b in subsets]
    M = ExactMatrix(ctx, n, n, tuple(ents))
    L = LSet(ctx, tuple(range(1, k + 1)))
    rep = ConstructionReport(M, L, ctx.zero, r + 1, name="incidence")
    rep.choices = {"r": r, "k": k}
    certify(rep, cert)
    rep.verify()
    return rep


# --------------------------------------------------------------------------
# composition and resizing
# --------------------------------------------------------------------------

def block_compose(M1: ExactMatrix, M2: ExactMatrix, alpha) -> ExactMatrix:
    """[[M1, alpha J], [alpha J, M2]]."""
    if M1.ctx != M2.ctx:
        raise MatrixError(f"field mismatch: {M1.ctx} vs {M2.ctx}")
    if not (M1.is_square and M2.is_square):
        raise MatrixError("block_compose needs square matrices")
    ctx = M1.ctx
    a = ctx(alpha)
    top = ExactMatrix.trusted(ctx, M1.rows, M2.cols, [a] * (M1.rows * M2.cols))
    bot = ExactMatrix.trusted(ctx, M2.rows, M1.cols, [a] * (M2.rows * M1.cols))
    return ExactMatrix.block([[M1, top], [bot, M2]])


_SIZES = {"square": 2, "threehalves": 3, "fivethirds": 5, "xy3": 4}


def _min_q(name: str, params: dict) -> int:
    if name == "square":
        rel = _relation_for(params["L"], params["A"])
        neg = rel.negatives
        S = sum(a for i, a in enumerate(rel.A) if i not in neg[:1]) if neg else sum(rel.A[1:])
        return S + 1
    if name == "threehalves":
        S = relation_to_differences(_relation_for(params["L"], params["A"])).S
        return max(2, S - 1)
    if name == "fivethirds":
        rel = _relation_for(params["L"], params["A"])
        B = -min(rel.A)
        return max(2, B)
    return 2


def build(name: str, q: int, params: dict, cert: str = "exact") -> ConstructionReport:
    if name == "square":
        return construct_square(params["L"], params["A"], q, cert=cert)
    if name == "threehalves":
        return construct_threehalves(params["L"], params["A"], q, cert=cert)
    if name == "fivethirds":
        return construct_fivethirds(params["L"], params["A"], q, seed=params.get("seed", 0), cert=cert)
    if name == "xy3":
        return construct_xy3(params["x"], params["y"], q, params.get("ctx", "QQ"), cert=cert)
    raise ConstructionError(f"unknown construction {name!r}")


@dataclass
class Extended:
    matrix: ExactMatrix
    q: int
    full: ConstructionReport
    rank_sub: int | None = None
    rank_full: int | None = None


def extend_to_size(name: str, n: int, params: dict, check_rank: bool = True) -> Extended:
    """Smallest admissible prime q with size(q) >= n; return the leading n x n part."""
    if name not in _SIZES:
        raise ConstructionError(f"unknown construction {name!r}")
    if n < 1:
        raise ConstructionError("n must be positive")
    e = _SIZES[name]
    q = max(2, _min_q(name, params))
    if not sympy.isprime(q):
        q = sympy.nextprime(q)
    while q ** e < n:
        q = sympy.nextprime(q)
    full = build(name, int(q), params, cert="bound")
    sub = full.matrix if full.size == n else full.matrix.principal(n)
    ext = Extended(sub, int(q), full)
    if check_rank:
        ext.rank_sub = exact_rank(sub)
        ext.rank_full = ext.rank_sub if full.size == n else exact_rank(full.matrix)
        if ext.rank_sub > ext.rank_full:
            raise InvariantViolation("principal submatrix has larger rank than the full matrix")
        if ext.rank_full > full.rank_upper:
            raise InvariantViolation("construction rank exceeds its bound")
    return ext
