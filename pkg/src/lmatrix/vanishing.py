"""Sparse multivariate polynomials, Hasse derivatives and orders of vanishing.

Coefficients are Python ints or Fractions by default; any field element from
:mod:`lmatrix.fields` works too, which is how characteristic-p behaviour is
tested. The Hasse derivative P^(i) is the coefficient of z^i in P(x + z),
which needs only binomial coefficients and therefore makes sense in every
characteristic.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .fields import FieldCtx, field_make
from .linalg import bareiss_det, exact_rank
from .matrix import ExactMatrix
from .polystr import format_monomial, format_multivariate, parse_multivariate

INFINITE = math.inf
MAX_PATTERN = 10


class VanishingError(ValueError):
    pass


class MultiPoly:
    """Polynomial in x1..xk stored as {exponent tuple: nonzero coefficient}."""

    __slots__ = ("k", "terms")

    def __init__(self, k: int, terms: dict | None = None):
        if k < 1:
            raise VanishingError("need at least one variable")
        self.k = k
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != k or any(x < 0 for x in e):
                raise VanishingError(f"bad exponent vector {e} for {k} variables")
            if c:
                clean[e] = clean.get(e, 0) + c
                if not clean[e]:
                    del clean[e]
        self.terms = clean

    # constructors ------------------------------------------------------------
    @classmethod
    def parse(cls, text: str, k: int | None = None) -> "MultiPoly":
        nv, terms = parse_multivariate(text, k)
        terms = {e: (int(c) if c.denominator == 1 else c) for e, c in terms.items()}
        return cls(nv, terms)

    @classmethod
    def variable(cls, k: int, i: int) -> "MultiPoly":
        """x_i, 1-based."""
        e = [0] * k
        e[i - 1] = 1
        return cls(k, {tuple(e): 1})

    @classmethod
    def constant(cls, k: int, c) -> "MultiPoly":
        return cls(k, {(0,) * k: c})

    # basic properties ----------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def is_integral(self) -> bool:
        return all(isinstance(c, int) or (isinstance(c, Fraction) and c.denominator == 1)
                   for c in self.terms.values())

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.k == other.k and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.k, frozenset(self.terms.items())))

    def __repr__(self):
        return f"MultiPoly({self.k}, {self})"

    def __str__(self):
        if all(isinstance(c, (int, Fraction)) for c in self.terms.values()):
            return format_multivariate({e: Fraction(c) for e, c in self.terms.items()})
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0]))):
            mono = format_monomial(e)
            parts.append(f"({c})" if not mono else f"({c})*{mono}")
        return "+".join(parts) or "0"

    # arithmetic -----------------------------------------------------------------
    def _same(self, other: "MultiPoly"):
        if self.k != other.k:
            raise VanishingError(f"variable count mismatch: {self.k} vs {other.k}")

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.k, other)
        self._same(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return MultiPoly(self.k, t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.k, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return MultiPoly(self.k, {e: c * other for e, c in self.terms.items()})
        self._same(other)
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return MultiPoly(self.k, t)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = MultiPoly.constant(self.k, 1)
        for _ in range(n):
            out = out * self
        return out

    def over(self, ctx) -> "MultiPoly":
        """Coefficients mapped into ``ctx`` (e.g. reduction mod p)."""
        ctx = field_make(ctx)
        return MultiPoly(self.k, {e: ctx(c) for e, c in self.terms.items()})

    # evaluation -----------------------------------------------------------------
    def evaluate(self, point, ctx: FieldCtx | None = None):
        if len(point) != self.k:
            raise VanishingError(f"point has {len(point)} coordinates, need {self.k}")
        if ctx is not None:
            point = [ctx(x) for x in point]
            total = ctx.zero
        else:
            total = 0
        for e, c in self.terms.items():
            v = c if ctx is None else ctx(c)
            for x, p in zip(point, e):
                if p:
                    v = v * x ** p
            total = total + v
        return total

    __call__ = evaluate

    def shift(self, point, ctx: FieldCtx | None = None) -> "MultiPoly":
        """P(x + point)."""
        if ctx is not None:
            point = [ctx(x) for x in point]
        t: dict = {}
        for e, c in self.terms.items():
            c = c if ctx is None else ctx(c)
            # expand prod_t (x_t + a_t)^{e_t}
            for js in itertools.product(*[range(p + 1) for p in e]):
                coef = c
                for p, j, a in zip(e, js, point):
                    if p - j:
                        coef = coef * (math.comb(p, j) * a ** (p - j))
                    else:
                        coef = coef * math.comb(p, j)
                    if not coef:
                        break
                if coef:
                    t[js] = t.get(js, 0) + coef
        return MultiPoly(self.k, t)


def hasse_derivative(P: MultiPoly, i) -> MultiPoly:
    """Coefficient of z^i in P(x + z): sum_e c_e prod_t C(e_t, i_t) x^(e - i)."""
    i = tuple(int(x) for x in i)
    if len(i) != P.k or any(x < 0 for x in i):
        raise VanishingError(f"bad multi-index {i}")
    t = {}
    for e, c in P.terms.items():
        if all(a >= b for a, b in zip(e, i)):
            coef = c
            for a, b in zip(e, i):
                coef = coef * math.comb(a, b)
            t[tuple(a - b for a, b in zip(e, i))] = coef
    return MultiPoly(P.k, t)


def hasse_constant(i, j) -> int:
    """c_{i,j} with (P^(i))^(j) = c_{i,j} P^(i+j)."""
    out = 1
    for a, b in zip(i, j):
        out *= math.comb(a + b, a)
    return out


def vanishing_order(P: MultiPoly, point, ctx=None):
    """Smallest total degree in P(x + point); INFINITE for the zero polynomial."""
    ctx = field_make(ctx) if ctx is not None else None
    S = P.shift(point, ctx)
    if not S:
        return INFINITE
    return min(sum(e) for e in S.terms)


# --------------------------------------------------------------------------
# symbolic determinants of label patterns
# --------------------------------------------------------------------------

def _pattern_labels(pattern) -> tuple[int, list]:
    n = len(pattern)
    if n == 0:
        raise VanishingError("empty pattern")
    k = 0
    for i, row in enumerate(pattern):
        if len(row) != n:
            raise VanishingError("pattern must be square")
        for j, lab in enumerate(row):
            if i == j:
                continue
            if not isinstance(lab, int) or lab < 1:
                raise VanishingError(f"label at ({i},{j}) must be a positive int, got {lab!r}")
            k = max(k, lab)
    return n, k


def _det_cofactor(pattern, k: int) -> MultiPoly:
    n = len(pattern)
    xs = [MultiPoly.variable(k, i) for i in range(1, k + 1)]
    zero = MultiPoly(k)

    def entry(i, j):
        return zero if i == j else xs[pattern[i][j] - 1]

    def det(rows, cols):
        if len(rows) == 1:
            return entry(rows[0], cols[0])
        total = zero
        r0 = rows[0]
        for idx, c in enumerate(cols):
            if r0 == c:
                continue
            minor = det(rows[1:], cols[:idx] + cols[idx + 1:])
            term = entry(r0, c) * minor
            total = total + term if idx % 2 == 0 else total - term
        return total

    return det(list(range(n)), list(range(n)))


def _newton_interpolate(xs, ys) -> list:
    """Coefficients (low first) of the polynomial through (xs, ys); exact over Q."""
    n = len(xs)
    coef = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    out = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # out = out * (x - xs[i]) + coef[i]
        nxt = [Fraction(0)] * n
        for d in range(n - 1):
            nxt[d + 1] += out[d]
        for d in range(n):
            nxt[d] -= out[d] * xs[i]
        nxt[0] += coef[i]
        out = nxt
    return out


def pattern_det(pattern, k: int | None = None, cross_check: bool = True) -> MultiPoly:
    """det of the zero-diagonal matrix with x_label off the diagonal, as a MultiPoly.

    Evaluates at integer points on the curve (1, t, t^B, t^(B^2), ...) with
    B = n + 1, which separates all monomials of degree n, and interpolates
    in t. For n <= 6 the result is compared with cofactor expansion.
    """
    n, kk = _pattern_labels(pattern)
    k = max(k or 1, kk)
    if n > MAX_PATTERN:
        raise VanishingError(f"pattern of size {n} is too large (limit {MAX_PATTERN})")
    if k == 1:
        # x1^n det(J - I)
        P = MultiPoly(1, {(n,): (-1) ** (n - 1) * (n - 1)})
    else:
        B = n + 1
        top = n * B ** (k - 2)
        xs = list(range(top + 1))
        ys = []
        for t in xs:
            vals = [1] + [t ** (B ** (i - 2)) for i in range(2, k + 1)]
            rows = [[0 if i == j else vals[pattern[i][j] - 1] for j in range(n)] for i in range(n)]
            ys.append(bareiss_det(rows))
        coeffs = _newton_interpolate(xs, ys)
        terms = {}
        for E, c in enumerate(coeffs):
            if not c:
                continue
            if c.denominator != 1:
                raise VanishingError("interpolation produced a non-integer coefficient")
            e, rest = [], E
            for _ in range(k - 1):
                e.append(rest % B)
                rest //= B
            if sum(e) > n:
                raise VanishingError("interpolation produced an impossible monomial")
            terms[(n - sum(e),) + tuple(e)] = int(c)
        P = MultiPoly(k, terms)
    if cross_check and n <= 6:
        Q = _det_cofactor(pattern, k)
        if Q != P:
            raise AssertionError("interpolated determinant disagrees with cofactor expansion")
    return P


# --------------------------------------------------------------------------
# witness polynomial from a low-rank L-matrix
# --------------------------------------------------------------------------

@dataclass
class Witness:
    P: MultiPoly
    r: int
    v: int
    order: object
    point: tuple
    labels: list


def labels_of(M: ExactMatrix, L) -> list:
    Ls = [M.ctx(a) for a in L]
    out = []
    for i in range(M.rows):
        row = []
        for j in range(M.cols):
            if i == j:
                row.append(0)
                continue
            try:
                row.append(Ls.index(M[i, j]) + 1)
            except ValueError:
                raise VanishingError(f"entry ({i},{j}) is not in L") from None
        out.append(row)
    return out


def genupper_witness(M: ExactMatrix, L, v: int | None = None) -> Witness:
    """Homogeneous integer P with P(1,...,1) = 1 vanishing to order >= v at L.

    With rank(M) = r - 1 and size r + v, P = (-1)^(n-1) (P_n + x1 P_{n-1})
    where P_n, P_{n-1} are the label determinants of M and of its leading
    principal (n-1)-minor.
    """
    ctx = M.ctx
    if not M.is_square:
        raise VanishingError("square matrix required")
    n = M.rows
    if n > MAX_PATTERN:
        raise VanishingError(f"matrix of size {n} is too large (limit {MAX_PATTERN})")
    if n < 2:
        raise VanishingError("need size at least 2")
    if any(M[i, i] for i in range(n)):
        raise VanishingError("diagonal must be zero")
    labels = labels_of(M, L)
    k = len(L)
    r = exact_rank(M) + 1
    vmax = n - r
    if v is None:
        v = vmax
    if v < 0 or v > vmax:
        raise VanishingError(f"rank precondition fails: rank {r - 1}, size {n}, v {v}")
    Pn = pattern_det(labels, k)
    Pm = pattern_det([row[:n - 1] for row in labels[:n - 1]], k)
    P = (Pn + MultiPoly.variable(k, 1) * Pm) * ((-1) ** (n - 1))
    if P.evaluate([1] * k) != 1:
        raise AssertionError("witness is not normalized at (1,...,1)")
    if not P.is_homogeneous() or not P.is_integral():
        raise AssertionError("witness is not a homogeneous integer polynomial")
    point = tuple(ctx(a) for a in L)
    order = vanishing_order(P, point, ctx)
    if order < v:
        raise AssertionError(f"witness vanishes to order {order} < {v}")
    if v == 0:
        warnings.warn("v = 0: the witness is only normalized, no vanishing is claimed", stacklevel=2)
    return Witness(P, r, v, order, point, labels)
