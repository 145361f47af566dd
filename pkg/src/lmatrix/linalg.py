"""Exact rank computations.

* :func:`bareiss_rank` - fraction-free elimination on integer rows.
* :func:`rank_mod_p` / :func:`rref_mod_p` - numpy elimination over F_p.
* :func:`mat_rank` - exact rank over Q, F_p or Q[t]/(f).
* :func:`certified_rank` - fast exact rank for larger matrices: a modular rank
  gives the lower bound, a rational kernel basis (CRT + rational
  reconstruction, verified multi-modularly) gives the matching upper bound.

Number-field matrices are handled through the regular representation: every
entry a becomes the d x d rational matrix of multiplication by a, and
rank over Q of the blown-up matrix is d times the rank over the field.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from .fields import FieldCtx
from .matrix import ExactMatrix, MatrixError
from .polystr import parse_univariate

MAX_BAREISS_ENTRIES = 4_000_000


class MatrixTooLarge(MatrixError):
    pass


class InvariantViolation(AssertionError):
    """A mathematical guarantee failed to hold on a concrete instance."""


# --------------------------------------------------------------------------
# integer views
# --------------------------------------------------------------------------

def _mult_block(x, K: FieldCtx) -> list:
    """Rows of the d x d rational matrix of multiplication by x (column j = coords of x*t^j)."""
    d = K.degree
    cols = []
    basis = K.one
    t = K.gen()
    for _ in range(d):
        cols.append((x * basis).c)
        basis = basis * t
    return [[cols[j][i] for j in range(d)] for i in range(d)]


def _scale_row(row) -> list:
    den = 1
    for x in row:
        if isinstance(x, Fraction) and x.denominator != 1:
            den = den * x.denominator // math.gcd(den, x.denominator)
    if den == 1:
        return [int(x) for x in row]
    return [int(x * den) for x in row]


def integer_rows(M: ExactMatrix) -> tuple[list, int]:
    """Integer matrix with the same rank as ``M`` times a multiplier.

    Returns ``(rows, d)`` where rank_Q(rows) = d * rank(M). Rows are scaled by
    the lcm of their denominators, which does not change the rank.
    """
    ctx = M.ctx
    if ctx.kind == "prime":
        raise ValueError("integer_rows is for characteristic-zero matrices")
    if ctx.kind == "rational":
        return [_scale_row(M.row(i)) for i in range(M.rows)], 1
    d = ctx.degree
    cache: dict = {}
    out = []
    for i in range(M.rows):
        blocks = []
        for x in M.row(i):
            b = cache.get(x.c)
            if b is None:
                b = cache[x.c] = _mult_block(x, ctx)
            blocks.append(b)
        for r in range(d):
            out.append(_scale_row([v for b in blocks for v in b[r]]))
    return out, d


# --------------------------------------------------------------------------
# Bareiss
# --------------------------------------------------------------------------

def bareiss_rank(rows) -> int:
    """Rank of an integer matrix given as a list of rows (fraction-free).

    Pivot rule: the first row (top-down) with a nonzero entry in the current
    column. All-zero rows are dropped as they appear.
    """
    A = [list(r) for r in rows if any(r)]
    rank = 0
    prev = 1
    while A and A[0]:
        piv = None
        for i, r in enumerate(A):
            if r[0]:
                piv = i
                break
        if piv is None:
            A = [r[1:] for r in A]
            continue
        pr = A.pop(piv)
        p = pr[0]
        tail = pr[1:]
        nxt = []
        for r in A:
            a = r[0]
            if a:
                nr = [(p * x - a * y) // prev for x, y in zip(r[1:], tail)]
            else:
                nr = [(p * x) // prev for x in r[1:]]
            if any(nr):
                nxt.append(nr)
        A = nxt
        prev = p
        rank += 1
    return rank


def bareiss_det(rows) -> int:
    """Determinant of a square integer matrix (fraction-free)."""
    A = [list(r) for r in rows]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        p = A[k][k]
        for i in range(k + 1, n):
            a = A[i][k]
            Ai, Ak = A[i], A[k]
            for j in range(k + 1, n):
                Ai[j] = (p * Ai[j] - a * Ak[j]) // prev
        prev = p
    return sign * A[n - 1][n - 1]


# --------------------------------------------------------------------------
# mod p
# --------------------------------------------------------------------------

def _as_mod_array(rows, p: int) -> np.ndarray:
    if isinstance(rows, np.ndarray) and rows.dtype != object:
        return np.mod(rows.astype(np.int64), p)
    rows = list(rows)
    if not rows:
        return np.zeros((0, 0), dtype=np.int64)
    return np.array([[x % p for x in r] for r in rows], dtype=np.int64).reshape(len(rows), -1)


def rref_mod_p(rows, p: int) -> tuple[np.ndarray, list]:
    """Reduced row echelon form over F_p (p < 2^31); returns (R, pivot columns)."""
    if p >= 2 ** 31:
        raise ValueError("numpy elimination needs p < 2^31")
    A = _as_mod_array(rows, p).copy()
    m, n = A.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r] = (A[r] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            A[nzr] = (A[nzr] - np.outer(col[nzr], A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rank_mod_p(rows, p: int) -> int:
    """Rank over F_p of an integer matrix (forward elimination only)."""
    if p >= 2 ** 31:
        return _rank_mod_p_python(rows, p)
    A = _as_mod_array(rows, p).copy()
    if A.size == 0:
        return 0
    m, n = A.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r] = (A[r] * inv) % p
        below = A[r + 1:, c]
        nzr = np.nonzero(below)[0]
        if nzr.size:
            idx = nzr + r + 1
            A[idx] = (A[idx] - np.outer(A[idx, c], A[r])) % p
        r += 1
    return r


def _rank_mod_p_python(rows, p: int) -> int:
    A = [[x % p for x in r] for r in rows]
    rank = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        pr = [(x * inv) % p for x in A[rank]]
        A[rank] = pr
        for i in range(rank + 1, len(A)):
            a = A[i][c]
            if a:
                A[i] = [(x - a * y) % p for x, y in zip(A[i], pr)]
        rank += 1
    return rank


# --------------------------------------------------------------------------
# exact rank
# --------------------------------------------------------------------------

def mat_rank(M: ExactMatrix) -> int:
    """Exact rank: Bareiss over Q and number fields, Gaussian elimination over F_p."""
    if M.rows * M.cols > MAX_BAREISS_ENTRIES:
        raise MatrixTooLarge(
            f"{M.rows}x{M.cols} exceeds the exact-elimination limit; use rank_bounds_modular"
        )
    if M.rows == 0 or M.cols == 0:
        return 0
    if M.ctx.kind == "prime":
        return rank_mod_p([[x.v for x in M.row(i)] for i in range(M.rows)], M.ctx.p)
    rows, d = integer_rows(M)
    r = bareiss_rank(rows)
    if r % d:
        raise InvariantViolation("regular-representation rank not divisible by the degree")
    return r // d


def mat_det(M: ExactMatrix):
    if not M.is_square:
        raise MatrixError("determinant needs a square matrix")
    ctx = M.ctx
    if ctx.kind == "rational":
        rows = [M.row(i) for i in range(M.rows)]
        den = 1
        for r in rows:
            for x in r:
                den = den * x.denominator // math.gcd(den, x.denominator)
        ints = [[int(x * den) for x in r] for r in rows]
        return Fraction(bareiss_det(ints), den ** M.rows)
    # generic Gaussian elimination in the field
    A = M.to_rows()
    n = M.rows
    det = ctx.one
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c]), None)
        if piv is None:
            return ctx.zero
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        p = A[c][c]
        det = det * p
        inv = ctx.one / p
        for i in range(c + 1, n):
            a = A[i][c]
            if a:
                f = a * inv
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return det


# --------------------------------------------------------------------------
# modular bounds
# --------------------------------------------------------------------------

@dataclass
class RankBounds:
    lower: int
    upper: int
    per_prime: dict = field(default_factory=dict)
    notices: list = field(default_factory=list)
    exact: int | None = None


def _value_blocks_mod(M: ExactMatrix, p: int):
    """(index array, blocks mod p): entry (i, j) of the blown-up matrix is blocks[index[i, j]]."""
    ctx = M.ctx
    ids: dict = {}
    index = np.fromiter((ids.setdefault(x, len(ids)) for x in M.entries),
                        dtype=np.int64, count=M.rows * M.cols).reshape(M.rows, M.cols)
    d = ctx.degree
    blocks = np.zeros((len(ids), d, d), dtype=np.int64)
    for x, k in ids.items():
        b = _mult_block(x, ctx) if ctx.kind == "numberfield" else [[x]]
        for r in range(d):
            for c in range(d):
                v = Fraction(b[r][c])
                if v.denominator % p == 0:
                    return None
                blocks[k, r, c] = v.numerator * pow(v.denominator, -1, p) % p
    return index, blocks


def _mod_view(index, blocks, rows=slice(None)) -> np.ndarray:
    sub = blocks[index[rows]]  # (m, n, d, d)
    m, n, d, _ = sub.shape
    return sub.transpose(0, 2, 1, 3).reshape(m * d, n * d)


def rank_bounds_modular(M: ExactMatrix, primes, exact: bool = False,
                        exact_limit: int = 10_000, sketch_width: int | None = None,
                        seed: int = 0) -> RankBounds:
    """Lower bound max_p rank(M mod p); upper bound exact rank if ``exact`` and small enough.

    With ``sketch_width`` the rank of (M mod p) R for a random R with that
    many columns (times the field degree) is used; it never exceeds rank(M mod p),
    so the result is still a lower bound.
    """
    ctx = M.ctx
    if ctx.kind == "prime":
        raise ValueError("modular bounds need a characteristic-zero matrix")
    d = ctx.degree
    lower = 0
    res = RankBounds(0, min(M.rows, M.cols))
    rng = np.random.default_rng(seed)
    for p in primes:
        if not sympy.isprime(p):
            raise ValueError(f"{p} is not prime")
        if p >= 2 ** 20:
            raise ValueError("modular bounds use primes below 2^20")
        view = _value_blocks_mod(M, p)
        if view is None:
            note = f"prime {p} divides a denominator; skipped"
            res.notices.append(note)
            warnings.warn(note, stacklevel=2)
            continue
        index, blocks = view
        ncols = M.cols * d
        if sketch_width is not None and sketch_width * d < ncols:
            w = sketch_width * d
            # float matmul is exact while every partial sum stays below 2^53
            dt = np.float64 if p * p * ncols < 2 ** 52 else np.int64
            R = rng.integers(0, p, size=(ncols, w)).astype(dt)
            out = np.empty((M.rows * d, w), dtype=np.int64)
            step = max(1, 2_000_000 // max(1, ncols * d * d))
            for s in range(0, M.rows, step):
                A = _mod_view(index, blocks, slice(s, s + step)).astype(dt)
                out[s * d:(s + step) * d] = np.mod(A @ R, p).astype(np.int64)
            rp = rank_mod_p(out, p) if out.size else 0
        else:
            rp = rank_mod_p(_mod_view(index, blocks), p) if M.rows else 0
        # over a number field a drop of the blown-up rank only bounds from below
        rp = -(-rp // d)
        res.per_prime[p] = rp
        lower = max(lower, rp)
    res.lower = lower
    if exact and M.rows * M.cols <= exact_limit:
        res.exact = mat_rank(M)
        res.upper = res.exact
    return res


# --------------------------------------------------------------------------
# certified rank at scale
# --------------------------------------------------------------------------

_BIG_PRIMES: list = []


def big_primes(count: int) -> list:
    """Primes just below 2^31, in decreasing order."""
    p = _BIG_PRIMES[-1] if _BIG_PRIMES else 2 ** 31
    while len(_BIG_PRIMES) < count:
        p = sympy.prevprime(p)
        _BIG_PRIMES.append(p)
    return _BIG_PRIMES[:count]


def rational_reconstruct(a: int, m: int):
    """Fraction n/d with n = a*d (mod m), |n|, d <= sqrt(m/2); None if none exists."""
    a %= m
    bound = math.isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _verify_zero_product(A: list, K: list) -> bool:
    """Check A @ K == 0 exactly, multi-modularly with a rigorous size bound.

    A has small integer entries; K is a list of integer columns.
    """
    if not K:
        return True
    rowmax = max((sum(abs(x) for x in r) for r in A), default=0)
    kmax = max((abs(x) for col in K for x in col), default=0)
    bound = rowmax * kmax
    covered = 1
    p = 2 ** 20
    n = len(A[0])
    # chunk the inner dimension so int64 sums cannot overflow
    chunk = max(1, (2 ** 62) // (p * p))
    while covered <= 2 * bound:
        p = int(sympy.prevprime(p))
        Ap = np.array([[x % p for x in r] for r in A], dtype=np.int64)
        Kp = np.array([[x % p for x in col] for col in K], dtype=np.int64).T
        prod = np.zeros((Ap.shape[0], Kp.shape[1]), dtype=np.int64)
        for s in range(0, n, chunk):
            prod = (prod + Ap[:, s:s + chunk] @ Kp[s:s + chunk]) % p
        if prod.any():
            return False
        covered *= p
    return True


@dataclass
class RankCertificate:
    rank: int | None
    lower: int
    upper: int
    method: str
    primes_used: int = 0


def _certify_integer_rank(A: list, max_primes: int = 400) -> RankCertificate:
    m = len(A)
    n = len(A[0]) if A else 0
    if m == 0 or n == 0:
        return RankCertificate(0, 0, 0, "trivial")
    primes = big_primes(max_primes)
    # pick a base prime of maximal rank among the first three
    best = None
    for p in primes[:3]:
        R, piv = rref_mod_p(A, p)
        if best is None or len(piv) > len(best[1]):
            best = (p, piv)
    lower = len(best[1])
    if lower == min(m, n):
        return RankCertificate(lower, lower, lower, "modular-full", 1)
    piv = best[1]
    crt = None  # per free column, per pivot row: CRT residue
    modulus = 1
    last = None
    used = 0
    step = 2
    for p in primes:
        R, piv_p = rref_mod_p(A, p)
        used += 1
        if len(piv_p) > len(piv):
            # the earlier primes were unlucky: start over from this one
            piv, crt, last, lower = piv_p, None, None, len(piv_p)
        elif piv_p != piv:
            continue
        pivset = set(piv)
        free = [c for c in range(n) if c not in pivset]
        r = len(piv)
        vals = [[int(-R[i, f]) % p for i in range(r)] for f in free]
        if crt is None:
            crt, modulus = vals, p
        else:
            inv = pow(modulus, -1, p)
            crt = [[c + modulus * (((v - c) * inv) % p) for c, v in zip(ccol, vcol)]
                   for ccol, vcol in zip(crt, vals)]
            modulus *= p
        if used < step:
            continue
        step = int(step * 1.5) + 1
        recon = _reconstruct_all(crt, modulus)
        if recon is None:
            continue
        if recon == last:
            K = []
            for fi, col in zip(free, recon):
                vec = [Fraction(0)] * n
                vec[fi] = Fraction(1)
                for i, pc in enumerate(piv):
                    vec[pc] = col[i]
                K.append(_scale_row(vec))
            if _verify_zero_product(A, K):
                return RankCertificate(r, r, r, "modular-kernel", used)
        last = recon
    return RankCertificate(None, lower, min(m, n), "modular-lower-only", used)


def _reconstruct_all(crt, modulus):
    out = []
    for col in crt:
        rc = []
        for x in col:
            fr = rational_reconstruct(x, modulus)
            if fr is None:
                return None
            rc.append(fr)
        out.append(rc)
    return out


def certified_rank(M: ExactMatrix, bareiss_limit: int = 320 * 320, max_primes: int = 400) -> RankCertificate:
    """Exact rank with a certificate; falls back to lower bound only if reconstruction fails."""
    if M.rows == 0 or M.cols == 0:
        return RankCertificate(0, 0, 0, "trivial")
    if M.ctx.kind == "prime":
        r = mat_rank(M)
        return RankCertificate(r, r, r, "gauss-mod-p")
    rows, d = integer_rows(M)
    if len(rows) * len(rows[0]) <= bareiss_limit:
        r = bareiss_rank(rows) // d
        return RankCertificate(r, r, r, "bareiss")
    cert = _certify_integer_rank(rows, max_primes)
    if cert.rank is not None:
        if cert.rank % d:
            raise InvariantViolation("regular-representation rank not divisible by the degree")
        return RankCertificate(cert.rank // d, cert.rank // d, cert.rank // d, cert.method, cert.primes_used)
    return RankCertificate(None, -(-cert.lower // d), min(M.rows, M.cols), cert.method, cert.primes_used)


def exact_rank(M: ExactMatrix) -> int:
    """Exact rank, using the certified modular route for large matrices when possible."""
    cert = certified_rank(M)
    if cert.rank is not None:
        return cert.rank
    return mat_rank(M)


# --------------------------------------------------------------------------
# entrywise polynomials
# --------------------------------------------------------------------------

def _poly_coeffs(f, ctx: FieldCtx) -> list:
    if isinstance(f, str):
        coeffs = parse_univariate(f)
    else:
        coeffs = list(f)
    out = [ctx(c) for c in coeffs]
    while len(out) > 1 and not out[-1]:
        out.pop()
    return out


def poly_eval(coeffs, x):
    acc = coeffs[-1] if coeffs else 0
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def uppbound_dense(rank: int, deg: int) -> int:
    """C(rank + deg, deg): bound on rank f[M] for deg f = deg."""
    return math.comb(rank + deg, deg)


def uppbound_sparse(rank: int, degrees) -> int:
    """Sum of C(rank + d - 1, d) over the degrees d of the terms of f."""
    total = 0
    for d in set(degrees):
        total += 1 if d == 0 else math.comb(rank + d - 1, d)
    return total


@dataclass
class EntrywiseReport:
    matrix: ExactMatrix
    rank_before: int
    rank_after: int
    dense_bound: int
    sparse_bound: int


def entrywise_apply(f, M: ExactMatrix, verify: bool = False):
    """Apply the polynomial ``f`` (coefficients low-first, or a string) to every entry.

    With ``verify=True`` both rank bounds are checked and an
    :class:`EntrywiseReport` is returned instead of the bare matrix.
    """
    coeffs = _poly_coeffs(f, M.ctx)
    out = ExactMatrix.trusted(M.ctx, M.rows, M.cols, [poly_eval(coeffs, x) for x in M.entries])
    if not verify:
        return out
    r0 = exact_rank(M)
    r1 = exact_rank(out)
    deg = len(coeffs) - 1
    degrees = [i for i, c in enumerate(coeffs) if c]
    dense = uppbound_dense(r0, deg)
    sparse = uppbound_sparse(r0, degrees)
    if r1 > dense or r1 > sparse:
        raise InvariantViolation(
            f"rank f[M] = {r1} exceeds bound (dense {dense}, sparse {sparse}) with rank M = {r0}"
        )
    return EntrywiseReport(out, r0, r1, dense, sparse)


# --------------------------------------------------------------------------
# spectral helpers
# --------------------------------------------------------------------------

def eigen_multiplicity(M: ExactMatrix, lam) -> int:
    """Geometric multiplicity n - rank(M - lam*I)."""
    if not M.is_square:
        raise MatrixError("eigen_multiplicity needs a square matrix")
    return M.rows - exact_rank(M.shift_diagonal(lam))


def rank_with_ones(M: ExactMatrix) -> int:
    """rank of (M | 1)."""
    if not M.is_square:
        raise MatrixError("rank_with_ones needs a square matrix")
    return exact_rank(M.augment_ones())


__all__ = [
    "MatrixTooLarge", "InvariantViolation", "bareiss_rank", "bareiss_det",
    "rank_mod_p", "rref_mod_p", "mat_rank", "mat_det", "rank_bounds_modular",
    "certified_rank", "exact_rank", "entrywise_apply", "uppbound_dense",
    "uppbound_sparse", "eigen_multiplicity", "rank_with_ones", "integer_rows",
    "rational_reconstruct", "RankBounds", "RankCertificate",
]
