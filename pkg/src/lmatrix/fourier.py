"""Exact rank of translation-invariant matrices on F_q^d via characters.

If M[y, x] = g(x - y) for a function g on the group F_q^d, the characters
chi_a(z) = zeta^<a,z> diagonalize M, with eigenvalue
ghat(a) = sum_c S_c(a) zeta^c where S_c(a) = sum_{<a,z> = c} g(z).
Since 1 + zeta + ... + zeta^(q-1) = 0 is the only linear relation among the
powers of zeta over a field linearly disjoint from Q(zeta), ghat(a) = 0
exactly when all the S_c(a) coincide. The rank is the number of a with
ghat(a) != 0.

This is an independent route to the rank of every Grassmannian construction
and is used to cross-check elimination-based ranks.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import sympy

from .fields import FieldCtx


class FourierUnavailable(ValueError):
    pass


def _disjoint_from_cyclotomic(ctx: FieldCtx, q: int) -> bool:
    if q == 2 or ctx.kind == "rational":
        return True
    if ctx.kind != "numberfield":
        return False
    if ctx.degree == 1:
        return True
    if ctx.degree == 2:
        # Q(sqrt(D)) meets Q(zeta_q) only in Q(sqrt(q*)), q* = (-1)^((q-1)/2) q
        c0, c1, _ = ctx.modulus
        disc = c1 * c1 - 4 * c0
        qstar = q if q % 4 == 1 else -q
        return not _same_square_class(disc, qstar)
    # fields of degree coprime to q - 1 cannot contain a subfield of Q(zeta_q)
    return math.gcd(ctx.degree, q - 1) == 1


def _same_square_class(a: int, b: int) -> bool:
    prod = a * b
    if prod <= 0:
        return False
    r = math.isqrt(prod)
    return r * r == prod


def _int_coords(values, ctx: FieldCtx) -> np.ndarray:
    coords = [ctx.coords(v) for v in values]
    den = 1
    for c in coords:
        for x in c:
            x = Fraction(x)
            den = den * x.denominator // math.gcd(den, x.denominator)
    return np.array([[int(Fraction(x) * den) for x in c] for c in coords], dtype=object)


def translation_invariant_rank(g: dict, q: int, d: int, ctx: FieldCtx) -> int:
    """Rank of the matrix M[y, x] = g[x - y]; ``g`` maps every vector of F_q^d to a field element."""
    if not sympy.isprime(q):
        raise FourierUnavailable("q must be prime")
    if not _disjoint_from_cyclotomic(ctx, q):
        raise FourierUnavailable(f"{ctx} may meet the {q}-th cyclotomic field")
    vecs = list(itertools.product(range(q), repeat=d))
    G = _int_coords([g[v] for v in vecs], ctx)  # N x deg
    X = np.array(vecs, dtype=np.int64)
    dots = (X @ X.T) % q  # dots[a, z] = <a, z>
    rank = 0
    for a in range(len(vecs)):
        row = dots[a]
        sums = [G[row == c].sum(axis=0) for c in range(q)]
        first = sums[0]
        if any(not np.array_equal(first, s) for s in sums[1:]):
            rank += 1
    return rank


def group_function_from_points(point_values: dict, lam, q: int, d: int) -> dict:
    """Extend per-projective-point values to every vector (0 maps to the diagonal value)."""
    g = {}
    for v in itertools.product(range(q), repeat=d):
        if not any(v):
            g[v] = lam
            continue
        inv = pow(next(x for x in v if x), -1, q)
        g[v] = point_values[tuple((x * inv) % q for x in v)]
    return g
