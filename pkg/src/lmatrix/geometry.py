"""Points, flats and subspaces of F_q^d for prime q.

Vectors are tuples of ints in ``range(q)``. A subspace is stored by its
reduced row echelon basis, which makes equality and hashing canonical.
A projective point is a 1-dimensional subspace; its representative has first
nonzero coordinate 1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import sympy


class GeometryError(ValueError):
    pass


def _check_q(q: int) -> None:
    if not isinstance(q, int) or q < 2 or not sympy.isprime(q):
        raise GeometryError(f"q must be prime, got {q!r}")


def rref(vectors, q: int) -> tuple:
    """Nonzero rows of the reduced row echelon form over F_q."""
    A = [[x % q for x in v] for v in vectors]
    if not A:
        return ()
    n = len(A[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, q)
        A[r] = [(x * inv) % q for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                a = A[i][c]
                A[i] = [(x - a * y) % q for x, y in zip(A[i], A[r])]
        r += 1
        if r == len(A):
            break
    return tuple(tuple(row) for row in A[:r])


@dataclass(frozen=True)
class Subspace:
    q: int
    d: int
    basis: tuple = ()

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def projective_dim(self) -> int:
        return self.dim - 1

    def contains_vector(self, v) -> bool:
        v = tuple(x % self.q for x in v)
        if not any(v):
            return True
        return len(rref(self.basis + (v,), self.q)) == self.dim

    def contains(self, other: "Subspace") -> bool:
        return all(self.contains_vector(v) for v in other.basis)

    def join(self, other: "Subspace") -> "Subspace":
        return span(self.basis + other.basis, self.q, self.d)

    def meet_dim(self, other: "Subspace") -> int:
        return self.dim + other.dim - self.join(other).dim

    def vectors(self):
        """All q^dim vectors of the subspace."""
        for coeffs in itertools.product(range(self.q), repeat=self.dim):
            v = [0] * self.d
            for c, b in zip(coeffs, self.basis):
                if c:
                    for i, x in enumerate(b):
                        v[i] += c * x
            yield tuple(x % self.q for x in v)

    def points(self) -> list:
        """Projective points lying in this subspace, in lex order."""
        pts = [normalize(v, self.q) for v in self.vectors() if any(v)]
        return sorted(set(pts))

    def to_json(self) -> list:
        return [list(b) for b in self.basis]

    def __str__(self):
        if not self.basis:
            return "<0>"
        return "<" + ",".join("(" + ",".join(map(str, b)) + ")" for b in self.basis) + ">"


def span(vectors, q: int, d: int | None = None) -> Subspace:
    _check_q(q)
    vectors = [tuple(v) for v in vectors]
    if d is None:
        if not vectors:
            raise GeometryError("ambient dimension needed to span the empty set")
        d = len(vectors[0])
    for v in vectors:
        if len(v) != d:
            raise GeometryError(f"vector {v} does not lie in F_{q}^{d}")
    return Subspace(q, d, rref(vectors, q))


def zero_subspace(q: int, d: int) -> Subspace:
    _check_q(q)
    return Subspace(q, d, ())


def normalize(v, q: int) -> tuple:
    """Canonical representative of the projective point of ``v`` (first nonzero = 1)."""
    v = [x % q for x in v]
    for x in v:
        if x:
            inv = pow(x, -1, q)
            return tuple((y * inv) % q for y in v)
    raise GeometryError("the zero vector is not a projective point")


@dataclass(frozen=True, order=True)
class ProjPoint:
    q: int
    d: int
    rep: tuple

    def __post_init__(self):
        if normalize(self.rep, self.q) != tuple(self.rep):
            raise GeometryError(f"{self.rep} is not a canonical representative")

    @property
    def subspace(self) -> Subspace:
        return Subspace(self.q, self.d, (tuple(self.rep),))


@lru_cache(maxsize=64)
def _points(q: int, d: int) -> tuple:
    out = []
    for v in itertools.product(range(q), repeat=d):
        nz = next((x for x in v if x), 0)
        if nz == 1:
            out.append(ProjPoint(q, d, v))
    return tuple(out)


def enumerate_points(q: int, d: int) -> list:
    """All points of P^{d-1}(F_q), lex order of canonical representatives."""
    _check_q(q)
    if d < 1:
        raise GeometryError("d must be >= 1")
    return list(_points(q, d))


def all_vectors(q: int, d: int) -> list:
    """F_q^d in lexicographic order (this fixes matrix row/column order)."""
    return list(itertools.product(range(q), repeat=d))


def dot(u, v, q: int) -> int:
    return sum(a * b for a, b in zip(u, v)) % q


def is_orthogonal(W: Subspace, z) -> bool:
    """True iff every vector of W is orthogonal to z under the standard form."""
    z = tuple(x % W.q for x in z)
    if len(z) != W.d:
        raise GeometryError("dimension mismatch")
    if not any(z):
        raise GeometryError("z must be nonzero")
    return all(dot(w, z, W.q) == 0 for w in W.basis)


def hyperplane_of(z, q: int) -> Subspace:
    """The (d-1)-dimensional subspace z^perp."""
    _check_q(q)
    z = tuple(x % q for x in z)
    if not any(z):
        raise GeometryError("z must be nonzero")
    d = len(z)
    # kernel of the 1 x d matrix z: for each non-pivot coordinate j, e_j - (z_j / z_p) e_p
    p = next(i for i, x in enumerate(z) if x)
    inv = pow(z[p], -1, q)
    vecs = []
    for j in range(d):
        if j == p:
            continue
        v = [0] * d
        v[j] = 1
        v[p] = (-z[j] * inv) % q
        vecs.append(tuple(v))
    return span(vecs, q, d)


def count_points(q: int, d: int) -> int:
    return (q ** d - 1) // (q - 1)
