"""Exact fields: the rationals, prime fields F_p, and simple extensions Q[t]/(f).

Elements are plain Python objects with arithmetic operators:

* rationals are :class:`fractions.Fraction`,
* F_p elements are :class:`Fp`,
* number-field elements are :class:`NFElem` (coefficients in the power basis).

Every element type mixes freely with ``int``, which makes generic code
(polynomial evaluation, elimination) work unchanged across the three kinds.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy

from .polystr import PolyParseError, format_univariate, parse_univariate


class FieldError(ValueError):
    """Bad field descriptor or an element that does not belong to a field."""


# --------------------------------------------------------------------------
# F_p
# --------------------------------------------------------------------------

class Fp:
    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _other(self, o):
        if isinstance(o, Fp):
            if o.p != self.p:
                raise FieldError(f"mixing F_{self.p} and F_{o.p}")
            return o.v
        if isinstance(o, int):
            return o
        if isinstance(o, Fraction):
            return o.numerator * pow(o.denominator, -1, self.p)
        return None

    def __add__(self, o):
        w = self._other(o)
        return NotImplemented if w is None else Fp(self.v + w, self.p)

    __radd__ = __add__

    def __sub__(self, o):
        w = self._other(o)
        return NotImplemented if w is None else Fp(self.v - w, self.p)

    def __rsub__(self, o):
        w = self._other(o)
        return NotImplemented if w is None else Fp(w - self.v, self.p)

    def __mul__(self, o):
        w = self._other(o)
        return NotImplemented if w is None else Fp(self.v * w, self.p)

    __rmul__ = __mul__

    def inverse(self) -> "Fp":
        if self.v == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.p}")
        return Fp(pow(self.v, -1, self.p), self.p)

    def __truediv__(self, o):
        w = self._other(o)
        if w is None:
            return NotImplemented
        return self * Fp(w, self.p).inverse()

    def __rtruediv__(self, o):
        w = self._other(o)
        if w is None:
            return NotImplemented
        return Fp(w, self.p) * self.inverse()

    def __neg__(self):
        return Fp(-self.v, self.p)

    def __pos__(self):
        return self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return Fp(pow(self.v, e, self.p), self.p)

    def __eq__(self, o):
        w = self._other(o)
        if w is None:
            return NotImplemented
        return (self.v - w) % self.p == 0

    def __hash__(self):
        return hash(self.v)

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"Fp({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


# --------------------------------------------------------------------------
# Q[t]/(f)
# --------------------------------------------------------------------------

def _poly_trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_divmod(a: list, b: list):
    """Division of rational coefficient lists (low degree first)."""
    a = list(a)
    b = _poly_trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = Fraction(b[-1])
    _poly_trim(a)
    while len(a) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] -= c * bi
        a.pop()
        _poly_trim(a)
    return q, a


class NFElem:
    """Element of Q[t]/(f), stored as a tuple of ``deg f`` Fractions."""

    __slots__ = ("c", "K")

    def __init__(self, c, K: "FieldCtx"):
        self.c = c
        self.K = K

    @classmethod
    def make(cls, coeffs, K: "FieldCtx") -> "NFElem":
        d = K.degree
        c = [Fraction(x) for x in coeffs]
        if len(c) > d:
            c = K._reduce(c)
        c = c + [Fraction(0)] * (d - len(c))
        return cls(tuple(c), K)

    def _other(self, o):
        if isinstance(o, NFElem):
            if o.K is not self.K and o.K != self.K:
                raise FieldError("mixing different number fields")
            return o.c
        if isinstance(o, (int, Fraction)):
            return (Fraction(o),) + (Fraction(0),) * (len(self.c) - 1)
        return None

    def __add__(self, o):
        w = self._other(o)
        if w is None:
            return NotImplemented
        return NFElem(tuple(a + b for a, b in zip(self.c, w)), self.K)

    __radd__ = __add__

    def __sub__(self, o):
        w = self._other(o)
        if w is None:
            return NotImplemented
        return NFElem(tuple(a - b for a, b in zip(self.c, w)), self.K)

    def __rsub__(self, o):
        w = self._other(o)
        if w is None:
            return NotImplemented
        return NFElem(tuple(b - a for a, b in zip(self.c, w)), self.K)

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            return NFElem(tuple(a * o for a in self.c), self.K)
        w = self._other(o)
        if w is None:
            return NotImplemented
        d = len(self.c)
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(w):
                    if b:
                        prod[i + j] += a * b
        return NFElem(tuple(self.K._reduce(prod)), self.K)

    __rmul__ = __mul__

    def inverse(self) -> "NFElem":
        if not any(self.c):
            raise ZeroDivisionError("0 has no inverse")
        # extended Euclid on (f, a): s*a + u*f = 1
        f = [Fraction(x) for x in self.K.modulus]
        r0, r1 = f, _poly_trim(list(self.c))
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1:
            qt, rem = _poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(qt, s1))
        if not r1:
            raise FieldError("modulus is not irreducible: zero divisor found")
        inv_c = r1[0]
        return NFElem.make([x / inv_c for x in s1], self.K)

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction)):
            if o == 0:
                raise ZeroDivisionError("division by zero")
            return NFElem(tuple(a / o for a in self.c), self.K)
        w = self._other(o)
        if w is None:
            return NotImplemented
        return self * NFElem(w, self.K).inverse()

    def __rtruediv__(self, o):
        w = self._other(o)
        if w is None:
            return NotImplemented
        return NFElem(w, self.K) * self.inverse()

    def __neg__(self):
        return NFElem(tuple(-a for a in self.c), self.K)

    def __pos__(self):
        return self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.K.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, o):
        w = self._other(o)
        if w is None:
            return NotImplemented
        return self.c == tuple(w)

    def __hash__(self):
        if not any(self.c[1:]):
            return hash(self.c[0])
        return hash(self.c)

    def __bool__(self):
        return any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def __repr__(self):
        return f"NFElem({format_univariate(self.c)})"

    def __str__(self):
        return format_univariate(self.c)


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_trim(out)


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _poly_trim([x - y for x, y in zip(a, b)])


# --------------------------------------------------------------------------
# contexts
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldCtx:
    """One exact field. ``modulus`` holds the monic integer modulus, low degree first."""

    kind: str  # "rational" | "prime" | "numberfield"
    p: int = 0
    modulus: tuple = ()

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "prime" else 0

    @property
    def degree(self) -> int:
        """Degree over the prime field (1 for Q and F_p)."""
        return len(self.modulus) - 1 if self.kind == "numberfield" else 1

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def _reduce(self, c: list) -> list:
        """Reduce a coefficient list modulo the (monic) modulus."""
        f = self.modulus
        d = len(f) - 1
        c = list(c)
        for top in range(len(c) - 1, d - 1, -1):
            a = c[top]
            if a:
                base = top - d
                for i in range(d):
                    if f[i]:
                        c[base + i] -= a * f[i]
            c[top] = Fraction(0)
        c = c[:d]
        return c + [Fraction(0)] * (d - len(c))

    def __call__(self, x):
        """Coerce ``x`` (int, Fraction, str or element) into this field."""
        if isinstance(x, str):
            return self.parse(x)
        if self.kind == "rational":
            if isinstance(x, (int, Fraction)):
                return Fraction(x)
            if isinstance(x, NFElem) and x.is_rational():
                return x.c[0]
        elif self.kind == "prime":
            if isinstance(x, Fp):
                if x.p != self.p:
                    raise FieldError(f"element of F_{x.p} is not in F_{self.p}")
                return x
            if isinstance(x, int):
                return Fp(x, self.p)
            if isinstance(x, Fraction):
                if x.denominator % self.p == 0:
                    raise FieldError(f"{x} has a denominator divisible by {self.p}")
                return Fp(x.numerator * pow(x.denominator, -1, self.p), self.p)
        else:
            if isinstance(x, NFElem):
                if x.K != self:
                    raise FieldError("element belongs to a different number field")
                return x
            if isinstance(x, (int, Fraction)):
                return NFElem.make([x], self)
        raise FieldError(f"cannot coerce {x!r} into {self.descriptor}")

    def contains(self, x) -> bool:
        if self.kind == "rational":
            return isinstance(x, Fraction)
        if self.kind == "prime":
            return isinstance(x, Fp) and x.p == self.p
        return isinstance(x, NFElem) and x.K == self

    def gen(self):
        """The class of t in Q[t]/(f)."""
        if self.kind != "numberfield":
            raise FieldError("only number fields have a generator")
        return NFElem.make([0, 1], self)

    def from_coords(self, coords):
        if self.kind == "numberfield":
            return NFElem.make(coords, self)
        (c,) = coords
        return self(c)

    def coords(self, x) -> tuple:
        """Coordinates over the prime field (power basis for number fields)."""
        x = self(x)
        if self.kind == "numberfield":
            return x.c
        if self.kind == "prime":
            return (x.v,)
        return (x,)

    def parse(self, text: str):
        text = text.strip()
        if self.kind == "numberfield":
            try:
                coeffs = parse_univariate(text, "t")
            except PolyParseError as exc:
                raise FieldError(str(exc)) from None
            return NFElem.make(coeffs, self)
        try:
            val = Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise FieldError(f"cannot parse {text!r} as an element of {self.descriptor}") from None
        return self(val)

    def fmt(self, x) -> str:
        x = self(x)
        if self.kind == "prime":
            return str(x.v)
        if self.kind == "rational":
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
        return format_univariate(x.c, "t")

    @property
    def descriptor(self) -> str:
        if self.kind == "rational":
            return "QQ"
        if self.kind == "prime":
            return f"GF({self.p})"
        return f"QQ[t]/({format_univariate(self.modulus, 't')})"

    def __repr__(self):
        return f"FieldCtx({self.descriptor})"

    def __str__(self):
        return self.descriptor


QQ = FieldCtx("rational")


def _factor_text(n: int) -> str:
    parts = []
    for pr, e in sorted(sympy.factorint(n).items()):
        parts.append(str(pr) if e == 1 else f"{pr}^{e}")
    return "*".join(parts)


@lru_cache(maxsize=None)
def prime_field(p: int) -> FieldCtx:
    if not isinstance(p, int) or p < 2:
        raise FieldError(f"modulus must be a prime >= 2, got {p!r}")
    if not sympy.isprime(p):
        raise FieldError(f"composite modulus {p} = {_factor_text(p)}")
    return FieldCtx("prime", p=p)


@lru_cache(maxsize=None)
def number_field(modulus) -> FieldCtx:
    """Q[t]/(f) for a monic integer polynomial ``f`` (string or coefficient tuple)."""
    if isinstance(modulus, str):
        try:
            coeffs = parse_univariate(modulus)
        except PolyParseError as exc:
            raise FieldError(str(exc)) from None
    else:
        coeffs = tuple(Fraction(c) for c in modulus)
    if len(coeffs) < 2:
        raise FieldError("modulus must have degree >= 1")
    if any(c.denominator != 1 for c in coeffs):
        raise FieldError(f"modulus {format_univariate(coeffs)} has non-integer coefficients")
    if coeffs[-1] != 1:
        raise FieldError(f"modulus {format_univariate(coeffs)} is not monic")
    ints = tuple(int(c) for c in coeffs)
    t = sympy.Symbol("t")
    poly = sympy.Poly(list(reversed(ints)), t)
    _, factors = sympy.factor_list(poly)
    if len(factors) > 1 or factors[0][1] > 1:
        found = factors[0][0].as_expr()
        raise FieldError(f"reducible modulus {format_univariate(coeffs)}: factor {found}")
    return FieldCtx("numberfield", modulus=ints)


_PRIME_RE = re.compile(r"^(?:GF|F|Fp|prime)\s*\(?\s*(\d+)\s*\)?$", re.IGNORECASE)
_NF_RE = re.compile(r"^(?:QQ\[[a-z]\]/|NF|numberfield|Q\[[a-z]\]/)\s*\((.*)\)$", re.IGNORECASE)


def field_make(desc) -> FieldCtx:
    """Build a field from a descriptor.

    Accepted forms: ``"QQ"``/``"Q"``/``"rational"``, ``"GF(p)"``/``"F5"``/``"prime(5)"``,
    ``"QQ[t]/(t^2-2)"``/``"NF(x^2-2)"``/``"numberfield(x^2-2)"``, an existing
    :class:`FieldCtx`, or a tuple ``("prime", p)`` / ``("numberfield", f)``.
    """
    if isinstance(desc, FieldCtx):
        return desc
    if isinstance(desc, tuple):
        kind, *rest = desc
        if kind == "rational":
            return QQ
        if kind == "prime":
            return prime_field(int(rest[0]))
        if kind == "numberfield":
            return number_field(rest[0])
        raise FieldError(f"unknown field kind {kind!r}")
    if not isinstance(desc, str):
        raise FieldError(f"cannot interpret field descriptor {desc!r}")
    s = desc.strip()
    if s.upper() in ("QQ", "Q", "RATIONAL", "RATIONALS"):
        return QQ
    m = _PRIME_RE.match(s)
    if m:
        return prime_field(int(m.group(1)))
    m = _NF_RE.match(s)
    if m:
        inner = m.group(1)
        # modulus may be written in x; rename to t
        syms = set(re.findall(r"[A-Za-z_]\w*", inner))
        if len(syms) > 1:
            raise FieldError(f"modulus {inner!r} must be univariate")
        if syms:
            inner = re.sub(r"[A-Za-z_]\w*", "t", inner)
        return number_field(inner)
    raise FieldError(f"unknown field descriptor {desc!r}")
