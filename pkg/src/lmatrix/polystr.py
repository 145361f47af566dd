"""Parsing and printing of polynomial strings.

Polynomials travel as plain strings such as ``"t^2-2"`` or ``"2*x1^2-x2^2"``.
Parsing goes through sympy; printing is done here so that the output is
canonical (descending degree, no spaces) and round-trips byte for byte.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache

import sympy
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication,
    parse_expr,
    standard_transformations,
)

_TRANSFORMS = standard_transformations + (convert_xor, implicit_multiplication)
_VAR_RE = re.compile(r"^x(\d+)$")


class PolyParseError(ValueError):
    pass


def _sympify(text: str) -> sympy.Expr:
    try:
        return parse_expr(text, transformations=_TRANSFORMS, evaluate=True)
    except Exception as exc:  # sympy raises a zoo of exception types
        raise PolyParseError(f"cannot parse polynomial {text!r}: {exc}") from None


def _to_fraction(c) -> Fraction:
    c = sympy.nsimplify(c)
    if not c.is_Rational:
        raise PolyParseError(f"non-rational coefficient {c}")
    return Fraction(int(c.p), int(c.q))


@lru_cache(maxsize=4096)
def parse_univariate(text: str, var: str | None = None) -> tuple[Fraction, ...]:
    """Coefficients (low degree first) of a univariate polynomial string.

    The variable is whatever single symbol occurs in ``text`` unless ``var``
    pins it down.
    """
    expr = _sympify(text)
    syms = sorted(expr.free_symbols, key=lambda s: s.name)
    if var is not None:
        extra = [s for s in syms if s.name != var]
        if extra:
            raise PolyParseError(f"unexpected symbols {extra} in {text!r}")
        gen = sympy.Symbol(var)
    elif len(syms) > 1:
        raise PolyParseError(f"{text!r} is not univariate")
    else:
        gen = syms[0] if syms else sympy.Symbol("t")
    try:
        poly = sympy.Poly(expr, gen)
    except sympy.PolynomialError as exc:
        raise PolyParseError(f"{text!r} is not a polynomial: {exc}") from None
    coeffs = [_to_fraction(c) for c in reversed(poly.all_coeffs())]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@lru_cache(maxsize=1024)
def parse_multivariate(text: str, nvars: int | None = None) -> tuple[int, dict]:
    """Parse a polynomial in ``x1..xk``; returns ``(k, {exponents: Fraction})``."""
    expr = _sympify(text)
    idx = []
    for s in expr.free_symbols:
        m = _VAR_RE.match(s.name)
        if not m or int(m.group(1)) < 1:
            raise PolyParseError(f"variables must be named x1..xk, got {s.name!r}")
        idx.append(int(m.group(1)))
    k = max(idx, default=1)
    if nvars is not None:
        if k > nvars:
            raise PolyParseError(f"{text!r} uses x{k} but only {nvars} variables allowed")
        k = nvars
    gens = [sympy.Symbol(f"x{i + 1}") for i in range(k)]
    try:
        poly = sympy.Poly(expr, *gens)
    except sympy.PolynomialError as exc:
        raise PolyParseError(f"{text!r} is not a polynomial: {exc}") from None
    terms = {}
    for exps, c in poly.terms():
        c = _to_fraction(c)
        if c:
            terms[tuple(int(e) for e in exps)] = c
    return k, terms


def _fmt_coeff(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _join_terms(parts: list[tuple[Fraction, str]]) -> str:
    """``parts`` is a list of (coefficient, monomial-string) with '' for 1."""
    if not parts:
        return "0"
    out = []
    for c, mono in parts:
        neg = c < 0
        a = -c if neg else c
        if mono and a == 1:
            body = mono
        elif mono:
            body = f"{_fmt_coeff(a)}*{mono}"
        else:
            body = _fmt_coeff(a)
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("-" if neg else "+") + body)
    return "".join(out)


def format_univariate(coeffs, var: str = "t") -> str:
    parts = []
    for deg in range(len(coeffs) - 1, -1, -1):
        c = Fraction(coeffs[deg])
        if not c:
            continue
        mono = "" if deg == 0 else (var if deg == 1 else f"{var}^{deg}")
        parts.append((c, mono))
    return _join_terms(parts)


def format_monomial(exps) -> str:
    bits = []
    for i, e in enumerate(exps):
        if e == 1:
            bits.append(f"x{i + 1}")
        elif e > 1:
            bits.append(f"x{i + 1}^{e}")
    return "*".join(bits)


def format_multivariate(terms: dict) -> str:
    """Terms sorted by descending total degree, then descending lex."""
    order = sorted(terms, key=lambda e: (sum(e), e), reverse=True)
    return _join_terms([(Fraction(terms[e]), format_monomial(e)) for e in order])
