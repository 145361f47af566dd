from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lmatrix.fields import Fp, FieldError, field_make, number_field, prime_field

small = st.fractions(min_value=-20, max_value=20, max_denominator=7)


def test_prime_field_arithmetic():
    F = prime_field(7)
    a, b = F(3), F(5)
    assert a + b == F(1)
    assert a * b == F(1)
    assert a / b == F(9)
    assert (a ** 6) == F.one
    assert F(Fraction(1, 2)) == F(4)
    assert str(F(10)) == "3"


def test_prime_field_rejects_composite_and_bad_denominator():
    with pytest.raises(FieldError, match="composite modulus 15 = 3\\*5"):
        prime_field(15)
    with pytest.raises(FieldError):
        prime_field(7)(Fraction(1, 7))
    with pytest.raises(ZeroDivisionError):
        prime_field(7).zero.inverse()


def test_number_field_basics():
    K = number_field("t^2-2")
    s = K.gen()
    assert s * s == K(2)
    assert (1 / (s - 1)) == s + 1
    assert K.fmt(K.parse("t-1")) == K.fmt(s - 1)
    assert K.degree == 2 and K.characteristic == 0


def test_number_field_rejects_reducible_and_non_monic():
    with pytest.raises(FieldError, match="reducible"):
        number_field("t^2-4")
    with pytest.raises(FieldError, match="monic"):
        number_field("2t^2-1")


def test_field_descriptors_round_trip():
    for text in ("QQ", "GF(11)", "QQ[t]/(t^2-2)", "QQ[t]/(t^3-t-1)"):
        ctx = field_make(text)
        assert field_make(ctx.descriptor) == ctx
    assert field_make("F5") == prime_field(5)


def test_cross_field_mixing_is_an_error():
    with pytest.raises(FieldError):
        prime_field(5)(Fp(1, 7))
    with pytest.raises(FieldError):
        number_field("t^2-3")(number_field("t^2-2").gen())


@settings(max_examples=60, deadline=None)
@given(st.lists(small, min_size=2, max_size=2), st.lists(small, min_size=2, max_size=2),
       st.lists(small, min_size=2, max_size=2))
def test_quadratic_field_axioms(a, b, c):
    K = number_field("t^2-2")
    x, y, z = (K.from_coords(v) for v in (a, b, c))
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    if y:
        assert (x / y) * y == x


@settings(max_examples=60, deadline=None)
@given(st.integers(-50, 50), st.integers(-50, 50), st.sampled_from([2, 3, 7, 101]))
def test_prime_field_inverse(a, b, p):
    F = prime_field(p)
    x, y = F(a), F(b)
    if y:
        assert (x / y) * y == x
    assert x - y + y == x
