import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reebgap.certified import CertifiedReal, certified, compare, ratio
from reebgap.errors import ParseError, UnknownRationality, UnresolvableOrder

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=40)


def test_parse_basic():
    assert CertifiedReal.parse("3/4") == Fraction(3, 4)
    assert CertifiedReal.parse("0.25").value == Fraction(1, 4)
    s = CertifiedReal.parse("1 + 2*sqrt(8)")
    assert s == 1 + CertifiedReal.sqrt(2, 4)
    assert CertifiedReal.parse("sqrt(9)").is_rational
    assert CertifiedReal.parse("pi/2") == CertifiedReal.pi(Fraction(1, 2))


@pytest.mark.parametrize("bad", ["", "sqrt(x)", "2**3", "1/0", "(1", "sin(1)", "sqrt(2)*pi"])
def test_parse_rejects(bad):
    with pytest.raises((ParseError, ZeroDivisionError)):
        CertifiedReal.parse(bad)


def test_floats_rejected():
    with pytest.raises(TypeError):
        certified(0.5)


def test_bounds_enclose_and_shrink():
    x = CertifiedReal.parse("sqrt(2) - 7/5")
    lo, hi = x.bounds(64)
    assert lo <= Fraction(math.sqrt(2)) - Fraction(7, 5) + Fraction(1, 10**15)
    lo2, hi2 = x.bounds(256)
    assert lo <= lo2 <= hi2 <= hi
    assert hi2 - lo2 < Fraction(1, 2**200)


def test_sign_and_ordering():
    # 239/169 is a convergent of sqrt(2) from below: diff ~ 1.2e-5
    d = CertifiedReal.sqrt(2) - Fraction(239, 169)
    assert d.sign() == 1
    assert CertifiedReal.pi() > CertifiedReal.e()
    assert sorted([CertifiedReal.sqrt(3), CertifiedReal(Fraction(17, 10)), CertifiedReal.sqrt(2)]) == [
        CertifiedReal.sqrt(2), CertifiedReal(Fraction(17, 10)), CertifiedReal.sqrt(3)]


def test_unresolvable_when_budget_exhausted():
    tiny = CertifiedReal.pi() - CertifiedReal.e() - (CertifiedReal.pi() - CertifiedReal.e())
    assert tiny.sign() == 0
    # Pell solution p^2 - 2 q^2 = 1 gives |sqrt(2) - p/q| ~ 1/(2 sqrt(2) q^2)
    p, q = 3, 2
    while q < 10**24:
        p, q = 3 * p + 4 * q, 2 * p + 3 * q
    x = CertifiedReal.sqrt(2) - Fraction(p, q)
    with pytest.raises(UnresolvableOrder):
        x.sign(128)
    assert x.sign(512) == -1


def test_ratio_decisions():
    assert ratio(CertifiedReal.sqrt(8), CertifiedReal.sqrt(2)) == 2
    assert ratio(CertifiedReal.sqrt(3), CertifiedReal.sqrt(2)) is None
    assert ratio(2, 3) == Fraction(2, 3)
    with pytest.raises(UnknownRationality):
        ratio(CertifiedReal.pi() + CertifiedReal.e(), 1)


def test_str_round_trip():
    for text in ["0", "-3/7", "sqrt(2)", "1 - 2*sqrt(3) + pi/5", "-e"]:
        x = CertifiedReal.parse(text)
        assert CertifiedReal.parse(str(x)) == x


@given(fractions, fractions, fractions)
def test_field_identities(a, b, c):
    x = a + CertifiedReal.sqrt(2, b)
    y = CertifiedReal.sqrt(3, c) - a
    assert (x + y) - y == x
    assert x * 2 - x == x
    assert hash(CertifiedReal(a)) == hash(a)


@settings(max_examples=200)
@given(fractions, fractions, fractions, fractions)
def test_compare_matches_float(a, b, c, d):
    x = a + CertifiedReal.sqrt(2, b)
    y = c + CertifiedReal.sqrt(5, d)
    fx = float(a) + float(b) * math.sqrt(2)
    fy = float(c) + float(d) * math.sqrt(5)
    if abs(fx - fy) > 1e-9:
        assert compare(x, y) == (1 if fx > fy else -1)
