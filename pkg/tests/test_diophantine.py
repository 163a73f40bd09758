import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_lcm
from reebgap.certified import CertifiedReal, compare
from reebgap.diophantine import (SEARCH_CAP, approx_ellipsoid, approx_pair_upper,
                                 dirichlet_simultaneous, lcm_pair, lcm_tuple)
from reebgap.errors import PreconditionError, SearchExhausted
from reebgap.spectrum import INFINITE, EllipsoidSpec, rational_lcm


def sqrt2():
    return CertifiedReal.sqrt(2)


def test_lcm_examples():
    assert lcm_pair(2, 3) == 6
    assert lcm_pair(Fraction(1, 2), Fraction(1, 3)) == 1
    assert lcm_pair(1, sqrt2()) is INFINITE
    assert lcm_tuple([Fraction(3, 2), Fraction(5, 4)]) == Fraction(15, 2)
    assert lcm_pair(sqrt2(), CertifiedReal.sqrt(2, Fraction(3, 2))) == CertifiedReal.sqrt(2, 3)
    with pytest.raises(PreconditionError):
        lcm_pair(0, 1)


@settings(max_examples=150)
@given(st.fractions(min_value=Fraction(1, 30), max_value=30, max_denominator=30),
       st.fractions(min_value=Fraction(1, 30), max_value=30, max_denominator=30))
def test_lcm_oracle(x, y):
    if x <= 0 or y <= 0:
        return
    assert lcm_pair(x, y) == brute_lcm(x, y)
    assert rational_lcm([x, y]) == brute_lcm(x, y)


def test_dirichlet_pair():
    sol = dirichlet_simultaneous([1, sqrt2()], 100)
    a = [CertifiedReal(1), sqrt2()]
    for ai, qi, b in zip(a, sol.q, sol.bound):
        err = abs(ai * qi - sol.T_prime)
        assert compare(err, b) <= 0
        # b <= a_i / sqrt(N)
        assert b ** 2 * 100 <= ai.bounds(96)[0] ** 2
    assert 1 <= sol.T_prime <= 100


def test_dirichlet_cap():
    with pytest.raises(SearchExhausted) as exc:
        dirichlet_simultaneous([1, sqrt2()], SEARCH_CAP + 1)
    assert exc.value.required_n == SEARCH_CAP + 1


@pytest.mark.parametrize("eps", [Fraction(1, 2), Fraction(1, 10), Fraction(1, 100)])
def test_approx_sqrt2(eps):
    ap = approx_ellipsoid(EllipsoidSpec.from_values([1, sqrt2()]), eps)
    assert ap.verify()
    assert ap.T == rational_lcm(ap.r)
    for a, r in zip(ap.a, ap.r):
        assert compare(r, a) <= 0
        assert compare(a, r * (1 + eps / ap.T)) <= 0


def test_approx_known_values():
    ap = approx_ellipsoid(EllipsoidSpec.from_values([1, sqrt2()]), Fraction(1, 2))
    assert ap.r == (Fraction(11, 12), Fraction(11, 8)) and ap.T == Fraction(11, 4)


def test_approx_rational_short_circuit():
    ap = approx_ellipsoid(EllipsoidSpec.from_values([2, 3]), Fraction(1, 5))
    assert ap.r == (2, 3) and ap.T == 6 and ap.search_index is None


def test_approx_preconditions():
    e = EllipsoidSpec.from_values([1, sqrt2()])
    with pytest.raises(PreconditionError):
        approx_ellipsoid(e, 3)
    with pytest.raises(PreconditionError):
        approx_ellipsoid(e, Fraction(-1, 2))
    with pytest.raises(SearchExhausted) as exc:
        approx_ellipsoid(EllipsoidSpec.from_values([1, sqrt2(), CertifiedReal.sqrt(3)]),
                         Fraction(1, 1000))
    assert exc.value.required_n > SEARCH_CAP


@pytest.mark.parametrize("delta", [Fraction(1, 2), Fraction(1, 10), Fraction(1, 50)])
def test_pair_upper(delta):
    ap = approx_pair_upper([1, sqrt2()], delta)
    assert ap.verify()
    assert ap.T == rational_lcm([1 / r for r in ap.r])
    for a, r in zip(ap.a, ap.r):
        assert compare(a, r) <= 0
        assert compare(r / (1 + delta / ap.T), a) <= 0


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from([2, 3, 5, 6, 7, 10]), min_size=1, max_size=2),
       st.fractions(min_value=Fraction(1, 2), max_value=2, max_denominator=5),
       st.sampled_from([Fraction(1, 3), Fraction(1, 7), Fraction(1, 20)]))
def test_approx_certified_random(roots, c, eps):
    axes = [CertifiedReal(c)] + [CertifiedReal.sqrt(k, c) for k in roots]
    e = EllipsoidSpec.from_values(axes)
    if compare(e.axes[0], eps) <= 0:
        return
    try:
        ap = approx_ellipsoid(e, eps)
    except SearchExhausted:
        return
    assert ap.verify()
    # floats agree with the certificate
    for a, r in zip(ap.a, ap.r):
        assert float(r) <= float(a) * (1 + 1e-12)
        assert float(a) <= float(r) * (1 + float(eps / ap.T)) * (1 + 1e-12)
    assert math.isfinite(float(ap.T))
