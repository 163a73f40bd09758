from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_merge
from reebgap.certified import CertifiedReal
from reebgap.errors import AperiodicFlow, DegenerateOrbit, PreconditionError
from reebgap.spectrum import (INFINITE, EllipsoidSpec, action_spectrum, count_at_most,
                              cz_index, k_T_index, orbit_rank, period, sft_grading,
                              spectrum_slice, spectrum_value)


def E(*xs):
    return EllipsoidSpec.from_values([CertifiedReal.parse(str(x)) for x in xs])


def test_e23_values_and_labels():
    sp = action_spectrum(E(2, 3), 6)
    assert [s.value for s in sp.values] == [2, 3, 4, 6, 6, 8]
    assert [tuple(l) for l in sp.labels] == [(1, 1), (2, 1), (1, 2), (1, 3), (2, 2), (1, 4)]
    assert sp[4] == sp[5] == 6


def test_permutation_records_input_order():
    e = E(3, 2, "sqrt(2)")
    assert [str(a) for a in e.axes] == ["sqrt(2)", "2", "3"]
    assert e.permutation == (2, 1, 0)


def test_period_and_kT():
    assert period(E(2, 3)) == 6
    assert k_T_index(E(2, 3)) == (4, 6)
    assert period(E("1/2", "1/3")) == 1
    assert k_T_index(E(1, 1, 1))[0] == 1
    assert period(E(1, "sqrt(2)")) is INFINITE
    with pytest.raises(AperiodicFlow):
        k_T_index(E(1, "sqrt(2)"))
    # the period appears exactly n times starting at rank k_T
    e = E(4, 6, 10)
    k, T = k_T_index(e)
    sp = action_spectrum(e, k + 3)
    assert [sp[k + i] for i in range(3)] == [T] * 3
    assert sp[k + 3] > T and sp[k - 1] < T


def test_cz_and_grading():
    e = E(1, "sqrt(2)")
    assert cz_index(e, (1, 1)) == 3
    assert cz_index(e, (2, 1)) == 5
    assert sft_grading(e, 1) == 2
    with pytest.raises(DegenerateOrbit):
        orbit_rank(E(2, 3), (1, 3))
    with pytest.raises(PreconditionError):
        orbit_rank(E(2, 3), (3, 1))


def test_slice_agrees_with_full_merge():
    e = E(1, "sqrt(2)", "sqrt(3)")
    full = action_spectrum(e, 3000)
    for start in (1, 65, 1000, 2950):
        sl = spectrum_slice(e, start, 20 if start < 2950 else 51)
        assert [en.rank for en in sl.entries] == list(range(start, start + len(sl.entries)))
        for en in sl.entries:
            assert en == full.entries[en.rank - 1]


def test_deep_rank_value():
    e = E(1, "sqrt(2)")
    v = spectrum_value(e, 10**6)
    assert count_at_most(e, v) >= 10**6
    assert count_at_most(e, v - Fraction(1, 10**9)) < 10**6


def test_rejects_bad_axes():
    with pytest.raises(PreconditionError):
        E(0, 1)
    with pytest.raises(PreconditionError):
        action_spectrum(E(1), 0)


axes_strategy = st.lists(st.fractions(min_value=Fraction(1, 10), max_value=10,
                                      max_denominator=12).filter(lambda q: q > 0),
                         min_size=1, max_size=5)


@settings(max_examples=60, deadline=None)
@given(axes_strategy, st.integers(1, 400))
def test_oracle_rational(axes, K):
    sp = action_spectrum(E(*axes), K)
    want = brute_merge(axes, K)
    assert [en.value.value for en in sp.entries] == [w[0] for w in want]
    # ties resolved by (axis, iterate)
    assert [tuple(en.label) for en in sp.entries] == [(w[1], w[2]) for w in want]


@settings(max_examples=60, deadline=None)
@given(axes_strategy, st.fractions(min_value=Fraction(1, 8), max_value=8, max_denominator=9),
       st.integers(1, 200))
def test_conformality(axes, c, K):
    e = E(*axes)
    a = action_spectrum(e, K).values
    b = action_spectrum(e.scaled(c), K).values
    assert all(x * c == y for x, y in zip(a, b))


@settings(max_examples=40, deadline=None)
@given(axes_strategy, st.data())
def test_monotonicity(axes, data):
    bumps = data.draw(st.lists(st.fractions(min_value=0, max_value=3, max_denominator=5),
                               min_size=len(axes), max_size=len(axes)))
    K = data.draw(st.integers(1, 150))
    a = action_spectrum(E(*axes), K).values
    b = action_spectrum(E(*[x + d for x, d in zip(axes, bumps)]), K).values
    assert all(x <= y for x, y in zip(a, b))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from([1, 2, 3, 5, 6, 7]), min_size=1, max_size=3),
       st.lists(st.fractions(min_value=Fraction(1, 3), max_value=3, max_denominator=6),
                min_size=3, max_size=3))
def test_irrational_ordering_matches_float(roots, coeffs):
    axes = [CertifiedReal.sqrt(k, c) for k, c in zip(roots, coeffs)]
    sp = action_spectrum(EllipsoidSpec.from_values(axes), 60)
    fl = [float(v) for v in sp.values]
    assert all(x <= y + 1e-12 for x, y in zip(fl, fl[1:]))
