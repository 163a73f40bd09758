import math
from fractions import Fraction

import numpy as np
import pytest

from pathgen import (is_clean, random_block_unitary, random_segment, random_symmetric,
                     random_symplectic, sigma_min_minus_id)
from reebgap.errors import (DegenerateCrossing, DegenerateEndpoint, IndefiniteHessian,
                            PreconditionError, ZeroRate)
from reebgap.index import (Definiteness, MorseBottOrbitDatum, SymplecticPathSample,
                           concatenate, conjugated, crossing_form, cz_morse_bott,
                           cz_nondegenerate, direct_sum, ellipsoid_cz, grading_parity_check,
                           linear_flow_path, normal_cz_from_hessian, omega0, rotation_path,
                           rotation_sum_path, rs_index, rs_report, rs_rotation_block,
                           standard_j, symplectic_inverse)
from reebgap.spectrum import EllipsoidSpec, cz_index

PI = math.pi


def test_symplectic_basics():
    rng = np.random.default_rng(0)
    P = random_symplectic(rng, 2)
    J = standard_j(2)
    assert np.allclose(P.T @ J @ P, J)
    assert np.allclose(symplectic_inverse(P) @ P, np.eye(4))
    v, w = rng.normal(size=4), rng.normal(size=4)
    assert omega0(v, w) == pytest.approx(-omega0(w, v))


@pytest.mark.parametrize("theta,T,want", [
    (PI, 1, 1), (2 * PI, 1, 2), (-PI, 1, -1), (3 * PI, 1, 3), (4 * PI, 1, 4), (1.0, 0.5, 1),
])
def test_rotation_examples(theta, T, want):
    assert rs_index(rotation_path(theta, T)) == want
    assert rs_rotation_block(theta, T) == want


def test_crossing_signatures_of_rotation():
    rep = rs_report(rotation_path(2 * PI, 1.5))
    assert [round(c.t, 9) for c in rep.crossings] == [0.0, 1.0]
    assert all(c.signature == 2 for c in rep.crossings)
    assert crossing_form(rotation_path(-2 * PI, 1.0), 0.0).signature == -2


def test_zero_rate_and_bad_path():
    with pytest.raises(ZeroRate):
        rs_rotation_block(0.0, 1.0)
    with pytest.raises(PreconditionError):
        SymplecticPathSample.from_samples([0.0, 1.0], [np.eye(2), 2 * np.eye(2)])


def test_cz_examples():
    assert cz_nondegenerate(rotation_path(PI, 1)) == 1
    assert cz_nondegenerate(rotation_sum_path([PI, 3 * PI], 1.0)) == 4
    assert cz_nondegenerate(rotation_sum_path([3 * PI, 3 * PI], 1.0)) == 6
    with pytest.raises(DegenerateEndpoint):
        cz_nondegenerate(rotation_path(2 * PI, 1))


def test_shear_degenerate():
    # Phi(t) = [[1, t], [0, 1]] has a kernel at every time, not of constant
    # structure on [0, 1]: the crossing form is degenerate at 0
    shear = SymplecticPathSample.from_function(
        lambda t: np.array([[1.0, t], [0.0, 1.0]]), 1.0, 201,
        derivative=lambda t: np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(DegenerateCrossing):
        rs_index(shear)
    later = SymplecticPathSample.from_function(
        lambda t: np.array([[1.0, 1.0 + t], [0.0, 1.0]]), 1.0, 201)
    assert rs_index(later) == 0


def test_hessian_cases():
    assert normal_cz_from_hessian(Definiteness.NegativeDefinite) == 1
    assert normal_cz_from_hessian(Definiteness.PositiveDefinite) == -1
    assert normal_cz_from_hessian([[2.0, 0.5], [0.5, 1.0]]) == -1
    with pytest.raises(IndefiniteHessian):
        normal_cz_from_hessian(Definiteness.Indefinite)
    with pytest.raises(IndefiniteHessian):
        normal_cz_from_hessian([[1.0, 0.0], [0.0, -1.0]])


def test_morse_bott_parity():
    assert cz_morse_bott(MorseBottOrbitDatum(Fraction(3, 1), 2, 1)) == 3
    assert cz_morse_bott(MorseBottOrbitDatum(4, 2, 0)) == 5
    # rs = 1 matches rs = n - 1 - dim/2 (mod 2) for n = 3
    assert grading_parity_check(3, MorseBottOrbitDatum(1, 2, 0))
    assert grading_parity_check(3, MorseBottOrbitDatum(1, 2, 2))
    assert not grading_parity_check(3, MorseBottOrbitDatum(2, 2, 0))
    with pytest.raises(PreconditionError):
        MorseBottOrbitDatum(Fraction(1, 3), 2, 0)


def test_grid_matches_closed_form():
    bad = []
    for theta in (-7.0, -2 * PI, -1.3, 0.7, PI, 2 * PI, 5.5):
        for T in (0.25, 1.0, 2.0, 3.7):
            if rs_index(rotation_path(theta, T)) != rs_rotation_block(theta, T):
                bad.append((theta, T))
    assert not bad


def test_concatenation_additivity():
    rng = np.random.default_rng(7)
    done = 0
    while done < 15:
        a = random_segment(rng, 1, 1.0)
        b = random_segment(rng, 1, 1.0, start=a(a.T))
        if not (is_clean(a) and is_clean(b)):
            continue
        assert rs_index(concatenate(a, b)) == rs_index(a) + rs_index(b)
        done += 1


def test_direct_sum_additivity():
    rng = np.random.default_rng(8)
    done = 0
    while done < 10:
        a = random_segment(rng, 1, 1.0)
        b = random_segment(rng, 1, 2.0)
        if not (is_clean(a) and is_clean(b)):
            continue
        assert rs_index(direct_sum(a, b)) == rs_index(a) + rs_index(b)
        done += 1


def test_homotopy_invariance_rel_endpoints():
    # conjugating by a path-independent symplectic matrix keeps the index
    rng = np.random.default_rng(9)
    path = rotation_sum_path([2.5, -4.0], 1.0)
    for _ in range(5):
        assert rs_index(conjugated(path, random_symplectic(rng, 2))) == rs_index(path)


def test_vanishing_without_crossings():
    rng = np.random.default_rng(10)
    hits = 0
    while hits < 5:
        start = random_symplectic(rng, 1, 2.0)
        p = linear_flow_path(random_symmetric(rng, 1, 0.05, 0.2), 1.0, start=start, n_samples=301)
        if min(sigma_min_minus_id(p(t)) for t in p.times) < 0.05:
            continue
        assert rs_index(p) == 0
        hits += 1


def test_parity_block_unitary():
    rng = np.random.default_rng(11)
    for n, d in [(2, 0), (3, 1), (3, 0), (4, 2)]:
        path, _ = random_block_unitary(rng, n, d)
        v = rs_index(path)
        assert v.denominator == 1 and (int(v) - (n - 1 - d)) % 2 == 0


def test_ellipsoid_cz_matches_spectrum():
    for axes, label in [((1.0, math.sqrt(2)), (1, 1)), ((1.0, math.sqrt(2)), (2, 1)),
                        ((1.0, math.sqrt(2)), (1, 3)), ((1.0, math.sqrt(3), math.sqrt(5)), (2, 2))]:
        e = EllipsoidSpec.from_values(["1", "sqrt(2)"] if len(axes) == 2
                                      else ["1", "sqrt(3)", "sqrt(5)"])
        assert ellipsoid_cz(axes, label) == cz_index(e, label)


def test_csv_round_trip():
    p = rotation_sum_path([1.0, -2.0], 2.0, 401)
    q = SymplecticPathSample.from_csv(p.to_csv())
    assert np.allclose(q.matrices, p.matrices)
    assert rs_index(q) == rs_index(p)
