from fractions import Fraction

import numpy as np
import pytest

from confocal_billiards import (ConfocalFamily, IntervalSystem, cartesian_from_jacobi,
                                classify_caustics, interval_system, jacobi_coordinates)
from confocal_billiards.errors import AudinViolation, DegenerateCaustic, DegeneratePoint


def test_family_is_exact():
    fam = ConfocalFamily([2, 4, 5])
    assert fam.a == (2, 4, 5) and fam.d == 3 and fam.exact


@pytest.mark.parametrize("a", [[2, 2, 5], [0, 1], [-1, 3], [5, 2, 4], [3]])
def test_family_rejects_bad_axes(a):
    with pytest.raises(ValueError):
        ConfocalFamily(a)


def test_two_hyperboloids():
    cs = classify_caustics(ConfocalFamily([2, 4, 5]), [3.1, 3.5])
    assert cs.types == ("1-sheeted hyperboloid", "1-sheeted hyperboloid")


def test_ellipsoid_and_hyperboloid():
    cs = classify_caustics(ConfocalFamily([2, 4, 5]), [1.0, 3.1])
    assert cs.types == ("ellipsoid", "1-sheeted hyperboloid")


def test_caustic_on_axis_is_degenerate():
    with pytest.raises(DegenerateCaustic):
        classify_caustics(ConfocalFamily([2, 4, 5]), [4.0, 4.5])


def test_interleaving_violation():
    # both caustics ellipsoids cannot happen
    with pytest.raises(AudinViolation):
        classify_caustics(ConfocalFamily([2, 4, 5]), [0.5, 1.0])


def test_b_sequence_merges_parameters():
    cs = classify_caustics(ConfocalFamily([2, 4, 5]), [Fraction(1), Fraction(3)])
    assert cs.b == (1, 2, 3, 4, 5)
    assert [cs.is_a(k) for k in range(1, 6)] == [False, True, False, True, True]


def test_interval_system_reciprocals():
    cs = classify_caustics(ConfocalFamily([2, 4, 5]), [Fraction(31, 10), Fraction(7, 2)])
    sys = interval_system(cs)
    assert sys.c == (Fraction(1, 2), Fraction(10, 31), Fraction(2, 7), Fraction(1, 4),
                     Fraction(1, 5), 0)
    assert len(sys.bands) == 3 and len(sys.gaps) == 2


def test_interval_system_planar_triangle():
    al = 6 / (3 + 2 * np.sqrt(3))
    sys = interval_system(classify_caustics(ConfocalFamily([1, 2]), [al]))
    c = [float(x) for x in sys.c]
    assert c == pytest.approx([1 / al, 1.0, 0.5, 0.0])
    assert sys.bands[-1] == (0, sys.c[2]) and sys.bands[0] == (sys.c[1], sys.c[0])


def test_double_caustic_closes_gap():
    cs = classify_caustics(ConfocalFamily([Fraction(20, 9), 4, 5]), [Fraction(3), Fraction(3)])
    assert interval_system(cs).closed_gaps() == [1]


def test_interval_system_validation():
    with pytest.raises(ValueError):
        IntervalSystem((Fraction(1), Fraction(1, 2)))
    with pytest.raises(ValueError):
        IntervalSystem((Fraction(1), Fraction(2), Fraction(1, 2), Fraction(0)))


def test_jacobi_vertex():
    lam = jacobi_coordinates(ConfocalFamily([1, 2]), [1.0, 0.0])
    assert lam == pytest.approx([0.0, 2.0], abs=1e-12)


def test_jacobi_quadratic_interlaces():
    lam = jacobi_coordinates(ConfocalFamily([1, 2]), [0.5, 0.5])
    # (1-l)(2-l) - 0.25(2-l) - 0.25(1-l) = l^2 - 2.5 l + 1.25
    expected = np.sort(np.roots([1.0, -2.5, 1.25]))
    assert lam == pytest.approx(expected, abs=1e-12)
    assert lam[0] < 1 < lam[1] < 2


def test_jacobi_boundary_point():
    fam = ConfocalFamily([2, 4, 5])
    rng = np.random.default_rng(1)
    for _ in range(10):
        u = rng.normal(size=3)
        x = u / np.sqrt(np.sum(u * u / np.array([2, 4, 5.0])))
        assert abs(jacobi_coordinates(fam, x)[0]) < 1e-12


def test_jacobi_round_trip():
    fam = ConfocalFamily([2, 4, 5])
    lam = np.array([0.5, 3.0, 4.5])
    x = cartesian_from_jacobi(fam, lam)
    assert jacobi_coordinates(fam, x) == pytest.approx(lam, abs=1e-12)


def test_jacobi_origin():
    with pytest.raises(DegeneratePoint):
        jacobi_coordinates(ConfocalFamily([1, 2]), [0.0, 0.0])
