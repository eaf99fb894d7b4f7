from fractions import Fraction

import mpmath
import pytest

from confocal_billiards import (ConfocalFamily, Polynomial, check_d_plus_1, check_periodicity,
                                check_six_d3, classify_caustics, find_caustics_d_plus_1,
                                planar_cayley, sqrt_series)
from confocal_billiards.cayley import (_planar_series, cayley642_determinant, check_five_d3,
                                       parity_allows)
from confocal_billiards.errors import DegenerateCaustic, PeriodTooSmall, TypeMismatch


def gen642():
    s5 = mpmath.sqrt(5)
    al = mpmath.mpf(20) / 61 * (9 - 2 * s5)
    return ConfocalFamily([180 - 80 * s5, mpmath.mpf(4), mpmath.mpf(5)]), [al, al]


def hyp4():
    al = 9 - mpmath.sqrt(41)
    return ConfocalFamily([Fraction(20, 9), 4, 5]), [al, al]


def six_entry(catalog, winding):
    return next(e for e in catalog if e.n == 6 and e.pell.winding == list(winding))


def test_gen642_periodic():
    fam, al = gen642()
    v = check_periodicity(fam, al, 6)
    assert v.periodic and v.elliptic_period == 3 and v.cartesian_period == 6
    assert v.predicted_winding == [6, 4, 2] and v.signature == [1, 1, 1]
    assert v.fired == "C(3,3)"


def test_hyp4_periodic():
    fam, al = hyp4()
    v = check_periodicity(fam, al, 4)
    assert v.periodic and v.elliptic_period == 4 and v.predicted_winding == [4, 3, 2]
    assert v.signature == [0, 0, 1]


def test_doubling_period_keeps_periodicity():
    fam, al = hyp4()
    assert check_periodicity(fam, al, 8).periodic
    fam, al = gen642()
    assert check_periodicity(fam, al, 12).periodic


def test_generic_not_periodic():
    fam = ConfocalFamily([2, 4, 5])
    assert not check_periodicity(fam, [Fraction(3), Fraction(37, 10)], 4).periodic
    assert not check_periodicity(fam, [3.0, 3.7], 4).periodic


def test_period_too_small():
    fam, al = hyp4()
    with pytest.raises(PeriodTooSmall, match="coordinate hyperplane"):
        check_periodicity(fam, al, 3)


def test_odd_period_needs_ellipsoid():
    fam, al = hyp4()
    v = check_periodicity(fam, al, 5)
    assert not v.periodic and "ellipsoid" in v.reason[0].condition


def test_parity_screen():
    fam = ConfocalFamily([2, 4, 5])
    hyp = classify_caustics(fam, [3, Fraction(7, 2)])
    assert parity_allows(hyp, [4, 3, 2])
    assert not parity_allows(hyp, [5, 4, 2])   # odd m_0 needs an ellipsoid caustic
    assert not parity_allows(hyp, [6, 5, 3])   # consecutive odd
    ell = classify_caustics(fam, [1, 3])
    assert parity_allows(ell, [5, 4, 2])
    assert not parity_allows(ell, [6, 5, 2])   # b_2 = a_1 flanks m_1


def test_planar_triangle():
    al = 6 / (3 + 2 * mpmath.sqrt(3))
    assert planar_cayley([1, 2], al, 3)
    assert planar_cayley([1, 2], 0.92820323027550917, 3, threshold_exp=-14)


def test_planar_c2_vanishes():
    with mpmath.workprec(256):
        al = 6 / (3 + 2 * mpmath.sqrt(3))
        assert abs(_planar_series([1, 2], al, 4)[2]) < mpmath.mpf(10) ** -40


@pytest.mark.parametrize("n", [3, 4, 5])
def test_planar_generic_fails(n):
    assert not planar_cayley([1, 2], Fraction(1, 2), n)


def test_planar_degenerate():
    with pytest.raises(DegenerateCaustic):
        planar_cayley([1, 2], 1, 3)


def test_d_plus_1_round_trip():
    for a in ([2, 4, 5], [1, 2], [Fraction(4, 5), Fraction(87, 50), Fraction(64, 25), Fraction(171, 20)]):
        fam = ConfocalFamily(a)
        r = find_caustics_d_plus_1(fam)
        assert r.admissible
        assert check_d_plus_1(fam, r.alpha)


def test_d_plus_1_matches_planar():
    fam = ConfocalFamily([1, 2])
    al = find_caustics_d_plus_1(fam).alpha
    assert check_d_plus_1(fam, al) == planar_cayley([1, 2], al[0], 3) == True
    assert check_d_plus_1(fam, [Fraction(1, 2)]) == planar_cayley([1, 2], Fraction(1, 2), 3) == False


def test_d_plus_1_rejects_perturbation_and_type():
    fam = ConfocalFamily([2, 4, 5])
    al = find_caustics_d_plus_1(fam).alpha
    assert not check_d_plus_1(fam, [al[0] * (1 + mpmath.mpf(10) ** -6), al[1]])
    assert not check_d_plus_1(fam, [1, 3])


def test_gen642_six_variant():
    fam, al = gen642()
    r = check_six_d3(fam, al[0], al[1], (6, 4, 2))
    assert r.satisfied and r.cayley642 < 1e-20


def test_c4_from_b_series():
    # sqrt(Pol) = (alpha - x) sqrt((a1-x)(a2-x)(a3-x)) for a double caustic
    with mpmath.workprec(256):
        fam, al = gen642()
        C = sqrt_series(classify_caustics(fam, al).pol(), 6)
        B = sqrt_series(Polynomial.from_roots(list(fam.a), lead=-1), 6)
        for k in range(1, 7):
            assert abs(C[k] - (al[0] * B[k] - B[k - 1])) < mpmath.mpf(10) ** -60
        det, rel = cayley642_determinant(fam.a)
        assert rel < mpmath.mpf(10) ** -20


def test_six_type_mismatch():
    fam = ConfocalFamily([2, 4, 5])
    with pytest.raises(TypeMismatch):
        check_six_d3(fam, 1, 3, (6, 5, 2))


def test_six_unknown_variant():
    fam = ConfocalFamily([2, 4, 5])
    with pytest.raises(ValueError):
        check_six_d3(fam, 3, Fraction(7, 2), (6, 4, 3))


def _witness_identity(entry):
    (p2, p1), resid = entry.witness
    A = Polynomial.from_roots(list(entry.alpha), lead=1).to_mpf()
    B = Polynomial.from_roots(list(entry.a), lead=-1).to_mpf()
    lhs = A * p2.to_mpf() * p2.to_mpf() - B * p1.to_mpf() * p1.to_mpf()
    return max(abs(lhs[k] - (1 if k == 6 else 0)) for k in range(len(lhs))), resid


@pytest.mark.parametrize("winding", [(6, 5, 4), (6, 5, 2), (6, 3, 2)])
def test_odd_variants_and_witness(catalog, winding):
    e = six_entry(catalog, winding)
    fam = ConfocalFamily(list(e.a))
    with mpmath.workprec(256):
        r = check_six_d3(fam, e.alpha[0], e.alpha[1], winding)
        assert r.satisfied and r.witness is not None
        err, resid = _witness_identity(e)
        assert err < mpmath.mpf(10) ** -40 and resid < mpmath.mpf(10) ** -40
        others = [v for v in ((6, 5, 4), (6, 5, 2), (6, 3, 2)) if v != winding]
        for v in others:
            assert not check_six_d3(fam, e.alpha[0], e.alpha[1], v).satisfied


def test_gen654_hyperboloid_family(catalog):
    e = six_entry(catalog, (6, 5, 4))
    assert abs(float(e.a[0]) - 3.303) < 1e-3 and abs(float(e.alpha[0]) - 3.5) < 0.05


def test_five_periodic(catalog):
    e = next(x for x in catalog if x.n == 5)
    fam = ConfocalFamily(list(e.a))
    assert check_five_d3(fam, list(e.alpha)).satisfied
    assert not check_five_d3(fam, [e.alpha[0], e.alpha[1] * (1 + mpmath.mpf(10) ** -8)]).satisfied
    assert not check_five_d3(ConfocalFamily([2, 4, 5]), [3, Fraction(7, 2)]).satisfied
