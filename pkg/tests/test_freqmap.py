from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy import optimize

from confocal_billiards import (ConfocalFamily, IntervalSystem, band_integral,
                                classify_caustics, find_caustics_d_plus_1, frequency,
                                gap_integral, injectivity_probe, interval_system,
                                rotation_number, third_kind_polynomial)
from confocal_billiards.errors import DegenerateCaustic
from confocal_billiards.freqmap import band_measures


def sym_system():
    # bands [0,1] and [2,3], symmetric about s = 3/2
    return IntervalSystem((Fraction(3), Fraction(2), Fraction(1), Fraction(0)))


def gen642():
    s5 = mpmath.sqrt(5)
    al = mpmath.mpf(20) / 61 * (9 - 2 * s5)
    return ConfocalFamily([180 - 80 * s5, mpmath.mpf(4), mpmath.mpf(5)]), [al, al]


def test_arcsine_band():
    system = IntervalSystem((Fraction(7, 3), Fraction(0)))
    assert band_integral(system, [1.0], 1) / np.pi == pytest.approx(1.0, abs=1e-13)
    assert band_measures(system) == pytest.approx([1.0], abs=1e-13)


def test_symmetric_gap_integral_vanishes():
    assert abs(gap_integral(sym_system(), [-1.5, 1.0], 1)) < 1e-13


def test_symmetric_eta():
    eta = third_kind_polynomial(sym_system())
    assert float(eta[1]) == pytest.approx(1.0) and float(eta[0]) == pytest.approx(-1.5, abs=1e-12)
    assert band_measures(sym_system(), eta) == pytest.approx([0.5, 0.5], abs=1e-12)


def test_eta_matches_bisection():
    fam = ConfocalFamily([2, 4])
    system = interval_system(classify_caustics(fam, [Fraction(3)]))
    lo, hi = [float(x) for x in system.gap(1)]
    e = optimize.brentq(lambda e: gap_integral(system, [-e, 1.0], 1), lo, hi, xtol=1e-15)
    eta = third_kind_polynomial(system)
    assert lo < -float(eta[0]) < hi
    assert -float(eta[0]) == pytest.approx(e, abs=1e-12)


def test_catalog_gap_integrals_vanish(catalog):
    e = next(x for x in catalog if x.n == 5)
    system = interval_system(classify_caustics(ConfocalFamily(list(e.a)), list(e.alpha)))
    eta = third_kind_polynomial(system)
    for k in (1, 2):
        scale = band_integral(system, [1.0] * 3, k)
        assert abs(gap_integral(system, eta, k)) < 1e-11 * max(1.0, abs(scale))


def test_node_doubling_converges(catalog):
    for e in catalog:
        system = interval_system(classify_caustics(ConfocalFamily(list(e.a)), list(e.alpha)))
        eta = third_kind_polynomial(system)
        for k in range(1, 4):
            if system.band(k)[0] == system.band(k)[1]:
                continue
            v1 = band_integral(system, eta, k, nodes=512)
            v2 = band_integral(system, eta, k, nodes=1024)
            assert abs(v1 - v2) < 1e-12 * max(1.0, abs(v2))


def test_total_mass_and_monotone():
    fam = ConfocalFamily([2, 4, 5])
    fv = frequency(fam, [3.1, 3.5])
    assert sum(fv.band_measures) == pytest.approx(1.0, abs=1e-10)
    assert fv.f[0] < fv.f[1] < fv.f[2] and fv.f[2] == pytest.approx(1.0, abs=1e-10)


def test_gen642_frequency_is_winding_ratio():
    fam, al = gen642()
    assert frequency(fam, al).f == pytest.approx([2 / 6, 4 / 6, 1.0], abs=1e-8)


def test_d_plus_1_frequency():
    fam = ConfocalFamily([2, 4, 5])
    al = find_caustics_d_plus_1(fam).alpha
    assert frequency(fam, al).f == pytest.approx([2 / 4, 3 / 4, 1.0], abs=1e-8)


def test_rotation_at_triangle_caustic():
    al = find_caustics_d_plus_1(ConfocalFamily([1, 2])).alpha[0]
    assert abs(rotation_number(2, 1, float(al)) - 1 / 3) < 1e-8


def test_rotation_vanishes_at_zero():
    assert 0 < rotation_number(2, 1, 1e-10) < 1e-3


def _rho_oracle(a, b, lam):
    with mpmath.workdps(30):
        lam = mpmath.mpf(lam)
        num = mpmath.quad(lambda t: 1 / mpmath.sqrt((lam - t) * (b - t) * (a - t)), [0, lam])
        den = mpmath.quad(lambda t: 1 / mpmath.sqrt((t - lam) * (t - b) * (a - t)), [b, a])
        return float(num / (2 * den))


@pytest.mark.parametrize("lam", [0.2, 0.7, 1 - 1e-3, 1 - 1e-6])
def test_rotation_matches_quadrature(lam):
    assert rotation_number(2, 1, lam) == pytest.approx(_rho_oracle(2, 1, lam), abs=1e-8)


def test_rotation_approaches_half_below_b():
    rho = [rotation_number(2, 1, 1 - 10.0 ** -k) for k in range(2, 8)]
    assert all(x < y < 0.5 for x, y in zip(rho, rho[1:]))


@pytest.mark.parametrize("lam", [0, 1])
def test_rotation_degenerate(lam):
    with pytest.raises(DegenerateCaustic):
        rotation_number(2, 1, lam)


def test_rotation_domain():
    with pytest.raises(ValueError):
        rotation_number(1, 2, 0.5)
    with pytest.raises(ValueError):
        rotation_number(2, 1, 2.5)


def test_probe_planar_monotone():
    grid = [[x] for x in np.linspace(0, 1, 202)[1:-1]]
    rep = injectivity_probe(ConfocalFamily([1, 2]), grid)
    assert rep.rho_sign_violations == 0 and not rep.collisions and rep.min_distance > 0


def test_probe_rejects_mixed_components():
    with pytest.raises(ValueError):
        injectivity_probe(ConfocalFamily([2, 4, 5]), [[1.0, 3.0], [3.0, 3.5]])
