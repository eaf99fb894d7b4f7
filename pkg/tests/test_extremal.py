from fractions import Fraction

import mpmath
import pytest

from confocal_billiards import (ConfocalFamily, IntervalSystem, analyze_alternance,
                                classify_caustics, find_caustics_d_plus_1, hyperboloid_4periodic,
                                interval_system, pell_solve, unique_pair_in_family)
from confocal_billiards.errors import NoSolution
from confocal_billiards.numeric import to_mpf

EPS = mpmath.mpf(10) ** -30

DPLUS1_FAMILIES = [
    [1, 2],
    [2, 4, 5],
    [Fraction(4, 5), Fraction(87, 50), Fraction(64, 25), Fraction(171, 20)],
    [Fraction(46, 25), Fraction(231, 100), Fraction(51, 20), Fraction(31, 5), Fraction(489, 50)],
]


def gen642_system():
    s5 = mpmath.sqrt(5)
    al = mpmath.mpf(20) / 61 * (9 - 2 * s5)
    fam = ConfocalFamily([180 - 80 * s5, mpmath.mpf(4), mpmath.mpf(5)])
    return interval_system(classify_caustics(fam, [al, al]))


def _pell_identity(sol, system):
    hp = system.hat_p()
    lhs = sol.p_hat * sol.p_hat - hp * sol.q_hat * sol.q_hat
    return max(abs(to_mpf(lhs[k]) - (1 if k == 0 else 0)) for k in range(len(lhs)))


def test_single_band_exact():
    system = IntervalSystem((Fraction(3, 2), Fraction(0)))
    for n in range(1, 7):
        sol = pell_solve(system, n)
        assert sol.exact and sol.residual == 0
        assert sol.p_hat(0) == -1
        assert _pell_identity(sol, system) == 0


def test_gen642_elliptic_period():
    system = gen642_system()
    sol = pell_solve(system, 3)
    assert sol.q_hat.degree == 0
    assert sol.residual < EPS and _pell_identity(sol, system) < EPS


def test_gen642_winding():
    system = gen642_system()
    wd = analyze_alternance(pell_solve(system, 6), system)
    assert wd.m == [6, 4, 2] and wd.tau == [1, 1, 1]
    assert wd.k == 2 and wd.n_tilde == 3
    assert wd.law_holds and wd.strictly_decreasing


def test_gamma_root_in_last_band():
    fam = ConfocalFamily([2, 4, 5])
    r = find_caustics_d_plus_1(fam)
    system = interval_system(classify_caustics(fam, r.alpha))
    sol = pell_solve(system, 4)
    assert sol.q_hat.degree == 1
    root = -to_mpf(sol.q_hat[0]) / to_mpf(sol.q_hat[1])
    assert 0 < root < to_mpf(system.c[-2])
    assert abs(root - r.gamma) < EPS


def test_no_solution_for_generic_caustics():
    cs = classify_caustics(ConfocalFamily([2, 4, 5]), [3, Fraction(37, 10)])
    with pytest.raises(NoSolution):
        pell_solve(interval_system(cs), 4)


def test_degree_below_band_count():
    cs = classify_caustics(ConfocalFamily([2, 4, 5]), [3, Fraction(37, 10)])
    with pytest.raises(ValueError):
        pell_solve(interval_system(cs), 2)


@pytest.mark.parametrize("a", DPLUS1_FAMILIES, ids=lambda a: f"d{len(a)}")
def test_d_plus_1_winding(a):
    fam = ConfocalFamily(a)
    d = fam.d
    r = find_caustics_d_plus_1(fam)
    assert r.admissible
    system = interval_system(classify_caustics(fam, r.alpha))
    sol = pell_solve(system, d + 1)
    wd = analyze_alternance(sol, system)
    assert wd.m == list(range(d + 1, 1, -1))
    assert wd.tau == [0] * (d - 1) + [1]
    # the construction and the Hankel route give the same polynomial
    for k in range(d + 2):
        assert abs(to_mpf(sol.p_hat[k]) - r.p_hat[k]) < EPS * max(1, abs(r.p_hat[k]))


@pytest.mark.parametrize("a", DPLUS1_FAMILIES, ids=lambda a: f"d{len(a)}")
def test_p_hat_minus_one_at_reciprocal_axes(a):
    r = find_caustics_d_plus_1(ConfocalFamily(a))
    assert abs(r.p_hat(0) + 1) < EPS
    for aj in a:
        assert abs(r.p_hat(1 / to_mpf(aj)) + 1) < EPS
    assert abs(r.p_hat(r.gamma) - 1) < EPS


def test_planar_finder_closed_form():
    r = find_caustics_d_plus_1(ConfocalFamily([1, 2]))
    s3 = mpmath.sqrt(3)
    assert abs(r.gamma - (3 - s3) / 6) < EPS
    assert abs(r.alpha[0] - 6 / (3 + 2 * s3)) < EPS
    assert 0 < r.alpha[0] < 1


def test_five_periodic_winding(catalog):
    e = next(x for x in catalog if x.n == 5)
    assert e.pell.winding == [5, 4, 2] and e.signature == [0, 1, 1]


def test_hyperboloid4_closed_form():
    pair = hyperboloid_4periodic(4, 5)
    assert pair.a1 == Fraction(20, 9)
    assert abs(pair.alpha - (9 - mpmath.sqrt(41))) < EPS
    assert pair.alpha_expr == "9-sqrt(41)"
    assert mpmath.mpf(20) / 9 < pair.alpha < 4


def test_hyperboloid4_equal_axes_limit():
    eps = Fraction(1, 10 ** 30)
    pair = hyperboloid_4periodic(1, 1 + eps)
    assert abs(to_mpf(pair.a1) - mpmath.mpf(1) / 2) < mpmath.mpf(10) ** -29
    assert abs(pair.alpha - (2 - mpmath.sqrt(2))) < mpmath.mpf(10) ** -29
    assert to_mpf(pair.a1) < pair.alpha < 1


def test_hyperboloid4_homogeneous():
    base = hyperboloid_4periodic(4, 5)
    for t in (Fraction(3), Fraction(2, 7)):
        pair = hyperboloid_4periodic(4 * t, 5 * t)
        assert pair.a1 == t * base.a1
        assert abs(pair.alpha - to_mpf(t) * base.alpha) < EPS


def test_hyperboloid4_rejects_order():
    with pytest.raises(ValueError):
        hyperboloid_4periodic(5, 4)


def test_unique_pair():
    up = unique_pair_in_family(ConfocalFamily([1, 4, 5]))
    assert abs(up.lam - (1 - mpmath.sqrt(12))) < EPS
    a1, a2, a3 = up.shifted
    assert abs(a1 - a2 * a3 / (a2 + a3)) < 1e-12
    assert 1 < up.hyperboloid_alpha < 4


def test_unique_pair_translation():
    base = unique_pair_in_family(ConfocalFamily([1, 4, 5]))
    moved = unique_pair_in_family(ConfocalFamily([3, 6, 7]))
    assert abs(moved.lam - base.lam - 2) < EPS
    assert abs(moved.hyperboloid_alpha - base.hyperboloid_alpha - 2) < EPS


def test_unique_pair_random_families():
    import numpy as np
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = sorted(rng.uniform(0.5, 10, size=3))
        up = unique_pair_in_family(ConfocalFamily(a))
        assert up.lam < a[0] and a[0] < up.hyperboloid_alpha < a[1]
