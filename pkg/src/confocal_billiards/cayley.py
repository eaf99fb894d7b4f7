"""Periodicity deciders: general (n, d), the planar case and dimension three."""
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .confocal import CausticSet, classify_caustics, interval_system
from .errors import (BilliardError, DegenerateCaustic, PeriodTooSmall,
                     TypeMismatch)
from .extremal import admissible_pattern, analyze_alternance, pell_solve
from .numeric import (DEFAULT_PREC, DEFAULT_THRESHOLD_EXP, all_rational, is_rational,
                      lt, rational_sqrt, threshold, to_mpf, unify,
                      workprec)
from .series import (Polynomial, bareiss_rank, hankel_condition, rational_null_space,
                     singular_values, sqrt_series)

SIX_VARIANTS = ((6, 4, 2), (6, 5, 4), (6, 5, 2), (6, 3, 2))


@dataclass
class Check:
    """One step of a decision: what was tested and whether it held."""

    condition: str
    passed: bool
    detail: str = ""


@dataclass
class PeriodicityVerdict:
    periodic: bool
    elliptic_period: int
    cartesian_period: int
    predicted_winding: list = None
    signature: list = None
    pell_residual: object = None
    reason: list = field(default_factory=list)

    @property
    def fired(self):
        """The rank condition that held, or None."""
        passed = [c.condition for c in self.reason if c.passed and c.condition.startswith("C(")]
        return passed[-1] if passed else None


def _caustic_set(family, caustics):
    if isinstance(caustics, CausticSet):
        return caustics
    return classify_caustics(family, caustics)


def _radius(values):
    return min(abs(to_mpf(v)) for v in values)


def _vanishes(series, ks, threshold_exp):
    """Whether the coefficients C_k, k in ks, vanish at the series scale."""
    if series.exact:
        return all(series[k] == 0 for k in ks)
    R = to_mpf(series.radius)
    tol = threshold(threshold_exp) * series.magnitude()
    return all(abs(to_mpf(series[k])) * R ** k <= tol for k in ks)


def _rank(M, ncols, threshold_exp):
    """Rank of M; exact for rationals, else SVD after column normalization."""
    if all_rational(x for row in M for x in row):
        return bareiss_rank(M), None
    cols = [[to_mpf(row[j]) for row in M] for j in range(ncols)]
    norms = [mpmath.sqrt(mpmath.fsum(x * x for x in col)) or mpmath.mpf(1) for col in cols]
    A = [[to_mpf(row[j]) / norms[j] for j in range(ncols)] for row in M]
    s, V = singular_values(A, ncols)
    tol = threshold(threshold_exp) * max(s)
    return sum(1 for x in s if x > tol), (s, V, norms)


def parity_allows(caustics, m):
    """Winding-number parity screens.

    m_0 may be odd only when b_1 is a caustic parameter (an ellipsoid
    caustic); m_j with j >= 1 may be odd only when b_{2j} and b_{2j+1}
    are both caustic parameters.  No two consecutive m_j are odd.
    """
    d = caustics.d
    for j in range(d):
        if m[j] % 2 == 0:
            continue
        if j + 1 < d and m[j + 1] % 2:
            return False
        flank = [1] if j == 0 else [2 * j, 2 * j + 1]
        if any(caustics.is_a(k) for k in flank if k <= 2 * d - 1):
            return False
    return True


def _cartesian_factor(caustics, m_tilde):
    """1 if the elliptic winding numbers pass the parity screens, else 2."""
    return 1 if parity_allows(caustics, m_tilde) else 2


def _divisors(n, lo):
    return [k for k in range(max(lo, 1), n + 1) if n % k == 0]


def check_periodicity(family, caustics, n, prec=DEFAULT_PREC,
                      threshold_exp=DEFAULT_THRESHOLD_EXP):
    """Decide whether trajectories with these caustics are n-periodic.

    Each divisor ñ >= d of n is tried in increasing order against the
    rank condition C(ñ, d); the first hit is the elliptic period.  The
    Pell solution of degree ñ then gives the elliptic winding numbers,
    and the parity screens decide whether the Cartesian period is ñ or
    2ñ.
    """
    d = family.d
    if n <= d:
        raise PeriodTooSmall(
            f"period {n} <= d = {d}: such trajectories lie in a coordinate hyperplane; "
            "restrict the family to d - 1 axes instead")
    cs = _caustic_set(family, caustics)
    reason = []
    if n % 2 and 0 not in cs.intervals:
        reason.append(Check("odd period needs an ellipsoid caustic", False,
                            f"caustic intervals {list(cs.intervals)}"))
        return PeriodicityVerdict(False, 0, n, reason=reason)
    reason.append(Check("type screen", True))
    with workprec(prec):
        S = sqrt_series(cs.pol(), 2 * n + 2, normalized=True, radius=_radius(cs.b))
        for nt in _divisors(n, d):
            res = hankel_condition(S, nt, d, threshold_exp)
            label = f"C({nt},{d})"
            reason.append(Check(label, res.satisfied, f"rank {res.rank} of {res.shape}"))
            if not res.satisfied:
                continue
            system = interval_system(cs)
            sol = pell_solve(system, nt, prec, threshold_exp)
            wd = analyze_alternance(sol, system, prec)
            k = _cartesian_factor(cs, wd.m)
            N = k * nt
            winding = [k * x for x in wd.m]
            if n % N:
                reason.append(Check(f"period {N} divides {n}", False,
                                    f"elliptic winding {wd.m} forces factor {k}"))
                return PeriodicityVerdict(False, nt, N, winding, None, sol.residual, reason)
            reason.append(Check(f"period {N} divides {n}", True, f"factor {k}"))
            sig = analyze_alternance(pell_solve(system, N, prec, threshold_exp), system, prec).tau \
                if k > 1 else wd.tau
            return PeriodicityVerdict(True, nt, N, winding, sig, sol.residual, reason)
    return PeriodicityVerdict(False, 0, n, reason=reason)


# -- planar case ----------------------------------------------------------

def _planar_series(a, alpha, order):
    a1, a2 = unify(a)
    exact = is_rational(a1) and is_rational(alpha)
    alpha = Fraction(alpha) if exact else to_mpf(alpha)
    if not exact:
        a1, a2 = to_mpf(a1), to_mpf(a2)
    one = Fraction(1) if exact else mpmath.mpf(1)
    # discriminant of the pencil C + x*Gamma of the boundary and the caustic
    f1 = Polynomial([one / (a1 - alpha), one / a1])
    f2 = Polynomial([one / (a2 - alpha), one / a2])
    d3 = f1 * f2 * Polynomial([-one, -one])
    roots = [-a1 / (a1 - alpha), -a2 / (a2 - alpha), -one]
    radius = min(abs(to_mpf(r)) for r in roots)
    P = d3 * (1 / d3[0])
    return sqrt_series(P, order, normalized=True, radius=radius)


def planar_cayley_matrix(a, alpha, n, prec=DEFAULT_PREC):
    """The classical Cayley matrix for an n-periodic planar trajectory.

    n = 2m+1: [C_{2+i+j}] of size m; n = 2m: [C_{3+i+j}] of size m-1.
    Returns the matrix and the series it was built from.
    """
    if n < 3:
        raise ValueError("planar periods start at 3")
    a1, a2 = a
    if not (lt(0, alpha) and lt(alpha, a2)):
        raise DegenerateCaustic("caustic parameter must lie in (0, a2)")
    if not (lt(alpha, a1) or lt(a1, alpha)):
        raise DegenerateCaustic("caustic parameter equals a1")
    with workprec(prec):
        S = _planar_series(a, alpha, n + 2)
        if n % 2:
            m, start = (n - 1) // 2, 2
        else:
            m, start = n // 2 - 1, 3
        M = [[S[start + i + j] for j in range(m)] for i in range(m)]
        return M, S


def planar_cayley(a, alpha, n, prec=DEFAULT_PREC, threshold_exp=DEFAULT_THRESHOLD_EXP):
    """Cayley's condition for an n-periodic billiard in an ellipse with a conic caustic."""
    with workprec(prec):
        M, S = planar_cayley_matrix(a, alpha, n, prec)
        size = len(M)
        if S.exact:
            return bareiss_rank(M) < size
        R = to_mpf(S.radius)
        start = 2 if n % 2 else 3
        W = [[to_mpf(M[i][j]) * R ** (start + i + j) for j in range(size)] for i in range(size)]
        s, _ = singular_values(W, size)
        return min(s) <= threshold(threshold_exp) * max(max(s), S.magnitude())


# -- (d+1)-periodic condition ---------------------------------------------

@dataclass
class DPlusOneCheck:
    satisfied: bool
    type_ok: bool
    vanishing: list
    poly_values: list
    reason: str = ""


def check_d_plus_1_detail(family, caustics, prec=DEFAULT_PREC,
                          threshold_exp=DEFAULT_THRESHOLD_EXP):
    """(d+1)-periodicity: type pattern, then vanishing on the divided series.

    Even d divides sqrt(Pol) by prod (alpha_j - x) over odd j, requires
    C_{d/2+1..d} = 0 and sum_{k <= d/2} C_k alpha_j^k = 0 at even j < d.
    Odd d divides by the even-j factors, requires C_{(d+1)/2+1..d} = 0 and
    the degree (d+1)/2 sum at odd j < d.  j is 1-based.
    """
    d = family.d
    cs = _caustic_set(family, caustics)
    if not admissible_pattern(cs.intervals, d):
        return DPlusOneCheck(False, False, [], [], f"type pattern {list(cs.intervals)}")
    al = cs.alpha
    if d % 2 == 0:
        div_idx, eval_idx, h = range(1, d, 2), range(2, d - 1, 2), d // 2
    else:
        div_idx, eval_idx, h = range(2, d, 2), range(1, d - 1, 2), (d + 1) // 2
    with workprec(prec):
        divisor = Polynomial([1])
        for j in div_idx:
            divisor = divisor * Polynomial([al[j - 1], -1])
        S = sqrt_series(cs.pol(), d + 2, divisor=divisor, normalized=True,
                        radius=_radius(cs.b))
        zero_ks = list(range(h + 1, d + 1))
        vanish = _vanishes(S, zero_ks, threshold_exp)
        values, ok = [], vanish
        for j in eval_idx:
            x = al[j - 1] if S.exact else to_mpf(al[j - 1])
            terms = [S[k] * x ** k for k in range(h + 1)]
            v = sum(terms)
            values.append(v)
            if S.exact:
                ok = ok and v == 0
            else:
                scale = max(abs(to_mpf(t)) for t in terms)
                ok = ok and abs(to_mpf(v)) <= threshold(threshold_exp) * scale
        return DPlusOneCheck(ok, True, [S[k] for k in zero_ks], values,
                             "" if ok else "series conditions fail")


def check_d_plus_1(family, caustics, prec=DEFAULT_PREC, threshold_exp=DEFAULT_THRESHOLD_EXP):
    return check_d_plus_1_detail(family, caustics, prec, threshold_exp).satisfied


# -- dimension three ------------------------------------------------------

@dataclass
class SeriesCheck:
    satisfied: bool
    coefficients: dict
    reason: str = ""


def check_five_d3(family, alpha, prec=DEFAULT_PREC, threshold_exp=DEFAULT_THRESHOLD_EXP):
    """5-periodicity in dimension three: C_3 = C_4 = 0 on sqrt(Pol)/(alpha_1 - x).

    alpha_1 is the ellipsoid caustic; without one there is no odd period.
    """
    if family.d != 3:
        raise ValueError("defined for d = 3")
    cs = _caustic_set(family, alpha)
    if cs.intervals[0] != 0:
        return SeriesCheck(False, {}, "no ellipsoid caustic")
    with workprec(prec):
        S = sqrt_series(cs.pol(), 6, divisor=Polynomial([cs.alpha[0], -1]),
                        normalized=True, radius=_radius(cs.b))
        ok = _vanishes(S, [3, 4], threshold_exp)
        return SeriesCheck(ok, {3: S[3], 4: S[4]}, "" if ok else "C3, C4 do not vanish")


@dataclass
class SixCheck:
    satisfied: bool
    variant: tuple
    condition: bool
    pell_winding: list = None
    witness: tuple = None
    witness_residual: object = None
    cayley642: object = None
    reason: str = ""


def cayley642_determinant(a, prec=DEFAULT_PREC):
    """det [[B3, B4], [B4, B5]] of sqrt((a1-x)(a2-x)(a3-x)), relative to its scale."""
    with workprec(prec):
        a = unify(a)
        P = Polynomial.from_roots(a, lead=-1)
        B = sqrt_series(P, 6, normalized=True, radius=_radius(a))
        det = B[3] * B[5] - B[4] * B[4]
        if B.exact:
            return det, det
        R = to_mpf(B.radius)
        scale = max(abs(to_mpf(B[k])) * R ** k for k in (3, 4, 5)) ** 2
        return det, abs(to_mpf(det)) * R ** 8 / scale


def six_odd_matrix(alpha1, alpha2, C):
    """The 6x5 matrix whose rank drops for 6-periodicity with odd m_1."""
    e2 = alpha1 * alpha2
    e1 = -(alpha1 + alpha2)
    poly = [e2, e1, 1]
    rows = []
    for i in range(6):
        row = [poly[i - k] if 0 <= i - k <= 2 else 0 for k in range(3)]
        row += [C[i], C[i - 1] if i >= 1 else 0]
        rows.append(row)
    return rows


def _six_odd(cs, S, threshold_exp):
    al1, al2 = cs.alpha
    if not S.exact:
        al1, al2 = to_mpf(al1), to_mpf(al2)
    R = to_mpf(S.radius) if not S.exact else 1
    # substitute x = R t so every column is dimensionless
    C = [S[i] * R ** i for i in range(6)]
    M = six_odd_matrix(al1 / R, al2 / R, C)
    if S.exact:
        rank = bareiss_rank(M)
        if rank >= 5:
            return False, None
        h = rational_null_space(M, 5)[0]
    else:
        rank, (s, V, norms) = _rank(M, 5, threshold_exp)
        if rank >= 5:
            return False, None
        k = min(range(5), key=lambda i: s[i])
        h = [V[k, j] / norms[j] for j in range(5)]
    # back to x: t^k picks up R^-k, and (al1-x)(al2-x) = R^2 (al1/R-t)(al2/R-t)
    p2 = Polynomial([h[0] / R ** 2, h[1] / R ** 3, h[2] / R ** 4])
    p1 = Polynomial([h[3], h[4] / R])
    return True, (p2, p1)


def _witness(cs, S, p2, p1):
    """Rescale so that (al1-x)(al2-x)p2^2 - (a1-x)(a2-x)(a3-x)p1^2 = x^6."""
    exact = S.exact
    root = rational_sqrt(S.scale_squared) if exact else None
    if root is None:
        exact = False
        root = mpmath.sqrt(to_mpf(S.scale_squared))
        p2, p1 = p2.to_mpf(), p1.to_mpf()
    # the matrix was built on the normalized series: y = root * S
    p1 = p1 * (1 / root)
    A = Polynomial.from_roots(unify(cs.alpha), lead=1)
    B = Polynomial.from_roots(unify(cs.family.a), lead=-1)
    if not exact:
        A, B = A.to_mpf(), B.to_mpf()
    lead = (A * p2 * p2 - B * p1 * p1)[6]
    r = rational_sqrt(lead) if exact else None
    if r is None:
        if exact:
            p2, p1, A, B = p2.to_mpf(), p1.to_mpf(), A.to_mpf(), B.to_mpf()
        if not to_mpf(lead) > 0:
            return None, None
        r = mpmath.sqrt(to_mpf(lead))
    p2, p1 = p2 * (1 / r), p1 * (1 / r)
    if to_mpf(p2[2]) < 0:
        p2, p1 = -p2, -p1
    resid = A * p2 * p2 - B * p1 * p1 - Polynomial.monomial(6)
    return (p2, p1), resid.max_abs()


def check_six_d3(family, alpha1, alpha2, variant, prec=DEFAULT_PREC,
                 threshold_exp=DEFAULT_THRESHOLD_EXP):
    """6-periodicity in dimension three with the requested winding triple.

    (6,4,2): C_4 = C_5 = 0 on sqrt(Pol).  Odd m_1: both caustics are
    1-sheeted hyperboloids and the 6x5 matrix has rank < 5; its null
    vector yields the witness pair (p2, p1).  Several winding triples
    share the same condition, so the triple is confirmed on the Pell
    solution of degree 6.
    """
    if family.d != 3:
        raise ValueError("defined for d = 3")
    variant = tuple(variant)
    if variant not in SIX_VARIANTS:
        raise ValueError(f"winding triple {variant} is not a 6-periodic variant")
    cs = _caustic_set(family, [alpha1, alpha2])
    odd = variant[1] % 2 == 1
    if odd and tuple(cs.intervals) != (1, 1):
        raise TypeMismatch(f"winding {variant} needs two 1-sheeted hyperboloids, "
                           f"got {list(cs.types)}")
    with workprec(prec):
        S = sqrt_series(cs.pol(), 14, normalized=True, radius=_radius(cs.b))
        out = SixCheck(False, variant, False)
        if cs.double_caustics():
            det, rel = cayley642_determinant(family.a, prec)
            out.cayley642 = rel
        if not odd:
            out.condition = _vanishes(S, [4, 5], threshold_exp)
        else:
            out.condition, pair = _six_odd(cs, S, threshold_exp)
            if pair is not None:
                out.witness, out.witness_residual = _witness(cs, S, *pair)
        if not out.condition:
            out.reason = "series condition fails"
            return out
        system = interval_system(cs)
        try:
            sol = pell_solve(system, 6, prec, threshold_exp)
            wd = analyze_alternance(sol, system, prec)
        except BilliardError as exc:
            out.reason = f"no degree-6 Pell solution: {exc}"
            return out
        out.pell_winding = wd.m
        out.satisfied = tuple(wd.m) == variant
        out.reason = "" if out.satisfied else f"Pell winding is {tuple(wd.m)}"
        return out
