"""Pell equations on interval systems and the caustic constructions built on them."""
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from functools import reduce

import mpmath

from .confocal import ConfocalFamily, IntervalSystem
from .errors import ComplexRoot, NoSolution
from .numeric import (DEFAULT_PREC, DEFAULT_THRESHOLD_EXP, all_rational, is_rational,
                      lt, sign, sqrt, to_mpf, unify, workprec)
from .series import (Polynomial, hankel_matrix, pade_sqrt, singular_values,
                     sqrt_series)


@dataclass
class PellSolution:
    """p_hat^2 - hatP q_hat^2 = 1 with p_hat(0) = -1."""

    p_hat: Polynomial
    q_hat: Polynomial
    residual: object
    n: int
    d: int
    normalization: object
    exact: bool

    def sup_on(self, points):
        return max(abs(to_mpf(self.p_hat(to_mpf(s)))) for s in points)


def _max_abs_coeff(poly):
    if not poly.coeffs:
        return Fraction(0)
    if poly.exact:
        return max(abs(c) for c in poly.coeffs)
    return max(abs(to_mpf(c)) for c in poly.coeffs)


def pell_solve(system, n, prec=DEFAULT_PREC, threshold_exp=DEFAULT_THRESHOLD_EXP):
    """Degree-n Pell solution on the bands of ``system``.

    The Pade pair of sqrt(prod(1 - c_j x)) at (n, n-d) satisfies
    p^2 - P q^2 = k x^(2n); reversing coefficients turns it into the
    s-variable identity, and dividing by -p_n fixes p_hat(0) = -1.
    Rational endpoints give an exact solution.
    """
    d = system.d
    if n < d:
        raise ValueError("Pell degree must be at least the number of bands")
    with workprec(prec):
        c = unify(system.c)
        P = Polynomial([1])
        for cj in c[:-1]:
            P = P * Polynomial([1, -cj])
        radius = 1 / to_mpf(c[0])
        S = sqrt_series(P, 2 * n + 2, normalized=True, radius=radius)
        pair = pade_sqrt(S, n, d, threshold_exp)
        if pair is None:
            raise NoSolution(f"no Pell solution of degree {n} on this system")
        p, q = pair.p, pair.q
        lead = p[n]
        if lead == 0:
            raise NoSolution("Pade numerator has deficient degree")
        exact = all_rational(p.coeffs + q.coeffs)
        one = Fraction(1) if exact else mpmath.mpf(1)
        p_hat = p.reversed(n) * (-one / lead)
        q_hat = q.reversed(n - d) * (one / abs(lead))
        if q_hat.coeffs and q_hat.coeffs[-1] < 0:
            q_hat = -q_hat
        hat_p = Polynomial.from_roots(c)
        residual = _max_abs_coeff(p_hat * p_hat - hat_p * q_hat * q_hat - 1)
        return PellSolution(p_hat, q_hat, residual, n, d, lead * lead, exact)


@dataclass
class WindingData:
    m: list
    tau: list
    band_counts: list
    k: int
    n_tilde: int
    m_tilde: list
    q_roots: list = field(default_factory=list)
    points: list = field(default_factory=list)

    @property
    def law_holds(self):
        m = list(self.m) + [0]
        return all(m[j] == m[j + 1] + self.tau[j] + 1 for j in range(len(self.tau)))

    @property
    def strictly_decreasing(self):
        return all(x > y for x, y in zip(self.m, self.m[1:]))


def _sign_runs(signs):
    runs = 0
    last = 0
    for s in signs:
        if s != last:
            runs += 1
            last = s
    return runs


def analyze_alternance(sol, system, prec=DEFAULT_PREC, imag_tol=mpmath.mpf(10) ** -25):
    """Winding numbers and signature read off the solutions of p_hat^2 = 1.

    The solutions are the 2d band endpoints and the (double) real roots
    of q_hat.  Counting sign runs of p_hat over [0, c_{2j+1}] gives
    1 + m_j; tau_j counts q_hat roots inside band j.
    """
    d = system.d
    with workprec(prec):
        c = [to_mpf(x) for x in system.c]
        roots = sol.q_hat.roots()
        real = []
        for r in roots:
            if abs(r.imag) > imag_tol * (1 + abs(r.real)):
                raise ComplexRoot(f"q_hat has a non-real root {mpmath.nstr(r, 12)}")
            real.append(+r.real)
        p = sol.p_hat.to_mpf()
        pts = [(cj, sign(p(cj))) for cj in c] + [(r, sign(p(r))) for r in real]
        pts.sort(key=lambda t: t[0])
        A = []
        for j in range(d):
            top = c[2 * j]
            A.append(_sign_runs(s for v, s in pts if v <= top))
        m = [x - 1 for x in A]
        tau = []
        for k in range(1, d + 1):
            lo, hi = c[2 * k - 1], c[2 * k - 2]
            tau.append(sum(1 for r in real if lo < r < hi))
        counts = [A[k - 1] - A[k] for k in range(1, d)] + [A[d - 1]]
        k = reduce(gcd, m)
        return WindingData(m, tau, counts, k, m[0] // k, [x // k for x in m], real, pts)


# -- (d+1)-periodic construction -------------------------------------------

@dataclass
class DPlusOneResult:
    gamma: object
    alpha: list
    admissible: bool
    p_hat: Polynomial
    q_hat: Polynomial
    reason: str = ""


def _critical_point(r, lo, hi):
    """Root of r' in (lo, hi): Newton from the midpoint, bisection on failure."""
    dr = r.derivative()
    d2r = dr.derivative()
    flo = dr(lo)
    x = (lo + hi) / 2
    for _ in range(200):
        f = dr(x)
        if f == 0:
            return x
        if sign(f) == sign(flo):
            lo = x
        else:
            hi = x
        g = d2r(x)
        newton = x - f / g if g != 0 else None
        if newton is not None and lo < newton < hi:
            step = abs(newton - x)
            x = newton
            if step <= mpmath.eps * abs(x) * 4:
                return x
        else:
            x = (lo + hi) / 2
        if hi - lo <= mpmath.eps * abs(x):
            return x
    return x


def admissible_pattern(intervals, d):
    """Type pattern required for (d+1)-periodicity, by parity of d."""
    intervals = list(intervals)
    want = []
    if d % 2 == 0:
        want.append(0)
        for j in range(2, d - 1, 2):
            want += [j, j]
    else:
        for j in range(1, d - 1, 2):
            want += [j, j]
    return intervals == want


def find_caustics_d_plus_1(family, prec=DEFAULT_PREC):
    """The unique caustic set of (d+1)-periodic trajectories, if it exists."""
    d = family.d
    with workprec(prec):
        a = unify(family.a)
        r = Polynomial([0, 1])
        for aj in a:
            r = r * Polynomial([-1 / to_mpf(aj) if not is_rational(aj) else -Fraction(1) / aj, 1])
        r = r.to_mpf()
        hi = 1 / to_mpf(a[-1])
        gamma = _critical_point(r, mpmath.mpf(0), hi)
        rg = r(gamma)
        p_hat = r * (2 / rg) - 1
        q_hat = Polynomial([-gamma, 1]) * (2 / abs(rg))
        quot, _ = (r - rg).divmod(Polynomial([gamma * gamma, -2 * gamma, 1]))
        roots = quot.roots()
        alpha, reason = [], ""
        for z in roots:
            if abs(z.imag) > mpmath.mpf(10) ** (-prec // 8) * (1 + abs(z)):
                reason = "complex root of p_hat = 1"
                break
            if z.real <= 0:
                reason = "non-positive root of p_hat = 1"
                break
            alpha.append(1 / z.real)
        admissible = not reason
        if admissible:
            alpha.sort()
            av = [to_mpf(x) for x in a]
            intervals = [sum(1 for x in av if x < al) for al in alpha]
            if any(abs(al - x) < mpmath.mpf(10) ** (-prec // 8) * x for al in alpha for x in av):
                admissible, reason = False, "root coincides with a semi-axis"
            elif not admissible_pattern(intervals, d):
                admissible, reason = False, f"type pattern {intervals} not admissible"
        return DPlusOneResult(gamma, alpha, admissible, p_hat, q_hat, reason)


# -- closed forms in dimension three --------------------------------------

@dataclass
class HyperboloidPair:
    a1: object
    alpha: object
    alpha_expr: str = ""


def hyperboloid_4periodic(a2, a3, prec=DEFAULT_PREC):
    """a1 and the double hyperboloid caustic giving 4-periodic generatrices."""
    if not lt(0, a2) or not lt(a2, a3):
        raise ValueError("need 0 < a2 < a3")
    with workprec(prec):
        a2, a3 = unify([a2, a3])
        a1 = a2 * a3 / (a2 + a3)
        rad = a2 * a2 + a3 * a3
        root = sqrt(rad)
        alpha = a2 + a3 - root if is_rational(root) else to_mpf(a2 + a3) - root
        expr = f"{a2 + a3}-sqrt({rad})" if is_rational(rad) else ""
        return HyperboloidPair(a1, +alpha if not is_rational(alpha) else alpha, expr)


@dataclass
class UniquePair:
    lam: object
    hyperboloid_alpha: object
    shifted: tuple


def unique_pair_in_family(family, prec=DEFAULT_PREC):
    """Ellipsoid Q_lambda and hyperboloid Q_alpha of the family carrying 4-periodic generatrices."""
    if family.d != 3:
        raise ValueError("defined for d = 3")
    with workprec(prec):
        a1, a2, a3 = [to_mpf(x) for x in family.a]
        lam = a1 - mpmath.sqrt((a3 - a1) * (a2 - a1))
        pair = hyperboloid_4periodic(a2 - lam, a3 - lam, prec)
        return UniquePair(lam, pair.alpha + lam, (a1 - lam, a2 - lam, a3 - lam))


# -- Newton solve of the rank condition in parameter space -----------------

def solve_cayley_parameters(build, x0, n, d, prec=DEFAULT_PREC, tol_exp=None):
    """Polish parameters so that the C(n, d) window becomes singular.

    ``build(params)`` returns Pol(x) for the given parameter list.  The
    unknowns are the parameters plus the null vector with one entry
    pinned to 1; the system is square when there are d-1 parameters.
    """
    with workprec(prec):
        x0 = [to_mpf(x) for x in x0]
        S0 = sqrt_series(build(x0), 2 * n + 2, normalized=True)
        H0 = hankel_matrix(S0, n, d)
        ncols = n - d + 1
        s, V = singular_values(H0, ncols)
        k = min(range(len(s)), key=lambda i: s[i])
        v = [V[k, j] for j in range(ncols)]
        pin = max(range(ncols), key=lambda j: abs(v[j]))
        v = [x / v[pin] for x in v]
        free = [j for j in range(ncols) if j != pin]
        npar = len(x0)

        def equations(*u):
            params = list(u[:npar])
            h = [mpmath.mpf(1)] * ncols
            for j, val in zip(free, u[npar:]):
                h[j] = val
            S = sqrt_series(build(params), 2 * n + 2, normalized=True)
            H = hankel_matrix(S, n, d)
            return [mpmath.fsum(H[i][j] * h[j] for j in range(ncols)) for i in range(len(H))]

        start = x0 + [v[j] for j in free]
        tol = mpmath.mpf(2) ** (-(tol_exp or prec - 16))
        sol = mpmath.findroot(equations, start, tol=tol, verify=False, maxsteps=100)
        sol = [sol[i] for i in range(len(start))] if len(start) > 1 else [sol]
        return sol[:npar]
