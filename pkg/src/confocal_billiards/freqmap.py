"""Equilibrium measure of the band system, frequency map and rotation number.

All quadrature here is float64.  Integrands of the form
f(s) / sqrt|(s - L)(H - s)| become smooth in theta after
s = mid + half * cos(theta), so an equally weighted midpoint rule in
theta converges spectrally.
"""
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy import optimize

from .confocal import classify_caustics, interval_system
from .errors import DegenerateCaustic, SingularSystem
from .numeric import to_float
from .series import Polynomial

DEFAULT_NODES = 512
MAX_NODES = 2 ** 16
CONVERGENCE_TOL = 1e-12


@dataclass
class _Reduced:
    """Band system with double points factored out of hatP."""

    simple: np.ndarray      # descending simple roots
    doubles: list           # closed-gap points
    c: np.ndarray           # full endpoint list c_1..c_2d

    def merged_band(self, lo, hi):
        for i in range(0, len(self.simple), 2):
            H, L = self.simple[i], self.simple[i + 1]
            if L <= lo and hi <= H:
                return L, H
        raise ValueError("interval is not inside a band")

    def weight_others(self, s, L, H):
        """1 / sqrt|prod over simple roots other than L, H|."""
        out = np.ones_like(s)
        for r in self.simple:
            if r != L and r != H:
                out = out / np.sqrt(np.abs(s - r))
        return out


def _reduce(system):
    c = system.as_floats()
    closed = system.closed_gaps()
    doubles = [c[2 * k - 1] for k in closed]
    skip = {2 * k - 1 for k in closed} | {2 * k for k in closed}
    simple = np.array([c[j] for j in range(len(c)) if j not in skip])
    return _Reduced(simple, doubles, c)


def _poly_eval(poly, s):
    if callable(poly) and not isinstance(poly, (Polynomial, np.ndarray, list, tuple)):
        return poly(s)
    coeffs = poly.to_float() if isinstance(poly, Polynomial) else [float(x) for x in poly]
    return np.polynomial.polynomial.polyval(s, coeffs) if coeffs else np.zeros_like(s)


@lru_cache(maxsize=None)
def _leggauss(n):
    return np.polynomial.legendre.leggauss(n)


def _theta_rule(f, L, H, lo, hi, others, n):
    """Integral over [lo, hi] of f(s) w(s) / sqrt((s-L)(H-s)), in theta."""
    mid, half = 0.5 * (L + H), 0.5 * (H - L)
    if lo == L and hi == H:
        th = (np.arange(n) + 0.5) * np.pi / n
        s = mid + half * np.cos(th)
        return np.pi / n * np.sum(f(s) * others(s))
    # endpoints at L or H map to theta = pi or 0 exactly; arccos near +-1
    # would lose half the digits
    t1 = 0.0 if hi == H else np.arccos(np.clip((hi - mid) / half, -1.0, 1.0))
    t2 = np.pi if lo == L else np.arccos(np.clip((lo - mid) / half, -1.0, 1.0))
    x, w = _leggauss(min(n, 1024))
    th = 0.5 * (t2 - t1) * x + 0.5 * (t1 + t2)
    s = mid + half * np.cos(th)
    return 0.5 * (t2 - t1) * np.sum(w * f(s) * others(s))


def _converged(compute, nodes):
    n = nodes
    prev = compute(n)
    while n < MAX_NODES:
        n *= 2
        cur = compute(n)
        if abs(cur - prev) <= CONVERGENCE_TOL * max(1.0, abs(cur)):
            return cur
        prev = cur
    return prev


def _reduced_integral(red, f, lo, hi, nodes, gap=False):
    """Integral of f(s) / sqrt|prod over simple roots| over [lo, hi]."""
    if gap:
        L, H = lo, hi
    else:
        L, H = red.merged_band(lo, hi)
    return _converged(
        lambda n: _theta_rule(f, L, H, lo, hi, lambda s: red.weight_others(s, L, H), n), nodes)


def _double_factor(red, s):
    out = np.ones_like(s)
    for p in red.doubles:
        out = out * np.abs(s - p)
    return out


def _touches_double(red, lo, hi):
    return any(abs(p - lo) < 1e-15 or abs(p - hi) < 1e-15 for p in red.doubles)


def _reduced_poly(red, poly):
    """poly / prod(s - p) over double points, which must divide it."""
    div = Polynomial.from_roots(red.doubles)
    coeffs = poly.to_float() if isinstance(poly, Polynomial) else [float(x) for x in poly]
    q, r = Polynomial(coeffs).divmod(Polynomial([float(x) for x in div.coeffs]))
    scale = max(1.0, max(abs(x) for x in coeffs))
    if r.coeffs and max(abs(x) for x in r.coeffs) > 1e-9 * scale:
        raise ValueError("integrand is not integrable at a closed gap")
    return q, lambda s: np.sign(np.prod([s - p for p in red.doubles], axis=0))


def band_integral(system, poly, band_index, nodes=DEFAULT_NODES):
    """Integral of poly(s)/sqrt|hatP(s)| over band k = [c_{2k}, c_{2k-1}] (1-based)."""
    red = _reduce(system)
    lo, hi = system.band(band_index)
    lo, hi = to_float(lo), to_float(hi)
    if red.doubles and _touches_double(red, lo, hi):
        q, sgn = _reduced_poly(red, poly)
        f = lambda s: _poly_eval(q, s) * sgn(s)
    else:
        f = lambda s: _poly_eval(poly, s) / _double_factor(red, s)
    return _reduced_integral(red, f, lo, hi, nodes)


def gap_integral(system, poly, gap_index, nodes=DEFAULT_NODES):
    """Integral of poly(s)/sqrt(hatP(s)) over gap k = (c_{2k+1}, c_{2k}) (1-based)."""
    red = _reduce(system)
    lo, hi = system.gap(gap_index)
    lo, hi = to_float(lo), to_float(hi)
    if lo == hi:
        return 0.0
    f = lambda s: _poly_eval(poly, s) / _double_factor(red, s)
    return _reduced_integral(red, f, lo, hi, nodes, gap=True)


def _open_gaps(system):
    return [k for k in range(1, system.d) if k not in system.closed_gaps()]


def third_kind_polynomial(system, nodes=DEFAULT_NODES):
    """Monic eta of degree d-1 whose integrals over every gap vanish.

    A closed gap pins a root of eta at the double point; the remaining
    factor is fixed by the open gaps.
    """
    d = system.d
    if d == 1:
        return Polynomial([1.0])
    red = _reduce(system)
    gaps = _open_gaps(system)
    r = len(gaps)
    dbl = Polynomial.from_roots(red.doubles)
    if r == 0:
        return Polynomial([float(x) for x in dbl.coeffs])
    M = np.empty((r, r))
    rhs = np.empty(r)
    for i, k in enumerate(gaps):
        lo, hi = [to_float(x) for x in system.gap(k)]
        for j in range(r + 1):
            val = _reduced_integral(red, lambda s, j=j: s ** j, lo, hi, nodes, gap=True)
            if j < r:
                M[i, j] = val
            else:
                rhs[i] = -val
    if np.linalg.cond(M) > 1e13:
        raise SingularSystem("moment matrix is numerically singular")
    e = np.linalg.solve(M, rhs)
    eta_red = Polynomial(list(e) + [1.0])
    eta = eta_red * Polynomial([float(x) for x in dbl.coeffs])
    _check_roots(system, eta)
    return eta


def _check_roots(system, eta):
    roots = np.sort(np.polynomial.polynomial.polyroots(eta.to_float()))
    ok = np.all(np.abs(roots.imag) < 1e-9) if len(roots) else True
    if ok:
        re = roots.real
        for k in range(1, system.d):
            lo, hi = [to_float(x) for x in system.gap(k)]
            inside = np.sum((re > lo - 1e-12) & (re < hi + 1e-12))
            ok = ok and inside == 1
    if not ok:
        warnings.warn("eta does not have exactly one real root per gap", RuntimeWarning)


@dataclass
class FrequencyVector:
    f: list
    band_measures: list
    eta: Polynomial = field(repr=False, default=None)


def band_measures(system, eta=None, nodes=DEFAULT_NODES):
    """Equilibrium mass of each band, in band order 1..d."""
    if eta is None:
        eta = third_kind_polynomial(system, nodes)
    red = _reduce(system)
    q, _ = _reduced_poly(red, eta)
    out = []
    for k in range(1, system.d + 1):
        lo, hi = [to_float(x) for x in system.band(k)]
        val = _reduced_integral(red, lambda s: np.abs(_poly_eval(q, s)), lo, hi, nodes)
        out.append(val / np.pi)
    return out


def frequency(family, caustics, nodes=DEFAULT_NODES):
    """F = (mu(band d), mu(band d) + mu(band d-1), ..., total mass)."""
    if not hasattr(caustics, "b"):
        caustics = classify_caustics(family, caustics)
    system = interval_system(caustics)
    eta = third_kind_polynomial(system, nodes)
    mu = band_measures(system, eta, nodes)
    f = list(np.cumsum(mu[::-1]))
    return FrequencyVector([float(x) for x in f], [float(x) for x in mu], eta)


def winding_frequency(m):
    """The frequency vector predicted by winding numbers m_0..m_{d-1}."""
    return [m[len(m) - 1 - i] / m[0] for i in range(len(m))]


# -- planar rotation number ----------------------------------------------

def _one_sided(g, left, right, singular_at, n):
    """Integral of g(t)/sqrt|t - singular_at| over [left, right], one endpoint singular."""
    x, w = _leggauss(n)
    width = right - left
    r = np.sqrt(width)
    u = 0.5 * r * (x + 1.0)
    t = right - u * u if singular_at == right else left + u * u
    return 0.5 * r * np.sum(w * 2.0 * g(t))


def _two_sided(g, left, right, n):
    th = (np.arange(n) + 0.5) * np.pi / n
    t = 0.5 * (left + right) + 0.5 * (right - left) * np.cos(th)
    return np.pi / n * np.sum(g(t))


def rotation_number(a, b, lam, nodes=DEFAULT_NODES):
    """Rotation number of the caustic C_lam in the pencil x^2/(a-l) + y^2/(b-l) = 1."""
    a, b, lam = float(a), float(b), float(lam)
    if not a > b > 0:
        raise ValueError("need a > b > 0")
    if lam >= a:
        raise ValueError("need lambda < a")
    if lam == 0 or lam == b:
        raise DegenerateCaustic("rotation number undefined at lambda in {0, b}")
    lo, hi = min(b, lam), max(b, lam)
    n = min(nodes, 1024)

    def numerator(k):
        if lam < b:
            # singular only at t = lam; orientation follows the sign of lam
            g = lambda t: 1.0 / np.sqrt(np.abs((b - t) * (a - t)))
            if lam > 0:
                return _one_sided(g, 0.0, lam, lam, k)
            return -_one_sided(g, lam, 0.0, lam, k)
        g = lambda t: 1.0 / np.sqrt(np.abs((lam - t) * (a - t)))
        return _one_sided(g, 0.0, b, b, k)

    def denominator(k):
        other = b if lam > b else lam
        g = lambda t: 1.0 / np.sqrt(np.abs(t - other))
        return _two_sided(g, hi, a, k)

    num = _legendre_converged(numerator, n)
    den = _converged(denominator, nodes)
    return num / (2.0 * den)


def _legendre_converged(compute, n):
    prev = compute(n)
    while n < 4096:
        n *= 2
        cur = compute(n)
        if abs(cur - prev) <= CONVERGENCE_TOL * max(1.0, abs(cur)):
            return cur
        prev = cur
    return prev


# -- probes ----------------------------------------------------------------

@dataclass
class ProbeReport:
    values: np.ndarray
    min_distance: float
    collisions: list
    rho_sign_violations: int = None
    rho_signs: list = None


def _freq_point(args):
    family, alpha, nodes = args
    return frequency(family, alpha, nodes).f


def injectivity_probe(family, grid, threshold=1e-6, nodes=DEFAULT_NODES, jobs=1):
    """F on a grid of caustic sets from one connected component."""
    sets = [classify_caustics(family, g) for g in grid]
    patterns = {cs.pattern for cs in sets}
    if len(patterns) > 1:
        raise ValueError(f"grid spans several caustic type patterns: {sorted(patterns)}")
    args = [(family, cs, nodes) for cs in sets]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as pool:
            vals = list(pool.map(_freq_point, args))
    else:
        vals = [_freq_point(x) for x in args]
    vals = np.array(vals)
    collisions = []
    best = np.inf
    for i, j in combinations(range(len(vals)), 2):
        dist = float(np.linalg.norm(vals[i] - vals[j]))
        best = min(best, dist)
        if dist < threshold:
            collisions.append((i, j, dist))
    report = ProbeReport(vals, best, collisions)
    if family.d == 2:
        a1, a2 = [to_float(x) for x in family.a]
        lams = sorted(to_float(cs.alpha[0]) for cs in sets)
        rho = [rotation_number(a2, a1, l, nodes) for l in lams]
        signs = [int(s) for s in np.sign(np.diff(rho))]
        ref = signs[0] if signs else 0
        report.rho_signs = signs
        report.rho_sign_violations = sum(1 for s in signs if s != ref)
    return report


def caustics_for_frequency(family, target, alpha0, nodes=DEFAULT_NODES, tol=1e-13):
    """Caustic parameters whose first d-1 frequencies equal ``target``.

    Newton-type solve started from ``alpha0``; the caustic type pattern
    of the start point is kept.  Used to seed the algebraic polish of
    periodic configurations.
    """
    target = np.asarray(target, dtype=float)[:family.d - 1]

    def resid(al):
        return np.asarray(frequency(family, list(al), nodes).f[:-1]) - target

    sol = optimize.root(resid, np.asarray(alpha0, dtype=float), method="hybr", tol=tol)
    if not sol.success:
        raise SingularSystem(f"frequency solve failed: {sol.message}")
    return list(sol.x)
