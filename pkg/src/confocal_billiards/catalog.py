"""Periodic billiard trajectories of small period in dimension three.

Every entry is decided three ways: the Cayley-type series condition,
the Pell alternance of the degree-n extremal polynomial, and a direct
simulation with winding numbers counted on the traced polygon.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from functools import reduce

import mpmath
import numpy as np

from .billiard import count_winding, launch_from_caustics, trace
from .cayley import (SIX_VARIANTS, check_d_plus_1_detail,
                     check_five_d3, check_periodicity, check_six_d3)
from .confocal import ConfocalFamily, classify_caustics, interval_system
from .errors import TypeMismatch
from .extremal import (analyze_alternance, find_caustics_d_plus_1, hyperboloid_4periodic,
                       pell_solve, solve_cayley_parameters, unique_pair_in_family)
from .freqmap import caustics_for_frequency
from .numeric import DEFAULT_PREC, to_float, to_mpf, workprec
from .series import Polynomial

GRAPH_SAMPLES = 801


@dataclass
class RouteResult:
    periodic: bool
    period: int = None
    elliptic_period: int = None
    winding: list = None


@dataclass
class CatalogEntry:
    name: str
    n: int
    a: tuple
    alpha: tuple
    conditions: dict = field(default_factory=dict)
    cayley: RouteResult = None
    pell: RouteResult = None
    simulation: RouteResult = None
    signature: list = None
    pell_residual: object = None
    closure_error: float = None
    witness: tuple = None
    trajectory: object = None
    graph: list = None
    notes: str = ""

    @property
    def agree(self):
        """Periodicity, period, elliptic period and winding match on all routes."""
        routes = [self.cayley, self.pell, self.simulation]
        if any(r is None for r in routes):
            return False
        keys = [(r.periodic, r.period, r.elliptic_period, tuple(r.winding or ())) for r in routes]
        return keys[0] == keys[1] == keys[2]


def _pol(a, alpha):
    return Polynomial.from_roots([to_mpf(x) for x in list(a) + list(alpha)], lead=-1)


def _polish(a, alpha0, n):
    """Refine caustic parameters of a fixed family onto the C(n, 3) variety."""
    return solve_cayley_parameters(lambda p: _pol(a, p), alpha0, n, 3)


def _graph(sol, system, samples):
    c1 = to_float(system.c[0])
    s = np.linspace(0.0, 1.02 * c1, samples)
    p = np.array([to_float(c) for c in sol.p_hat.coeffs])
    return [(float(x), float(v)) for x, v in zip(s, np.polynomial.polynomial.polyval(s, p))]


def _pell_route(cs, n, prec):
    system = interval_system(cs)
    sol = pell_solve(system, n, prec)
    wd = analyze_alternance(sol, system, prec)
    return sol, wd, system


def _simulate(family, cs, n, seed):
    x, v = launch_from_caustics(family, cs, seed)
    tr = trace(family, x, v, n_max=max(200, 4 * n), closure_tol=1e-7)
    if not tr.closed:
        return RouteResult(False), tr
    m = count_winding(tr, cs)
    tr.winding = list(m)
    return RouteResult(True, tr.period, tr.period // reduce(gcd, m), list(m)), tr


def _entry(name, family, alpha, n, prec, seed, samples, conditions=None, notes=""):
    cs = classify_caustics(family, alpha)
    e = CatalogEntry(name, n, tuple(family.a), tuple(cs.alpha), dict(conditions or {}), notes=notes)
    v = check_periodicity(family, cs, n, prec)
    e.cayley = RouteResult(v.periodic, v.cartesian_period, v.elliptic_period, v.predicted_winding)
    e.conditions["verdict"] = v.fired
    sol, wd, system = _pell_route(cs, n, prec)
    e.pell = RouteResult(True, n if wd.m[0] == n else None, wd.n_tilde, list(wd.m))
    e.signature = list(wd.tau)
    e.pell_residual = sol.residual
    e.graph = _graph(sol, system, samples)
    e.simulation, tr = _simulate(family, cs, n, seed)
    e.closure_error = tr.closure_error
    e.trajectory = tr
    return e


def _six_conditions(family, alpha, prec):
    """Evaluate all four winding variants; returns fired variants and details."""
    out, fired, witness = {}, [], None
    for var in SIX_VARIANTS:
        try:
            r = check_six_d3(family, alpha[0], alpha[1], var, prec)
        except TypeMismatch:
            out[str(var)] = "type mismatch"
            continue
        out[str(var)] = r.satisfied
        if r.satisfied:
            fired.append(var)
            if r.witness is not None:
                witness = (r.witness, r.witness_residual)
        if r.cayley642 is not None:
            out["cayley642"] = r.cayley642
    return out, fired, witness


def build_catalog(prec=DEFAULT_PREC, seed=0, samples=GRAPH_SAMPLES):
    """All catalog entries, in order of period."""
    entries = []
    with workprec(prec):
        # 4-periodic, distinct caustics: the (d+1) construction
        fam = ConfocalFamily([2, 4, 5])
        found = find_caustics_d_plus_1(fam, prec)
        chk = check_d_plus_1_detail(fam, found.alpha, prec)
        entries.append(_entry(
            "4-periodic, two 1-sheeted hyperboloids", fam, found.alpha, 4, prec, seed, samples,
            {"both caustics 1-sheeted hyperboloids": chk.type_ok,
             "C3 = 0": chk.satisfied, "C3": chk.vanishing[0] if chk.vanishing else None,
             "C0 + C1 alpha + C2 alpha^2": chk.poly_values[0] if chk.poly_values else None}))

        # 4-periodic generatrices: closed form
        pair = hyperboloid_4periodic(4, 5, prec)
        fam = ConfocalFamily([pair.a1, 4, 5])
        chk = check_d_plus_1_detail(fam, [pair.alpha, pair.alpha], prec)
        entries.append(_entry(
            "4-periodic on a hyperboloid (closed form)", fam, [pair.alpha, pair.alpha], 4,
            prec, seed, samples,
            {"a1 = a2 a3 / (a2 + a3)": str(pair.a1), "alpha": pair.alpha_expr,
             "4-periodic condition": chk.satisfied}))

        # the unique ellipsoid/hyperboloid pair of a given family
        base = ConfocalFamily([1, 4, 5])
        up = unique_pair_in_family(base, prec)
        fam = ConfocalFamily(list(up.shifted))
        alpha = up.hyperboloid_alpha - up.lam
        chk = check_d_plus_1_detail(fam, [alpha, alpha], prec)
        entries.append(_entry(
            "4-periodic on a hyperboloid inside Q_lambda of (1,4,5)", fam, [alpha, alpha], 4,
            prec, seed, samples,
            {"lambda": up.lam, "hyperboloid parameter": up.hyperboloid_alpha,
             "4-periodic condition": chk.satisfied},
            notes="family measured from Q_lambda: a_i - lambda"))

        # 5-periodic: one ellipsoid caustic
        fam = ConfocalFamily([1, 2, 5])
        seed_alpha = caustics_for_frequency(fam, (Fraction(2, 5), Fraction(4, 5)), [0.97, 1.1])
        alpha = _polish(fam.a, seed_alpha, 5)
        chk = check_five_d3(fam, alpha, prec)
        entries.append(_entry(
            "5-periodic", fam, alpha, 5, prec, seed, samples,
            {"one caustic is an ellipsoid": classify_caustics(fam, alpha).intervals[0] == 0,
             "C3 = C4 = 0": chk.satisfied}))

        # (6,4,2) on a hyperboloid
        s5 = mpmath.sqrt(5)
        fam = ConfocalFamily([180 - 80 * s5, mpmath.mpf(4), mpmath.mpf(5)])
        al = mpmath.mpf(20) / 61 * (9 - 2 * s5)
        six, fired, _ = _six_conditions(fam, [al, al], prec)
        e = _entry("6-periodic (6,4,2) on a hyperboloid", fam, [al, al], 6, prec, seed, samples,
                   dict(six, fired=[list(v) for v in fired]))
        entries.append(e)

        # (6,5,4) on a hyperboloid: polish a1 and the double caustic
        sol = solve_cayley_parameters(
            lambda p: _pol([p[0], 4, 5], [p[1], p[1]]), [3.303, 3.5], 6, 3)
        fam = ConfocalFamily([sol[0], mpmath.mpf(4), mpmath.mpf(5)])
        six, fired, wit = _six_conditions(fam, [sol[1], sol[1]], prec)
        e = _entry("6-periodic (6,5,4) on a hyperboloid", fam, [sol[1], sol[1]], 6, prec, seed,
                   samples, dict(six, fired=[list(v) for v in fired]))
        e.witness = wit
        entries.append(e)

        # (6,5,2) and (6,3,2): two distinct 1-sheeted hyperboloids
        fam = ConfocalFamily([1, 4, 5])
        for var, start in (((6, 5, 2), [1.03, 1.2]), ((6, 3, 2), [1.3, 2.5])):
            target = (Fraction(var[2], 6), Fraction(var[1], 6))
            alpha = _polish(fam.a, caustics_for_frequency(fam, target, start), 6)
            six, fired, wit = _six_conditions(fam, alpha, prec)
            label = ",".join(str(m) for m in var)
            e = _entry(f"6-periodic ({label}), two 1-sheeted hyperboloids", fam, alpha, 6, prec,
                       seed, samples, dict(six, fired=[list(v) for v in fired]))
            e.witness = wit
            entries.append(e)
    return entries


def winding_sets(entries, n):
    return {tuple(e.pell.winding) for e in entries if e.n == n}
