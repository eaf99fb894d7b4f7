"""Confocal families, caustic classification, Jacobi coordinates."""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import AudinViolation, DegenerateCaustic, DegeneratePoint
from .numeric import is_rational, lt, to_float, to_mpf, unify
from .series import Polynomial

FLOAT_DEGENERACY_TOL = 1e-12


def _coerce(x):
    if isinstance(x, bool):
        raise TypeError("boolean is not a parameter value")
    if isinstance(x, int):
        return Fraction(x)
    return x


def _same(x, y, tol=FLOAT_DEGENERACY_TOL):
    if is_rational(x) and is_rational(y):
        return x == y
    return abs(to_mpf(x) - to_mpf(y)) < tol * abs(to_mpf(y))


@dataclass(frozen=True)
class ConfocalFamily:
    """Ellipsoid sum x_i^2/a_i = 1 and its pencil Q_lambda."""

    a: tuple

    def __init__(self, a):
        a = tuple(_coerce(x) for x in a)
        if len(a) < 2:
            raise ValueError("dimension must be at least 2")
        if not all(x > 0 for x in a):
            raise ValueError("semi-axes parameters must be positive")
        if any(not lt(a[i], a[i + 1]) for i in range(len(a) - 1)):
            raise ValueError("semi-axes parameters must be strictly increasing")
        object.__setattr__(self, "a", a)

    @property
    def d(self):
        return len(self.a)

    @property
    def exact(self):
        return all(is_rational(x) for x in self.a)

    def as_floats(self):
        return np.array([to_float(x) for x in self.a])

    def scaled(self, t):
        return ConfocalFamily([t * x for x in self.a])


def caustic_label(k, d):
    """Name of the quadric type for parameters in the k-th open interval."""
    if k == 0:
        return "ellipsoid"
    if d == 2:
        return "hyperbola"
    return f"{k}-sheeted hyperboloid"


@dataclass(frozen=True)
class CausticSet:
    """Caustic parameters with their interval index and merged b-sequence.

    ``intervals[j]`` is k when alpha_j lies in (a_k, a_{k+1}) with a_0 = 0.
    ``b`` lists b_1..b_{2d-1}; ``b_kinds`` tags each entry as ('a', i) or
    ('alpha', j) with 0-based i, j.  Two equal caustic parameters (a
    double caustic) are allowed and produce a closed gap.
    """

    family: ConfocalFamily
    alpha: tuple
    intervals: tuple
    b: tuple
    b_kinds: tuple

    @property
    def d(self):
        return self.family.d

    @property
    def types(self):
        return tuple(caustic_label(k, self.d) for k in self.intervals)

    @property
    def exact(self):
        return self.family.exact and all(is_rational(x) for x in self.alpha)

    @property
    def pattern(self):
        """Connected-component label: interval index of every caustic."""
        return self.intervals

    def b_full(self):
        """b_0 = 0 followed by b_1..b_{2d-1}."""
        return (Fraction(0),) + self.b

    def is_a(self, k):
        """Whether b_k (1-based, b_0 = 0 excluded) is one of the a's."""
        return k >= 1 and self.b_kinds[k - 1][0] == "a"

    def double_caustics(self):
        return [j for j in range(len(self.alpha) - 1) if self.alpha[j] == self.alpha[j + 1]]

    def pol(self):
        """Pol(x) = prod (a_i - x) prod (alpha_j - x)."""
        return Polynomial.from_roots(unify(list(self.family.a) + list(self.alpha)), lead=-1)

    def as_floats(self):
        return np.array([to_float(x) for x in self.alpha])


def classify_caustics(family, alpha):
    """Label each caustic and merge the parameters into the b-sequence."""
    d = family.d
    alpha = tuple(sorted((_coerce(x) for x in alpha), key=to_mpf))
    if len(alpha) != d - 1:
        raise ValueError(f"expected {d - 1} caustic parameters, got {len(alpha)}")
    a = family.a
    intervals = []
    for al in alpha:
        for k, ak in enumerate(a):
            if _same(al, ak):
                raise DegenerateCaustic(f"caustic parameter {al} equals a_{k + 1}")
        if not al > 0:
            raise DegenerateCaustic(f"caustic parameter {al} is not positive")
        if not lt(al, a[-1]):
            raise AudinViolation(f"caustic parameter {al} exceeds a_d")
        intervals.append(sum(1 for ak in a if lt(ak, al)))
    merged = sorted([(x, ("a", i)) for i, x in enumerate(a)]
                    + [(x, ("alpha", j)) for j, x in enumerate(alpha)],
                    key=lambda t: to_mpf(t[0]))
    b = tuple(x for x, _ in merged)
    kinds = tuple(k for _, k in merged)
    for j in range(d - 1):
        # alpha_{j+1} must sit at b_{2j+1} or b_{2j+2} (1-based)
        pos = [i for i, k in enumerate(kinds) if k == ("alpha", j)][0] + 1
        if pos not in (2 * j + 1, 2 * j + 2):
            raise AudinViolation(f"caustic {j + 1} at position b_{pos} breaks the interleaving")
    return CausticSet(family, alpha, tuple(intervals), b, kinds)


@dataclass(frozen=True)
class IntervalSystem:
    """Endpoints c_1 >= ... >= c_{2d} = 0 of d bands and d-1 gaps.

    Band k (1-based) is [c_{2k}, c_{2k-1}], gap k is (c_{2k+1}, c_{2k}).
    Equal neighbours c_{2k+1} = c_{2k} describe a closed gap (double
    caustic); everything else is strictly decreasing.
    """

    c: tuple

    def __post_init__(self):
        c = self.c
        if len(c) % 2 or len(c) < 2:
            raise ValueError("need an even number of endpoints")
        if c[-1] != 0:
            raise ValueError("last endpoint must be exactly 0")
        for k in range(len(c) - 1):
            closed_gap = k % 2 == 1  # c[k] = c_{k+1} with k+1 even: gap (c_{k+2}, c_{k+1})
            if closed_gap and c[k] == c[k + 1]:
                continue
            if not lt(c[k + 1], c[k]):
                raise ValueError("endpoints must be strictly decreasing")

    @classmethod
    def from_endpoints(cls, c):
        c = tuple(_coerce(x) for x in c)
        return cls(c)

    @property
    def d(self):
        return len(self.c) // 2

    @property
    def exact(self):
        return all(is_rational(x) for x in self.c)

    def band(self, k):
        return (self.c[2 * k - 1], self.c[2 * k - 2])

    def gap(self, k):
        return (self.c[2 * k], self.c[2 * k - 1])

    @property
    def bands(self):
        return [self.band(k) for k in range(1, self.d + 1)]

    @property
    def gaps(self):
        return [self.gap(k) for k in range(1, self.d)]

    def closed_gaps(self):
        return [k for k in range(1, self.d) if self.c[2 * k] == self.c[2 * k - 1]]

    def hat_p(self):
        """hatP(s) = prod (s - c_j)."""
        return Polynomial.from_roots(self.c)

    def normalized_pol(self):
        """prod_{j < 2d} (1 - c_j x), the x-variable partner of hatP."""
        p = Polynomial([1])
        for cj in self.c[:-1]:
            p = p * Polynomial([1, -cj])
        return p

    def as_floats(self):
        return np.array([to_float(x) for x in self.c])


def interval_system(caustics):
    c = []
    for x in caustics.b:
        c.append(Fraction(1) / x if is_rational(x) else 1 / to_mpf(x))
    c = sorted(c, key=to_mpf, reverse=True)
    if not all(is_rational(x) for x in c):
        c = [to_mpf(x) for x in c]
    return IntervalSystem(tuple(c) + (Fraction(0),))


# -- Jacobi elliptic coordinates ------------------------------------------

def _cleared_poly(a, x):
    """prod (a_i - l) - sum x_i^2 prod_{k != i} (a_k - l), ascending."""
    P = np.polynomial.polynomial
    base = np.array([1.0])
    for ai in a:
        base = P.polymul(base, [ai, -1.0])
    out = base.copy()
    for i, ai in enumerate(a):
        term = np.array([1.0])
        for k, ak in enumerate(a):
            if k != i:
                term = P.polymul(term, [ak, -1.0])
        out = P.polysub(out, x[i] ** 2 * term)
    return out


def jacobi_coordinates(family, x):
    """The d roots lambda of Q_lambda(x) = 1, ascending."""
    a = family.as_floats()
    x = np.asarray(x, dtype=float)
    if not np.any(x):
        raise DegeneratePoint("the origin has no Jacobi coordinates")
    coef = _cleared_poly(a, x)
    roots = np.polynomial.polynomial.polyroots(coef)
    lam = np.sort(roots.real)
    scale = a[-1]
    dcoef = np.polynomial.polynomial.polyder(coef)
    for k, r in enumerate(lam):
        dv = np.polynomial.polynomial.polyval(r, dcoef)
        if dv != 0:
            lam[k] = r - np.polynomial.polynomial.polyval(r, coef) / dv
    lam = np.sort(lam)
    if np.max(np.abs(roots.imag)) > 1e-8 * scale or np.any(np.diff(lam) < 1e-12 * scale):
        raise DegeneratePoint("repeated Jacobi coordinate")
    return lam


def cartesian_from_jacobi(family, lam, signs=None):
    """Inverse map: |x_i| from lambda, with optional orthant signs."""
    a = family.as_floats()
    lam = np.asarray(lam, dtype=float)
    d = len(a)
    x = np.empty(d)
    for i in range(d):
        num = np.prod(a[i] - lam)
        den = np.prod([a[i] - a[k] for k in range(d) if k != i])
        x[i] = np.sqrt(max(num / den, 0.0))
    if signs is not None:
        x = x * np.asarray(signs)
    return x
