"""Polynomials, truncated power series, the sqrt expansion and Hankel tests."""
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import mpmath

from .errors import IllConditioned, InsufficientOrder, NonPositiveConstantTerm
from .numeric import (DEFAULT_THRESHOLD_EXP, all_rational, is_rational, sqrt,
                      threshold, to_mpf)


def _is_exact_zero(c):
    return c == 0


class Polynomial:
    """Dense univariate polynomial with ascending coefficients.

    Coefficients are either all rational (exact backend) or contain at
    least one ``mpf`` (float backend); arithmetic mixes them freely.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = list(coeffs)
        while c and _is_exact_zero(c[-1]):
            c.pop()
        self.coeffs = c

    @classmethod
    def from_roots(cls, roots, lead=1):
        p = cls([lead])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @classmethod
    def monomial(cls, k, c=1):
        return cls([0] * k + [c])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def exact(self):
        return all_rational(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        return f"Polynomial({self.coeffs!r})"

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def _wrap(self, other):
        return other if isinstance(other, Polynomial) else Polynomial([other])

    def __add__(self, other):
        other = self._wrap(other)
        n = max(len(self), len(other))
        return Polynomial([self[k] + other[k] for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial([c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [0] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            if _is_exact_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Polynomial([1])
        for _ in range(k):
            out = out * self
        return out

    def derivative(self):
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def reversed(self, n):
        """Return s**n * p(1/s) for n >= degree."""
        if n < self.degree:
            raise ValueError("reversal degree below polynomial degree")
        c = self.coeffs + [0] * (n + 1 - len(self.coeffs))
        return Polynomial(c[::-1])

    def truncate(self, n):
        """Keep terms of degree <= n."""
        return Polynomial(self.coeffs[:n + 1])

    def divmod(self, other):
        """Euclidean division by a polynomial with nonzero leading term."""
        num = list(self.coeffs)
        den = other.coeffs
        if not den:
            raise ZeroDivisionError("division by the zero polynomial")
        if len(num) < len(den):
            return Polynomial(), Polynomial(num)
        q = [0] * (len(num) - len(den) + 1)
        lead = den[-1]
        for k in range(len(q) - 1, -1, -1):
            coef = num[k + len(den) - 1] / lead
            q[k] = coef
            for j, b in enumerate(den):
                num[k + j] -= coef * b
        return Polynomial(q), Polynomial(num[:len(den) - 1])

    def to_mpf(self):
        return Polynomial([to_mpf(c) for c in self.coeffs])

    def to_float(self):
        return [float(to_mpf(c)) for c in self.coeffs]

    def max_abs(self):
        return max((abs(to_mpf(c)) for c in self.coeffs), default=mpmath.mpf(0))

    def roots(self, polish=True):
        """Complex roots from the companion matrix, Newton-polished."""
        n = self.degree
        if n < 1:
            return []
        c = [to_mpf(x) for x in self.coeffs]
        lead = c[-1]
        if n == 1:
            return [mpmath.mpc(-c[0] / lead)]
        comp = mpmath.zeros(n, n)
        for i in range(1, n):
            comp[i, i - 1] = 1
        for i in range(n):
            comp[i, n - 1] = -c[i] / lead
        vals = mpmath.eig(comp, left=False, right=False)
        vals = [mpmath.mpc(v) for v in vals]
        if polish:
            p = Polynomial(c)
            dp = p.derivative()
            out = []
            for r in vals:
                for _ in range(3):
                    d = dp(r)
                    if d == 0:
                        break
                    step = p(r) / d
                    r = r - step
                    if abs(step) <= abs(r) * mpmath.eps * 4:
                        break
                out.append(r)
            vals = out
        return sorted(vals, key=lambda z: (z.real, z.imag))


@dataclass
class PowerSeries:
    """Truncated series C_0 + C_1 x + ... + C_N x^N.

    When ``normalized`` is set the stored coefficients are those of
    sqrt(P/P(0)) / (D/D(0)) and the true series equals them times
    sqrt(scale_squared).
    """

    coeffs: list
    order: int
    scale_squared: object = 1
    normalized: bool = False
    radius: object = None

    def __getitem__(self, k):
        if k > self.order:
            raise InsufficientOrder(f"coefficient C_{k} beyond order {self.order}")
        return self.coeffs[k]

    def __len__(self):
        return len(self.coeffs)

    @property
    def exact(self):
        return all_rational(self.coeffs)

    def scale(self):
        return sqrt(self.scale_squared) if self.normalized else 1

    def denormalized(self):
        if not self.normalized:
            return self
        s = self.scale()
        return PowerSeries([c * s for c in self.coeffs], self.order, self.scale_squared,
                           False, self.radius)

    def as_polynomial(self):
        return Polynomial(self.coeffs)

    def times(self, poly):
        """Product with a polynomial, truncated at the series order."""
        out = [0] * (self.order + 1)
        for i, a in enumerate(poly.coeffs):
            for j in range(self.order + 1 - i):
                out[i + j] += a * self.coeffs[j]
        return PowerSeries(out, self.order, self.scale_squared, self.normalized, self.radius)

    def weighted(self, k):
        """|C_k| * R^k with R the convergence radius; scale-free magnitude."""
        return abs(to_mpf(self[k])) * to_mpf(self.radius) ** k

    def magnitude(self):
        """Largest weighted coefficient, the reference for vanishing tests."""
        return max(self.weighted(k) for k in range(self.order + 1))


def _as_poly(P):
    return P if isinstance(P, Polynomial) else Polynomial(P)


def _series_inverse(coeffs, order):
    """1/f mod x^(order+1) for f(0) != 0."""
    inv = [0] * (order + 1)
    inv[0] = 1 / coeffs[0] if not is_rational(coeffs[0]) else Fraction(1) / coeffs[0]
    for n in range(1, order + 1):
        acc = 0
        for k in range(1, min(n, len(coeffs) - 1) + 1):
            acc += coeffs[k] * inv[n - k]
        inv[n] = -acc * inv[0]
    return inv


def _min_root_modulus(polys):
    mods = [abs(r) for p in polys if p is not None and p.degree > 0 for r in p.roots(polish=False)]
    return min(mods) if mods else mpmath.mpf(1)


def sqrt_series(P, order, divisor=None, normalized=False, radius=None):
    """Taylor coefficients of sqrt(P(x)) / divisor(x) up to x^order.

    The recurrence runs on P/P(0) so that rational input gives rational
    coefficients; the constant factor is recorded in ``scale_squared``.
    With ``normalized=False`` the factor is multiplied back in, which
    keeps the result exact only if it is a rational square.
    """
    P = _as_poly(P)
    if order < 1:
        raise ValueError("order must be at least 1")
    p0 = P[0]
    if not p0 > 0:
        raise NonPositiveConstantTerm(f"P(0) = {p0} is not positive")
    exact = P.exact and (divisor is None or _as_poly(divisor).exact)
    if not exact:
        P = P.to_mpf()
        p0 = P[0]
        if divisor is not None:
            divisor = _as_poly(divisor).to_mpf()
    one = Fraction(1) if exact else mpmath.mpf(1)
    f = [one * c / p0 for c in P.coeffs] + [0] * (order + 1)
    C = [0] * (order + 1)
    C[0] = one
    for n in range(1, order + 1):
        acc = f[n]
        for k in range(1, n):
            acc -= C[k] * C[n - k]
        C[n] = acc / 2
    scale_sq = p0 if exact else to_mpf(p0)
    if divisor is not None:
        D = _as_poly(divisor)
        d0 = D[0]
        if d0 == 0:
            raise ValueError("divisor must not vanish at 0")
        inv = _series_inverse([one * c / d0 for c in D.coeffs], order)
        C = [sum(C[k] * inv[n - k] for k in range(n + 1)) for n in range(order + 1)]
        scale_sq = scale_sq / (d0 * d0)
    if radius is None:
        radius = _min_root_modulus([P, _as_poly(divisor) if divisor is not None else None])
    series = PowerSeries(C, order, scale_sq, True, radius)
    return series if normalized else series.denormalized()


def hankel_matrix(series, m, d):
    """The (m-1) x (m-d+1) window with entry (i, j) = C_{d+1+i+j}."""
    if m < d:
        raise ValueError("need m >= d")
    need = d + 1 + (m - 2) + (m - d)
    if m > 1 and need > series.order:
        raise InsufficientOrder(f"C({m},{d}) needs C_{need}, series has order {series.order}")
    return [[series[d + 1 + i + j] for j in range(m - d + 1)] for i in range(m - 1)]


# -- linear algebra over Q -------------------------------------------------

def _integer_rows(M):
    rows = []
    for row in M:
        den = 1
        for x in row:
            den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
        rows.append([int(Fraction(x) * den) for x in row])
    return rows


def bareiss_rank(M):
    """Rank of a rational matrix by fraction-free elimination."""
    A = _integer_rows(M)
    if not A or not A[0]:
        return 0
    rows, cols = len(A), len(A[0])
    rank, prev = 0, 1
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r][c] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for r in range(rank + 1, rows):
            for k in range(c + 1, cols):
                A[r][k] = (A[r][k] * A[rank][c] - A[rank][k] * A[r][c]) // prev
            A[r][c] = 0
        prev = A[rank][c]
        rank += 1
        if rank == rows:
            break
    return rank


def rational_null_space(M, ncols):
    """Basis of the right null space over Q via reduced row echelon form."""
    A = [[Fraction(x) for x in row] for row in M]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -A[i][free]
        basis.append(v)
    return basis


def _weighted_window(series, m, d):
    R = to_mpf(series.radius)
    return [[to_mpf(series[d + 1 + i + j]) * R ** (d + 1 + i + j) for j in range(m - d + 1)]
            for i in range(m - 1)]


def singular_values(M, ncols):
    """Singular values padded with zeros up to the column count."""
    if not M:
        return [mpmath.mpf(0)] * ncols, None
    A = mpmath.matrix([[to_mpf(x) for x in row] for row in M])
    U, S, V = mpmath.svd_r(A, full_matrices=True, compute_uv=True)
    s = [S[i] for i in range(len(S))]
    s += [mpmath.mpf(0)] * (ncols - len(s))
    return s, V


@dataclass
class HankelResult:
    rank: int
    satisfied: bool
    shape: tuple
    singular_values: list = field(default_factory=list)


def hankel_condition(series, m, d, threshold_exp=DEFAULT_THRESHOLD_EXP):
    """Decide the rank condition C(m, d): rank < m - d + 1.

    ``m = d`` is allowed; the window is then a single column.
    """
    H = hankel_matrix(series, m, d)
    ncols = m - d + 1
    shape = (m - 1, ncols)
    if series.exact and all_rational(x for row in H for x in row):
        rank = bareiss_rank(H) if H else 0
        return HankelResult(rank, rank < ncols, shape)
    s, _ = singular_values(_weighted_window(series, m, d), ncols)
    tol = threshold(threshold_exp) * max(max(s), series.magnitude())
    rank = sum(1 for x in s if x > tol)
    return HankelResult(rank, rank < ncols, shape, s)


def null_vector(series, m, d, threshold_exp=DEFAULT_THRESHOLD_EXP, ratio=10**6):
    """A right null vector of the C(m, d) window, or None when full rank.

    Raises IllConditioned if the null space is not one-dimensional.
    """
    H = hankel_matrix(series, m, d)
    ncols = m - d + 1
    if series.exact and all_rational(x for row in H for x in row):
        basis = rational_null_space(H, ncols) if H else [[Fraction(int(i == 0)) for i in range(ncols)]]
        if not basis:
            return None
        if len(basis) > 1:
            raise IllConditioned(f"null space of C({m},{d}) has dimension {len(basis)}")
        return basis[0]
    if not H:
        return [mpmath.mpf(1)]
    s, V = singular_values(_weighted_window(series, m, d), ncols)
    tol = threshold(threshold_exp) * max(max(s), series.magnitude())
    small = [i for i, x in enumerate(s) if x <= tol]
    if not small:
        return None
    if len(small) > 1:
        raise IllConditioned(f"{len(small)} negligible singular values in C({m},{d})")
    order = sorted(s)
    if len(order) > 1 and order[1] < ratio * order[0]:
        raise IllConditioned("second-smallest singular value too close to the smallest")
    R = to_mpf(series.radius)
    k = small[0]
    # undo the column weighting R^(d+1+j)
    return [V[k, j] * R ** (d + 1 + j) for j in range(ncols)]


@dataclass
class PadePair:
    p: Polynomial
    q: Polynomial


def pade_sqrt(series, m, d, threshold_exp=DEFAULT_THRESHOLD_EXP):
    """Polynomials p (deg <= m), q (deg <= m-d) with p + q*S = O(x^(2m)).

    S is the series as stored (normalized or not).  q is read off the
    Hankel null vector in reversed order; p is minus the truncation of
    q*S to degree m.  Returns None when the window has full rank.
    """
    if series.order < 2 * m - 1:
        raise InsufficientOrder(f"pade_sqrt needs order >= {2 * m - 1}")
    if series.exact and all(c == 0 for c in series.coeffs[m + 1:]):
        # the root is itself a polynomial of degree <= m
        return PadePair(Polynomial([-c for c in series.coeffs[:m + 1]]), Polynomial([1]))
    h = null_vector(series, m, d, threshold_exp)
    if h is None:
        return None
    k = m - d
    q = Polynomial([h[k - j] for j in range(k + 1)])
    qs = series.times(q)
    p = Polynomial([-c for c in qs.coeffs[:m + 1]])
    return PadePair(p, q)


def halphen_determinant(series, k, l):
    """Halphen's H_{k,l}: det of the l x l Hankel block starting at C_k.

    Diagnostic only; nothing downstream depends on it.
    """
    if l == 0:
        return 1
    return determinant([[series[k + i + j] for j in range(l)] for i in range(l)])


def determinant(M):
    """Exact determinant for rational entries, mpmath otherwise."""
    if not M:
        return 1
    if not all_rational(x for row in M for x in row):
        return mpmath.det(mpmath.matrix([[to_mpf(x) for x in row] for row in M]))
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return det
