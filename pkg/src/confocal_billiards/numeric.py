"""Scalar backends: exact rationals and multiprecision floats.

Rational inputs (``int`` / ``Fraction``) stay exact as long as every
operation keeps them in the rational field.  Anything else is promoted
to an ``mpmath.mpf`` at the working precision.
"""
from fractions import Fraction
from math import isqrt

import mpmath
from mpmath import mp

DEFAULT_PREC = 256
DEFAULT_THRESHOLD_EXP = -20


def is_rational(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def all_rational(values):
    return all(is_rational(v) for v in values)


def to_mpf(x):
    """Convert any supported scalar to ``mpf`` at the current precision."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, mpmath.mpc):
        if x.imag != 0:
            raise ValueError("complex value where a real was expected")
        return +x.real
    return +mpmath.mpf(x)


def key(x):
    """Sort/compare key valid for mixed rational and mpf values."""
    return x if is_rational(x) else to_mpf(x)


def lt(x, y):
    if is_rational(x) and is_rational(y):
        return x < y
    return to_mpf(x) < to_mpf(y)


def unify(values):
    """All-rational values stay Fractions; otherwise everything becomes mpf."""
    values = list(values)
    if all_rational(values):
        return [Fraction(v) for v in values]
    return [to_mpf(v) for v in values]


def as_scalar(x, exact):
    if exact:
        return Fraction(x)
    return to_mpf(x)


def to_float(x):
    if isinstance(x, Fraction):
        return x.numerator / x.denominator
    return float(x)


def sign(x):
    return (x > 0) - (x < 0)


def rational_sqrt(q):
    """Return the exact square root of a non-negative rational, or None."""
    q = Fraction(q)
    if q < 0:
        return None
    rn, rd = isqrt(q.numerator), isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def sqrt(x):
    """Square root that stays rational when it can."""
    if is_rational(x):
        r = rational_sqrt(x)
        if r is not None:
            return r
    return mpmath.sqrt(to_mpf(x))


def threshold(exp=DEFAULT_THRESHOLD_EXP):
    return mpmath.mpf(10) ** exp


def is_zero(x, scale=1, exp=DEFAULT_THRESHOLD_EXP):
    """Exact test for rationals, relative threshold for floats."""
    if is_rational(x):
        return x == 0
    return abs(x) <= threshold(exp) * abs(to_mpf(scale))


def workprec(prec):
    return mp.workprec(prec)
