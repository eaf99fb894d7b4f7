from fractions import Fraction

import mpmath
import pytest
from mpmath import mp

from confocal_billiards.literal import parse_list, parse_number


@pytest.mark.parametrize("text, value", [
    ("3", Fraction(3)), ("20/9", Fraction(20, 9)), ("1.25", Fraction(5, 4)),
    ("-0.1", Fraction(-1, 10)), ("sqrt(16/9)", Fraction(4, 3)), ("2*(3-1/2)", Fraction(5)),
])
def test_exact_literals(text, value):
    v = parse_number(text)
    assert isinstance(v, Fraction) and v == value


def test_surds():
    with mp.workprec(256):
        assert abs(parse_number("9-sqrt(41)") - (9 - mpmath.sqrt(41))) < mpmath.mpf(10) ** -70
        v = parse_number("(20/61)*(9-2*sqrt(5))")
        assert abs(v - mpmath.mpf(20) / 61 * (9 - 2 * mpmath.sqrt(5))) < mpmath.mpf(10) ** -70


def test_list_keeps_inner_commas():
    with mp.workprec(256):
        vals = parse_list("180-80*sqrt(5), 4, 5")
        assert len(vals) == 3 and vals[1:] == [4, 5]


@pytest.mark.parametrize("text", ["", "sqrt(", "2**3", "abs(2)", "sqrt(-1)", "1/0", "x", "sqrt(sqrt(2))"])
def test_malformed(text):
    with pytest.raises(ValueError):
        parse_number(text)
