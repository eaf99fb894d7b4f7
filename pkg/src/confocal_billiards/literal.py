"""Numeric literals for command-line parameters.

Integers, decimals and p/q stay exact rationals.  Expressions built with
+ - * / parentheses and sqrt(r) of a rational are evaluated at the
working precision; sqrt of a rational square stays rational.
"""
import ast
from fractions import Fraction

import mpmath

from .numeric import is_rational, sqrt, to_mpf

_BINARY = {
    ast.Add: lambda x, y: x + y,
    ast.Sub: lambda x, y: x - y,
    ast.Mult: lambda x, y: x * y,
    ast.Div: lambda x, y: x / y,
}


def _promote(x, y):
    if is_rational(x) and is_rational(y):
        return x, y
    return to_mpf(x), to_mpf(y)


def _eval(node, text):
    if isinstance(node, ast.Expression):
        return _eval(node.body, text)
    if isinstance(node, ast.Constant) and type(node.value) in (int, float):
        # decimals are read from the source text so they stay exact
        return Fraction(ast.get_source_segment(text, node))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, text)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and type(node.op) in _BINARY:
        x, y = _promote(_eval(node.left, text), _eval(node.right, text))
        if isinstance(node.op, ast.Div) and y == 0:
            raise ValueError("division by zero")
        return _BINARY[type(node.op)](x, y)
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id == "sqrt" and len(node.args) == 1 and not node.keywords):
        r = _eval(node.args[0], text)
        if not is_rational(r):
            raise ValueError("sqrt takes a rational argument")
        if r < 0:
            raise ValueError("sqrt of a negative number")
        return sqrt(r)
    raise ValueError(f"unsupported syntax in {text!r}")


def parse_number(text):
    """Parse one literal such as 20/9, 1.25, 9-sqrt(41) or (20/61)*(9-2*sqrt(5))."""
    text = text.strip()
    if not text:
        raise ValueError("empty number")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"malformed number {text!r}") from exc
    value = _eval(tree, text)
    return value if is_rational(value) else +mpmath.mpf(value)


def _split_top_level(text):
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_list(text):
    """Comma-separated literals; commas inside parentheses are kept."""
    return [parse_number(p) for p in _split_top_level(text)]
