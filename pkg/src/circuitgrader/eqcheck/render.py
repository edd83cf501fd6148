"""Canonical text rendering of ASTs.

``parse_expr(render(parse_expr(t)))`` is structurally identical to
``parse_expr(t)`` for any accepted input; rendered normal forms reparse to
expressions with the same normal form.
"""

from __future__ import annotations

from fractions import Fraction

from .nodes import (
    Add,
    Deg,
    Deriv,
    Div,
    Equation,
    Expr,
    ImagUnit,
    Mul,
    Neg,
    Num,
    Phasor,
    Pi,
    Pow,
    Sqrt,
    Sym,
    Trig,
)


def render(e: Expr | Equation) -> str:
    if isinstance(e, Equation):
        return f"{render(e.lhs)} = {render(e.rhs)}"
    return _render(e)


def _render(e: Expr) -> str:
    if isinstance(e, Num):
        return _render_number(e.value)
    if isinstance(e, Sym):
        base, _, sub = e.name.partition("_")
        if sub:
            return f"{base}_{{{sub}}}"
        return base
    if isinstance(e, Pi):
        return "\\pi"
    if isinstance(e, ImagUnit):
        return "j"
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, tight=True)
    if isinstance(e, Add):
        parts = [_wrap(e.terms[0], tight=False)]
        for t in e.terms[1:]:
            if isinstance(t, Neg):
                parts.append("- " + _wrap(t.arg, tight=True))
            else:
                parts.append("+ " + _wrap(t, tight=False))
        return " ".join(parts)
    if isinstance(e, Mul):
        return " \\cdot ".join(_wrap(f, tight=True) for f in e.factors)
    if isinstance(e, Div):
        return f"\\frac{{{_render(e.num)}}}{{{_render(e.den)}}}"
    if isinstance(e, Pow):
        if isinstance(e.exp, Num) and e.exp.value == Fraction(1, 2):
            return f"\\sqrt{{{_render(e.base)}}}"
        return f"{_wrap(e.base, tight=True, power_base=True)}^{{{_render(e.exp)}}}"
    if isinstance(e, Sqrt):
        return f"\\sqrt{{{_render(e.arg)}}}"
    if isinstance(e, Trig):
        return f"\\{e.fn}({_render(e.arg)})"
    if isinstance(e, Deg):
        return f"{_wrap(e.arg, tight=True, power_base=True)}^{{\\circ}}"
    if isinstance(e, Phasor):
        return f"{_wrap(e.mag, tight=True)} \\angle {_wrap(e.angle, tight=True)}"
    if isinstance(e, Deriv):
        if e.order == 1:
            return f"\\frac{{d {e.target}}}{{d {e.wrt}}}"
        return f"\\frac{{d^{{{e.order}}} {e.target}}}{{d {e.wrt}^{{{e.order}}}}}"
    raise TypeError(f"cannot render {type(e).__name__}")


def _wrap(e: Expr, tight: bool, power_base: bool = False) -> str:
    """Parenthesize where reparsing would otherwise regroup."""
    needs = isinstance(e, Add)
    if tight:
        needs = needs or isinstance(e, Neg)
    if power_base:
        # exponent and degree marks bind tighter than multiplication
        needs = needs or isinstance(e, (Mul, Neg, Pow, Deg, Phasor))
    elif isinstance(e, Phasor):
        needs = False
    s = _render(e)
    return f"({s})" if needs else s


def _render_number(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    dec = _decimal_digits(value)
    if dec is not None:
        return dec
    if value < 0:
        return f"-\\frac{{{-value.numerator}}}{{{value.denominator}}}"
    return f"\\frac{{{value.numerator}}}{{{value.denominator}}}"


def _decimal_digits(value: Fraction, max_digits: int = 12) -> str | None:
    """Exact decimal form when the denominator is 2^a·5^b, else None."""
    den = value.denominator
    k = 0
    while den % 2 == 0:
        den //= 2
        k += 1
    m = 0
    while den % 5 == 0:
        den //= 5
        m += 1
    if den != 1:
        return None
    digits = max(k, m)
    if digits > max_digits:
        return None
    scaled = abs(value.numerator) * 10**digits // value.denominator
    text = str(scaled).rjust(digits + 1, "0")
    out = f"{text[:-digits]}.{text[-digits:]}" if digits else text
    return "-" + out if value < 0 else out
