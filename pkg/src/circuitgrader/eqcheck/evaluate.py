"""Numeric evaluation of expression trees over complex values."""

from __future__ import annotations

import cmath
import math

from .errors import EvalError, UnboundSymbolError
from .nodes import (
    Add,
    Deg,
    Deriv,
    Div,
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

Bindings = dict[str, complex]


def numeric_eval(e: Expr, bindings: Bindings | None = None) -> complex:
    """Evaluate ``e`` with every free symbol bound in ``bindings``.

    Degree-tagged angles are converted to radians; bare trig arguments are
    taken as radians.
    """
    b = bindings or {}
    return _eval(e, b)


def _eval(e: Expr, b: Bindings) -> complex:
    if isinstance(e, Num):
        return complex(e.value.numerator / e.value.denominator)
    if isinstance(e, Sym):
        try:
            return complex(b[e.name])
        except KeyError:
            raise UnboundSymbolError(e.name) from None
    if isinstance(e, Pi):
        return complex(math.pi)
    if isinstance(e, ImagUnit):
        return 1j
    if isinstance(e, Neg):
        return -_eval(e.arg, b)
    if isinstance(e, Add):
        return sum(_eval(t, b) for t in e.terms)
    if isinstance(e, Mul):
        out = complex(1)
        for f in e.factors:
            out *= _eval(f, b)
        return out
    if isinstance(e, Div):
        den = _eval(e.den, b)
        if den == 0:
            raise EvalError("division by zero")
        return _eval(e.num, b) / den
    if isinstance(e, Pow):
        base = _eval(e.base, b)
        exp = _eval(e.exp, b)
        if base == 0 and exp.real < 0:
            raise EvalError("division by zero")
        try:
            return base**exp
        except (OverflowError, ValueError, ZeroDivisionError) as exc:
            raise EvalError(f"power evaluation failed: {exc}") from exc
    if isinstance(e, Sqrt):
        return cmath.sqrt(_eval(e.arg, b))
    if isinstance(e, Trig):
        arg = _eval(e.arg, b)
        return cmath.sin(arg) if e.fn == "sin" else cmath.cos(arg)
    if isinstance(e, Deg):
        return _eval(e.arg, b) * math.pi / 180.0
    if isinstance(e, Phasor):
        mag = _eval(e.mag, b)
        angle = _eval(e.angle, b)
        return mag * cmath.exp(1j * angle)
    if isinstance(e, Deriv):
        raise EvalError(f"derivative term d^{e.order} {e.target}/d{e.wrt}^{e.order} is not numerically evaluable")
    raise TypeError(f"cannot evaluate {type(e).__name__}")
