"""AST node types for the supported math subset.

All nodes are immutable; structural equality is dataclass equality, which is
what the round-trip and normal-form guarantees are stated against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class Expr:
    """Marker base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Num(Expr):
    """Exact numeric literal (integers, decimals and scientific notation)."""

    value: Fraction


@dataclass(frozen=True)
class Sym(Expr):
    """Named symbol, subscripts folded into the name (``v_s``, ``i_1``)."""

    name: str


@dataclass(frozen=True)
class Pi(Expr):
    pass


@dataclass(frozen=True)
class ImagUnit(Expr):
    """The imaginary unit, written ``j`` in circuit work."""


@dataclass(frozen=True)
class Add(Expr):
    terms: tuple[Expr, ...]


@dataclass(frozen=True)
class Mul(Expr):
    factors: tuple[Expr, ...]


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exp: Expr


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Div(Expr):
    num: Expr
    den: Expr


@dataclass(frozen=True)
class Sqrt(Expr):
    arg: Expr


@dataclass(frozen=True)
class Trig(Expr):
    """sin/cos application. ``fn`` is ``"sin"`` or ``"cos"``."""

    fn: str
    arg: Expr


@dataclass(frozen=True)
class Deg(Expr):
    """Angle tagged as degrees (a trailing degree mark in the source).

    Bare numbers in trig arguments are radians; only explicitly marked
    angles become ``Deg`` nodes.
    """

    arg: Expr


@dataclass(frozen=True)
class Phasor(Expr):
    """Magnitude-angle form ``M ∠ θ`` of a sinusoid's complex amplitude."""

    mag: Expr
    angle: Expr


@dataclass(frozen=True)
class Deriv(Expr):
    """Derivative term ``d^n target / d wrt^n``, opaque to evaluation."""

    target: str
    wrt: str
    order: int


@dataclass(frozen=True)
class Equation:
    lhs: Expr
    rhs: Expr


def contains_deriv(e: Expr) -> bool:
    if isinstance(e, Deriv):
        return True
    return any(contains_deriv(c) for c in children(e))


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, Add):
        return e.terms
    if isinstance(e, Mul):
        return e.factors
    if isinstance(e, Pow):
        return (e.base, e.exp)
    if isinstance(e, (Neg, Sqrt, Deg)):
        return (e.arg,)
    if isinstance(e, Div):
        return (e.num, e.den)
    if isinstance(e, Trig):
        return (e.arg,)
    if isinstance(e, Phasor):
        return (e.mag, e.angle)
    return ()


def free_symbols(e: Expr) -> frozenset[str]:
    if isinstance(e, Sym):
        return frozenset((e.name,))
    out: frozenset[str] = frozenset()
    for c in children(e):
        out |= free_symbols(c)
    return out
