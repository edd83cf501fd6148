"""Normalization to a canonical form.

The canonical form flattens sums and products, folds exact rational
arithmetic, orders operands by a fixed total order, and lowers surface
forms (unary minus, fractions, square roots, degree marks) onto a small
node set. Structural equality of normal forms is the engine's first
equivalence route. Products are not expanded over sums; distributed vs
factored shapes are left to the numeric route.
"""

from __future__ import annotations

from fractions import Fraction

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

_ZERO = Num(Fraction(0))
_ONE = Num(Fraction(1))
_MINUS_ONE = Num(Fraction(-1))
_HALF = Num(Fraction(1, 2))

# sin/cos at rational multiples r of pi (r taken mod 2)
_SIN_TABLE = {Fraction(0): 0, Fraction(1, 2): 1, Fraction(1): 0, Fraction(3, 2): -1}
_COS_TABLE = {Fraction(0): 1, Fraction(1, 2): 0, Fraction(1): -1, Fraction(3, 2): 0}


def normalize(e: Expr) -> Expr:
    """Return the canonical form of ``e``. Idempotent."""
    if isinstance(e, (Num, Sym, Pi, ImagUnit, Deriv)):
        return e
    if isinstance(e, Neg):
        return _mul([_MINUS_ONE, normalize(e.arg)])
    if isinstance(e, Div):
        return _mul([normalize(e.num), _pow(normalize(e.den), _MINUS_ONE)])
    if isinstance(e, Sqrt):
        return _pow(normalize(e.arg), _HALF)
    if isinstance(e, Deg):
        return _mul([normalize(e.arg), Num(Fraction(1, 180)), Pi()])
    if isinstance(e, Add):
        return _add([normalize(t) for t in e.terms])
    if isinstance(e, Mul):
        return _mul([normalize(f) for f in e.factors])
    if isinstance(e, Pow):
        return _pow(normalize(e.base), normalize(e.exp))
    if isinstance(e, Trig):
        return _trig(e.fn, normalize(e.arg))
    if isinstance(e, Phasor):
        mag = normalize(e.mag)
        angle = normalize(e.angle)
        if angle == _ZERO:
            return mag
        return Phasor(mag, angle)
    raise TypeError(f"cannot normalize {type(e).__name__}")


def sort_key(e: Expr):
    """Fixed total order over canonical nodes."""
    if isinstance(e, Num):
        return (0, (e.value.numerator, e.value.denominator))
    if isinstance(e, Pi):
        return (1,)
    if isinstance(e, ImagUnit):
        return (2,)
    if isinstance(e, Sym):
        return (3, e.name)
    if isinstance(e, Deriv):
        return (4, e.wrt, e.target, e.order)
    if isinstance(e, Trig):
        return (5, e.fn, sort_key(e.arg))
    if isinstance(e, Phasor):
        return (6, sort_key(e.mag), sort_key(e.angle))
    if isinstance(e, Pow):
        return (7, sort_key(e.base), sort_key(e.exp))
    if isinstance(e, Mul):
        return (8, tuple(sort_key(f) for f in e.factors))
    if isinstance(e, Add):
        return (9, tuple(sort_key(t) for t in e.terms))
    raise TypeError(f"no sort key for {type(e).__name__}")


def split_coefficient(term: Expr) -> tuple[Fraction, Expr | None]:
    """Split a canonical term into (rational coefficient, remaining factor).

    The remaining factor is None for pure constants.
    """
    if isinstance(term, Num):
        return term.value, None
    if isinstance(term, Mul) and isinstance(term.factors[0], Num):
        rest = term.factors[1:]
        remaining = rest[0] if len(rest) == 1 else Mul(rest)
        return term.factors[0].value, remaining
    return Fraction(1), term


def as_terms(e: Expr) -> list[tuple[Fraction, Expr | None]]:
    """Canonical ``e`` as a list of (coefficient, basis) addends."""
    terms = e.terms if isinstance(e, Add) else (e,)
    return [split_coefficient(t) for t in terms]


def negate(e: Expr) -> Expr:
    """Canonical negation (distributes over sums)."""
    if isinstance(e, Add):
        return _add([negate(t) for t in e.terms])
    return _mul([_MINUS_ONE, e])


def is_negative(e: Expr) -> bool:
    """True when the canonical leading rational coefficient is negative."""
    if isinstance(e, Num):
        return e.value < 0
    if isinstance(e, Mul) and isinstance(e.factors[0], Num):
        return e.factors[0].value < 0
    if isinstance(e, Add):
        return is_negative(e.terms[0])
    return False


def _add(parts: list[Expr]) -> Expr:
    flat: list[Expr] = []
    for p in parts:
        if isinstance(p, Add):
            flat.extend(p.terms)
        else:
            flat.append(p)
    const = Fraction(0)
    coeffs: dict[Expr, Fraction] = {}
    for t in flat:
        c, rest = split_coefficient(t)
        if rest is None:
            const += c
        else:
            coeffs[rest] = coeffs.get(rest, Fraction(0)) + c
    terms: list[Expr] = []
    for rest, c in coeffs.items():
        if c == 0:
            continue
        terms.append(rest if c == 1 else _mul([Num(c), rest]))
    if const != 0:
        terms.append(Num(const))
    if not terms:
        return _ZERO
    terms.sort(key=sort_key)
    return terms[0] if len(terms) == 1 else Add(tuple(terms))


def _mul(parts: list[Expr]) -> Expr:
    flat: list[Expr] = []
    for p in parts:
        if isinstance(p, Mul):
            flat.extend(p.factors)
        else:
            flat.append(p)
    coeff = Fraction(1)
    saw_zero = False
    exps: dict[Expr, list[Expr]] = {}

    def collect(base: Expr, exp: Expr) -> None:
        nonlocal coeff, saw_zero
        if isinstance(base, Mul) and _as_int(exp) is not None:
            for f in base.factors:
                collect(f, exp)
            return
        if isinstance(base, Pow) and _as_int(exp) is not None:
            collect(base.base, _mul([base.exp, exp]))
            return
        if isinstance(base, Num) and isinstance(exp, Num):
            folded = _fold_num_pow(base.value, exp.value)
            if folded is not None:
                if folded == 0:
                    saw_zero = True
                else:
                    coeff *= folded
                return
        exps.setdefault(base, []).append(exp)

    for f in flat:
        if isinstance(f, Num):
            if f.value == 0:
                saw_zero = True
            else:
                coeff *= f.value
        elif isinstance(f, Pow):
            collect(f.base, f.exp)
        else:
            collect(f, _ONE)

    if saw_zero:
        return _ZERO

    factors: list[Expr] = []
    for base, explist in exps.items():
        exp = _add(explist)
        if exp == _ZERO:
            continue
        if isinstance(base, ImagUnit):
            k = _as_int(exp)
            if k is not None:
                k %= 4
                if k == 0:
                    continue
                if k == 1:
                    factors.append(base)
                    continue
                if k == 2:
                    coeff = -coeff
                    continue
                coeff = -coeff
                factors.append(base)
                continue
        if exp == _ONE:
            factors.append(base)
        else:
            folded = _fold_num_pow(base.value, exp.value) if isinstance(base, Num) and isinstance(exp, Num) else None
            if folded is not None:
                coeff *= folded
            else:
                factors.append(Pow(base, exp))

    if not factors:
        return Num(coeff)
    factors.sort(key=sort_key)
    if len(factors) == 1 and isinstance(factors[0], Add) and coeff != 1:
        # a bare rational coefficient distributes over a sum, so that
        # -(a+b) and (-a-b) share one normal form
        return _add([_mul([Num(coeff), t]) for t in factors[0].terms])
    if coeff != 1:
        factors.insert(0, Num(coeff))
    return factors[0] if len(factors) == 1 else Mul(tuple(factors))


def _pow(base: Expr, exp: Expr) -> Expr:
    if exp == _ONE:
        return base
    if exp == _ZERO:
        return _ONE
    if isinstance(base, Num) and isinstance(exp, Num):
        folded = _fold_num_pow(base.value, exp.value)
        if folded is not None:
            return Num(folded)
        return Pow(base, exp)
    if isinstance(base, (Mul, Pow)) and _as_int(exp) is not None:
        return _mul([Pow(base, exp)])
    if isinstance(base, ImagUnit) and _as_int(exp) is not None:
        return _mul([Pow(base, exp)])
    return Pow(base, exp)


def _trig(fn: str, arg: Expr) -> Expr:
    r = _pi_multiple(arg)
    if r is not None:
        table = _SIN_TABLE if fn == "sin" else _COS_TABLE
        value = table.get(r % 2)
        if value is not None:
            return Num(Fraction(value))
    # pick one representative of {arg, -arg} so that sin(-x) and -sin(x)
    # (and cos(-x), cos(x)) share a normal form; the choice must be stable
    # under flipping, so ties in apparent sign fall back to the total order
    neg = negate(arg)
    arg_negative, neg_negative = is_negative(arg), is_negative(neg)
    if arg_negative == neg_negative:
        use_neg = sort_key(neg) < sort_key(arg)
    else:
        use_neg = arg_negative
    if use_neg:
        if fn == "cos":
            return Trig("cos", neg)
        return _mul([_MINUS_ONE, Trig("sin", neg)])
    return Trig(fn, arg)


def _pi_multiple(e: Expr) -> Fraction | None:
    """Return r when ``e`` is exactly r·pi (or 0), else None."""
    if e == _ZERO:
        return Fraction(0)
    if isinstance(e, Pi):
        return Fraction(1)
    if isinstance(e, Mul) and len(e.factors) == 2:
        a, b = e.factors
        if isinstance(a, Num) and isinstance(b, Pi):
            return a.value
    return None


def _as_int(e: Expr) -> int | None:
    if isinstance(e, Num) and e.value.denominator == 1:
        return int(e.value)
    return None


def _fold_num_pow(base: Fraction, exp: Fraction) -> Fraction | None:
    """Exact value of base**exp when it is rational, else None."""
    if exp.denominator == 1:
        k = int(exp)
        if base == 0 and k < 0:
            return None
        return base**k
    if base < 0:
        return None
    root = _nth_root(base, exp.denominator)
    if root is None:
        return None
    return root ** exp.numerator if exp.numerator >= 0 or root != 0 else None


def _nth_root(value: Fraction, n: int) -> Fraction | None:
    num = _int_nth_root(value.numerator, n)
    den = _int_nth_root(value.denominator, n)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def _int_nth_root(v: int, n: int) -> int | None:
    if v < 0:
        return None
    root = round(v ** (1.0 / n)) if v else 0
    for candidate in (root - 1, root, root + 1):
        if candidate >= 0 and candidate**n == v:
            return candidate
    return None
