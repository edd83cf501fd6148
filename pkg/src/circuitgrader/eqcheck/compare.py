"""Equivalence decisions between answers.

Three routes decide a match, tried in order:

1. canonical-form: normal forms are structurally identical;
2. numeric: both sides are closed (no free symbols) and their values agree
   within tolerance — reported under the ``numeric-sampling`` method;
3. numeric-sampling: both sides share the same free symbols and agree at a
   fixed set of deterministically sampled points.

``answers_match`` adds unit handling on top; ``compare_equations`` compares
equations by scale-normalized coefficient vectors over a shared term basis.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import parser
from .errors import EvalError, IncomparableError, ParseError
from .evaluate import numeric_eval
from .lexer import DOLLAR, END, OP, Token, tokenize
from .nodes import (
    Add,
    Deriv,
    Equation,
    Expr,
    Mul,
    Neg,
    Num,
    Sym,
    children,
    contains_deriv,
    free_symbols,
)
from .normalize import as_terms, normalize, sort_key
from .render import render
from .units import Unit, parse_unit_tokens

SAMPLE_COUNT = 16
SAMPLE_SEED = 271828
SAMPLE_RANGE = (0.1, 10.0)
RESAMPLE_LIMIT = 8

METHOD_CANONICAL = "canonical-form"
METHOD_SAMPLING = "numeric-sampling"
METHOD_UNIT = "unit-converted-numeric"


@dataclass(frozen=True)
class Tolerance:
    """Numeric agreement threshold: |x-y| <= max(abs, rel*max(|x|,|y|))."""

    rel: float = 0.01
    abs: float = 0.01

    def __post_init__(self):
        if self.rel < 0 or self.abs < 0:
            raise ValueError("tolerances must be non-negative")

    def close(self, x: complex, y: complex) -> bool:
        return abs(x - y) <= max(self.abs, self.rel * max(abs(x), abs(y)))


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class MatchVerdict:
    matched: bool
    method: str
    detail: str = ""


def equivalent(a: Expr, b: Expr, tol: Tolerance = DEFAULT_TOLERANCE) -> MatchVerdict:
    """Decide whether two expressions denote the same answer."""
    na, nb = normalize(a), normalize(b)
    if na == nb:
        return MatchVerdict(True, METHOD_CANONICAL, f"both normalize to {render(na)}")
    if contains_deriv(na) or contains_deriv(nb):
        raise IncomparableError("derivative terms cannot be compared as expressions; compare as equations")
    syms_a, syms_b = free_symbols(na), free_symbols(nb)
    if syms_a != syms_b:
        raise IncomparableError(
            f"different symbol sets: {sorted(syms_a) or '{}'} vs {sorted(syms_b) or '{}'}"
        )
    if not syms_a:
        try:
            va, vb = numeric_eval(na), numeric_eval(nb)
        except EvalError as exc:
            raise IncomparableError(f"evaluation failed: {exc}") from exc
        ok = tol.close(va, vb)
        return MatchVerdict(ok, METHOD_SAMPLING, f"closed values {_fmt(va)} vs {_fmt(vb)}")
    return _sampled_match(na, nb, sorted(syms_a), tol)


def _sampled_match(na: Expr, nb: Expr, symbols: list[str], tol: Tolerance) -> MatchVerdict:
    rng = random.Random(SAMPLE_SEED)
    lo, hi = SAMPLE_RANGE
    checked = 0
    for _ in range(SAMPLE_COUNT):
        for attempt in range(RESAMPLE_LIMIT + 1):
            bindings = {s: complex(rng.uniform(lo, hi)) for s in symbols}
            try:
                va = numeric_eval(na, bindings)
                vb = numeric_eval(nb, bindings)
            except EvalError:
                if attempt == RESAMPLE_LIMIT:
                    raise IncomparableError(
                        f"could not evaluate both sides after {RESAMPLE_LIMIT} resamples"
                    ) from None
                continue
            if not tol.close(va, vb):
                at = ", ".join(f"{s}={bindings[s].real:.4g}" for s in symbols)
                return MatchVerdict(
                    False, METHOD_SAMPLING, f"values differ at {at}: {_fmt(va)} vs {_fmt(vb)}"
                )
            checked += 1
            break
    return MatchVerdict(True, METHOD_SAMPLING, f"agreed at {checked} sampled points")


def _fmt(v: complex) -> str:
    if abs(v.imag) < 1e-12:
        return f"{v.real:.6g}"
    return f"{v.real:.6g}{v.imag:+.6g}j"


# answer parsing -----------------------------------------------------------


@dataclass(frozen=True)
class ParsedAnswer:
    """An answer text split into its math part and an optional unit tail."""

    body: Expr | Equation
    unit: Unit | None = None


def parse_answer(text: str) -> ParsedAnswer:
    """Parse answer text as expression-or-equation plus optional unit.

    The unit tail is found by trying token splits: the shortest head that
    parses as math whose tail resolves as a unit expression wins. A leading
    currency sign is taken as the unit (``$0.264``).
    """
    tokens = tokenize(text)
    toks = tokens[:-1]
    if not toks:
        raise ParseError(0, "an expression", "end of input")
    # a currency sign prefixes its value: "$0.264" or "cost = $0.264"
    for k, tok in enumerate(toks):
        if tok.kind == DOLLAR and (
            k == 0 or (toks[k - 1].kind == OP and toks[k - 1].value == "=")
        ):
            unit = parse_unit_tokens([tok])
            body = _parse_slice(toks[:k] + toks[k + 1:])
            return ParsedAnswer(body, unit)
    for split in range(1, len(toks)):
        unit = parse_unit_tokens(toks[split:])
        if unit is None:
            continue
        try:
            body = _parse_slice(toks[:split])
        except ParseError:
            continue
        return ParsedAnswer(body, unit)
    return ParsedAnswer(_parse_slice(toks))


def _parse_slice(toks: list[Token]) -> Expr | Equation:
    end_pos = toks[-1].pos + 1 if toks else 0
    return parser.parse_any_tokens(toks + [Token(END, None, end_pos)])


def _is_simple_lhs(e: Expr) -> bool:
    """A label-like left side: a bare name, a multi-letter word (which the
    parser reads as a product of letters), or call style ``v(t)``."""
    if isinstance(e, Sym):
        return True
    return isinstance(e, Mul) and all(isinstance(f, Sym) for f in e.factors)


def answers_match(student: str, reference: str, tol: Tolerance = DEFAULT_TOLERANCE) -> MatchVerdict:
    """Compare two final-answer texts, converting units when both carry one.

    A unit on only one side is recorded in the verdict detail but does not
    fail the value comparison.
    """
    try:
        s = parse_answer(student)
    except ParseError as exc:
        raise ParseError(exc.position, f"[student] {exc.expected}", exc.found) from None
    try:
        r = parse_answer(reference)
    except ParseError as exc:
        raise ParseError(exc.position, f"[reference] {exc.expected}", exc.found) from None

    notes: list[str] = []
    s_body, r_body = s.body, r.body
    if isinstance(s_body, Equation) and not _is_simple_lhs(s_body.lhs):
        if isinstance(r_body, Equation) and not _is_simple_lhs(r_body.lhs):
            return compare_equations(s_body, r_body, tol)
        raise IncomparableError("one side is a full equation, the other is not")
    if isinstance(s_body, Equation):
        notes.append(f"student assignment lhs {render(s_body.lhs)} dropped")
        s_body = s_body.rhs
    if isinstance(r_body, Equation):
        if not _is_simple_lhs(r_body.lhs):
            raise IncomparableError("one side is a full equation, the other is not")
        notes.append(f"reference assignment lhs {render(r_body.lhs)} dropped")
        r_body = r_body.rhs

    converted = False
    if s.unit is not None and r.unit is not None:
        if not s.unit.compatible(r.unit):
            return MatchVerdict(
                False, METHOD_UNIT, f"incommensurable units: {s.unit} vs {r.unit}"
            )
        if s.unit.scale != r.unit.scale:
            ratio = Fraction(s.unit.scale / r.unit.scale)
            s_body = Mul((Num(ratio), s_body))
            converted = True
            notes.append(f"student value converted from {s.unit} to {r.unit}")
    elif s.unit is not None or r.unit is not None:
        missing = "reference" if s.unit is not None else "student"
        present = s.unit if s.unit is not None else r.unit
        notes.append(f"unit-missing: {missing} side has no unit (other side: {present})")

    verdict = equivalent(s_body, r_body, tol)
    method = METHOD_UNIT if converted else verdict.method
    detail = "; ".join([*notes, verdict.detail]) if notes else verdict.detail
    return MatchVerdict(verdict.matched, method, detail)


# equation comparison ------------------------------------------------------


def compare_equations(a: Equation, b: Equation, tol: Tolerance = DEFAULT_TOLERANCE) -> MatchVerdict:
    """Compare equations as scale-normalized coefficient vectors.

    Both equations are rewritten as (lhs - rhs) = 0 over a shared basis of
    non-constant terms; coefficients are divided by the highest-order
    term's coefficient so overall scaling does not matter.
    """
    ca = _coefficients(a, "first")
    cb = _coefficients(b, "second")
    if set(ca) != set(cb):
        only_a = [k for k in ca if k not in cb]
        only_b = [k for k in cb if k not in ca]
        raise IncomparableError(
            "equations have different term bases: "
            f"only in first: {[_basis_name(k) for k in only_a]}, "
            f"only in second: {[_basis_name(k) for k in only_b]}"
        )
    pivot = max(ca, key=_basis_rank)
    pa, pb = ca[pivot], cb[pivot]
    for basis in ca:
        va = float(ca[basis] / pa)
        vb = float(cb[basis] / pb)
        if not tol.close(va, vb):
            return MatchVerdict(
                False,
                METHOD_CANONICAL,
                f"coefficient of {_basis_name(basis)} differs: {va:.6g} vs {vb:.6g}"
                f" (normalized by {_basis_name(pivot)})",
            )
    return MatchVerdict(
        True,
        METHOD_CANONICAL,
        f"{len(ca)} coefficients agree after normalizing by {_basis_name(pivot)}",
    )


_CONST = "constant term"


def _coefficients(eq: Equation, side: str) -> dict[Expr | None, Fraction]:
    diff = normalize(Add((eq.lhs, Neg(eq.rhs))))
    out: dict[Expr | None, Fraction] = {}
    for coeff, basis in as_terms(diff):
        if coeff == 0 and basis is None:
            continue
        out[basis] = out.get(basis, Fraction(0)) + coeff
    if not out:
        raise IncomparableError(f"the {side} equation reduces to 0 = 0")
    return out


def _basis_name(basis: Expr | None) -> str:
    return _CONST if basis is None else render(basis)


def _deriv_order(e: Expr | None) -> int:
    if e is None:
        return -1
    if isinstance(e, Deriv):
        return e.order
    if isinstance(e, (Add, Mul)):
        kids = e.terms if isinstance(e, Add) else e.factors
        return max((_deriv_order(k) for k in kids), default=0)
    return max((_deriv_order(c) for c in children(e)), default=0)


def _basis_rank(basis: Expr | None):
    if basis is None:
        return (-1, ())
    return (_deriv_order(basis), sort_key(basis))
