"""Recursive-descent parser for the LaTeX-subset grammar.

The grammar (EBNF) is documented in docs/grammar.md. Parse trees are raw:
unary minus stays ``Neg``, ``\\frac`` stays ``Div``; ``normalize`` lowers
them to canonical form. The canonical renderer round-trips raw trees.
"""

from __future__ import annotations

from fractions import Fraction

from . import lexer
from .errors import ParseError
from .lexer import (
    ANGLE,
    CIRC,
    END,
    FRAC,
    FUNC,
    GREEK_NAMES,
    NUM,
    OP,
    PI,
    SQRT,
    TEXT,
    WORD,
    Token,
)
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

# Tokens that can begin an atom; juxtaposition of two of these multiplies.
_ATOM_STARTERS = {WORD, PI, FRAC, SQRT, FUNC}
_ATOM_STARTER_OPS = {"(", "{"}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, offset: int = 0) -> Token:
        j = min(self.i + offset, len(self.tokens) - 1)
        return self.tokens[j]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != END:
            self.i += 1
        return tok

    def at_op(self, *ops: str) -> bool:
        tok = self.peek()
        return tok.kind == OP and tok.value in ops

    def expect_op(self, op: str) -> Token:
        tok = self.peek()
        if not (tok.kind == OP and tok.value == op):
            raise ParseError(tok.pos, f"'{op}'", str(tok.value))
        return self.advance()

    def expect_end(self) -> None:
        tok = self.peek()
        if tok.kind != END:
            raise ParseError(tok.pos, "end of input", str(tok.value))

    # grammar ------------------------------------------------------------

    def expression(self) -> Expr:
        terms = [self.term()]
        while self.at_op("+", "-"):
            op = self.advance().value
            t = self.term()
            terms.append(Neg(t) if op == "-" else t)
        return terms[0] if len(terms) == 1 else Add(tuple(terms))

    def term(self) -> Expr:
        left = self.phasor_factor()
        while True:
            if self.at_op("*"):
                self.advance()
                left = self._mul(left, self.phasor_factor())
            elif self.at_op("/"):
                self.advance()
                left = Div(left, self.phasor_factor())
            elif self._starts_atom():
                left = self._mul(left, self.phasor_factor())
            else:
                return left

    @staticmethod
    def _mul(a: Expr, b: Expr) -> Expr:
        left = a.factors if isinstance(a, Mul) else (a,)
        right = b.factors if isinstance(b, Mul) else (b,)
        return Mul(left + right)

    def _starts_atom(self) -> bool:
        tok = self.peek()
        if tok.kind in _ATOM_STARTERS:
            return True
        return tok.kind == OP and tok.value in _ATOM_STARTER_OPS

    def phasor_factor(self) -> Expr:
        e = self.unary()
        if self.peek().kind == ANGLE:
            self.advance()
            return Phasor(e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.at_op("-"):
            self.advance()
            return Neg(self.unary())
        if self.at_op("+"):
            self.advance()
            return self.unary()
        return self.postfix()

    def postfix(self) -> Expr:
        e = self.atom()
        while True:
            tok = self.peek()
            if tok.kind == CIRC:
                self.advance()
                e = Deg(e)
            elif tok.kind == OP and tok.value == "^":
                nxt = self.peek(1)
                if nxt.kind == CIRC:
                    self.advance()
                    self.advance()
                    e = Deg(e)
                elif (
                    nxt.kind == OP
                    and nxt.value == "{"
                    and self.peek(2).kind == CIRC
                    and self.peek(3).kind == OP
                    and self.peek(3).value == "}"
                ):
                    self.i += 4
                    e = Deg(e)
                else:
                    self.advance()
                    e = Pow(e, self.exponent())
            else:
                return e

    def exponent(self) -> Expr:
        tok = self.peek()
        if tok.kind == OP and tok.value == "{":
            self.advance()
            e = self.expression()
            self.expect_op("}")
            return e
        if tok.kind == OP and tok.value == "(":
            self.advance()
            e = self.expression()
            self.expect_op(")")
            return e
        if tok.kind == OP and tok.value == "-":
            self.advance()
            return Neg(self.exponent())
        if tok.kind == NUM:
            self.advance()
            return Num(tok.value)
        if tok.kind == WORD and len(tok.value) == 1:
            self.advance()
            return Sym(tok.value)
        if tok.kind == PI:
            self.advance()
            return Pi()
        raise ParseError(tok.pos, "an exponent", str(tok.value))

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == NUM:
            self.advance()
            return self._maybe_scientific(Num(tok.value))
        if tok.kind == PI:
            self.advance()
            return Pi()
        if tok.kind == WORD:
            return self._word_atom()
        if tok.kind == FUNC:
            self.advance()
            return Trig(tok.value, self._func_arg(tok))
        if tok.kind == FRAC:
            self.advance()
            return self._frac()
        if tok.kind == SQRT:
            self.advance()
            self.expect_op("{")
            inner = self.expression()
            self.expect_op("}")
            return Sqrt(inner)
        if tok.kind == OP and tok.value in ("(", "{", "["):
            close = {"(": ")", "{": "}", "[": "]"}[tok.value]
            self.advance()
            e = self.expression()
            self.expect_op(close)
            return e
        raise ParseError(tok.pos, "a number, symbol, or '('", str(tok.value))

    def _maybe_scientific(self, mantissa: Num) -> Expr:
        """Fold ``M × 10^k`` written with an explicit power of ten."""
        save = self.i
        if not self.at_op("*"):
            return mantissa
        self.advance()
        tok = self.peek()
        if tok.kind == NUM and tok.value == 10 and self.peek(1).kind == OP and self.peek(1).value == "^":
            self.advance()
            self.advance()
            exp = self.exponent()
            k = _const_int(exp)
            if k is not None:
                return Num(mantissa.value * Fraction(10) ** k)
        self.i = save
        return mantissa

    def _word_atom(self) -> Expr:
        tok = self.advance()
        name = tok.value
        if name == "j":
            return ImagUnit()
        if name in ("sin", "cos"):
            return Trig(name, self._func_arg(tok))
        base, _, sub = name.partition("_")
        if len(base) == 1 or base in GREEK_NAMES:
            return Sym(name)
        # LaTeX runs letters together: "ab" is a·b, subscript binds the last
        syms: list[Expr] = [ImagUnit() if c == "j" else Sym(c) for c in base[:-1]]
        last = base[-1] + ("_" + sub if sub else "")
        syms.append(ImagUnit() if last == "j" else Sym(last))
        return Mul(tuple(syms))

    def _func_arg(self, fn_tok: Token) -> Expr:
        tok = self.peek()
        if tok.kind == OP and tok.value in ("(", "{"):
            close = ")" if tok.value == "(" else "}"
            self.advance()
            e = self.expression()
            self.expect_op(close)
            return e
        raise ParseError(tok.pos, f"'(' after {fn_tok.value}", str(tok.value))

    def _frac(self) -> Expr:
        num_toks = self._brace_group()
        den_toks = self._brace_group()
        deriv = _match_deriv(num_toks, den_toks)
        if deriv is not None:
            return deriv
        return Div(_parse_token_slice(num_toks), _parse_token_slice(den_toks))

    def _brace_group(self) -> list[Token]:
        self.expect_op("{")
        depth = 1
        out: list[Token] = []
        while True:
            tok = self.peek()
            if tok.kind == END:
                raise ParseError(tok.pos, "closing '}'")
            if tok.kind == OP and tok.value == "{":
                depth += 1
            elif tok.kind == OP and tok.value == "}":
                depth -= 1
                if depth == 0:
                    self.advance()
                    return out
            out.append(self.advance())


def _const_int(e: Expr) -> int | None:
    if isinstance(e, Num) and e.value.denominator == 1:
        return int(e.value)
    if isinstance(e, Neg):
        inner = _const_int(e.arg)
        return None if inner is None else -inner
    return None


def _match_deriv(num_toks: list[Token], den_toks: list[Token]) -> Deriv | None:
    """Recognize ``\\frac{d^n y}{d t^n}`` shapes, else None."""
    num = _deriv_half(num_toks, power_last=False)
    den = _deriv_half(den_toks, power_last=True)
    if num is None or den is None:
        return None
    n_order, target = num
    d_order, wrt = den
    order = n_order or d_order or 1
    if n_order and d_order and n_order != d_order:
        return None
    return Deriv(target=target, wrt=wrt, order=order)


def _deriv_half(toks: list[Token], power_last: bool) -> tuple[int, str] | None:
    """Return (order, name); order 0 means unstated. None if not d-form."""
    if not toks:
        return None
    t0 = toks[0]
    rest = toks[1:]
    is_d = (t0.kind in (WORD, TEXT)) and t0.value == "d"
    fused = t0.kind == WORD and isinstance(t0.value, str) and len(t0.value) > 1 and t0.value[0] == "d"
    if fused:
        # "dv" or "dt^2"
        name = t0.value[1:]
        if not rest:
            return (0, name)
        order = _trailing_power(rest)
        return (order, name) if order is not None else None
    if not is_d:
        return None
    order = 0
    if rest and rest[0].kind == OP and rest[0].value == "^" and not power_last:
        got = _power_tokens(rest)
        if got is None:
            return None
        order, rest = got
    if not rest or rest[0].kind not in (WORD, TEXT):
        return None
    name = rest[0].value
    rest = rest[1:]
    if rest:
        if not power_last:
            return None
        tail = _trailing_power(rest)
        if tail is None:
            return None
        order = tail
    return (order, name)


def _power_tokens(toks: list[Token]) -> tuple[int, list[Token]] | None:
    """Consume ``^ n`` or ``^{n}`` from the front; return (n, remaining)."""
    if len(toks) >= 2 and toks[1].kind == NUM:
        v = toks[1].value
        if v.denominator == 1:
            return int(v), toks[2:]
        return None
    if (
        len(toks) >= 4
        and toks[1].kind == OP
        and toks[1].value == "{"
        and toks[2].kind == NUM
        and toks[3].kind == OP
        and toks[3].value == "}"
    ):
        v = toks[2].value
        if v.denominator == 1:
            return int(v), toks[4:]
    return None


def _trailing_power(toks: list[Token]) -> int | None:
    if not toks or toks[0].kind != OP or toks[0].value != "^":
        return None
    got = _power_tokens(toks)
    if got is None or got[1]:
        return None
    return got[0]


def _parse_token_slice(toks: list[Token]) -> Expr:
    end_pos = toks[-1].pos + 1 if toks else 0
    p = _Parser(toks + [Token(END, None, end_pos)])
    e = p.expression()
    p.expect_end()
    return e


def parse_expr(text: str) -> Expr:
    """Parse ``text`` as a single expression (no ``=`` allowed)."""
    return parse_tokens(lexer.tokenize(text))


def parse_tokens(tokens: list[Token]) -> Expr:
    p = _Parser(tokens)
    e = p.expression()
    p.expect_end()
    return e


def parse_equation(text: str) -> Equation:
    """Parse ``lhs = rhs``."""
    result = parse_any(text)
    if not isinstance(result, Equation):
        tokens = lexer.tokenize(text)
        raise ParseError(tokens[-1].pos, "'=' between two expressions")
    return result


def parse_any(text: str) -> Expr | Equation:
    """Parse an expression, or an equation if a top-level ``=`` is present."""
    return parse_any_tokens(lexer.tokenize(text))


def parse_any_tokens(tokens: list[Token]) -> Expr | Equation:
    p = _Parser(tokens)
    lhs = p.expression()
    if p.at_op("="):
        p.advance()
        rhs = p.expression()
        p.expect_end()
        return Equation(lhs, rhs)
    p.expect_end()
    return lhs
