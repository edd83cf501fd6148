"""Tokenizer for the LaTeX-subset grammar.

Unicode math characters and the equivalent LaTeX commands lex to the same
tokens, so ``3\\times10^{2}`` and ``3×10^{2}`` parse identically.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError

# Token kinds
NUM = "num"
WORD = "word"        # identifier run, subscript folded in: v_s, i_1, dt
TEXT = "text"        # word from \text{..}/\mathrm{..}: unit names, d of d/dt
OP = "op"            # single-char operator or bracket
PI = "pi"
ANGLE = "angle"      # phasor ∠
CIRC = "circ"        # degree mark ° / \circ
FRAC = "frac"
SQRT = "sqrt"
FUNC = "func"        # \sin, \cos (value is the function name)
DOLLAR = "dollar"
END = "end"


@dataclass(frozen=True)
class Token:
    kind: str
    value: object
    pos: int

    def __repr__(self):  # compact in parse errors and test output
        return f"{self.kind}:{self.value!r}@{self.pos}"


_NUM_RE = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_LETTERS_RE = re.compile(r"[A-Za-z]+")
_CMD_RE = re.compile(r"\\([A-Za-z]+|.)")

# Commands that only affect layout.
_SKIP_CMDS = {"left", "right", "big", "Big", "bigl", "bigr", "displaystyle"}
_SPACE_CMDS = {",", ";", ":", "!", " ", "quad", "qquad", "hspace"}
_TEXT_CMDS = {"text", "mathrm", "textrm", "mathit", "mathbf", "operatorname", "rm"}

GREEK_NAMES = {
    "alpha", "beta", "gamma", "delta", "epsilon", "theta", "lambda", "mu",
    "omega", "phi", "psi", "tau", "sigma", "rho", "eta", "xi", "zeta", "nu",
    "kappa", "Delta", "Gamma", "Theta", "Phi", "Psi",
}

_UNICODE_MAP = {
    "−": "-",   # minus sign
    "×": "*",   # ×
    "⋅": "*",   # ⋅
    "·": "*",   # ·
}


def _fold_subscript(text: str, i: int, name: str) -> tuple[str, int]:
    """Attach ``_s`` / ``_{oc}`` subscripts to an identifier: v_s, V_oc."""
    n = len(text)
    if i < n and text[i] == "_":
        i += 1
        if i < n and text[i] == "{":
            end = text.find("}", i)
            if end < 0:
                raise ParseError(i, "closing '}' of subscript")
            name += "_" + text[i + 1:end].strip()
            i = end + 1
        elif i < n and text[i].isalnum():
            name += "_" + text[i]
            i += 1
        else:
            raise ParseError(i, "a subscript character")
    return name, i


def _number_value(text: str) -> Fraction:
    mant, _, exp = text.lower().partition("e")
    value = Fraction(mant)
    if exp:
        value *= Fraction(10) ** int(exp)
    return value


def tokenize(text: str) -> list[Token]:
    """Lex ``text`` into a token list terminated by an END token."""
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace() or ch == "~":
            i += 1
            continue
        if ch in _UNICODE_MAP:
            tokens.append(Token(OP, _UNICODE_MAP[ch], i))
            i += 1
            continue
        if ch == "π":
            tokens.append(Token(PI, "pi", i))
            i += 1
            continue
        if ch == "∠":
            tokens.append(Token(ANGLE, "angle", i))
            i += 1
            continue
        if ch == "°":
            tokens.append(Token(CIRC, "circ", i))
            i += 1
            continue
        if ch in ("Ω", "Ω"):  # Ω in either codepoint
            tokens.append(Token(TEXT, "ohm", i))
            i += 1
            continue
        if ch == "¢":
            tokens.append(Token(TEXT, "cent", i))
            i += 1
            continue
        if ch == "$":
            tokens.append(Token(DOLLAR, "$", i))
            i += 1
            continue
        if ch == "\\":
            m = _CMD_RE.match(text, i)
            if not m:
                raise ParseError(i, "a LaTeX command", "\\")
            cmd = m.group(1)
            i = m.end()
            if cmd in _SKIP_CMDS or cmd in _SPACE_CMDS:
                continue
            if cmd in ("frac", "dfrac", "tfrac"):
                tokens.append(Token(FRAC, "frac", m.start()))
            elif cmd == "sqrt":
                tokens.append(Token(SQRT, "sqrt", m.start()))
            elif cmd in ("sin", "cos"):
                tokens.append(Token(FUNC, cmd, m.start()))
            elif cmd in ("times", "cdot", "ast"):
                tokens.append(Token(OP, "*", m.start()))
            elif cmd == "pi":
                tokens.append(Token(PI, "pi", m.start()))
            elif cmd == "angle":
                tokens.append(Token(ANGLE, "angle", m.start()))
            elif cmd == "circ":
                tokens.append(Token(CIRC, "circ", m.start()))
            elif cmd == "Omega":
                tokens.append(Token(TEXT, "ohm", m.start()))
            elif cmd == "$":
                tokens.append(Token(DOLLAR, "$", m.start()))
            elif cmd in GREEK_NAMES:
                name, i = _fold_subscript(text, i, cmd)
                tokens.append(Token(WORD, name, m.start()))
            elif cmd in _TEXT_CMDS:
                i = _lex_text_group(text, i, tokens)
            else:
                raise ParseError(m.start(), "a supported command", f"\\{cmd}")
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            m = _NUM_RE.match(text, i)
            assert m is not None
            tokens.append(Token(NUM, _number_value(m.group()), i))
            i = m.end()
            continue
        if ch.isalpha():
            m = _LETTERS_RE.match(text, i)
            assert m is not None
            name, i = _fold_subscript(text, m.end(), m.group())
            tokens.append(Token(WORD, name, m.start()))
            continue
        if ch in "+-*/^=(){}[]":
            tokens.append(Token(OP, ch, i))
            i += 1
            continue
        raise ParseError(i, "a math token", ch)
    tokens.append(Token(END, None, n))
    return tokens


def _lex_text_group(text: str, i: int, tokens: list[Token]) -> int:
    """Lex ``{...}`` after a text-style command into TEXT word tokens."""
    if i >= len(text) or text[i] != "{":
        # \rm V style without braces: take one letter run
        m = _LETTERS_RE.match(text, i)
        if not m:
            raise ParseError(i, "'{' after text command")
        tokens.append(Token(TEXT, m.group(), m.start()))
        return m.end()
    end = text.find("}", i)
    if end < 0:
        raise ParseError(i, "closing '}' of text group")
    inner = text[i + 1:end]
    for m in re.finditer(r"[^\s/*^]+|[/*^]", inner):
        piece = m.group()
        pos = i + 1 + m.start()
        if piece in "/*^":
            tokens.append(Token(OP, piece, pos))
        elif piece in ("Ω", "Ω", "\\Omega"):
            tokens.append(Token(TEXT, "ohm", pos))
        else:
            tokens.append(Token(TEXT, piece, pos))
    return end + 1
