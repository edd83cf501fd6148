"""Units of measure for circuit-analysis answers.

Dimensions are tracked on five independent axes that are convenient for
circuit work: current, time, voltage, currency, and angle. Every supported
unit reduces to a scale factor over that base vector, so conversion is a
single exact rescale and commensurability is a vector comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import IncommensurableUnitsError, UnknownUnitError
from .lexer import CIRC, DOLLAR, END, NUM, OP, TEXT, WORD, Token, tokenize

# dimension axes: (current, time, voltage, currency, angle)
Dims = tuple[int, int, int, int, int]

_DIMLESS: Dims = (0, 0, 0, 0, 0)


def _dims(current=0, time=0, voltage=0, currency=0, angle=0) -> Dims:
    return (current, time, voltage, currency, angle)


# canonical name -> (scale to base, dimension vector)
_UNITS: dict[str, tuple[float, Dims]] = {
    "A": (1.0, _dims(current=1)),
    "s": (1.0, _dims(time=1)),
    "V": (1.0, _dims(voltage=1)),
    "dollar": (1.0, _dims(currency=1)),
    "rad": (1.0, _dims(angle=1)),
    "ohm": (1.0, _dims(current=-1, voltage=1)),
    "W": (1.0, _dims(current=1, voltage=1)),
    "Hz": (1.0, _dims(time=-1)),
    "J": (1.0, _dims(current=1, time=1, voltage=1)),
    "C": (1.0, _dims(current=1, time=1)),
    "F": (1.0, _dims(current=1, time=1, voltage=-1)),
    "H": (1.0, _dims(current=-1, time=1, voltage=1)),
    "Wh": (3600.0, _dims(current=1, time=1, voltage=1)),
    "h": (3600.0, _dims(time=1)),
    "min": (60.0, _dims(time=1)),
    "cent": (0.01, _dims(currency=1)),
    "deg": (math.pi / 180.0, _dims(angle=1)),
}

_ALIASES = {
    "amp": "A", "amps": "A", "ampere": "A", "amperes": "A",
    "sec": "s", "secs": "s", "second": "s", "seconds": "s",
    "volt": "V", "volts": "V", "Volt": "V", "Volts": "V",
    "ohm": "ohm", "ohms": "ohm", "Ohm": "ohm", "Ohms": "ohm",
    "watt": "W", "watts": "W", "Watt": "W", "Watts": "W",
    "hertz": "Hz", "joule": "J", "joules": "J",
    "coulomb": "C", "coulombs": "C",
    "farad": "F", "farads": "F",
    "henry": "H", "henries": "H", "henrys": "H",
    "hr": "h", "hrs": "h", "hour": "h", "hours": "h",
    "minute": "min", "minutes": "min",
    "radian": "rad", "radians": "rad",
    "deg": "deg", "degree": "deg", "degrees": "deg",
    "dollar": "dollar", "dollars": "dollar", "USD": "dollar",
    "cent": "cent", "cents": "cent",
}

_PREFIXES = {
    "f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "μ": 1e-6,
    "m": 1e-3, "c": 1e-2, "k": 1e3, "M": 1e6, "G": 1e9, "T": 1e12,
}


@dataclass(frozen=True)
class Unit:
    """A resolved unit expression."""

    text: str
    scale: float
    dims: Dims

    def compatible(self, other: "Unit") -> bool:
        return self.dims == other.dims

    def __str__(self) -> str:
        return self.text


DIMENSIONLESS = Unit("", 1.0, _DIMLESS)


@dataclass(frozen=True)
class Quantity:
    """A numeric value carrying a unit."""

    value: complex
    unit: Unit

    def in_base(self) -> complex:
        return self.value * self.unit.scale


def _resolve_atom(token: str) -> tuple[float, Dims]:
    name = _ALIASES.get(token, token)
    if name in _UNITS:
        return _UNITS[name]
    if len(token) >= 2 and token[0] in _PREFIXES:
        rest = _ALIASES.get(token[1:], token[1:])
        if rest in _UNITS:
            scale, dims = _UNITS[rest]
            return scale * _PREFIXES[token[0]], dims
    raise UnknownUnitError(token)


def parse_unit(text: str) -> Unit:
    """Parse a unit expression like ``mW``, ``kWh`` or ``V/A``."""
    tokens = tokenize(text)
    unit = parse_unit_tokens(tokens[:-1])
    if unit is None:
        raise UnknownUnitError(text.strip())
    return unit


def parse_unit_tokens(tokens: list[Token]) -> Unit | None:
    """Resolve a token tail as a unit expression, or None if it is not one.

    Grammar: atoms joined by ``*``/``/`` or juxtaposition, each with an
    optional integer power.
    """
    toks = [t for t in tokens if t.kind != END]
    if not toks:
        return None
    scale = 1.0
    dims = list(_DIMLESS)
    sign = 1
    expect_atom = True
    pieces: list[str] = []
    i = 0
    while i < len(toks):
        tok = toks[i]
        if tok.kind == OP and tok.value in ("*", "/") and not expect_atom:
            sign = -1 if tok.value == "/" else 1
            pieces.append(str(tok.value))
            expect_atom = True
            i += 1
            continue
        if tok.kind in (WORD, TEXT) or tok.kind == DOLLAR or tok.kind == CIRC:
            if tok.kind == DOLLAR:
                atom = "dollar"
            elif tok.kind == CIRC:
                atom = "deg"
            else:
                atom = str(tok.value)
            try:
                a_scale, a_dims = _resolve_atom(atom)
            except UnknownUnitError:
                # a lone prefix letter before its unit: "M \Omega", "k Wh"
                if atom in _PREFIXES and i + 1 < len(toks) and toks[i + 1].kind in (WORD, TEXT):
                    merged = atom + str(toks[i + 1].value)
                    try:
                        a_scale, a_dims = _resolve_atom(merged)
                    except UnknownUnitError:
                        return None
                    atom = merged
                    i += 1
                else:
                    return None
            power = 1
            if i + 1 < len(toks) and toks[i + 1].kind == OP and toks[i + 1].value == "^":
                got = _unit_power(toks, i + 1)
                if got is None:
                    return None
                power, i = got
            else:
                i += 1
            power *= sign
            sign = 1
            scale *= a_scale**power
            for axis in range(5):
                dims[axis] += a_dims[axis] * power
            shown = _ALIASES.get(atom, atom)
            pieces.append(shown if power == 1 else f"{shown}^{power}")
            expect_atom = False
            continue
        return None
    if expect_atom:
        return None
    return Unit(" ".join(pieces).replace(" ^", "^"), scale, tuple(dims))  # type: ignore[arg-type]


def _unit_power(toks: list[Token], caret: int) -> tuple[int, int] | None:
    """Parse ``^n`` / ``^{n}`` / ``^{-n}`` at ``caret``; return (n, next_i)."""
    j = caret + 1
    neg = False
    if j < len(toks) and toks[j].kind == OP and toks[j].value == "{":
        j += 1
        if j < len(toks) and toks[j].kind == OP and toks[j].value == "-":
            neg = True
            j += 1
        if j < len(toks) and toks[j].kind == NUM and toks[j].value.denominator == 1:
            n = int(toks[j].value)
            j += 1
            if j < len(toks) and toks[j].kind == OP and toks[j].value == "}":
                return (-n if neg else n), j + 1
        return None
    if j < len(toks) and toks[j].kind == OP and toks[j].value == "-":
        neg = True
        j += 1
    if j < len(toks) and toks[j].kind == NUM and toks[j].value.denominator == 1:
        return (-int(toks[j].value) if neg else int(toks[j].value)), j + 1
    return None


def convert_unit(q: Quantity, target: Unit | str) -> Quantity:
    """Re-express ``q`` in ``target`` units; dimensions must agree."""
    dst = parse_unit(target) if isinstance(target, str) else target
    if q.unit.dims != dst.dims:
        raise IncommensurableUnitsError(str(q.unit), str(dst))
    return Quantity(q.value * (q.unit.scale / dst.scale), dst)
