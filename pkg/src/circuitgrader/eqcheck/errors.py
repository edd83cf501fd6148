"""Exception types shared by the equivalence engine."""

from __future__ import annotations


class EqcheckError(Exception):
    """Base class for all equivalence-engine errors."""


class ParseError(EqcheckError):
    """Input text falls outside the supported math subset.

    Carries the character position and the set of token kinds that would
    have been accepted there.
    """

    def __init__(self, position: int, expected: str, found: str = ""):
        self.position = position
        self.expected = expected
        self.found = found
        what = f"expected {expected}" + (f", found {found!r}" if found else "")
        super().__init__(f"parse error at position {position}: {what}")


class EvalError(EqcheckError):
    """Numeric evaluation failed (domain error or division by zero)."""


class UnboundSymbolError(EvalError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound symbol {name!r}")


class IncomparableError(EqcheckError):
    """The two inputs share no comparable structure."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class UnitError(EqcheckError):
    """Base class for unit-expression problems."""


class UnknownUnitError(UnitError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(f"unknown unit {token!r}")


class IncommensurableUnitsError(UnitError):
    def __init__(self, src: str, dst: str):
        self.src = src
        self.dst = dst
        super().__init__(f"cannot convert {src!r} to {dst!r}: incompatible dimensions")
