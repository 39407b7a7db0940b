"""Exception hierarchy shared by every k0calc module."""

from __future__ import annotations


class K0CalcError(Exception):
    """Base class for all k0calc errors."""


class InputError(K0CalcError):
    """Malformed or inconsistent input; the CLI maps these to exit code 2."""


class FieldMismatch(InputError):
    pass


class DegenerateDivisor(InputError):
    pass


class DegenerateInput(InputError):
    pass


class ArityError(InputError):
    pass


class BoundVarError(InputError):
    pass


class AmbientError(InputError):
    pass


class VarError(InputError):
    pass


class NotASentence(InputError):
    pass


class NoEmbedding(InputError):
    pass


class CharZeroUnsupported(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.text = text
        self.pos = pos
        before = text[:pos]
        self.line = before.count("\n") + 1
        self.column = pos - (before.rfind("\n") + 1) + 1
        super().__init__(f"{message} (line {self.line}, column {self.column})")


class NotABijection(K0CalcError):
    """A certificate failed one of its verification sentences."""

    def __init__(self, check: str, sentence: str):
        self.check = check
        self.sentence = sentence
        super().__init__(f"{check} check failed: {sentence}")


class SizeLimit(K0CalcError):
    """An enumeration or field-size cap was exceeded; CLI exit code 3."""

    def __init__(self, message: str, cap: str = ""):
        self.cap = cap
        super().__init__(message)
