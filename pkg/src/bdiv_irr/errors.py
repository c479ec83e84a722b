"""Exception hierarchy shared by every module.

Input problems (bad files, broken references) derive from ``InputError`` and
map to CLI exit code 2.  Mathematical preconditions that a caller violated
derive from ``MathError``.
"""

from __future__ import annotations


class BdivError(Exception):
    """Root of all library errors."""


class InputError(BdivError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ValidationError(InputError):
    """A scenario or object violates a structural invariant.

    ``rule`` names the violated rule; subclasses use their own class name.
    """

    def __init__(self, message: str, rule: str | None = None):
        self.rule = rule or type(self).__name__
        super().__init__(f"{self.rule}: {message}")


class DuplicateId(ValidationError):
    pass


class TripleIncidence(ValidationError):
    pass


class UnknownCurveRef(ValidationError):
    pass


class PoleOffD(ValidationError):
    pass


class MathError(BdivError):
    pass


class SupportOffD(MathError):
    pass


class IllegalIncidence(MathError):
    pass


class UnknownBranch(MathError):
    pass


class ModelMismatch(MathError):
    pass


class NotXDBDivisor(MathError):
    pass


class NotAdmissible(MathError):
    pass


class PointOffD(MathError):
    pass


class PointNotSmoothOnD(MathError):
    pass


class TurningOutsideZeroLocus(MathError):
    pass


class ResolutionBudgetExceeded(MathError):
    def __init__(self, message: str, partial_model=None):
        self.partial_model = partial_model
        super().__init__(message)
