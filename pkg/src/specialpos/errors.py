"""Exception hierarchy.

Everything raised on purpose derives from :class:`SpecialPosError`.  The CLI
maps :class:`InputError` to exit code 2 and :class:`BudgetExceeded` to 3.
"""

from __future__ import annotations


class SpecialPosError(Exception):
    pass


class InputError(SpecialPosError):
    """Arguments violate an operation's preconditions."""


class MixedFields(InputError):
    pass


class DivisionByZero(InputError, ZeroDivisionError):
    pass


class MixedAmbient(InputError):
    pass


class AmbientMismatch(InputError):
    pass


class WrongDimension(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class CenterContainsX(InputError):
    pass


class RationalFieldUnsupported(InputError):
    pass


class ValidityRegimeViolated(InputError):
    pass


class NotSpInput(InputError):
    pass


class MismatchedReport(InputError):
    pass


class InsufficientPoints(InputError):
    pass


class SpanTooBig(InputError):
    pass


class FieldTooSmall(InputError):
    pass


class MalformedCertificate(InputError):
    pass


class ExtensionFailed(SpecialPosError):
    pass


class BudgetExceeded(SpecialPosError):
    def __init__(self, what: str, count: int, budget: int):
        super().__init__(f"{what}: {count} exceeds budget {budget}")
        self.what = what
        self.count = count
        self.budget = budget


class BellBudgetExceeded(BudgetExceeded):
    pass
