"""Exception hierarchy.

Two families matter to callers: ``InputError`` means the request itself was
malformed (bad text, mismatched variables, not enough order supplied), while
``Refusal`` means the mathematics said no -- a precondition of the lifting
theorem fails, or a membership does not hold.  The CLI maps them to exit codes
1 and 2 respectively.
"""
from __future__ import annotations


class FiltapError(Exception):
    def __init__(self, message: str = "", **detail):
        super().__init__(message or self.__class__.__name__)
        self.detail = detail

    @property
    def reason(self) -> str:
        return self.__class__.__name__


class InputError(FiltapError):
    pass


class Refusal(FiltapError):
    pass


# -- input errors -----------------------------------------------------------

class ExprError(InputError):
    def __init__(self, message: str, position: int | None = None, **detail):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message, position=position, **detail)
        self.position = position


class ExprSyntaxError(ExprError):
    pass


class UnknownVariable(ExprError):
    def __init__(self, name: str, position: int | None = None):
        super().__init__(f"unknown variable {name!r}", position, name=name)
        self.name = name


class NegativeExponent(ExprError):
    pass


class NotAMonomial(ExprError):
    pass


class ContextMismatch(InputError):
    pass


class IllFormedComposition(InputError):
    pass


class InsufficientOrder(InputError):
    pass


class OrderBudgetExceeded(InputError):
    pass


class SystemTooLarge(InputError):
    pass


class NoQuotient(InputError):
    pass


class GridTooCoarse(InputError):
    pass


class WidthsTooLarge(InputError):
    pass


class ProblemFileError(InputError):
    pass


# -- refusals ---------------------------------------------------------------

class NotDivisible(Refusal):
    def __init__(self, degree: int):
        super().__init__(f"not divisible: graded system inconsistent at degree {degree}",
                         degree=degree)
        self.degree = degree


class SearchExhausted(Refusal):
    pass


class HZero(Refusal):
    pass


class ResidualNotInIdeal(Refusal):
    pass


class ContractionViolated(Refusal):
    pass


class NoConvergence(Refusal):
    pass


class CertificateInvalid(Refusal):
    pass


class PrefixNotApproximate(Refusal):
    pass


class HDegeneratesAlongT(Refusal):
    pass


class EpsilonSearchFailed(Refusal):
    pass


class FlatBoundFailed(Refusal):
    """A sampled function does not vanish to its claimed order on Z."""


class CertificateMismatch(Refusal):
    pass
