"""Exception hierarchy.

Everything raised for bad mathematical input derives from DomainError so the
CLI can map it to exit status 1.
"""


class DomainError(Exception):
    pass


class ParseError(DomainError):
    pass


class NotHomogeneous(DomainError):
    pass


class NonCalabiYau(DomainError):
    pass


class BadArity(DomainError):
    pass


class ChargeMismatch(DomainError):
    pass


class DegreeMismatch(DomainError):
    pass


class NotFiniteDimensional(DomainError):
    pass


class InvalidBasis(DomainError):
    """The standard-monomial basis lacks a unique bottom or top element."""


class OrderExceeded(DomainError):
    pass


class WindowUnderflow(DomainError):
    pass


class NormalizationError(DomainError):
    pass


class IndexRange(DomainError):
    pass


class SeedWeightError(DomainError):
    pass


class WeightConditionError(DomainError):
    pass
