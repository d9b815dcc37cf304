"""Exception types shared across the package."""


class FinRelError(Exception):
    """Base class for all errors raised by finrel."""


class AxiomViolation(FinRelError):
    """A table fails one of the axioms of its category."""

    def __init__(self, axiom, witness=None):
        self.axiom = axiom
        self.witness = witness
        msg = axiom if witness is None else f"{axiom} fails at {witness!r}"
        super().__init__(msg)


class CategoryMismatch(FinRelError):
    pass


class DomainMismatch(FinRelError):
    pass


class NotExactInstance(FinRelError):
    pass


class NotEndorelation(FinRelError):
    pass


class NotEquivalence(FinRelError):
    pass


class NotMono(FinRelError):
    pass


class NotBournNormal(FinRelError):
    pass


class LawViolation(FinRelError):
    pass


class PreconditionFailed(FinRelError):
    pass


class CapExceeded(FinRelError):
    """Enumeration stopped at its cap; ``partial`` holds what was found."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class UnknownName(FinRelError, KeyError):
    pass


class ParseError(FinRelError):
    def __init__(self, message, location=None):
        self.location = location
        super().__init__(message if location is None else f"{location}: {message}")


class CacheCorruption(FinRelError):
    pass
