"""Geonil exceptions."""


class GeonilException(Exception):
    """Base class for exceptions in this package."""


class FieldException(GeonilException):
    """Base class for finite field exceptions."""


class NotPrime(FieldException):
    """The characteristic of a field must be prime."""

    def __init__(self, value):
        super().__init__(f"{value} is not prime")
        self.value = value


class InvalidDegree(FieldException):
    """Extension degrees start at 1."""


class DivisionByZero(FieldException):
    """Zero has no multiplicative inverse."""


class ZeroElement(FieldException):
    """Zero has no multiplicative order."""


class SpecMismatch(FieldException):
    """The operands belong to different fields."""


class PolynomialException(GeonilException):
    """Base class for polynomial exceptions."""


class DomainMismatch(PolynomialException):
    """The operands have different coefficient domains or variable counts."""


class ArityMismatch(PolynomialException):
    """A point or substitution has the wrong number of coordinates."""


class PolySyntaxError(PolynomialException):
    """Polynomial text couldn't be parsed."""

    def __init__(self, message, text, position):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


class BudgetExceeded(GeonilException):
    """A computation would grow past its configured size budget."""

    def __init__(self, what, limit, actual=None):
        detail = f"{what} exceeds the budget of {limit}"
        if actual is not None:
            detail = f"{detail} ({actual})"
        super().__init__(detail)
        self.what = what
        self.limit = limit
        self.actual = actual


class ScanCapExceeded(BudgetExceeded):
    """An exhaustive scan would visit more points than the scan cap allows."""


class BudgetExhaustedError(GeonilException):
    """An iteration that must terminate didn't within its step budget."""

    def __init__(self, steps):
        super().__init__(f"no result within {steps} steps")
        self.steps = steps


class PreconditionUnmet(GeonilException):
    """A check was requested outside the range where its claim applies."""


class UnknownName(GeonilException):
    """There's no example with that name."""

    def __init__(self, name):
        super().__init__(f"unknown example {name!r}")
        self.name = name


class ConfigException(GeonilException):
    """Base class for configuration exceptions."""


class InvalidSystemError(ConfigException):
    """A system definition file is malformed."""


class NotAFixedPoint(GeonilException):
    """The designated point of a system isn't fixed by its map."""
