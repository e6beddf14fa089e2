"""Exception hierarchy shared by all fsinglab modules."""


class FsingError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class ParseError(FsingError, ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class RingMismatchError(FsingError, ValueError):
    pass


class CharacteristicError(FsingError, ValueError):
    """Operation needs positive (or zero) characteristic and got the other."""


class BadPrimeError(FsingError, ValueError):
    """The prime divides a denominator that must stay invertible."""


class DegenerateInputError(FsingError, ValueError):
    pass


class InvariantViolation(FsingError, AssertionError):
    """A mathematical invariant failed; signals an implementation bug (CLI exit code 3)."""
