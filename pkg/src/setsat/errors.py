"""Exception hierarchy shared by all setsat modules."""


class SetSatError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SetSatError):
    """Malformed formula text.

    ``position`` is the 0-based character offset of the offending token;
    ``expected`` describes what the parser would have accepted there.
    """

    def __init__(self, message: str, position: int, expected: str | None = None):
        super().__init__(message)
        self.position = position
        self.expected = expected


class SizeLimit(SetSatError):
    """A configured size bound was exceeded (DNF blowup, power-set blowup,
    too many variables, element budget)."""


class BadRank(SetSatError):
    """Requested atom rank is too small for the requested index."""


class UnboundVariable(SetSatError):
    """Evaluation hit a variable that the assignment does not cover."""


class ContractViolation(SetSatError):
    """An internal runtime check failed.  This always indicates a bug in the
    solver, never a valid rejection of the input."""


class BudgetExhausted(SetSatError):
    """Saturation ran out of budget without emptying its work queue,
    which signals a cycle in the underlying graph."""
