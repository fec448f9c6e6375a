"""
Exception Hierarchy for pshlab
Every module raises a subclass of PshlabError so the CLI can map failures to exit codes.
"""


class PshlabError(Exception):
    """Base class of all pshlab errors."""


class ZeroPointError(PshlabError):
    """A Hopf conversion was asked for the origin."""


class DomainError(PshlabError):
    """Evaluation outside the punctured unit ball."""


class SmoothnessError(PshlabError):
    """An operation needs derivatives the function kind cannot provide."""


class UnboundedAboveError(PshlabError):
    """The sampled supremum over B1 diverges."""


class CommonZeroError(PshlabError):
    """The holomorphic pair has a common zero in B1 away from the origin."""


class GridSizeError(PshlabError):
    """Quadrature grid below the admissible size."""


class SpacingError(PshlabError):
    """A t-grid is too short or not strictly increasing."""


class SupportError(PshlabError):
    """The mollifier support leaves the punctured ball."""


class InvarianceError(PshlabError):
    """An S1-invariant method was requested for a function without the symmetry."""


class ToricFlagError(PshlabError):
    """The toric oracle was requested for a function not flagged toric."""


class ConvergenceError(PshlabError):
    """A shell integral keeps growing as the inner radius shrinks."""


class UnknownFunctionError(PshlabError):
    """No catalog entry under the requested name."""


class CatalogParseError(PshlabError):
    """A catalog spec file line could not be parsed."""

    def __init__(self, message: str, line_number: int = 0):
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number else ""
        super().__init__(f"{prefix}{message}")


class ConfigError(PshlabError):
    """Invalid command-line arguments or run configuration."""
