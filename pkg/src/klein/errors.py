"""Exception hierarchy shared by every module.

``DomainError`` covers bad input (the CLI maps it to exit code 2);
``NumericalFailure`` covers results that cannot be trusted (exit code 3).
"""

from __future__ import annotations


class KleinError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(KleinError, ValueError):
    """Arguments outside the domain where an operation is defined."""


class ThresholdError(DomainError):
    """Energy sits exactly on a continuum edge, |E - V| = m."""

    def __init__(self, message: str, energy: float | None = None, potential: float | None = None):
        super().__init__(message)
        self.energy = energy
        self.potential = potential


class NormalizationSingularError(ThresholdError):
    """Continuum or box normalization requested at zero group velocity."""


class NoChannelError(DomainError):
    """No propagating incident wave exists on the incident side."""


class ProfileError(DomainError):
    """Invalid potential profile; ``index`` is the offending segment (input order)."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class PotentialSyntaxError(DomainError):
    """Parse failure in a potential description, located by 1-based line/column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.column = column
        self.detail = message


class NumericalFailure(KleinError, ArithmeticError):
    """A computation lost too much precision to be reported."""

    def __init__(self, message: str, diagnostic: float | None = None):
        super().__init__(message)
        self.diagnostic = diagnostic


class SweepResolutionError(NumericalFailure):
    """Adiabatic sweep could not separate two events even after refinement."""
