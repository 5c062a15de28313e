"""
Exception hierarchy for fracplap.

Every failure a solver can report maps to one family, and each family maps
to one CLI exit code.
"""


class FracPlapError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ValidationError(FracPlapError, ValueError):
    """Input violates a parameter constraint; the message names the inequality."""

    exit_code = 2


class ConvergenceError(FracPlapError):
    """A numerical method did not reach its tolerance."""

    exit_code = 3


class ConstraintProjectionError(ConvergenceError):
    """∫h|u|^p ≤ 0 at an iterate, so the p-th-root rescaling is undefined."""


class NotFoundError(ConvergenceError):
    """Every start of a multi-start search failed."""


class CorrectorError(ConvergenceError):
    """The continuation corrector failed at the current step."""


class ResonanceError(ConvergenceError):
    """The Fredholm problem is at or near the first eigenvalue."""


class NearResonanceError(ResonanceError):
    """λ lies inside the guard neighborhood of λ₁."""


class SingularSystemError(ResonanceError):
    """The linear Fredholm system is numerically singular."""


class InconclusiveError(FracPlapError):
    """A verdict could not be reached with the configured budgets."""

    exit_code = 4
