"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations

from typing import Any


class ABForceError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ABForceError, ValueError):
    """An input lies outside the domain of a formula (nonpositive energy, ...)."""


class SingularityError(DomainError):
    """The electron sits on the flux line, where the force law diverges."""


class ConvergenceError(ABForceError, RuntimeError):
    """The trajectory integrator could not finish.

    ``partial`` holds whatever had been integrated when the run stopped
    (a :class:`~abforce.trajectory.TrajectoryResult` or ``None``).
    """

    def __init__(self, message: str, partial: Any = None):
        super().__init__(message)
        self.partial = partial
