"""Exception hierarchy shared by all tailsurv modules.

Each error class carries a process exit code so the command line front end
can map failures to machine-readable statuses.
"""

from __future__ import annotations


class TailsurvError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(TailsurvError):
    """Invalid configuration: bad parameter values, malformed config files."""

    exit_code = 2


class ToleranceError(TailsurvError):
    """A requested accuracy target could not be met.

    The message reports the achieved error estimate.
    """

    exit_code = 3


class DomainError(TailsurvError):
    """Input outside the mathematical domain of an operation."""

    exit_code = 4


class ConvergenceError(TailsurvError):
    """An iterative scheme exhausted its iteration budget."""

    exit_code = 5


class ResourceLimitError(TailsurvError):
    """A computation would exceed a hard cost guard."""

    exit_code = 6
