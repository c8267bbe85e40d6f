"""Exception hierarchy shared by every module.

Each class maps to one CLI exit code so the runner can translate failures
without inspecting messages.
"""


class SkagraphError(Exception):
    exit_code = 1


class ConfigurationError(SkagraphError, ValueError):
    """Objects built over incompatible parameters (e.g. two different fields)."""

    exit_code = 1


class UsageError(SkagraphError, ValueError):
    """A caller violated an operation's precondition."""

    exit_code = 1


class InvariantViolation(SkagraphError, AssertionError):
    """A property guaranteed by construction or by proof failed to hold."""

    exit_code = 2


class ResourceBudgetError(SkagraphError, RuntimeError):
    """Exact enumeration would exceed the configured budget."""

    exit_code = 3


class ConvergenceError(SkagraphError, RuntimeError):
    """An iterative solver hit its iteration cap."""

    exit_code = 3

    def __init__(self, message, residual=None, estimate=None):
        super().__init__(message)
        self.residual = residual
        self.estimate = estimate
