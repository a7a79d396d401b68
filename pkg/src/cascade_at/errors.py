"""Exception types shared across the package."""


class CascadeError(Exception):
    """Base class for all package errors."""


class ConfigError(CascadeError):
    """Invalid parameters, scenario files or CLI flags."""


class NumericalError(CascadeError):
    """A computation failed or produced non-finite results."""


class SingularSystemError(NumericalError):
    """The steady-state problem has no unique solution (w_t = 0)."""


class SolverFailure(NumericalError):
    """The linear solver failed; carries a condition-number estimate."""

    def __init__(self, message, condition_number=None):
        super().__init__(message)
        self.condition_number = condition_number


class DegenerateRootError(NumericalError):
    """Denominator roots too close for a stable pole decomposition."""


class DomainError(CascadeError):
    """Argument outside a function's supported domain."""


class SelectionRuleError(CascadeError):
    """Angular-momentum selection rule violated."""
