"""Exception types shared across the package."""


class ContactGaborError(Exception):
    """Base class for all package errors."""


class MetricDegenerateError(ContactGaborError):
    """Metric matrix is not symmetric positive definite at a point."""

    def __init__(self, point, detail=""):
        self.point = point
        msg = f"metric is not SPD at chart point {point}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class ChartExitError(ContactGaborError):
    """A computation left the chart box on a non-periodic axis."""

    def __init__(self, point, axis=None):
        self.point = point
        self.axis = axis
        where = f" on axis {axis}" if axis is not None else ""
        super().__init__(f"left the chart box{where} at {point}")


class MissingParameterError(ContactGaborError):
    """A required chart parameter (e.g. injectivity radius) was not configured."""


class ReebDegenerateError(ContactGaborError):
    """The linear system defining a Reeb vector is singular."""

    def __init__(self, point, residual=None):
        self.point = point
        self.residual = residual
        super().__init__(f"Reeb system singular at {point} (residual={residual})")


class BudgetExceededError(ContactGaborError):
    """A node/atom count exceeds the configured evaluation budget."""

    def __init__(self, requested, budget):
        self.requested = requested
        self.budget = budget
        super().__init__(f"requested {requested} evaluations, budget is {budget}")


class IterationLimitError(ContactGaborError):
    """Power iteration failed to converge; carries the partial trace."""

    def __init__(self, trace):
        self.trace = list(trace)
        super().__init__(
            f"power iteration did not converge in {len(self.trace)} iterations"
        )


class WindowDegenerateError(ContactGaborError):
    """Window tensor violates the eigenvalue floor."""


class DegenerateConstraintError(ContactGaborError):
    """Constraint density has no mass and cannot be normalized."""


class GridMismatchError(ContactGaborError):
    """Two quadrature grids that must coincide do not."""


class ConfigError(ContactGaborError):
    """Run configuration is malformed (CLI exit code 2)."""
