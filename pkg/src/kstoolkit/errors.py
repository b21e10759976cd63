"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(ToolkitError):
    """Operands have incompatible or invalid dimensions."""


class AmbiguityError(ToolkitError):
    """A scalar fell into the ambiguity band of the tolerance policy.

    Discrete decisions (orthogonality, completeness, projector checks) must
    never be borderline: a value that is neither clearly zero nor clearly
    nonzero aborts the computation instead of silently picking a side.
    """


class BudgetError(ToolkitError):
    """An exact solver or enumeration refused to run above its size budget."""

    def __init__(self, message, budget=None):
        super().__init__(message)
        self.budget = budget


class PreconditionError(ToolkitError):
    """A documented precondition of an operation does not hold."""


class ClassificationError(ToolkitError):
    """Classification is undefined for the given set (e.g. no measurements)."""


class IntegrityError(ToolkitError):
    """A machine-checked identity that must hold was contradicted.

    Signals a toolkit bug or a tolerance ambiguity, never a property of the
    input alone.
    """


class ConvergenceError(ToolkitError):
    """The SDP solver stopped without a certified optimum.

    Carries the best certified bounds found so far.
    """

    def __init__(self, message, lower=None, upper=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
