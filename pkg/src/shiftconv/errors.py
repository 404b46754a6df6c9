"""Exception types shared across the package."""


class PoleError(ValueError):
    """Raised when a function is evaluated at one of its poles."""


class NonConvergenceError(RuntimeError):
    """Raised when a truncated series or ladder fails to settle."""


class BranchNotCoveredError(ValueError):
    """Raised when parameters fall outside every branch of a piecewise closed form."""


class ConvergenceWarning(UserWarning):
    """Emitted when a sum is evaluated outside its region of absolute convergence."""


class DecayConstraintWarning(UserWarning):
    """Emitted when a weight does not decay fast enough for the informal prediction."""
