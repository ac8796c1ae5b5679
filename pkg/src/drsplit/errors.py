"""Exception types raised by the solver stack."""


class InvalidFilterError(ValueError):
    """Filter is empty or has no nonzero tap."""


class RankDeficiencyError(ValueError):
    """Gram matrix is numerically rank deficient; no strong convexity."""


class FactorizationError(ValueError):
    """Matrix is not symmetric positive definite."""


class StepSizeError(ValueError):
    """Step size violates the gate of the requested operation or variant."""


class NonConvexShiftError(ValueError):
    """Quadratic shift exceeds the strong convexity of the smooth term."""


class BoundInapplicableError(ValueError):
    """Rate formula evaluated outside its domain of validity."""


class FilterDesignError(RuntimeError):
    """Target condition ratio unreachable within the filter family."""


class DivergenceError(RuntimeError):
    """Iteration produced a non-finite value."""
