"""Exception types shared across the package."""


class CapacityError(Exception):
    """Raised when an operation would exceed a hard size/resolution guard.

    Used instead of silently extrapolating (quantiles without enough tail
    samples) or grinding through infeasible enumerations.
    """
