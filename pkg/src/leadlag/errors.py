"""Exception types shared across the package.

The CLI maps InputError to exit code 1 and NumericalError to exit code 2.
"""


class LeadLagError(Exception):
    """Base class for errors raised by this package."""


class InputError(LeadLagError):
    """Malformed or inconsistent input data or configuration."""


class NumericalError(LeadLagError):
    """A numerical stage failed (degenerate series, non-convergence, ...)."""
