"""Exception hierarchy.

Validation problems (bad shapes, bad parameters, malformed files) derive from
``ValueError``; numerical failures derive from ``ArithmeticError`` so callers
can tell the two apart. The CLI maps them to exit codes 2 and 3.
"""


class CgpError(Exception):
    """Base class for every error raised by cgpkit."""


class ValidationError(CgpError, ValueError):
    """Inputs violate a documented precondition."""


class NumericalError(CgpError, ArithmeticError):
    """A computation could not be carried out to the required accuracy."""


class PDRepairError(NumericalError):
    """Cholesky factorization still fails at the maximum jitter."""


class InfeasibleConstraintsError(NumericalError):
    """Normalizing constant is too small to represent the distribution."""


class SamplerBudgetError(NumericalError):
    """A sampler exhausted its attempt budget."""
