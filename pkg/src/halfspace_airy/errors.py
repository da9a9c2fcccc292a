"""Exception hierarchy shared across the package.

Errors are grouped so the CLI can map them to exit codes: usage-type errors
(bad arguments, bad configuration) exit 2, numerical errors exit 3, I/O
errors exit 4.
"""


class HalfspaceError(Exception):
    """Base class for all package errors."""


class UsageError(HalfspaceError):
    """Caller passed arguments that violate a precondition."""


class NumericalError(HalfspaceError):
    """A computation failed or produced untrustworthy output."""


class OutputError(HalfspaceError):
    """Reading or writing an artifact on disk failed."""


class InvalidInputError(UsageError):
    pass


class SizeLimitError(UsageError):
    pass


class ConfigurationError(UsageError):
    pass


class LatticeError(UsageError):
    """A coordinate is not on the lattice the kernel is defined over."""


class ConstructionError(UsageError):
    """Contour geometry is inconsistent (bad angle, nonpositive radius...)."""


class SingularityError(NumericalError):
    """Evaluation requested at a pole or on a branch cut."""


class EvaluationError(NumericalError):
    """An integrand returned a non-finite value at a quadrature node."""


class InconsistencyError(NumericalError):
    """Numerical output violates a structural identity beyond tolerance."""


class DiagonalAmbiguityError(NumericalError):
    """A kernel block with distinct one-sided forms was evaluated on the
    diagonal without the caller opting into a convention."""


class ConditioningError(NumericalError):
    """Series terms grow instead of decaying; result not trustworthy."""


class BudgetError(NumericalError):
    """A rejection sampler exhausted its attempt budget."""
