"""Exception hierarchy shared across the library.

ValidationError marks malformed or inconsistent inputs (CLI exit code 2).
NumericalError marks a computation that failed on structurally valid
inputs, e.g. a Cholesky factorization hitting a singular block (exit 1).
"""


class SfgftError(Exception):
    """Base class for all library errors."""


class ValidationError(SfgftError):
    """Malformed, inconsistent, or out-of-contract inputs."""


class NumericalError(SfgftError):
    """A numerical routine failed on structurally valid inputs."""


class DimensionMismatch(ValidationError):
    """Vector/matrix sizes do not line up."""


class InfeasibleSize(ValidationError):
    """Requested sampling-set or partition size violates a precondition."""


class TooLarge(ValidationError):
    """Exhaustive enumeration would exceed the configured budget."""


class EmptyPartition(ValidationError):
    """A partition with no subsets was supplied where one is required."""


class ZeroSignal(ValidationError):
    """A test signal with zero norm cannot enter a relative error metric."""


class MatrixFormatError(ValidationError):
    """A CSV/JSON payload could not be parsed."""


class SingularBlock(NumericalError):
    """A diagonal block of the inner product failed Cholesky factorization."""


class EigFailure(NumericalError):
    """The symmetric eigensolver did not converge."""


class SingularNormalMatrix(NumericalError):
    """The bandlimited normal matrix is rank deficient for this sampling set."""


class SingularCovariance(NumericalError):
    """Sample covariance stayed singular after regularization retries."""


class CholeskyFailure(NumericalError):
    """Covariance factorization failed even at maximum jitter."""
