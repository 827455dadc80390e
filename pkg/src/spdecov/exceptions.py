"""Exception hierarchy for spdecov.

Numerical failures (singular factorizations, indefinite matrices that were
required to be PSD, Cholesky breakdown) all derive from NumericalError so
callers can distinguish them from configuration mistakes.
"""


class SpdeCovError(Exception):
    """Base class for all package errors."""


class ConfigError(SpdeCovError):
    """Invalid or inconsistent configuration input."""


class NumericalError(SpdeCovError):
    """Base class for failures of the numerical core."""


class NonSymmetricError(NumericalError):
    """A matrix required to be symmetric is not, beyond tolerance."""


class NoConvergenceError(NumericalError):
    """An iterative eigenvalue or factorization routine failed."""


class NotPSDError(NumericalError):
    """A matrix required to be positive semidefinite has a negative
    eigenvalue beyond the clamp tolerance."""


class SingularError(NumericalError):
    """A pivot collapsed during LU elimination."""


class ShapeMismatchError(NumericalError):
    """Operands have inconsistent dimensions."""


class EllipticityError(ConfigError):
    """The diffusion coefficient dips below the declared lower bound."""


class MismatchedBCError(ConfigError):
    """Two meshes that must share a boundary condition flavor do not."""


class NoPointwiseKernelError(ConfigError):
    """The kernel has no pointwise evaluation (white noise)."""


class NegativeSquareError(NumericalError):
    """A squared-norm expression came out negative beyond roundoff."""


class CholeskyError(NumericalError):
    """Cholesky factorization failed even after the jitter ladder."""


class TooFewSamplesError(ConfigError):
    """Fewer samples than the estimator needs."""


class DegenerateFitError(ConfigError):
    """Not enough usable (h, err) pairs to fit a convergence rate."""
