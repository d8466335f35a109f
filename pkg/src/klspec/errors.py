"""Exception hierarchy for the spectral engine.

Every failure mode that callers are expected to branch on gets its own
class.  ``KLSpecError`` is the common base; the CLI maps validation
errors to exit code 2 and numeric failures to exit code 3.
"""


class KLSpecError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(KLSpecError):
    """Bad user input: domains, ranges, malformed configuration."""


class NumericError(KLSpecError):
    """A numeric procedure failed to reach its contract."""


class DomainError(ValidationError):
    """Argument outside its documented domain (for example t not in [0,1])."""


class NonEvaluable(ValidationError):
    """A term evaluator failed (overflow or invalid basis parameters)."""


class InvalidOrder(ValidationError):
    """Quadrature rule parameters outside the supported range."""


class NonPositiveLambda(ValidationError):
    """A candidate eigenvalue must be strictly positive."""


class NegativeC(ValidationError):
    """Laplace transform argument c must be nonnegative."""


class InsufficientPaths(ValidationError):
    """Sample covariance needs at least two paths."""


class EmptySpectrum(ValidationError):
    """An operation needs at least one eigenpair."""


class DegenerateGenerator(NumericError):
    """Generator has zero energy and cannot be normalized."""


class DegeneratePerturbation(NumericError):
    """Perturbation produced psi identically zero."""


class NormalizationFailure(NumericError):
    """Energy could not be brought to 1 within tolerance."""


class BracketingFailure(NumericError):
    """Root scan found fewer genuine eigenvalues than requested."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class TrivialEigenfunction(NumericError):
    """The eigenfunction formula collapsed to the zero function."""


class ConvergenceFailure(NumericError):
    """An iterative solver exhausted its budget."""
