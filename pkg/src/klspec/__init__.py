"""Spectral toolkit for the perturbed Wiener process Y_t = B_t - g(t) I_g.

Y is the Gauss process B_t - g(t) * int_0^1 g'(u) dB_u on [0,1], with g
twice continuously differentiable, g(0) = 0 and unit energy
int (g')^2 = 1.  The package computes its covariance eigenstructure and
everything downstream of it:

generator   the admissible g (presets, custom term sums, perturbations)
charconst   quadrature rules and the oscillatory constants a_g, b_g, c_g
spectrum    characteristic function, eigenvalues, eigenfunctions, residuals
oracle      matrix-free cross-check: Nystrom discretization + Jacobi eigs
expansion   path sampling, empirical covariance, Laplace transform, traces
cli         deterministic batch front end over all of the above
"""

from .charconst import (
    CharacteristicConstants,
    QuadratureRule,
    RunningIntegrals,
    build_rule,
    compute_constants,
    integrate,
    iterated_sin_cos,
    rule_for_lambda,
    running_integrals,
)
from .errors import (
    BracketingFailure,
    ConvergenceFailure,
    DegenerateGenerator,
    DegeneratePerturbation,
    DomainError,
    EmptySpectrum,
    InsufficientPaths,
    InvalidOrder,
    KLSpecError,
    NegativeC,
    NonEvaluable,
    NonPositiveLambda,
    NormalizationFailure,
    NumericError,
    TrivialEigenfunction,
    ValidationError,
)
from .expansion import (
    CovarianceReport,
    LaplaceApprox,
    SamplePath,
    TraceCheck,
    empirical_covariance,
    laplace_approx,
    laplace_transform,
    product_polynomial,
    sample_direct,
    sample_kl,
    trace_check,
)
from .generator import (
    BridgeCheck,
    GeneratorFunction,
    PerturbationSpec,
    PolyTerm,
    SineTerm,
    ValidationReport,
    covariance,
    from_descriptor,
    from_perturbation,
    make_custom,
    make_perturbation,
    make_preset,
    normalize,
    validate,
    variance_at_one,
)
from .oracle import (
    ComparisonReport,
    NullCheck,
    NystromDiscretization,
    OracleSpectrum,
    build,
    compare,
    eigs,
    null_check,
)
from .spectrum import (
    CharacteristicFunction,
    Eigenpair,
    EigenfunctionCoefficients,
    OdeResiduals,
    Spectrum,
    char_fn,
    char_fn_sine,
    characteristic_function,
    closed_form_bridge,
    closed_form_sine,
    eigenfunction,
    find_eigenvalues,
    fredholm_residual,
    ode_residual,
    sine_normalization,
    system_rows,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
