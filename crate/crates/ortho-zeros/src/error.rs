use std::fmt;

/// Errors produced across the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An interval with `lo >= hi` (or a non-finite endpoint).
    InvalidInterval { lo: f64, hi: f64 },
    /// Two support intervals intersect.
    OverlappingIntervals { first: (f64, f64), second: (f64, f64) },
    /// A singular exponent (or Jacobi parameter) is `<= -1` or non-finite.
    ExponentOutOfRange { exponent: f64 },
    /// A singular point does not lie in the support.
    SingularPointOutsideSupport { point: f64 },
    /// A piecewise-constant weight factor is not strictly positive.
    NonPositiveFactor { value: f64 },
    /// The per-interval factor list does not match the support.
    FactorCountMismatch { expected: usize, got: usize },
    /// A classical Jacobi weight requires a single support interval.
    JacobiNeedsSingleInterval,
    /// The operation needs a different kind of measure spec.
    UnsupportedSpec(String),
    /// An iterative construction failed to stabilize.
    NonConvergence(String),
    /// The eigenvalue solver did not converge.
    EigenFailure(String),
    /// Adaptive quadrature hit its panel cap before reaching the tolerance.
    QuadratureNonConvergence { panels: usize, est_error: f64 },
    /// The basis handed to the general Kac-Rice form violates its contract
    /// (`g_0` must be a nonzero constant).
    InvalidBasis(String),
    /// Equilibrium measures are only available for the supported set classes.
    UnsupportedSupportClass(String),
    /// The leading coefficient of a sampled polynomial is zero.
    DegenerateLeadingCoefficient,
    /// The weight density has a singular factor at the requested point.
    WeightUnavailable { point: f64 },
    /// Any other precondition violation.
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInterval { lo, hi } => {
                write!(f, "invalid interval [{lo}, {hi}]")
            }
            Error::OverlappingIntervals { first, second } => write!(
                f,
                "support intervals [{}, {}] and [{}, {}] overlap",
                first.0, first.1, second.0, second.1
            ),
            Error::ExponentOutOfRange { exponent } => {
                write!(f, "exponent {exponent} out of range (must be > -1)")
            }
            Error::SingularPointOutsideSupport { point } => {
                write!(f, "singular point {point} lies outside the support")
            }
            Error::NonPositiveFactor { value } => {
                write!(f, "weight factor {value} is not strictly positive")
            }
            Error::FactorCountMismatch { expected, got } => write!(
                f,
                "expected {expected} per-interval weight factors, got {got}"
            ),
            Error::JacobiNeedsSingleInterval => {
                write!(f, "a classical Jacobi weight needs a single support interval")
            }
            Error::UnsupportedSpec(what) => write!(f, "unsupported measure spec: {what}"),
            Error::NonConvergence(what) => write!(f, "failed to stabilize: {what}"),
            Error::EigenFailure(what) => write!(f, "eigenvalue solver failed: {what}"),
            Error::QuadratureNonConvergence { panels, est_error } => write!(
                f,
                "adaptive quadrature hit the panel cap ({panels} panels, est. error {est_error:e})"
            ),
            Error::InvalidBasis(what) => write!(f, "invalid basis: {what}"),
            Error::UnsupportedSupportClass(what) => {
                write!(f, "unsupported support class: {what}")
            }
            Error::DegenerateLeadingCoefficient => {
                write!(f, "leading coefficient is zero")
            }
            Error::WeightUnavailable { point } => {
                write!(f, "weight density unavailable at {point} (singular factor)")
            }
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
        }
    }
}

impl std::error::Error for Error {}
