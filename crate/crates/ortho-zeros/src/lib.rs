//! Expected real zeros of random linear combinations of orthonormal polynomials.
//!
//! The crate computes `E[N_n(a,b)]`, the expected number of real zeros of
//! `P_n = sum_j c_j p_j` with i.i.d. Gaussian coefficients, through the
//! Kac-Rice integral, and provides the surrounding machinery needed to
//! validate the asymptotic laws `E[N_n]/n -> 1/sqrt(3)` (globally) and
//! `(1/sqrt(3)) nu_K([a,b])` (locally):
//!
//! * [`measure`] - orthogonality measures with compact support (classical and
//!   generalized Jacobi weights) and integration against them,
//! * [`orthopoly`] - three-term recurrences, stable evaluation, Gauss rules,
//!   leading-coefficient diagnostics,
//! * [`kernels`] - Christoffel-Darboux kernels on the diagonal, weighted
//!   variants, and sine-kernel universality diagnostics,
//! * [`kacrice`] - the Kac-Rice integral for general C^1 bases, orthonormal
//!   bases, and Kac's monomial ensemble,
//! * [`equilibrium`] - equilibrium measures and logarithmic capacity for
//!   intervals and symmetric interval pairs,
//! * [`montecarlo`] - reproducible sampling of random polynomials, zero
//!   finding (comrade matrix plus a grid-scan oracle), and empirical zero
//!   statistics.

pub mod equilibrium;
mod error;
pub mod kacrice;
pub mod kernels;
pub mod linalg;
pub mod measure;
pub mod montecarlo;
pub mod numeric;
pub mod orthopoly;
pub mod quadrule;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// The global zero-density limit `1/sqrt(3)`.
pub const INV_SQRT_3: f64 = 0.577_350_269_189_625_8;

/// Library version, logged with every CLI run for reproducibility.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
