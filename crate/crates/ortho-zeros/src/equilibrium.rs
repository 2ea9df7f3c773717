//! Equilibrium measures and logarithmic capacity for the supported set
//! classes: a single interval and a symmetric pair of intervals.
//!
//! Both classes have classical closed forms. A single interval `[l, r]`
//! carries the arcsine distribution with capacity `(r - l) / 4`; the
//! symmetric pair `[-r, -l] u [l, r]` carries density
//! `|x| / (pi sqrt((x^2 - l^2)(r^2 - x^2)))` with capacity
//! `sqrt(r^2 - l^2) / 2`. Construction re-verifies the unit total mass
//! numerically before the measure is handed out as an oracle.

use crate::measure::{Interval, MeasureSpec, SingularFactor};
use crate::orthopoly::RecurrenceTable;
use crate::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// Geometries with closed-form equilibrium data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportClass {
    SingleInterval { lo: f64, hi: f64 },
    /// `[-outer, -inner] u [inner, outer]` with `0 < inner < outer`.
    SymmetricPair { inner: f64, outer: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct EquilibriumMeasure {
    class: SupportClass,
    capacity: f64,
}

/// Classify a support and build its equilibrium measure.
///
/// The total mass of the closed-form density is re-integrated numerically
/// and must come back as 1 to 1e-8 before the measure is returned.
pub fn build(support: &[Interval]) -> Result<EquilibriumMeasure> {
    let class = match support {
        [iv] => SupportClass::SingleInterval {
            lo: iv.lo,
            hi: iv.hi,
        },
        [left, right] => {
            let scale = right.hi.abs().max(1.0);
            let symmetric = (left.lo + right.hi).abs() <= 1e-12 * scale
                && (left.hi + right.lo).abs() <= 1e-12 * scale;
            if !symmetric || right.lo <= 0.0 {
                return Err(Error::UnsupportedSupportClass(
                    "two-interval supports must be symmetric about the origin".to_string(),
                ));
            }
            SupportClass::SymmetricPair {
                inner: right.lo,
                outer: right.hi,
            }
        }
        _ => {
            return Err(Error::UnsupportedSupportClass(format!(
                "no closed form for {} intervals",
                support.len()
            )))
        }
    };
    let capacity = match class {
        SupportClass::SingleInterval { lo, hi } => (hi - lo) / 4.0,
        SupportClass::SymmetricPair { inner, outer } => {
            (outer * outer - inner * inner).sqrt() / 2.0
        }
    };
    let em = EquilibriumMeasure { class, capacity };
    let total = em.total_mass_numeric()?;
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::NonConvergence(format!(
            "equilibrium density integrated to {total}, not 1"
        )));
    }
    Ok(em)
}

impl EquilibriumMeasure {
    pub fn class(&self) -> SupportClass {
        self.class
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// Density on the support interior; 0 outside, +inf at the endpoints.
    pub fn density(&self, x: f64) -> f64 {
        match self.class {
            SupportClass::SingleInterval { lo, hi } => {
                if x < lo || x > hi {
                    0.0
                } else {
                    1.0 / (PI * ((x - lo) * (hi - x)).sqrt())
                }
            }
            SupportClass::SymmetricPair { inner, outer } => {
                let ax = x.abs();
                if ax < inner || ax > outer {
                    0.0
                } else {
                    ax / (PI
                        * ((ax * ax - inner * inner) * (outer * outer - ax * ax)).sqrt())
                }
            }
        }
    }

    /// Distribution function `nu((-inf, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.class {
            SupportClass::SingleInterval { lo, hi } => {
                if x <= lo {
                    0.0
                } else if x >= hi {
                    1.0
                } else {
                    let t = (2.0 * x - lo - hi) / (hi - lo);
                    0.5 + t.asin() / PI
                }
            }
            SupportClass::SymmetricPair { inner, outer } => {
                // half-mass CDF on the positive component
                let phi = |ax: f64| -> f64 {
                    if ax <= inner {
                        0.0
                    } else if ax >= outer {
                        0.5
                    } else {
                        let num = ax * ax - inner * inner;
                        let den = outer * outer - inner * inner;
                        (num / den).sqrt().asin() / PI
                    }
                };
                if x >= 0.0 {
                    0.5 + phi(x)
                } else {
                    0.5 - phi(-x)
                }
            }
        }
    }

    /// `nu([a, b])`, clipping to the support.
    pub fn mass(&self, interval: (f64, f64)) -> f64 {
        let (a, b) = interval;
        if b <= a {
            return 0.0;
        }
        (self.cdf(b) - self.cdf(a)).max(0.0)
    }

    /// Unit-mass self-check: integrate the closed-form density with the
    /// measure-quadrature machinery (the density is itself a power-type
    /// weight, so the graded panels absorb its endpoint singularities).
    fn total_mass_numeric(&self) -> Result<f64> {
        match self.class {
            SupportClass::SingleInterval { lo, hi } => {
                let spec =
                    MeasureSpec::jacobi_on(Interval::new(lo, hi)?, -0.5, -0.5)?;
                spec.integrate(|_| 1.0 / PI, 1e-10)
            }
            SupportClass::SymmetricPair { inner, outer } => {
                let support = vec![
                    Interval::new(-outer, -inner)?,
                    Interval::new(inner, outer)?,
                ];
                let singular = [-outer, -inner, inner, outer]
                    .iter()
                    .map(|&point| SingularFactor {
                        point,
                        exponent: -0.5,
                    })
                    .collect();
                let spec = MeasureSpec::generalized(support, vec![1.0, 1.0], singular)?;
                spec.integrate(|x| x.abs() / PI, 1e-10)
            }
        }
    }
}

/// Totik-limit approximation to the equilibrium density at one point:
/// `(1/n) mu'(x) K_{n+1}(x, x)`.
///
/// This is a diagnostic route for supports without closed forms; it is
/// approximate at finite `n` and is never used as an oracle.
pub fn approximate_density(
    table: &RecurrenceTable,
    spec: &MeasureSpec,
    x: f64,
    n: usize,
) -> Result<f64> {
    let w = spec.weight_density(x)?;
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::WeightUnavailable { point: x });
    }
    let kd = crate::kernels::kernel_diagonal(table, x, n + 1);
    Ok(w * kd.a / n as f64)
}

/// Interval mass of the Totik-limit approximation, by adaptive quadrature.
pub fn approximate_mass(
    table: &RecurrenceTable,
    spec: &MeasureSpec,
    interval: (f64, f64),
    n: usize,
    rel_tol: f64,
) -> Result<f64> {
    let (a, b) = interval;
    let density = |x: f64| approximate_density(table, spec, x, n).unwrap_or(0.0);
    let q = crate::kacrice::adaptive_integrate_seeded(&density, a, b, rel_tol, (n / 2).max(16))?;
    Ok(q.value)
}
