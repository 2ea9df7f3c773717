//! Orthogonality measures: compactly supported weights of power type on a
//! finite union of closed intervals, with validated construction and
//! integration against the measure.
//!
//! The weight class is `v_i * prod_j |x - t_j|^{g_j}` on the i-th support
//! interval, with each exponent `g_j > -1` and each constant `v_i > 0`.
//! Classical Jacobi weights are the single-interval special case with the
//! two power factors sitting at the endpoints.

use crate::numeric::KahanSum;
use crate::quadrule::gauss_legendre_32;
use crate::{Error, Result};

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// One algebraic factor `|x - point|^exponent` of the weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularFactor {
    pub point: f64,
    pub exponent: f64,
}

/// Weight choices for a `MeasureSpec`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// `(hi - x)^alpha (x - lo)^beta` on a single interval.
    Jacobi { alpha: f64, beta: f64 },
    /// Piecewise-constant positive factor (one value per support interval)
    /// times the product of the singular factors.
    GeneralizedJacobi {
        factors: Vec<f64>,
        singular: Vec<SingularFactor>,
    },
}

/// Maximal subinterval of the support on which the weight is smooth except
/// for power factors at the two ends.
#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub lo: f64,
    pub hi: f64,
    /// Exponent of `(x - lo)` at the left end (0 when smooth there).
    pub left_exp: f64,
    /// Exponent of `(hi - x)` at the right end.
    pub right_exp: f64,
    /// Index of the support interval this panel belongs to.
    pub interval_idx: usize,
}

/// Validated orthogonality measure.
#[derive(Debug, Clone)]
pub struct MeasureSpec {
    support: Vec<Interval>,
    weight: WeightSpec,
    /// Constant factor per support interval (canonical form).
    consts: Vec<f64>,
    /// Deduplicated singular factors, sorted by location (canonical form;
    /// for classical Jacobi these are the endpoint factors).
    canon: Vec<SingularFactor>,
    panels: Vec<Panel>,
}

impl MeasureSpec {
    /// Build and validate a spec from raw parts.
    pub fn new(support: Vec<Interval>, weight: WeightSpec) -> Result<Self> {
        let spec = MeasureSpec {
            support,
            weight,
            consts: Vec::new(),
            canon: Vec::new(),
            panels: Vec::new(),
        };
        spec.validate()
    }

    /// Classical Jacobi weight on one interval.
    pub fn jacobi_on(interval: Interval, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(vec![interval], WeightSpec::Jacobi { alpha, beta })
    }

    /// Jacobi weight on `[-1, 1]`.
    pub fn jacobi(alpha: f64, beta: f64) -> Result<Self> {
        Self::jacobi_on(Interval { lo: -1.0, hi: 1.0 }, alpha, beta)
    }

    /// Lebesgue measure on `[-1, 1]`.
    pub fn legendre() -> Self {
        Self::jacobi(0.0, 0.0).expect("Legendre spec is valid")
    }

    /// Chebyshev weight of the first kind on `[-1, 1]`.
    pub fn chebyshev() -> Self {
        Self::jacobi(-0.5, -0.5).expect("Chebyshev spec is valid")
    }

    /// General power-type weight on a union of intervals.
    pub fn generalized(
        support: Vec<Interval>,
        factors: Vec<f64>,
        singular: Vec<SingularFactor>,
    ) -> Result<Self> {
        Self::new(support, WeightSpec::GeneralizedJacobi { factors, singular })
    }

    /// Unit weight on a union of intervals.
    pub fn uniform_on(support: Vec<Interval>) -> Result<Self> {
        let factors = vec![1.0; support.len()];
        Self::generalized(support, factors, Vec::new())
    }

    /// Re-check all invariants and return the normalized spec: intervals
    /// sorted, singular factors deduplicated (exponents at a repeated point
    /// summed), panels rebuilt.
    pub fn validate(self) -> Result<Self> {
        let MeasureSpec {
            mut support, weight, ..
        } = self;
        for iv in &support {
            if !iv.lo.is_finite() || !iv.hi.is_finite() || iv.lo >= iv.hi {
                return Err(Error::InvalidInterval {
                    lo: iv.lo,
                    hi: iv.hi,
                });
            }
        }
        if support.is_empty() {
            return Err(Error::InvalidArgument("support is empty".to_string()));
        }
        support.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for pair in support.windows(2) {
            if pair[0].hi >= pair[1].lo {
                return Err(Error::OverlappingIntervals {
                    first: (pair[0].lo, pair[0].hi),
                    second: (pair[1].lo, pair[1].hi),
                });
            }
        }

        let (consts, canon) = match &weight {
            WeightSpec::Jacobi { alpha, beta } => {
                if support.len() != 1 {
                    return Err(Error::JacobiNeedsSingleInterval);
                }
                for &e in [alpha, beta].iter() {
                    if !(e.is_finite() && *e > -1.0) {
                        return Err(Error::ExponentOutOfRange { exponent: *e });
                    }
                }
                let iv = support[0];
                let mut canon = Vec::new();
                if *beta != 0.0 {
                    canon.push(SingularFactor {
                        point: iv.lo,
                        exponent: *beta,
                    });
                }
                if *alpha != 0.0 {
                    canon.push(SingularFactor {
                        point: iv.hi,
                        exponent: *alpha,
                    });
                }
                (vec![1.0], canon)
            }
            WeightSpec::GeneralizedJacobi { factors, singular } => {
                if factors.len() != support.len() {
                    return Err(Error::FactorCountMismatch {
                        expected: support.len(),
                        got: factors.len(),
                    });
                }
                for &v in factors {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(Error::NonPositiveFactor { value: v });
                    }
                }
                for f in singular {
                    if !(f.exponent.is_finite() && f.exponent > -1.0) {
                        return Err(Error::ExponentOutOfRange {
                            exponent: f.exponent,
                        });
                    }
                    if !support.iter().any(|iv| iv.contains(f.point)) {
                        return Err(Error::SingularPointOutsideSupport { point: f.point });
                    }
                }
                let mut merged: Vec<SingularFactor> = Vec::new();
                let mut sorted = singular.clone();
                sorted.sort_by(|a, b| a.point.total_cmp(&b.point));
                for f in sorted {
                    match merged.last_mut() {
                        Some(last) if last.point == f.point => last.exponent += f.exponent,
                        _ => merged.push(f),
                    }
                }
                merged.retain(|f| f.exponent != 0.0);
                for f in &merged {
                    if f.exponent <= -1.0 {
                        return Err(Error::ExponentOutOfRange {
                            exponent: f.exponent,
                        });
                    }
                }
                (factors.clone(), merged)
            }
        };

        let panels = build_panels(&support, &canon);
        Ok(MeasureSpec {
            support,
            weight,
            consts,
            canon,
            panels,
        })
    }

    pub fn support(&self) -> &[Interval] {
        &self.support
    }

    pub fn weight(&self) -> &WeightSpec {
        &self.weight
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    /// Leftmost and rightmost points of the support.
    pub fn support_bounds(&self) -> (f64, f64) {
        (
            self.support.first().unwrap().lo,
            self.support.last().unwrap().hi,
        )
    }

    pub fn contains(&self, x: f64) -> bool {
        self.support.iter().any(|iv| iv.contains(x))
    }

    /// Classical Jacobi parameters if this spec is one.
    pub fn as_classical_jacobi(&self) -> Option<(Interval, f64, f64)> {
        match &self.weight {
            WeightSpec::Jacobi { alpha, beta } => Some((self.support[0], *alpha, *beta)),
            WeightSpec::GeneralizedJacobi { .. } => None,
        }
    }

    /// Weight density `w(x)` at a point of the support. Values at singular
    /// points follow the power law (0 or +inf).
    pub fn weight_density(&self, x: f64) -> Result<f64> {
        let idx = self
            .support
            .iter()
            .position(|iv| iv.contains(x))
            .ok_or(Error::WeightUnavailable { point: x })?;
        let mut w = self.consts[idx];
        for f in &self.canon {
            w *= (x - f.point).abs().powf(f.exponent);
        }
        Ok(w)
    }

    /// Weight with the panel's own endpoint power factors removed; smooth on
    /// a neighborhood of the closed panel.
    pub fn smooth_factor(&self, panel: &Panel, x: f64) -> f64 {
        let mut w = self.consts[panel.interval_idx];
        for f in &self.canon {
            if f.point == panel.lo || f.point == panel.hi {
                continue;
            }
            w *= (x - f.point).abs().powf(f.exponent);
        }
        w
    }

    /// `int f dmu` over the whole support, to an estimated relative error
    /// of `rel_tol`.
    ///
    /// Composite 32-point Gauss panels, refined dyadically toward each
    /// singular endpoint; the innermost sliver at a power singularity is
    /// closed with the exact local power-law integral. Refinement stops when
    /// two successive stages agree.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, rel_tol: f64) -> Result<f64> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "rel_tol must be positive, got {rel_tol}"
            )));
        }
        let mut prev: Option<(f64, f64)> = None;
        for stage in 0..MAX_STAGES {
            let depth = (MIN_DEPTH + 6 * stage).min(MAX_DEPTH);
            let chunks = 1usize << stage.min(5);
            let mut total = KahanSum::new();
            let mut gross = KahanSum::new();
            for panel in &self.panels {
                let part = self.panel_integral(panel, &f, depth, chunks);
                total.add(part.0);
                gross.add(part.1);
            }
            let cur = total.total();
            let cur_gross = gross.total();
            if let Some((p, _)) = prev {
                let scale = cur.abs().max(p.abs()).max(1e-6 * cur_gross.abs());
                if (cur - p).abs() <= rel_tol * scale {
                    return Ok(cur);
                }
            }
            prev = Some((cur, cur_gross));
        }
        Err(Error::NonConvergence(format!(
            "integral did not stabilize to {rel_tol} within {MAX_STAGES} refinement stages"
        )))
    }

    /// `(integral, gross)` over one panel, where `gross` accumulates
    /// absolute values of the pieces (a magnitude scale for the stopping
    /// test). `depth` dyadic levels toward each singular end, `chunks`
    /// uniform 32-point sub-panels per piece.
    fn panel_integral<F: Fn(f64) -> f64>(
        &self,
        panel: &Panel,
        f: &F,
        depth: usize,
        chunks: usize,
    ) -> (f64, f64) {
        let g = |x: f64| {
            f(x) * self.smooth_factor(panel, x)
                * pow_or_one(x - panel.lo, panel.left_exp)
                * pow_or_one(panel.hi - x, panel.right_exp)
        };
        let mid = panel.lo + 0.5 * (panel.hi - panel.lo);
        let mut segments: Vec<(f64, f64)> = Vec::new();
        let mut tails: Vec<f64> = Vec::new();

        if panel.left_exp == 0.0 {
            segments.push((panel.lo, mid));
        } else {
            let mut h = mid - panel.lo;
            for _ in 0..depth {
                let inner = 0.5 * h;
                segments.push((panel.lo + inner, panel.lo + h));
                h = inner;
            }
            // exact integral of the local power law over the last sliver,
            // with the smooth part frozen at the sliver edge
            let x_edge = panel.lo + h;
            let phi = f(x_edge)
                * self.smooth_factor(panel, x_edge)
                * pow_or_one(panel.hi - x_edge, panel.right_exp);
            tails.push(phi * h.powf(panel.left_exp + 1.0) / (panel.left_exp + 1.0));
        }

        if panel.right_exp == 0.0 {
            segments.push((mid, panel.hi));
        } else {
            let mut h = panel.hi - mid;
            for _ in 0..depth {
                let inner = 0.5 * h;
                segments.push((panel.hi - h, panel.hi - inner));
                h = inner;
            }
            let x_edge = panel.hi - h;
            let phi = f(x_edge)
                * self.smooth_factor(panel, x_edge)
                * pow_or_one(x_edge - panel.lo, panel.left_exp);
            tails.push(phi * h.powf(panel.right_exp + 1.0) / (panel.right_exp + 1.0));
        }

        let mut total = KahanSum::new();
        let mut gross = KahanSum::new();
        for (lo, hi) in segments {
            let v = composite_gauss(&g, lo, hi, chunks);
            total.add(v);
            gross.add(v.abs());
        }
        for t in tails {
            total.add(t);
            gross.add(t.abs());
        }
        (total.total(), gross.total())
    }
}

const MIN_DEPTH: usize = 12;
const MAX_DEPTH: usize = 60;
const MAX_STAGES: usize = 10;

fn pow_or_one(base: f64, exp: f64) -> f64 {
    if exp == 0.0 {
        1.0
    } else {
        base.abs().powf(exp)
    }
}

fn composite_gauss<F: Fn(f64) -> f64>(g: &F, lo: f64, hi: f64, chunks: usize) -> f64 {
    let rule = gauss_legendre_32();
    let step = (hi - lo) / chunks as f64;
    let mut acc = KahanSum::new();
    for c in 0..chunks {
        let a = lo + c as f64 * step;
        acc.add(rule.integrate(a, a + step, g));
    }
    acc.total()
}

/// Split each support interval at its interior singular points and attach
/// endpoint exponents.
fn build_panels(support: &[Interval], canon: &[SingularFactor]) -> Vec<Panel> {
    let mut panels = Vec::new();
    for (idx, iv) in support.iter().enumerate() {
        let mut cuts = vec![iv.lo];
        for f in canon {
            if f.point > iv.lo && f.point < iv.hi {
                cuts.push(f.point);
            }
        }
        cuts.push(iv.hi);
        cuts.sort_by(f64::total_cmp);
        let exp_at = |x: f64| {
            canon
                .iter()
                .find(|f| f.point == x)
                .map_or(0.0, |f| f.exponent)
        };
        for pair in cuts.windows(2) {
            panels.push(Panel {
                lo: pair[0],
                hi: pair[1],
                left_exp: exp_at(pair[0]),
                right_exp: exp_at(pair[1]),
                interval_idx: idx,
            });
        }
    }
    panels
}
