//! Expected real-zero counts of random polynomials via the Kac-Rice
//! integral.
//!
//! For a Gaussian random combination `G = sum c_j g_j` with iid standard
//! normal coefficients, the expected number of real zeros on `[a, b]` is
//! `(1/pi) int_a^b sqrt(A C - B^2) / A dx` with `A = sum g_j^2`,
//! `B = sum g_j g_j'`, `C = sum (g_j')^2`. The coefficient variance drops
//! out of the ratio, so no sigma parameter appears anywhere here.
//!
//! Three basis flavors are provided: arbitrary C^1 bases through a callback,
//! orthonormal polynomial bases through their recurrence tables (where
//! `A, B, C` are the differentiated reproducing kernels on the diagonal),
//! and the monomial basis, whose full-line count reduces to four times an
//! integral over `[0, 1]`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::kernels::kernel_diagonal;
use crate::measure::MeasureSpec;
use crate::numeric::{pairwise_sum, KahanSum};
use crate::orthopoly::RecurrenceTable;
use crate::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// Expected-zero count over an interval, with quadrature bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KacRiceResult {
    /// Integration interval; infinite endpoints mark full-line results.
    pub interval: (f64, f64),
    /// Ensemble degree.
    pub n: usize,
    /// Expected number of real zeros; always within `[0, n]`.
    pub value: f64,
    pub est_error: f64,
    pub panels_used: usize,
}

/// Integration domain for the monomial ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KacDomain {
    FullLine,
    Interval(f64, f64),
}

/// Quadrature outcome of `adaptive_integrate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub est_error: f64,
    pub panels: usize,
}

// 15-point Kronrod nodes and weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One Kronrod panel: `(integral, error estimate)`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];
    for i in 0..7 {
        let dx = half * XGK[i];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[i] = f1;
        fv2[i] = f2;
        resk += WGK[i] * (f1 + f2);
        resabs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            resg += WG[i / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for i in 0..7 {
        resasc += WGK[i] * ((fv1[i] - reskh).abs() + (fv2[i] - reskh).abs());
    }
    let value = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if resabs > floor {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

#[derive(Debug)]
struct PanelEntry {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
}

impl PartialEq for PanelEntry {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for PanelEntry {}
impl PartialOrd for PanelEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PanelEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Kronrod quadrature: split the worst panel until the
/// summed error estimates drop below `rel_tol * max(1, |value|)`.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<Quadrature> {
    adaptive_integrate_seeded(&f, a, b, rel_tol, 16)
}

/// `adaptive_integrate` with an explicit initial uniform panel count.
pub fn adaptive_integrate_seeded<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    initial_panels: usize,
) -> Result<Quadrature> {
    if !(rel_tol > 0.0 && rel_tol.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "rel_tol must be positive, got {rel_tol}"
        )));
    }
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(Error::InvalidArgument(format!(
            "bad integration interval [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            est_error: 0.0,
            panels: 0,
        });
    }

    let seeds = initial_panels.max(1);
    let cap = (seeds * 256).max(65_536);
    let mut heap = BinaryHeap::with_capacity(seeds * 2);
    let mut value = 0.0f64;
    let mut err_sum = 0.0f64;
    let step = (b - a) / seeds as f64;
    for i in 0..seeds {
        let pa = a + i as f64 * step;
        let pb = if i + 1 == seeds { b } else { pa + step };
        let (v, e) = gk15(f, pa, pb);
        value += v;
        err_sum += e;
        heap.push(PanelEntry {
            err: e,
            a: pa,
            b: pb,
            value: v,
        });
    }

    let width_floor = (b - a) * f64::EPSILON;
    while err_sum > rel_tol * value.abs().max(1.0) {
        if heap.len() >= cap {
            return Err(Error::QuadratureNonConvergence {
                panels: heap.len(),
                est_error: err_sum,
            });
        }
        let worst = heap.pop().expect("heap cannot be empty here");
        if worst.b - worst.a <= width_floor {
            return Err(Error::QuadratureNonConvergence {
                panels: heap.len() + 1,
                est_error: err_sum,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        value += v1 + v2 - worst.value;
        err_sum += e1 + e2 - worst.err;
        heap.push(PanelEntry {
            err: e1,
            a: worst.a,
            b: mid,
            value: v1,
        });
        heap.push(PanelEntry {
            err: e2,
            a: mid,
            b: worst.b,
            value: v2,
        });
    }

    // deterministic final reduction: pairwise over position-sorted panels
    let mut panels: Vec<PanelEntry> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
    let mut err = KahanSum::new();
    for p in &panels {
        err.add(p.err);
    }
    Ok(Quadrature {
        value: pairwise_sum(&values),
        est_error: err.total(),
        panels: panels.len(),
    })
}

fn density_from_sums(a: f64, b: f64, c: f64) -> f64 {
    (a * c - b * b).max(0.0).sqrt() / (PI * a)
}

fn seed_count(n: usize) -> usize {
    (n / 2).max(16)
}

fn finish(interval: (f64, f64), n: usize, q: Quadrature) -> KacRiceResult {
    KacRiceResult {
        interval,
        n,
        value: q.value.clamp(0.0, n as f64),
        est_error: q.est_error,
        panels_used: q.panels,
    }
}

/// Kac-Rice count for an arbitrary C^1 basis supplied as a callback
/// returning `(g_0..g_n, g_0'..g_n')` at a point. `g_0` must be a nonzero
/// constant.
pub fn expected_zeros_general<F>(
    basis: &F,
    interval: (f64, f64),
    n: usize,
    rel_tol: f64,
) -> Result<KacRiceResult>
where
    F: Fn(f64) -> (Vec<f64>, Vec<f64>),
{
    let (a, b) = interval;
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(Error::InvalidArgument(format!(
            "bad interval [{a}, {b}]"
        )));
    }
    let mut g0_seen: Option<f64> = None;
    for t in [a, 0.5 * (a + b), b] {
        let (vals, ders) = basis(t);
        if vals.len() != n + 1 || ders.len() != n + 1 {
            return Err(Error::InvalidBasis(format!(
                "basis returned {} values and {} derivatives for degree {n}",
                vals.len(),
                ders.len()
            )));
        }
        let g0 = vals[0];
        if g0 == 0.0 || !g0.is_finite() {
            return Err(Error::InvalidBasis(format!("g_0 = {g0} at x = {t}")));
        }
        if ders[0].abs() > 1e-12 * g0.abs() {
            return Err(Error::InvalidBasis(format!(
                "g_0 is not constant: g_0'({t}) = {}",
                ders[0]
            )));
        }
        match g0_seen {
            None => g0_seen = Some(g0),
            Some(prev) => {
                if (g0 - prev).abs() > 1e-12 * prev.abs() {
                    return Err(Error::InvalidBasis(format!(
                        "g_0 is not constant: {prev} vs {g0}"
                    )));
                }
            }
        }
    }
    let density = |x: f64| {
        let (vals, ders) = basis(x);
        let mut sa = KahanSum::new();
        let mut sb = KahanSum::new();
        let mut sc = KahanSum::new();
        for (v, d) in vals.iter().zip(&ders) {
            sa.add(v * v);
            sb.add(v * d);
            sc.add(d * d);
        }
        density_from_sums(sa.total(), sb.total(), sc.total())
    };
    let q = adaptive_integrate_seeded(&density, a, b, rel_tol, seed_count(n))?;
    Ok(finish(interval, n, q))
}

/// Kac-Rice count for the orthonormal ensemble of a measure: `A, B, C` are
/// the differentiated reproducing kernels of order `n + 1` on the diagonal.
///
/// With `weighted` set, the integrand is assembled from the weighted
/// kernels instead; the weight factor cancels algebraically, so both forms
/// agree and the flag exists for diagnostics. At points where the weight
/// density is unavailable (singular points, gaps between support intervals)
/// the weighted form falls back to the unweighted one.
pub fn expected_zeros_orthopoly(
    table: &RecurrenceTable,
    spec: &MeasureSpec,
    interval: (f64, f64),
    n: usize,
    rel_tol: f64,
    weighted: bool,
) -> Result<KacRiceResult> {
    let (a, b) = interval;
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(Error::InvalidArgument(format!(
            "bad interval [{a}, {b}]"
        )));
    }
    if n == 0 || n > table.n_max() {
        return Err(Error::InvalidArgument(format!(
            "degree {n} outside 1..={}",
            table.n_max()
        )));
    }
    let (lo, hi) = spec.support_bounds();
    let slack = 1e-9 * (hi - lo);
    if a < lo - slack || b > hi + slack {
        return Err(Error::InvalidArgument(format!(
            "interval [{a}, {b}] leaves the support hull [{lo}, {hi}]"
        )));
    }
    let (a, b) = (a.max(lo), b.min(hi));
    let density = |x: f64| {
        let kd = kernel_diagonal(table, x, n + 1);
        if weighted {
            if let Ok(w) = spec.weight_density(x) {
                if w.is_finite() && w > 0.0 {
                    let (wa, wb, wc) = (w * kd.a, w * kd.b, w * kd.c);
                    return density_from_sums(wa, wb, wc);
                }
            }
        }
        kd.radicand().sqrt() / (PI * kd.a)
    };
    let q = adaptive_integrate_seeded(&density, a, b, rel_tol, seed_count(n))?;
    Ok(finish(interval, n, q))
}

/// Kac's monomial ensemble `sum c_j x^j`.
///
/// The full-line count uses the reduction to `(4/pi) int_0^1`, exploiting
/// that the zero density is even and invariant under `x -> 1/x` (up to the
/// Jacobian). Finite intervals reuse the same two symmetries to fold every
/// piece into `[0, 1]`, which also keeps the power sums overflow-free for
/// large `n`.
pub fn expected_zeros_kac_monomial(
    n: usize,
    domain: KacDomain,
    rel_tol: f64,
) -> Result<KacRiceResult> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "monomial ensemble needs degree at least 1".to_string(),
        ));
    }
    let density = |x: f64| {
        // A = sum_0^n x^(2j), B = sum_1^n j x^(2j-1), C = sum_1^n j^2 x^(2j-2)
        let s = x * x;
        let mut sa = KahanSum::new();
        let mut sb = KahanSum::new();
        let mut sc = KahanSum::new();
        sa.add(1.0);
        let mut q = 1.0f64; // s^(j-1)
        for j in 1..=n {
            let jf = j as f64;
            sc.add(jf * jf * q);
            sb.add(jf * q * x);
            sa.add(q * s);
            q *= s;
        }
        density_from_sums(sa.total(), sb.total(), sc.total())
    };

    match domain {
        KacDomain::FullLine => {
            let q = adaptive_integrate_seeded(&density, 0.0, 1.0, rel_tol, seed_count(n))?;
            let quad = Quadrature {
                value: 4.0 * q.value,
                est_error: 4.0 * q.est_error,
                panels: q.panels,
            };
            Ok(finish((f64::NEG_INFINITY, f64::INFINITY), n, quad))
        }
        KacDomain::Interval(a, b) => {
            if a.is_nan() || b.is_nan() || a > b {
                return Err(Error::InvalidArgument(format!(
                    "bad interval [{a}, {b}]"
                )));
            }
            // fold [a, b] into segments of [0, 1]: reflection x -> -x and
            // inversion x -> 1/x both preserve the density mass
            let mut segments: Vec<(f64, f64)> = Vec::new();
            let mut push_positive = |lo: f64, hi: f64| {
                // [lo, hi] subset of [0, +inf]
                let inner = (lo.min(1.0), hi.min(1.0));
                if inner.1 > inner.0 {
                    segments.push(inner);
                }
                if hi > 1.0 {
                    let p = lo.max(1.0);
                    let mapped = (if hi.is_infinite() { 0.0 } else { 1.0 / hi }, 1.0 / p);
                    if mapped.1 > mapped.0 {
                        segments.push(mapped);
                    }
                }
            };
            if b > 0.0 {
                push_positive(a.max(0.0), b);
            }
            if a < 0.0 {
                push_positive(-b.min(0.0), -a);
            }
            let m = segments.len().max(1);
            let mut value = KahanSum::new();
            let mut err = KahanSum::new();
            let mut panels = 0usize;
            for (lo, hi) in segments {
                let q = adaptive_integrate_seeded(&density, lo, hi, rel_tol / m as f64, seed_count(n))?;
                value.add(q.value);
                err.add(q.est_error);
                panels += q.panels;
            }
            let quad = Quadrature {
                value: value.total(),
                est_error: err.total(),
                panels,
            };
            Ok(finish((a, b), n, quad))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MeasureSpec;
    use crate::orthopoly::recurrence_analytic;

    fn monomial_basis(n: usize) -> impl Fn(f64) -> (Vec<f64>, Vec<f64>) {
        move |x: f64| {
            let mut vals = Vec::with_capacity(n + 1);
            let mut ders = Vec::with_capacity(n + 1);
            for j in 0..=n {
                vals.push(x.powi(j as i32));
                ders.push(if j == 0 {
                    0.0
                } else {
                    j as f64 * x.powi(j as i32 - 1)
                });
            }
            (vals, ders)
        }
    }

    #[test]
    fn constant_integrand_is_exact() {
        let q = adaptive_integrate(|_| 1.0, 0.0, 1.0, 1e-10).unwrap();
        assert_eq!(q.value, 1.0);
        assert_eq!(q.panels, 16);
    }

    #[test]
    fn lorentzian_integral() {
        let q = adaptive_integrate(|x: f64| 1.0 / (1.0 + x * x), -1.0, 1.0, 1e-12).unwrap();
        assert!((q.value - PI / 2.0).abs() < 1e-12);
        assert!(q.est_error <= 1e-12 * q.value.max(1.0));
    }

    #[test]
    fn degenerate_interval_is_zero() {
        let q = adaptive_integrate(|x: f64| x.exp(), 0.3, 0.3, 1e-8).unwrap();
        assert_eq!(q, Quadrature { value: 0.0, est_error: 0.0, panels: 0 });
        assert!(adaptive_integrate(|x: f64| x, 1.0, 0.0, 1e-8).is_err());
    }

    #[test]
    fn unattainable_tolerance_reports_nonconvergence() {
        // the per-panel roundoff floor makes 1e-15 relative unreachable
        let err = adaptive_integrate(|x: f64| x.exp(), 0.0, 1.0, 1e-15);
        assert!(matches!(
            err,
            Err(Error::QuadratureNonConvergence { .. })
        ));
    }

    #[test]
    fn degree_one_monomials_match_cauchy_oracle() {
        // the single zero -c_0/c_1 is standard Cauchy, so the expected count
        // on (-T, T) is (2/pi) arctan T
        let basis = monomial_basis(1);
        let r = expected_zeros_general(&basis, (-1.0, 1.0), 1, 1e-10).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9);
        let r = expected_zeros_general(&basis, (-1000.0, 1000.0), 1, 1e-10).unwrap();
        let want = 2.0 / PI * 1000.0f64.atan();
        assert!((r.value - want).abs() < 1e-8);
    }

    #[test]
    fn nonconstant_g0_is_rejected() {
        let basis = |x: f64| (vec![x, 1.0], vec![1.0, 0.0]);
        assert!(matches!(
            expected_zeros_general(&basis, (-1.0, 1.0), 1, 1e-8),
            Err(Error::InvalidBasis(_))
        ));
    }

    #[test]
    fn degenerate_interval_counts_no_zeros() {
        let basis = monomial_basis(3);
        let r = expected_zeros_general(&basis, (0.2, 0.2), 3, 1e-8).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.panels_used, 0);
    }

    #[test]
    fn legendre_degree_one_count() {
        // zero of c_0 p_0 + c_1 p_1 sits at -c_0/(sqrt(3) c_1); the Cauchy
        // oracle gives (2/pi) arctan(sqrt 3) = 2/3 on (-1, 1)
        let spec = MeasureSpec::legendre();
        let table = recurrence_analytic(&spec, 4).unwrap();
        let r = expected_zeros_orthopoly(&table, &spec, (-1.0, 1.0), 1, 1e-10, false).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-9, "value = {}", r.value);
    }

    #[test]
    fn weighted_and_unweighted_forms_agree() {
        let spec = MeasureSpec::legendre();
        let table = recurrence_analytic(&spec, 30).unwrap();
        let plain =
            expected_zeros_orthopoly(&table, &spec, (-0.5, 0.3), 20, 1e-10, false).unwrap();
        let tilde =
            expected_zeros_orthopoly(&table, &spec, (-0.5, 0.3), 20, 1e-10, true).unwrap();
        let rel = (plain.value - tilde.value).abs() / plain.value;
        assert!(rel < 1e-8, "relative gap {rel}");
    }

    #[test]
    fn interval_outside_hull_is_rejected() {
        let spec = MeasureSpec::legendre();
        let table = recurrence_analytic(&spec, 10).unwrap();
        assert!(
            expected_zeros_orthopoly(&table, &spec, (-1.5, 0.0), 5, 1e-8, false).is_err()
        );
    }

    #[test]
    fn kac_degree_one_full_line() {
        let r = expected_zeros_kac_monomial(1, KacDomain::FullLine, 1e-10).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
        assert!(r.value <= 1.0);
    }

    #[test]
    fn kac_interval_matches_general_basis() {
        let basis = monomial_basis(3);
        let via_general = expected_zeros_general(&basis, (-0.7, 0.4), 3, 1e-10).unwrap();
        let via_kac =
            expected_zeros_kac_monomial(3, KacDomain::Interval(-0.7, 0.4), 1e-10).unwrap();
        assert!((via_general.value - via_kac.value).abs() < 1e-9);
    }

    #[test]
    fn kac_inversion_fold_matches_direct_integration() {
        // (0.5, 2) straddles the fold point x = 1
        let basis = monomial_basis(6);
        let direct = expected_zeros_general(&basis, (0.5, 2.0), 6, 1e-10).unwrap();
        let folded =
            expected_zeros_kac_monomial(6, KacDomain::Interval(0.5, 2.0), 1e-10).unwrap();
        assert!(
            (direct.value - folded.value).abs() < 1e-9,
            "direct {} vs folded {}",
            direct.value,
            folded.value
        );
    }

    #[test]
    fn kac_half_lines_are_symmetric() {
        let pos =
            expected_zeros_kac_monomial(5, KacDomain::Interval(0.0, f64::INFINITY), 1e-10)
                .unwrap();
        let neg =
            expected_zeros_kac_monomial(5, KacDomain::Interval(f64::NEG_INFINITY, 0.0), 1e-10)
                .unwrap();
        assert_eq!(pos.value, neg.value);
        let full = expected_zeros_kac_monomial(5, KacDomain::FullLine, 1e-10).unwrap();
        assert!((pos.value + neg.value - full.value).abs() < 1e-8);
    }

    #[test]
    fn additivity_over_subintervals() {
        let spec = MeasureSpec::legendre();
        let table = recurrence_analytic(&spec, 30).unwrap();
        let whole =
            expected_zeros_orthopoly(&table, &spec, (-0.9, 0.8), 25, 1e-9, false).unwrap();
        let left =
            expected_zeros_orthopoly(&table, &spec, (-0.9, 0.13), 25, 1e-9, false).unwrap();
        let right =
            expected_zeros_orthopoly(&table, &spec, (0.13, 0.8), 25, 1e-9, false).unwrap();
        assert!((left.value + right.value - whole.value).abs() < 3e-9 * whole.value.max(1.0));
    }
}
