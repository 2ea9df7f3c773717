//! Orthonormal polynomial recurrences for a `MeasureSpec`.
//!
//! A `RecurrenceTable` holds the three-term coefficients
//! `x p_j = b_{j+1} p_{j+1} + a_j p_j + b_j p_{j-1}` together with the total
//! mass and the running log of the leading coefficients. Classical Jacobi
//! weights get closed-form coefficients; everything else goes through a
//! discretized Stieltjes procedure.

use crate::measure::MeasureSpec;
use crate::numeric::{ln_beta, KahanSum};
use crate::quadrule::{gauss_jacobi_panel, jacobi_recurrence};
use crate::{Error, Result};

/// Recurrence data for degrees `0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceTable {
    n_max: usize,
    /// `a_0..a_{n_max-1}`.
    a: Vec<f64>,
    /// `b_1..b_{n_max}` (index shifted by one).
    b: Vec<f64>,
    mu0: f64,
    /// `log gamma_n` for `n = 0..=n_max`.
    gamma_log: Vec<f64>,
}

/// Values and derivatives `p_0..p_n`, `p_0'..p_n'` at one point, carrying a
/// common log-scale factor: the true value is `values[j] * exp(log_scale)`.
/// On the support the scale stays 0; it only engages when forward recurrence
/// grows past 1e150 (far outside the support at high degree).
#[derive(Debug, Clone)]
pub struct PolyEval {
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
    pub log_scale: f64,
}

impl RecurrenceTable {
    /// Assemble a table from raw coefficients, rebuilding `gamma_log` from
    /// its defining recursion.
    pub fn from_coeffs(a: Vec<f64>, b: Vec<f64>, mu0: f64) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidArgument(format!(
                "coefficient arrays disagree: {} diagonal vs {} off-diagonal",
                a.len(),
                b.len()
            )));
        }
        if !(mu0.is_finite() && mu0 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "total mass must be positive, got {mu0}"
            )));
        }
        for &bj in &b {
            if !(bj.is_finite() && bj > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "off-diagonal coefficients must be positive, got {bj}"
                )));
            }
        }
        let n_max = a.len();
        let mut gamma_log = Vec::with_capacity(n_max + 1);
        gamma_log.push(-0.5 * mu0.ln());
        for (n, &bj) in b.iter().enumerate() {
            gamma_log.push(gamma_log[n] - bj.ln());
        }
        Ok(Self {
            n_max,
            a,
            b,
            mu0,
            gamma_log,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    /// Diagonal coefficient `a_j`, `j < n_max`.
    pub fn a(&self, j: usize) -> f64 {
        self.a[j]
    }

    /// Off-diagonal coefficient `b_j`, `1 <= j <= n_max`.
    pub fn b(&self, j: usize) -> f64 {
        self.b[j - 1]
    }

    /// `log gamma_n`, `n <= n_max`.
    pub fn gamma_log(&self, n: usize) -> f64 {
        self.gamma_log[n]
    }

    /// Forward recurrence for `p_0..p_n` and derivatives at `x`.
    pub fn eval_all(&self, x: f64, n: usize) -> PolyEval {
        assert!(n <= self.n_max, "degree {n} exceeds table n_max {}", self.n_max);
        let mut values = Vec::with_capacity(n + 1);
        let mut derivs = Vec::with_capacity(n + 1);
        let mut log_scale = 0.0f64;
        values.push(1.0 / self.mu0.sqrt());
        derivs.push(0.0);
        if n == 0 {
            return PolyEval {
                values,
                derivs,
                log_scale,
            };
        }
        // p_1 via the same recurrence with p_{-1} = 0
        let mut prev = 0.0f64;
        let mut prev_d = 0.0f64;
        let mut cur = values[0];
        let mut cur_d = 0.0f64;
        for j in 0..n {
            let bj = if j == 0 { 0.0 } else { self.b(j) };
            let bj1 = self.b(j + 1);
            let next = ((x - self.a(j)) * cur - bj * prev) / bj1;
            let next_d = (cur + (x - self.a(j)) * cur_d - bj * prev_d) / bj1;
            prev = cur;
            prev_d = cur_d;
            cur = next;
            cur_d = next_d;
            if cur.abs().max(cur_d.abs()) > RESCALE_THRESHOLD {
                let shift = RESCALE_THRESHOLD.ln();
                let factor = 1.0 / RESCALE_THRESHOLD;
                log_scale += shift;
                prev *= factor;
                prev_d *= factor;
                cur *= factor;
                cur_d *= factor;
                for v in values.iter_mut() {
                    *v *= factor;
                }
                for v in derivs.iter_mut() {
                    *v *= factor;
                }
            }
            values.push(cur);
            derivs.push(cur_d);
        }
        PolyEval {
            values,
            derivs,
            log_scale,
        }
    }

    /// Gauss nodes and weights of order `m` from the truncated Jacobi
    /// matrix. Weights sum to `mu0`.
    pub fn gauss_nodes(&self, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if m == 0 || m > self.n_max {
            return Err(Error::InvalidArgument(format!(
                "Gauss order {m} outside 1..={}",
                self.n_max
            )));
        }
        let rule = crate::quadrule::golub_welsch(
            self.a[..m].to_vec(),
            self.b[..m - 1].to_vec(),
            self.mu0,
        )?;
        Ok((rule.nodes, rule.weights))
    }

    /// `gamma_n^(1/n)`, the n-th root of the leading coefficient.
    pub fn leading_coeff_growth(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.n_max, "degree {n} outside 1..={}", self.n_max);
        (self.gamma_log[n] / n as f64).exp()
    }

    /// CSV dump with columns `j,a_j,b_j,gamma_log_j`; `a_{n_max}` and `b_0`
    /// do not exist and are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,a_j,b_j,gamma_log_j\r\n");
        for j in 0..=self.n_max {
            let a = if j < self.n_max {
                format!("{}", self.a[j])
            } else {
                String::new()
            };
            let b = if j >= 1 {
                format!("{}", self.b[j - 1])
            } else {
                String::new()
            };
            out.push_str(&format!("{j},{a},{b},{}\r\n", self.gamma_log[j]));
        }
        out
    }

    /// Parse the `to_csv` format back into a table.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut gamma0 = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if lineno == 0 || line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 {
                return Err(Error::InvalidArgument(format!(
                    "CSV line {lineno}: expected 4 columns, got {}",
                    cols.len()
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|_| {
                    Error::InvalidArgument(format!("CSV line {lineno}: bad number {s:?}"))
                })
            };
            if !cols[1].is_empty() {
                a.push(parse(cols[1])?);
            }
            if !cols[2].is_empty() {
                b.push(parse(cols[2])?);
            }
            if gamma0.is_none() {
                gamma0 = Some(parse(cols[3])?);
            }
        }
        let gamma0 = gamma0.ok_or_else(|| {
            Error::InvalidArgument("CSV has no data rows".to_string())
        })?;
        let mu0 = (-2.0 * gamma0).exp();
        Self::from_coeffs(a, b, mu0)
    }
}

const RESCALE_THRESHOLD: f64 = 1e150;

/// Closed-form coefficients for a classical Jacobi spec, mapped affinely to
/// its interval.
pub fn recurrence_analytic(spec: &MeasureSpec, n_max: usize) -> Result<RecurrenceTable> {
    let (iv, alpha, beta) = spec
        .as_classical_jacobi()
        .ok_or(Error::UnsupportedSpec(
            "closed-form recurrence needs a classical Jacobi weight".to_string(),
        ))?;
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".to_string()));
    }
    let (a_ref, b_ref, _) = jacobi_recurrence(n_max + 1, alpha, beta);
    let c = iv.midpoint();
    let s = 0.5 * iv.len();
    let a = a_ref[..n_max].iter().map(|&v| c + s * v).collect();
    let b = b_ref.iter().map(|&v| s * v).collect();
    // weight is (hi-x)^alpha (x-lo)^beta, so the mass picks up the full
    // interval-length power
    let mu0 = ((alpha + beta + 1.0) * iv.len().ln() + ln_beta(alpha + 1.0, beta + 1.0)).exp();
    RecurrenceTable::from_coeffs(a, b, mu0)
}

/// Discretized Stieltjes procedure: run the orthonormalization on a Gauss
/// discretization of the measure, doubling the per-panel node count until
/// every coefficient moves by less than 1e-10.
pub fn recurrence_stieltjes(spec: &MeasureSpec, n_max: usize) -> Result<RecurrenceTable> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".to_string()));
    }
    let mut m = 64.max(n_max + 2);
    let mut prev = stieltjes_at(spec, n_max, m)?;
    let mut last_delta = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        m *= 2;
        let cur = stieltjes_at(spec, n_max, m)?;
        let delta = table_delta(&prev, &cur);
        if delta <= STABILIZE_TOL {
            return Ok(cur);
        }
        if delta > GIVE_UP_TOL && last_delta > GIVE_UP_TOL && last_delta.is_finite() {
            return Err(Error::NonConvergence(format!(
                "Stieltjes coefficients still moving by {delta:.3e} after consecutive doublings"
            )));
        }
        last_delta = delta;
        prev = cur;
    }
    Err(Error::NonConvergence(format!(
        "Stieltjes discretization did not stabilize below {STABILIZE_TOL:.1e} at {m} nodes per panel"
    )))
}

/// Analytic coefficients when available, Stieltjes otherwise.
pub fn recurrence(spec: &MeasureSpec, n_max: usize) -> Result<RecurrenceTable> {
    if spec.as_classical_jacobi().is_some() {
        recurrence_analytic(spec, n_max)
    } else {
        recurrence_stieltjes(spec, n_max)
    }
}

const MAX_DOUBLINGS: usize = 8;
const STABILIZE_TOL: f64 = 1e-10;
const GIVE_UP_TOL: f64 = 1e-8;

fn table_delta(x: &RecurrenceTable, y: &RecurrenceTable) -> f64 {
    let mut d = 0.0f64;
    for j in 0..x.n_max {
        d = d.max((x.a[j] - y.a[j]).abs());
        d = d.max((x.b[j] - y.b[j]).abs());
    }
    d
}

/// One Stieltjes pass on a fixed discretization with `m` nodes per panel.
fn stieltjes_at(spec: &MeasureSpec, n_max: usize, m: usize) -> Result<RecurrenceTable> {
    let mut points = Vec::new();
    let mut masses = Vec::new();
    for panel in spec.panels() {
        let (nodes, weights) =
            gauss_jacobi_panel(m, panel.right_exp, panel.left_exp, panel.lo, panel.hi)?;
        for (x, w) in nodes.into_iter().zip(weights) {
            points.push(x);
            masses.push(w * spec.smooth_factor(panel, x));
        }
    }
    if points.len() < n_max + 1 {
        return Err(Error::NonConvergence(format!(
            "discretization has {} points for degree {n_max}",
            points.len()
        )));
    }

    let mut mu0_sum = KahanSum::new();
    for &w in &masses {
        mu0_sum.add(w);
    }
    let mu0 = mu0_sum.total();

    let npts = points.len();
    let mut p_prev = vec![0.0f64; npts];
    let mut p_cur = vec![1.0 / mu0.sqrt(); npts];
    let mut a = Vec::with_capacity(n_max);
    let mut b = Vec::with_capacity(n_max);
    let mut b_last = 0.0f64;
    for _ in 0..n_max {
        let mut aj = KahanSum::new();
        for i in 0..npts {
            aj.add(masses[i] * points[i] * p_cur[i] * p_cur[i]);
        }
        let aj = aj.total();
        let mut norm = KahanSum::new();
        let mut q = vec![0.0f64; npts];
        for i in 0..npts {
            q[i] = (points[i] - aj) * p_cur[i] - b_last * p_prev[i];
            norm.add(masses[i] * q[i] * q[i]);
        }
        let bj = norm.total().sqrt();
        if !(bj.is_finite() && bj > 0.0) {
            return Err(Error::NonConvergence(
                "discrete measure degenerated during orthonormalization".to_string(),
            ));
        }
        for i in 0..npts {
            let next = q[i] / bj;
            p_prev[i] = p_cur[i];
            p_cur[i] = next;
        }
        a.push(aj);
        b.push(bj);
        b_last = bj;
    }
    RecurrenceTable::from_coeffs(a, b, mu0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Interval, MeasureSpec, SingularFactor};

    #[test]
    fn legendre_low_order_coefficients() {
        let table = recurrence_analytic(&MeasureSpec::legendre(), 10).unwrap();
        assert_eq!(table.a(0), 0.0);
        assert!((table.b(1) - 1.0 / 3.0f64.sqrt()).abs() < 1e-15);
        for j in 2..=10 {
            let jf = j as f64;
            let expect = jf / (4.0 * jf * jf - 1.0).sqrt();
            assert!((table.b(j) - expect).abs() < 1e-14);
        }
        assert!((table.mu0() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn chebyshev_coefficients() {
        let table = recurrence_analytic(&MeasureSpec::chebyshev(), 6).unwrap();
        assert!((table.b(1) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        for j in 2..=6 {
            assert!((table.b(j) - 0.5).abs() < 1e-14);
        }
        assert!((table.mu0() - std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn analytic_rejects_generalized_specs() {
        let spec = MeasureSpec::uniform_on(vec![
            Interval::new(-1.0, -0.5).unwrap(),
            Interval::new(0.5, 1.0).unwrap(),
        ])
        .unwrap();
        assert!(matches!(
            recurrence_analytic(&spec, 5),
            Err(Error::UnsupportedSpec(_))
        ));
    }

    #[test]
    fn eval_low_degrees_on_legendre() {
        let table = recurrence_analytic(&MeasureSpec::legendre(), 5).unwrap();
        let eval = table.eval_all(1.0, 2);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((eval.values[0] - inv_sqrt2).abs() < 1e-15);
        assert_eq!(eval.derivs[0], 0.0);
        assert!((eval.values[1] - (1.5f64).sqrt()).abs() < 1e-14);
        assert!((eval.derivs[1] - (1.5f64).sqrt()).abs() < 1e-14);
        assert_eq!(eval.log_scale, 0.0);
        // p_2(x) = sqrt(5/8) (3x^2 - 1)
        let at = table.eval_all(0.4, 2);
        let p2 = (5.0f64 / 8.0).sqrt() * (3.0 * 0.4 * 0.4 - 1.0);
        assert!((at.values[2] - p2).abs() < 1e-14);
        let dp2 = (5.0f64 / 8.0).sqrt() * 6.0 * 0.4;
        assert!((at.derivs[2] - dp2).abs() < 1e-14);
    }

    #[test]
    fn discrete_orthonormality_via_gauss_nodes() {
        let table = recurrence_analytic(&MeasureSpec::jacobi(0.3, -0.4).unwrap(), 40).unwrap();
        let m = 25;
        let (nodes, weights) = table.gauss_nodes(m).unwrap();
        for j in [0usize, 3, 11] {
            for k in [0usize, 3, 12] {
                let mut acc = KahanSum::new();
                for (&x, &w) in nodes.iter().zip(&weights) {
                    let ev = table.eval_all(x, 12);
                    acc.add(w * ev.values[j] * ev.values[k]);
                }
                let want = if j == k { 1.0 } else { 0.0 };
                assert!(
                    (acc.total() - want).abs() < 1e-12,
                    "inner product ({j},{k}) = {}",
                    acc.total()
                );
            }
        }
    }

    #[test]
    fn gauss_node_edge_cases() {
        let spec = MeasureSpec::jacobi_on(Interval::new(1.0, 3.0).unwrap(), 0.0, 0.0).unwrap();
        let table = recurrence_analytic(&spec, 40).unwrap();
        let (nodes, weights) = table.gauss_nodes(1).unwrap();
        assert!((nodes[0] - 2.0).abs() < 1e-14);
        assert!((weights[0] - table.mu0()).abs() < 1e-14);
        let (nodes, weights) = table.gauss_nodes(2).unwrap();
        let off = 1.0 / 3.0f64.sqrt();
        assert!((nodes[0] - (2.0 - off)).abs() < 1e-14);
        assert!((nodes[1] - (2.0 + off)).abs() < 1e-14);
        assert!((weights[0] - 1.0).abs() < 1e-13 && (weights[1] - 1.0).abs() < 1e-13);
        let (_, weights) = table.gauss_nodes(40).unwrap();
        let total: f64 = weights.iter().sum();
        assert!((total - table.mu0()).abs() < 1e-12 * table.mu0());
    }

    #[test]
    fn stieltjes_matches_analytic_on_legendre() {
        let spec = MeasureSpec::legendre();
        let analytic = recurrence_analytic(&spec, 50).unwrap();
        let stieltjes = recurrence_stieltjes(&spec, 50).unwrap();
        assert!(table_delta(&analytic, &stieltjes) < 1e-10);
        assert!((analytic.mu0() - stieltjes.mu0()).abs() < 1e-12);
    }

    #[test]
    fn stieltjes_matches_analytic_on_singular_jacobi() {
        let spec = MeasureSpec::jacobi(-0.5, 0.75).unwrap();
        let analytic = recurrence_analytic(&spec, 30).unwrap();
        let stieltjes = recurrence_stieltjes(&spec, 30).unwrap();
        assert!(table_delta(&analytic, &stieltjes) < 1e-9);
    }

    #[test]
    fn even_weights_have_zero_diagonal() {
        let absx = MeasureSpec::generalized(
            vec![Interval::new(-1.0, 1.0).unwrap()],
            vec![1.0],
            vec![SingularFactor {
                point: 0.0,
                exponent: 1.0,
            }],
        )
        .unwrap();
        let table = recurrence_stieltjes(&absx, 30).unwrap();
        for j in 0..30 {
            assert!(table.a(j).abs() < 1e-12, "a_{j} = {}", table.a(j));
        }
        let pair = MeasureSpec::uniform_on(vec![
            Interval::new(-1.0, -0.5).unwrap(),
            Interval::new(0.5, 1.0).unwrap(),
        ])
        .unwrap();
        let table = recurrence_stieltjes(&pair, 30).unwrap();
        for j in 0..30 {
            assert!(table.a(j).abs() < 1e-12, "a_{j} = {}", table.a(j));
        }
    }

    #[test]
    fn affine_map_shifts_diagonal_and_scales_offdiagonal() {
        let base = recurrence_analytic(&MeasureSpec::legendre(), 20).unwrap();
        let spec = MeasureSpec::jacobi_on(Interval::new(0.0, 2.0).unwrap(), 0.0, 0.0).unwrap();
        let moved = recurrence_analytic(&spec, 20).unwrap();
        for j in 0..20 {
            assert!((moved.a(j) - 1.0).abs() < 1e-14);
            assert!((moved.b(j + 1) - base.b(j + 1)).abs() < 1e-14);
        }
        assert!((moved.mu0() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn leading_coeff_growth_chebyshev_closed_form() {
        let table = recurrence_analytic(&MeasureSpec::chebyshev(), 200).unwrap();
        // gamma_n = 2^n / sqrt(2 pi) for the orthonormal Chebyshev family
        let n = 150usize;
        let want = ((n as f64) * 2.0f64.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln())
            / n as f64;
        assert!((table.leading_coeff_growth(n) - want.exp()).abs() < 1e-12);
        // trend toward 2 = 1/cap([-1,1])
        assert!((table.leading_coeff_growth(200) - 2.0).abs() < 0.02);
    }

    #[test]
    fn rescale_guard_engages_far_outside_support() {
        let table = recurrence_analytic(&MeasureSpec::legendre(), 2000).unwrap();
        let eval = table.eval_all(3.0, 2000);
        assert!(eval.log_scale > 0.0);
        assert!(eval.values.iter().all(|v| v.is_finite()));
        let ln_p = eval.values[2000].abs().ln() + eval.log_scale;
        // growth rate of Legendre polynomials at x=3 is 3 + 2 sqrt(2)
        let rate = (3.0f64 + 2.0 * 2.0f64.sqrt()).ln();
        assert!((ln_p / 2000.0 - rate).abs() < 0.01, "ln p_n / n = {}", ln_p / 2000.0);
    }

    #[test]
    fn csv_round_trip() {
        let table = recurrence_analytic(&MeasureSpec::jacobi(0.25, -0.5).unwrap(), 8).unwrap();
        let text = table.to_csv();
        assert!(text.starts_with("j,a_j,b_j,gamma_log_j\r\n"));
        let back = RecurrenceTable::from_csv(&text).unwrap();
        assert_eq!(table, back);
    }

    #[test]
    fn gamma_log_recursion_holds() {
        let table = recurrence_analytic(&MeasureSpec::jacobi(1.5, 0.5).unwrap(), 30).unwrap();
        assert!((table.gamma_log(0) + 0.5 * table.mu0().ln()).abs() < 1e-15);
        for n in 1..=30 {
            let diff = table.gamma_log(n) - (table.gamma_log(n - 1) - table.b(n).ln());
            assert_eq!(diff, 0.0);
        }
    }
}
