//! Reproducing-kernel diagonals and universality diagnostics.
//!
//! `K_n(x, y) = sum_{j=0}^{n-1} p_j(x) p_j(y)`; differentiated versions
//! carry one derivative per argument. The weighted (tilde) variants multiply
//! by the weight density, which on the diagonal is a single scalar factor.
//! The universality ratios compare differentiated-kernel growth against the
//! sine-kernel predictions; in the bulk the scaled ratio
//! `K^(j,k) / K^(j+k+1)` approaches `pi^(j+k)` times the corresponding
//! moment of the sinc kernel.

use crate::measure::MeasureSpec;
use crate::numeric::{sinc, KahanSum};
use crate::orthopoly::RecurrenceTable;
use crate::{Error, Result};

/// Kernel diagonal data at one point: `a = K_n(x,x)`,
/// `b = K_n^(0,1)(x,x)`, `c = K_n^(1,1)(x,x)`.
#[derive(Debug, Clone, Copy)]
pub struct KernelDiagonal {
    pub x: f64,
    /// Number of terms in the kernel sum (degrees `0..n`).
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Weight density at `x` when the weighted variant is requested.
    pub weight_at_x: Option<f64>,
}

impl KernelDiagonal {
    /// `a c - b^2`, clamped to zero; Cauchy-Schwarz makes the exact value
    /// nonnegative, so any negative result is roundoff.
    pub fn radicand(&self) -> f64 {
        let d = self.a * self.c - self.b * self.b;
        debug_assert!(
            d >= -1e-12 * self.a * self.c,
            "kernel discriminant {d} below roundoff slack at x = {}",
            self.x
        );
        d.max(0.0)
    }

    /// Attach the weight density, enabling the weighted accessors.
    pub fn with_weight(mut self, spec: &MeasureSpec) -> Result<Self> {
        self.weight_at_x = Some(spec.weight_density(self.x)?);
        Ok(self)
    }

    /// Weighted diagonal values `mu'(x) * (a, b, c)`.
    pub fn weighted(&self) -> Option<(f64, f64, f64)> {
        self.weight_at_x
            .map(|w| (w * self.a, w * self.b, w * self.c))
    }
}

/// Kernel diagonal with `n` terms via the forward recurrence.
pub fn kernel_diagonal(table: &RecurrenceTable, x: f64, n: usize) -> KernelDiagonal {
    assert!(n >= 1, "kernel needs at least one term");
    assert!(
        n <= table.n_max() + 1,
        "kernel order {n} exceeds table capacity {}",
        table.n_max() + 1
    );
    let eval = table.eval_all(x, n - 1);
    let mut a = KahanSum::new();
    let mut b = KahanSum::new();
    let mut c = KahanSum::new();
    for j in 0..n {
        let p = eval.values[j];
        let d = eval.derivs[j];
        a.add(p * p);
        b.add(p * d);
        c.add(d * d);
    }
    KernelDiagonal {
        x,
        n,
        a: a.total(),
        b: b.total(),
        c: c.total(),
        weight_at_x: None,
    }
}

/// Off-diagonal kernel `K_n(x, y)` (plain, unweighted).
pub fn kernel_offdiag(table: &RecurrenceTable, x: f64, y: f64, n: usize) -> f64 {
    assert!(n >= 1 && n <= table.n_max() + 1);
    let ex = table.eval_all(x, n - 1);
    let ey = table.eval_all(y, n - 1);
    let mut acc = KahanSum::new();
    for j in 0..n {
        acc.add(ex.values[j] * ey.values[j]);
    }
    acc.total()
}

/// Scaled ratios of weighted differentiated kernels against their sine-kernel
/// targets, at ensemble degree `n` (kernel order `n + 1`).
///
/// For each requested `(j, k)` with `j, k <= 1`, returns
/// `(K~^(j,k) / K~^(j+k+1), pi^(j+k) * tau_jk)` where `tau_jk` vanishes for
/// odd `j + k` and equals `(-1)^((j-k)/2) / (j + k + 1)` for even.
pub fn universality_ratios(
    table: &RecurrenceTable,
    spec: &MeasureSpec,
    x: f64,
    n: usize,
    pairs: &[(usize, usize)],
) -> Result<Vec<(f64, f64)>> {
    let w = spec.weight_density(x)?;
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::WeightUnavailable { point: x });
    }
    let kd = kernel_diagonal(table, x, n + 1);
    let (wa, wb, wc) = (w * kd.a, w * kd.b, w * kd.c);
    let mut out = Vec::with_capacity(pairs.len());
    for &(j, k) in pairs {
        if j > 1 || k > 1 {
            return Err(Error::InvalidArgument(format!(
                "universality ratios are implemented for j, k <= 1, got ({j}, {k})"
            )));
        }
        let kernel_jk = match (j, k) {
            (0, 0) => wa,
            (1, 1) => wc,
            _ => wb,
        };
        let ratio = kernel_jk / wa.powi((j + k + 1) as i32);
        let target = tau_target(j, k);
        out.push((ratio, target));
    }
    Ok(out)
}

fn tau_target(j: usize, k: usize) -> f64 {
    let s = j + k;
    if s % 2 == 1 {
        return 0.0;
    }
    let sign = if (j as i64 - k as i64).rem_euclid(4) == 2 {
        -1.0
    } else {
        1.0
    };
    std::f64::consts::PI.powi(s as i32) * sign / (s + 1) as f64
}

/// Sup-norm deviation of the rescaled kernel from the sine kernel over a
/// `grid x grid` lattice of `(u, v)` in `[-r, r]^2`.
///
/// Points are spaced by the weighted diagonal `K~_{n+1}(x, x)`, the local
/// density scale, and compared as
/// `|K_{n+1}(x + u/K~, x + v/K~) / K_{n+1}(x, x) - sinc(pi (u - v))|`.
pub fn sinc_deviation(
    table: &RecurrenceTable,
    spec: &MeasureSpec,
    x: f64,
    n: usize,
    r: f64,
    grid: usize,
) -> Result<f64> {
    assert!(r > 0.0 && grid >= 2, "need r > 0 and at least a 2x2 grid");
    let w = spec.weight_density(x)?;
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::WeightUnavailable { point: x });
    }
    let kd = kernel_diagonal(table, x, n + 1);
    let scale = w * kd.a;
    let points: Vec<f64> = (0..grid)
        .map(|i| -r + 2.0 * r * i as f64 / (grid - 1) as f64)
        .collect();
    let evals: Vec<Vec<f64>> = points
        .iter()
        .map(|&u| table.eval_all(x + u / scale, n).values)
        .collect();
    let mut worst = 0.0f64;
    for (iu, pu) in evals.iter().enumerate() {
        for (iv, pv) in evals.iter().enumerate() {
            let mut acc = KahanSum::new();
            for j in 0..=n {
                acc.add(pu[j] * pv[j]);
            }
            let ratio = acc.total() / kd.a;
            let target = sinc(std::f64::consts::PI * (points[iu] - points[iv]));
            worst = worst.max((ratio - target).abs());
        }
    }
    Ok(worst)
}
