//! Gauss quadrature rules from recurrence coefficients (Golub-Welsch).
//!
//! The rules here serve two internal customers: plain panels for smooth
//! integrands, and Jacobi-weighted panels that absorb algebraic endpoint
//! factors exactly.

use std::sync::OnceLock;

use crate::linalg::{sym_tridiag_eigen, SymTridiag};
use crate::numeric::ln_beta;
use crate::Result;

/// Nodes (ascending) and positive weights of a Gauss rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Integrate `f` over `[a, b]` after an affine map of the reference rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let s = 0.5 * (b - a);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + s * x);
        }
        s * acc
    }
}

/// Orthonormal recurrence coefficients for the Jacobi weight
/// `(1 - x)^alpha (1 + x)^beta` on [-1, 1].
///
/// Returns `(a, b, mu0)` where `a` holds `a_0..a_{n-1}`, `b` holds
/// `b_1..b_{n-1}` and `mu0` is the total mass of the weight.
pub fn jacobi_recurrence(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>, f64) {
    assert!(alpha > -1.0 && beta > -1.0, "Jacobi exponents must exceed -1");
    let mu0 = ((alpha + beta + 1.0) * 2.0f64.ln() + ln_beta(alpha + 1.0, beta + 1.0)).exp();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n {
        if k == 0 {
            a.push((beta - alpha) / (alpha + beta + 2.0));
        } else {
            let t = 2.0 * k as f64 + alpha + beta;
            a.push((beta * beta - alpha * alpha) / (t * (t + 2.0)));
        }
    }
    for k in 1..n {
        let kf = k as f64;
        let bsq = if k == 1 {
            4.0 * (alpha + 1.0) * (beta + 1.0)
                / ((alpha + beta + 2.0).powi(2) * (alpha + beta + 3.0))
        } else {
            let t = 2.0 * kf + alpha + beta;
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + alpha + beta)
                / (t * t * (t + 1.0) * (t - 1.0))
        };
        b.push(bsq.sqrt());
    }
    (a, b, mu0)
}

/// Gauss rule from a truncated Jacobi matrix: nodes are its eigenvalues,
/// weights are `mu0` times the squared first eigenvector components.
pub fn golub_welsch(diag: Vec<f64>, off: Vec<f64>, mu0: f64) -> Result<GaussRule> {
    let eig = sym_tridiag_eigen(&SymTridiag { diag, off })?;
    let weights = eig.first_components.iter().map(|z| mu0 * z * z).collect();
    Ok(GaussRule {
        nodes: eig.values,
        weights,
    })
}

/// n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Result<GaussRule> {
    let (a, b, mu0) = jacobi_recurrence(n, 0.0, 0.0);
    golub_welsch(a, b, mu0)
}

/// n-point Gauss-Jacobi rule on [-1, 1] for the weight
/// `(1 - x)^alpha (1 + x)^beta`.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<GaussRule> {
    let (a, b, mu0) = jacobi_recurrence(n, alpha, beta);
    golub_welsch(a, b, mu0)
}

/// Nodes and weights on `[a, b]` such that `sum w_i f(x_i)` approximates
/// `int_a^b f(x) (b - x)^alpha (x - a)^beta dx` (exactly, for polynomial `f`
/// up to degree `2n - 1`).
pub fn gauss_jacobi_panel(
    n: usize,
    alpha: f64,
    beta: f64,
    a: f64,
    b: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let rule = gauss_jacobi(n, alpha, beta)?;
    let c = 0.5 * (a + b);
    let s = 0.5 * (b - a);
    let scale = s.powf(alpha + beta + 1.0);
    let nodes = rule.nodes.iter().map(|&t| c + s * t).collect();
    let weights = rule.weights.iter().map(|&w| scale * w).collect();
    Ok((nodes, weights))
}

/// Shared 32-point Gauss-Legendre reference rule; the workhorse panel size
/// for smooth integrands.
pub fn gauss_legendre_32() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(32).expect("32-point Legendre rule"))
}
