//! Eigenvalue routines: symmetric tridiagonal QL with first-component
//! tracking (for Gauss rules) and balanced nonsymmetric eigenvalues
//! (for comrade matrices).

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::{Error, Result};

/// Symmetric tridiagonal matrix given by its diagonal and subdiagonal.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    /// Subdiagonal, length `diag.len() - 1` (empty when the matrix is 1x1).
    pub off: Vec<f64>,
}

/// Eigenvalues (ascending) of a symmetric tridiagonal matrix together with
/// the first component of each normalized eigenvector.
#[derive(Debug, Clone)]
pub struct TridiagEigen {
    pub values: Vec<f64>,
    pub first_components: Vec<f64>,
}

/// Implicit-shift QL iteration, tracking only the first row of the
/// accumulated rotations. That row is exactly what Gauss quadrature
/// weights need, so the full eigenvector matrix is never formed.
pub fn sym_tridiag_eigen(m: &SymTridiag) -> Result<TridiagEigen> {
    let n = m.diag.len();
    if n == 0 {
        return Ok(TridiagEigen {
            values: Vec::new(),
            first_components: Vec::new(),
        });
    }
    assert_eq!(m.off.len(), n - 1, "subdiagonal length mismatch");

    let mut d = m.diag.clone();
    let mut e = m.off.clone();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm + 1 < n {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::NonConvergence(format!(
                    "tridiagonal QL stalled at index {l} of {n}"
                )));
            }
            // Wilkinson-style shift from the leading 2x2
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..mm).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok(TridiagEigen {
        values: order.iter().map(|&i| d[i]).collect(),
        first_components: order.iter().map(|&i| z[i]).collect(),
    })
}

/// In-place Parlett-Reinsch balancing: similarity scaling by powers of two,
/// so eigenvalues are untouched and no rounding is introduced.
pub fn balance(a: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += a[(j, i)].abs();
                    row += a[(i, j)].abs();
                }
            }
            if col == 0.0 || row == 0.0 || !(col + row).is_finite() {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            let mut c = col;
            let mut g = row / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = row * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + row) / f < 0.95 * total {
                done = false;
                let ginv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= ginv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// All eigenvalues of a general real square matrix: balance, reduce to upper
/// Hessenberg form if needed, then Francis double-shift QR. The exceptional
/// ad-hoc shift every tenth stalled iteration breaks the cycles that a plain
/// trailing-2x2 shift can fall into.
pub fn complex_eigenvalues(mut a: DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigenvalues need a square matrix");
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure(
            "matrix has non-finite entries".to_string(),
        ));
    }
    balance(&mut a);
    let is_hessenberg =
        (0..n).all(|j| (j + 2..n).all(|i| a[(i, j)] == 0.0));
    let mut h = if is_hessenberg {
        a
    } else {
        nalgebra::linalg::Hessenberg::new(a).unpack_h()
    };
    hessenberg_eigenvalues(&mut h)
}

/// Eigenvalues of an upper Hessenberg matrix by the implicit double-shift QR
/// iteration, consuming the matrix. Complex pairs come out conjugated; order
/// follows deflation, not magnitude.
fn hessenberg_eigenvalues(a: &mut DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let dim = a.nrows();
    let eps = f64::EPSILON;
    let mut wr = vec![0.0f64; dim];
    let mut wi = vec![0.0f64; dim];

    let mut anorm = 0.0;
    for i in 0..dim {
        for j in i.saturating_sub(1)..dim {
            anorm += a[(i, j)].abs();
        }
    }
    if anorm == 0.0 {
        return Ok(vec![Complex::new(0.0, 0.0); dim]);
    }

    // `nn` rows remain active; accumulated shifts live in `t`
    let mut nn = dim;
    let mut t = 0.0f64;
    while nn >= 1 {
        let mut its = 0usize;
        loop {
            let hi = nn - 1;
            // split at a negligible subdiagonal entry
            let mut l = hi;
            while l >= 1 {
                let pair = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                let s = if pair == 0.0 { anorm } else { pair };
                if a[(l, l - 1)].abs() <= eps * s {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }

            let mut x = a[(hi, hi)];
            if l == hi {
                wr[hi] = x + t;
                wi[hi] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[(hi - 1, hi - 1)];
            let mut w = a[(hi, hi - 1)] * a[(hi - 1, hi)];
            if l == hi - 1 {
                // trailing 2x2: close its two roots directly
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    let z = p + if p >= 0.0 { z } else { -z };
                    wr[hi - 1] = x + z;
                    wr[hi] = if z != 0.0 { x - w / z } else { x + z };
                    wi[hi - 1] = 0.0;
                    wi[hi] = 0.0;
                } else {
                    wr[hi - 1] = x + p;
                    wr[hi] = x + p;
                    wi[hi - 1] = -z;
                    wi[hi] = z;
                }
                nn -= 2;
                break;
            }

            if its == 60 {
                return Err(Error::EigenFailure(format!(
                    "QR iteration stalled on a block of size {} (n = {dim})",
                    hi - l + 1
                )));
            }
            if its > 0 && its.is_multiple_of(10) {
                // Exceptional shift every tenth stalled step. The style
                // rotates - trailing edge, leading edge, then a detuned
                // variant - because a lone formula can leave symmetric
                // configurations cycling forever.
                t += x;
                for i in 0..nn {
                    a[(i, i)] -= x;
                }
                let s = match (its / 10) % 3 {
                    1 => a[(hi, hi - 1)].abs() + a[(hi - 1, hi - 2)].abs(),
                    2 => a[(l + 1, l)].abs() + a[(l + 2, l + 1)].abs(),
                    _ => 1.3803 * (a[(hi, hi - 1)].abs() + a[(l + 1, l)].abs()),
                };
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            // start the sweep where two consecutive subdiagonals are small
            let mut m = hi - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                if s == 0.0 {
                    break;
                }
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=hi {
                a[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[(i, i - 3)] = 0.0;
                }
            }

            // chase the bulge
            for k in m..hi {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k != hi - 1 { a[(k + 2, k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let mag = (p * p + q * q + r * r).sqrt();
                let s = if p >= 0.0 { mag } else { -mag };
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[(k, k - 1)] = -a[(k, k - 1)];
                    }
                } else {
                    a[(k, k - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..nn {
                    let mut f = a[(k, j)] + q * a[(k + 1, j)];
                    if k != hi - 1 {
                        f += r * a[(k + 2, j)];
                        a[(k + 2, j)] -= f * z;
                    }
                    a[(k + 1, j)] -= f * y;
                    a[(k, j)] -= f * x;
                }
                let row_end = nn.min(k + 4);
                for i in l..row_end {
                    let mut f = x * a[(i, k)] + y * a[(i, k + 1)];
                    if k != hi - 1 {
                        f += z * a[(i, k + 2)];
                        a[(i, k + 2)] -= f * r;
                    }
                    a[(i, k + 1)] -= f * q;
                    a[(i, k)] -= f;
                }
            }
        }
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex::new(re, im))
        .collect())
}
