//! Structural invariants checked across measures, degrees, and random
//! probes rather than at single frozen points.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use ortho_zeros::kacrice::expected_zeros_general;
use ortho_zeros::kacrice::expected_zeros_orthopoly;
use ortho_zeros::kernels::{kernel_diagonal, universality_ratios};
use ortho_zeros::measure::{Interval, MeasureSpec};
use ortho_zeros::montecarlo::run_experiment;
use ortho_zeros::orthopoly::{recurrence, recurrence_analytic, RecurrenceTable};

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (0.5f64).powi(53)
}

fn two_interval() -> MeasureSpec {
    MeasureSpec::uniform_on(vec![
        Interval { lo: -1.0, hi: -0.5 },
        Interval { lo: 0.5, hi: 1.0 },
    ])
    .unwrap()
}

#[test]
fn polynomials_are_orthonormal_under_their_measure() {
    let cases = [
        MeasureSpec::legendre(),
        MeasureSpec::jacobi(0.5, -0.5).unwrap(),
        two_interval(),
    ];
    let pairs = [
        (0, 0),
        (1, 1),
        (5, 5),
        (24, 24),
        (0, 1),
        (0, 24),
        (3, 7),
        (11, 12),
        (12, 24),
        (23, 24),
    ];
    for spec in &cases {
        let table = recurrence(spec, 24).unwrap();
        for &(j, k) in &pairs {
            // polarization keeps both integrands positive, so the relative
            // stopping test has a scale to work with even when <p_j, p_k> = 0
            let norm2 = |sign: f64| {
                spec.integrate(
                    |x| {
                        let e = table.eval_all(x, 24);
                        let v = e.values[j] + sign * e.values[k];
                        v * v
                    },
                    1e-9,
                )
                .unwrap_or_else(|e| panic!("<p_{j}, p_{k}> under {:?}: {e}", spec.weight()))
            };
            let ip = (norm2(1.0) - norm2(-1.0)) / 4.0;
            let expect = if j == k { 1.0 } else { 0.0 };
            assert!(
                (ip - expect).abs() < 1e-8,
                "<p_{j}, p_{k}> = {ip} under {:?}",
                spec.weight()
            );
        }
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let spec = MeasureSpec::jacobi(1.5, 0.5).unwrap();
    let table = recurrence_analytic(&spec, 30).unwrap();
    let h = 1e-6;
    for &x in &[-0.83, -0.2, 0.0, 0.41, 0.97] {
        let up = table.eval_all(x + h, 30);
        let dn = table.eval_all(x - h, 30);
        let mid = table.eval_all(x, 30);
        for j in [1usize, 2, 7, 18, 30] {
            let fd = (up.values[j] - dn.values[j]) / (2.0 * h);
            let scale = mid.derivs[j].abs().max(1.0);
            assert!(
                (mid.derivs[j] - fd).abs() < 1e-6 * scale,
                "p_{j}'({x}) = {} vs fd {fd}",
                mid.derivs[j]
            );
        }
    }
}

#[test]
fn affine_map_transforms_recurrence_and_preserves_counts() {
    // x -> 3.5 + 1.5 x maps [-1, 1] onto [2, 5]
    let base = MeasureSpec::legendre();
    let mapped = MeasureSpec::jacobi_on(Interval { lo: 2.0, hi: 5.0 }, 0.0, 0.0).unwrap();
    let tb = recurrence_analytic(&base, 40).unwrap();
    let tm = recurrence_analytic(&mapped, 40).unwrap();
    for j in 0..40 {
        assert!((tm.a(j) - 3.5).abs() < 1e-12, "a_{j}");
    }
    for j in 1..=40 {
        assert!((tm.b(j) - 1.5 * tb.b(j)).abs() < 1e-12, "b_{j}");
    }
    for (lo, hi) in [(-1.0, 1.0), (-0.5, 0.5), (0.3, 0.9)] {
        let eb = expected_zeros_orthopoly(&tb, &base, (lo, hi), 25, 1e-11, false).unwrap();
        let em = expected_zeros_orthopoly(
            &tm,
            &mapped,
            (3.5 + 1.5 * lo, 3.5 + 1.5 * hi),
            25,
            1e-11,
            false,
        )
        .unwrap();
        assert!(
            (eb.value - em.value).abs() < 1e-9,
            "({lo}, {hi}): {} vs {}",
            eb.value,
            em.value
        );
    }
}

#[test]
fn kernel_diagonal_grows_with_order() {
    let spec = MeasureSpec::jacobi(0.25, 2.0).unwrap();
    let table = recurrence_analytic(&spec, 60).unwrap();
    for &x in &[-0.999, -0.4, 0.0, 0.61, 0.95, 1.3] {
        let mut prev = 0.0;
        for n in 1..=60 {
            let kd = kernel_diagonal(&table, x, n);
            assert!(
                kd.a >= prev,
                "A({x}; {n}) = {} dropped below {prev}",
                kd.a
            );
            assert!(kd.c >= 0.0);
            prev = kd.a;
        }
    }
}

#[test]
fn kernel_radicand_stays_numerically_nonnegative() {
    let cases = [
        MeasureSpec::legendre(),
        MeasureSpec::chebyshev(),
        MeasureSpec::jacobi(2.0, 3.0).unwrap(),
        two_interval(),
    ];
    let tables: Vec<RecurrenceTable> = cases.iter().map(|s| recurrence(s, 60).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for probe in 0..1000 {
        let which = (rng.next_u64() % cases.len() as u64) as usize;
        let (lo, hi) = cases[which].support_bounds();
        let pad = 0.1 * (hi - lo);
        let x = lo - pad + (hi - lo + 2.0 * pad) * unit(&mut rng);
        let n = 1 + (rng.next_u64() % 60) as usize;
        let kd = kernel_diagonal(&tables[which], x, n);
        let radicand = kd.a * kd.c - kd.b * kd.b;
        assert!(
            radicand >= -1e-12 * kd.a * kd.c,
            "probe {probe}: measure {which}, x = {x}, n = {n}: {radicand}"
        );
    }
}

#[test]
fn expected_counts_are_additive_and_monotone_in_the_interval() {
    let spec = MeasureSpec::legendre();
    let table = recurrence_analytic(&spec, 30).unwrap();
    let whole = expected_zeros_orthopoly(&table, &spec, (-0.9, 0.8), 30, 1e-11, false).unwrap();
    let left = expected_zeros_orthopoly(&table, &spec, (-0.9, 0.15), 30, 1e-11, false).unwrap();
    let right = expected_zeros_orthopoly(&table, &spec, (0.15, 0.8), 30, 1e-11, false).unwrap();
    assert!(
        (whole.value - left.value - right.value).abs() < 1e-9,
        "{} vs {} + {}",
        whole.value,
        left.value,
        right.value
    );
    assert!(left.value <= whole.value + 1e-12);
    assert!(right.value <= whole.value + 1e-12);
    assert!(whole.est_error <= 1e-11 * whole.value.max(1.0));
}

#[test]
fn weighting_the_basis_does_not_move_zeros() {
    // multiplying every basis function by sqrt(w(x)) rescales the random
    // polynomial pointwise without touching its zero set
    let cases = [MeasureSpec::legendre(), MeasureSpec::jacobi(0.5, 1.5).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in &cases {
        let table = recurrence_analytic(spec, 24).unwrap();
        for _ in 0..10 {
            let a = -0.95 + 1.8 * unit(&mut rng);
            let b = a + 0.04 + (0.94 - a) * unit(&mut rng);
            let n = 3 + (rng.next_u64() % 22) as usize;
            let plain = expected_zeros_orthopoly(&table, spec, (a, b), n, 1e-11, false).unwrap();
            let weighted = expected_zeros_orthopoly(&table, spec, (a, b), n, 1e-11, true).unwrap();
            assert!(
                (plain.value - weighted.value).abs() <= 1e-8 * plain.value.max(1e-3),
                "({a}, {b}), n = {n}: {} vs {}",
                plain.value,
                weighted.value
            );
        }
    }
}

#[test]
fn general_evaluator_reproduces_the_orthopoly_path() {
    let spec = MeasureSpec::jacobi(0.0, 1.0).unwrap();
    let table = recurrence_analytic(&spec, 18).unwrap();
    for (a, b, n) in [(-0.7, 0.7, 18), (-0.99, -0.2, 7), (0.0, 0.5, 12)] {
        let basis = |x: f64| {
            let e = table.eval_all(x, n);
            (e.values, e.derivs)
        };
        let gen = expected_zeros_general(&basis, (a, b), n, 1e-11).unwrap();
        let ortho = expected_zeros_orthopoly(&table, &spec, (a, b), n, 1e-11, false).unwrap();
        assert!(
            (gen.value - ortho.value).abs() < 1e-10,
            "({a}, {b}), n = {n}"
        );
    }
}

#[test]
fn second_derivative_ratio_sharpens_as_n_doubles() {
    let spec = MeasureSpec::legendre();
    let table = recurrence_analytic(&spec, 801).unwrap();
    let x = 0.2;
    let mut prev: Option<f64> = None;
    for n in [100usize, 200, 400, 800] {
        let out = universality_ratios(&table, &spec, x, n, &[(1, 1)]).unwrap();
        let (ratio, target) = out[0];
        let dev = (ratio / target - 1.0).abs();
        if let Some(p) = prev {
            assert!(
                dev <= 1.1 * p,
                "n = {n}: deviation {dev} vs previous {p}"
            );
        }
        prev = Some(dev);
    }
}

#[test]
fn coefficient_scale_cancels_out_of_zero_sets() {
    let spec = MeasureSpec::legendre();
    let table = recurrence_analytic(&spec, 16).unwrap();
    let (lo_stats, lo_rec) = run_experiment(&table, 16, 40, (-1.0, 1.0), 0.5, 99).unwrap();
    let (hi_stats, hi_rec) = run_experiment(&table, 16, 40, (-1.0, 1.0), 2.0, 99).unwrap();
    assert_eq!(lo_stats.mean_count, hi_stats.mean_count);
    for (l, h) in lo_rec.iter().zip(&hi_rec) {
        assert_eq!(l.count_in_window, h.count_in_window);
        assert_eq!(l.real_zeros.len(), h.real_zeros.len());
        for (zl, zh) in l.real_zeros.iter().zip(&h.real_zeros) {
            assert!((zl - zh).abs() < 1e-9);
        }
    }
}
