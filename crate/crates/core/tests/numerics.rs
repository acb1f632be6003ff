use std::f64::consts::{FRAC_1_SQRT_2, PI};

use approx::assert_relative_eq;
use hetq_core::numerics::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Truncated power series, independent of the closed form.
fn series_exp2(a: &Mat2, order: usize) -> Mat2 {
    let mut term = Mat2::identity();
    let mut sum = Mat2::identity();
    for k in 1..=order {
        term = (term * *a).scale(c(1.0 / k as f64, 0.0));
        sum = sum + term;
    }
    sum
}

fn random_hermitian(rng: &mut ChaCha8Rng) -> Mat4 {
    let mut h = Mat4::zeros();
    for i in 0..4 {
        h.0[i][i] = c(rng.gen_range(-5.0..5.0), 0.0);
        for j in i + 1..4 {
            let z = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            h.0[i][j] = z;
            h.0[j][i] = z.conj();
        }
    }
    h
}

#[test]
fn pauli_exponential_examples() {
    let u = matexp_pauli([1.0, 0.0, 0.0], PI).unwrap();
    assert!(u.max_diff(&sigma_x().scale(c(0.0, -1.0))) < 1e-15);
    assert!(
        matexp_pauli([0.0, 0.0, 1.0], 0.0)
            .unwrap()
            .max_diff(&Mat2::identity())
            < 1e-15
    );

    let half = matexp_pauli([1.0, 0.0, 0.0], PI / 2.0).unwrap();
    let expect = (Mat2::identity() - sigma_x().scale(I)).scale(c(FRAC_1_SQRT_2, 0.0));
    assert!(half.max_diff(&expect) < 1e-15);
    let gen = sigma_x().scale(c(0.0, -PI / 4.0));
    assert!(half.max_diff(&series_exp2(&gen, 30)) < 1e-14);
    assert!((half.dagger() * half).max_diff(&Mat2::identity()) < 1e-12);
}

#[test]
fn degenerate_axis_rejected() {
    assert_eq!(
        matexp_pauli([0.0; 3], 1.0).unwrap_err(),
        NumericsError::DegenerateAxis
    );
}

#[test]
fn eigh_examples() {
    let (vals, vecs) = eigh(&Mat4::from_real_diag([1.0, 2.0, 3.0, 4.0])).unwrap();
    assert_eq!(vals, [1.0, 2.0, 3.0, 4.0]);
    assert!(vecs.max_diff(&Mat4::identity()) < 1e-15);

    let (vals, _) = eigh(&sigma_x()).unwrap();
    assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);

    let mut bad = Mat2::identity();
    bad.0[0][1] = c(1.0, 0.0);
    assert_eq!(eigh(&bad).unwrap_err(), NumericsError::NotHermitian);
}

#[test]
fn eigh_reconstructs_random_hermitian() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let h = random_hermitian(&mut rng);
        let (vals, v) = eigh(&h).unwrap();
        let mut d = Mat4::zeros();
        for (k, val) in vals.iter().enumerate() {
            d.0[k][k] = c(*val, 0.0);
        }
        assert!((v * d * v.dagger()).max_diff(&h) < 1e-9 * h.max_abs());
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn expm_hermitian_matches_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = random_hermitian(&mut rng);
    let t = 0.05;
    let u = expm_hermitian(&h, t).unwrap();
    let mut term = Mat4::identity();
    let mut sum = Mat4::identity();
    let gen = h.scale(c(0.0, -t));
    for k in 1..40 {
        term = (term * gen).scale(c(1.0 / k as f64, 0.0));
        sum = sum + term;
    }
    assert!(u.max_diff(&sum) < 1e-12);
    assert!(u.is_unitary(1e-10));
}

#[test]
fn quadrature_examples() {
    assert_relative_eq!(
        quad_adaptive(f64::sin, 0.0, PI, 1e-10).unwrap(),
        2.0,
        max_relative = 1e-8
    );
    assert_relative_eq!(
        quad_adaptive(|x| x * x, 0.0, 1.0, 1e-10).unwrap(),
        1.0 / 3.0,
        max_relative = 1e-12
    );
    let g = quad_adaptive(|x| (-x * x).exp(), 0.0, 10.0, 1e-10).unwrap();
    assert!((g - PI.sqrt() / 2.0).abs() < 1e-6);
    assert!(matches!(
        quad_adaptive(f64::sin, 1.0, 1.0, 1e-8),
        Err(NumericsError::BadInterval { .. })
    ));
}

type QuadCase = (fn(f64) -> f64, f64, f64, f64);

#[test]
fn tighter_tolerance_never_hurts() {
    let cases: [QuadCase; 3] = [
        (|x| x.sin(), 0.0, PI, 2.0),
        (|x| (-x * x).exp(), 0.0, 10.0, PI.sqrt() / 2.0),
        (|x| 1.0 / (1.0 + x * x), 0.0, 50.0, 50f64.atan()),
    ];
    for (f, a, b, exact) in cases {
        let mut last = f64::INFINITY;
        for tol in [1e-3, 5e-4, 2.5e-4, 1.25e-4, 1e-6, 1e-9] {
            let err = (quad_adaptive(f, a, b, tol).unwrap() - exact).abs();
            assert!(err <= last.max(1e-15), "tol {tol}: {err} > {last}");
            last = err;
        }
    }
}

#[test]
fn log_panels_integrate_smooth_functions() {
    let p = LogPanels::new(1e-3, 1e5, 24, 12);
    let v = p.integrate(|x| 1.0 / (1.0 + x * x));
    assert_relative_eq!(v, 1e5f64.atan() - 1e-3f64.atan(), max_relative = 1e-10);
}

fn quadratic_opts() -> OptimizerOptions {
    OptimizerOptions {
        max_iters: 200,
        grad_tol: 1e-10,
        ..OptimizerOptions::default()
    }
}

#[test]
fn quasi_newton_examples() {
    let m = minimize_qn(
        |x, g| {
            g[0] = 2.0 * (x[0] - 3.0);
            Ok((x[0] - 3.0).powi(2))
        },
        &[0.0],
        &quadratic_opts(),
    )
    .unwrap();
    assert!((m.x[0] - 3.0).abs() < 1e-6);

    let rosen = |x: &[f64], g: &mut [f64]| {
        let (a, b) = (x[0], x[1]);
        g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
        g[1] = 200.0 * (b - a * a);
        Ok((1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2))
    };
    let opts = OptimizerOptions {
        max_iters: 1000,
        grad_tol: 1e-10,
        ..OptimizerOptions::default()
    };
    let m = minimize_qn(rosen, &[-1.2, 1.0], &opts).unwrap();
    assert!(
        (m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4,
        "{:?}",
        m.x
    );
    assert!(m.history.windows(2).all(|w| w[1] <= w[0]));

    let m = minimize_qn(
        |_, g| {
            g.iter_mut().for_each(|v| *v = 0.0);
            Ok(5.0)
        },
        &[0.3, -0.2],
        &OptimizerOptions::default(),
    )
    .unwrap();
    assert_eq!(m.x, vec![0.3, -0.2]);
    assert!(m.iters <= 1);
}

#[test]
fn quasi_newton_reports_nan_index() {
    let err = minimize_qn(
        |x, g| {
            g[0] = 1.0;
            g[1] = f64::NAN;
            Ok(x[0])
        },
        &[0.0, 0.0],
        &OptimizerOptions::default(),
    )
    .unwrap_err();
    assert_eq!(err, NumericsError::NonFinite { index: Some(1) });
}

#[test]
fn sin_squared_fit_examples() {
    let omega = 100e6;
    let period = 2.0 * PI / omega;
    let t: Vec<f64> = (0..200).map(|k| 4.0 * period * k as f64 / 199.0).collect();
    let y: Vec<f64> = t.iter().map(|&t| (0.5 * omega * t).sin().powi(2)).collect();
    let fit = fit_sin_squared(&t, &y).unwrap();
    assert!((fit.omega / omega - 1.0).abs() < 1e-3);

    assert_eq!(
        fit_sin_squared(&t, &vec![0.0; t.len()]).unwrap_err(),
        NumericsError::NoOscillation
    );
}

#[test]
fn sin_squared_fit_with_noise_over_seeds() {
    let omega = 100e6;
    let period = 2.0 * PI / omega;
    let t: Vec<f64> = (0..200).map(|k| 4.0 * period * k as f64 / 199.0).collect();
    let noise = Normal::new(0.0, 0.01).unwrap();
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<f64> = t
            .iter()
            .map(|&t| (0.5 * omega * t).sin().powi(2) + noise.sample(&mut rng))
            .collect();
        let fit = fit_sin_squared(&t, &y).unwrap();
        assert!(
            (fit.omega / omega - 1.0).abs() < 0.01,
            "seed {seed}: {}",
            fit.omega
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn same_axis_rotations_compose(
        n in prop::array::uniform3(-1.0f64..1.0).prop_filter("nonzero", |n| n.iter().map(|x| x * x).sum::<f64>() > 1e-3),
        a in -10.0f64..10.0,
        b in -10.0f64..10.0,
    ) {
        let lhs = matexp_pauli(n, a).unwrap() * matexp_pauli(n, b).unwrap();
        prop_assert!(lhs.max_diff(&matexp_pauli(n, a + b).unwrap()) < 1e-10);
    }

    #[test]
    fn eigh_trace_and_orthonormality(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng);
        let (vals, v) = eigh(&h).unwrap();
        let scale = h.norm();
        prop_assert!((h.trace().re - vals.iter().sum::<f64>()).abs() < 1e-9 * scale);
        prop_assert!((v.dagger() * v).max_diff(&Mat4::identity()) < 1e-9);
        for (k, val) in vals.iter().enumerate() {
            let col = column(&v, k);
            let hv = h.mul_vec(&col);
            let res: f64 = hv.iter().zip(&col).map(|(a, b)| (a - b * val).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(res < 1e-9 * scale);
        }
    }

    #[test]
    fn convex_quadratic_reaches_minimum(
        diag in prop::collection::vec(0.5f64..20.0, 1..6),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target: Vec<f64> = diag.iter().map(|_| rng.gen_range(-5.0..5.0)).collect();
        let m = minimize_qn(
            |x, g| {
                let mut f = 0.0;
                for i in 0..x.len() {
                    g[i] = diag[i] * (x[i] - target[i]);
                    f += 0.5 * diag[i] * (x[i] - target[i]).powi(2);
                }
                Ok(f)
            },
            &vec![0.0; diag.len()],
            &quadratic_opts(),
        )
        .unwrap();
        for i in 0..diag.len() {
            // |g_i| ≤ tol implies |x_i − x*_i| ≤ tol / d_i.
            prop_assert!((m.x[i] - target[i]).abs() <= 1e-10 / diag[i] + 1e-12);
        }
    }
}
