//! Property tests of the symbol and grid invariants.

use num_complex::Complex64;
use proptest::prelude::*;

use cnsk_spectral::grid::{Grid2D, Repr, ScalarField};
use cnsk_spectral::params::{
    cutoff_weights, divided_diff_e0, divided_diff_e1, green_phi_phi, helmholtz_symbol, lambda_pm,
    ModelParams, RootPair,
};
use cnsk_spectral::semigroup::project_helmholtz;
use cnsk_spectral::signal::omega_p;

fn arb_params() -> impl Strategy<Value = ModelParams> {
    (
        0.05f64..2.0,
        0.0f64..2.0,
        0.1f64..3.0,
        0.0f64..2.0,
    )
        .prop_map(|(nu, nu_tilde, gamma, kappa0)| {
            ModelParams::derive(nu, nu_tilde, gamma, kappa0).unwrap()
        })
}

proptest! {
    #[test]
    fn roots_satisfy_characteristic_polynomial(
        p in arb_params(),
        xi in 0.0f64..30.0,
    ) {
        let xi_sq = xi * xi;
        let roots = lambda_pm(xi_sq, &p);
        let bound = 1e-10 * (1.0 + xi_sq * xi_sq);
        for z in [roots.lambda_plus, roots.lambda_minus] {
            prop_assert!(z.re <= 0.0);
            prop_assert!(RootPair::char_poly_residual(z, xi_sq, &p) <= bound);
        }
        let sum = roots.lambda_plus + roots.lambda_minus;
        let expect = -2.0 * p.a * xi_sq;
        prop_assert!((sum - Complex64::new(expect, 0.0)).norm() <= 1e-12 * (1.0 + expect.abs()));
    }

    #[test]
    fn divided_differences_match_two_root_form(
        p in arb_params(),
        xi in 1e-3f64..20.0,
        t in 1e-3f64..20.0,
    ) {
        let xi_sq = xi * xi;
        let roots = lambda_pm(xi_sq, &p);
        let sep = (roots.lambda_plus - roots.lambda_minus).norm() * t;
        prop_assume!(sep > 1e-2);
        let denom = roots.lambda_plus - roots.lambda_minus;
        let naive_e0 = ((roots.lambda_plus * t).exp() - (roots.lambda_minus * t).exp()) / denom;
        let naive_e1 = (roots.lambda_plus * (roots.lambda_plus * t).exp()
            - roots.lambda_minus * (roots.lambda_minus * t).exp())
            / denom;
        let naive_g = (roots.lambda_plus * (roots.lambda_minus * t).exp()
            - roots.lambda_minus * (roots.lambda_plus * t).exp())
            / denom;
        let scale = (roots.lambda_minus.re * t).exp().max(1e-300);
        let pairs = [
            (divided_diff_e0(t, xi_sq, &p), naive_e0),
            (divided_diff_e1(t, xi_sq, &p), naive_e1),
            (green_phi_phi(t, xi_sq, &p), naive_g),
        ];
        for (stable, naive) in pairs {
            prop_assert!(naive.im.abs() <= 1e-10 * scale.max(naive.norm()));
            prop_assert!(
                (stable - naive.re).abs() <= 1e-10 * scale.max(naive.norm()),
                "stable {} vs naive {}", stable, naive.re
            );
        }
    }

    #[test]
    fn cutoff_partition_of_unity(
        p in arb_params(),
        r in 0.0f64..50.0,
    ) {
        let w = cutoff_weights(r, &p);
        prop_assert!((w.w1 + w.w_m + w.w_inf - 1.0).abs() < 1e-15);
        for v in [w.w1, w.w_m, w.w_inf] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn helmholtz_symbol_is_projector(
        x in -10.0f64..10.0,
        y in -10.0f64..10.0,
    ) {
        let s = helmholtz_symbol([x, y]);
        // Symmetric, idempotent, annihilates xi.
        prop_assert!((s[0][1] - s[1][0]).abs() < 1e-15);
        for i in 0..2 {
            for j in 0..2 {
                let sq = s[i][0] * s[0][j] + s[i][1] * s[1][j];
                prop_assert!((sq - s[i][j]).abs() <= 1e-15);
            }
        }
        let px = s[0][0] * x + s[0][1] * y;
        let py = s[1][0] * x + s[1][1] * y;
        if x != 0.0 || y != 0.0 {
            let norm = (x * x + y * y).sqrt();
            prop_assert!((px * x + py * y).abs() <= 1e-13 * norm * norm);
        }
    }

    #[test]
    fn omega_series_and_closed_form_agree(
        re in -3.0f64..-0.0,
        im in -3.0f64..3.0,
        t in 0.01f64..5.0,
        p in 0u8..=4,
    ) {
        let z = Complex64::new(re, im);
        prop_assume!((z * t).norm() > 0.6);
        // Reference: dense Simpson quadrature of t^p e^{zt}.
        let n = 4000;
        let h = t / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..=n {
            let s = i as f64 * h;
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += Complex64::new(w, 0.0) * s.powi(p as i32) * (z * s).exp();
        }
        acc *= h / 3.0;
        let got = omega_p(p, z, t);
        prop_assert!((got - acc).norm() <= 1e-8 * acc.norm().max(1e-10),
            "p={} z={} t={}: {} vs {}", p, z, t, got, acc);
    }

    #[test]
    fn hermitian_random_fields_split_orthogonally(seed in 0u64..5000) {
        let grid = Grid2D::new(16, 4.0).unwrap();
        let m = cnsk_spectral::rng::random_vector(grid, seed, 1.0);
        let (sol, pot) = project_helmholtz(&m).unwrap();
        let a = m.l2_norm();
        let b = sol.l2_norm();
        let c = pot.l2_norm();
        prop_assert!((a * a - b * b - c * c).abs() <= 1e-12 * (a * a).max(1e-300));
        let div = sol.divergence().unwrap();
        prop_assert!(div.l2_norm() <= 1e-12 * a.max(1e-300));
    }

    #[test]
    fn transform_preserves_hermitian_symmetry(seed in 0u64..5000) {
        let grid = Grid2D::new(16, 4.0).unwrap();
        let f = cnsk_spectral::rng::random_scalar(grid, seed, 1.0);
        // Apply a real even symbol; symmetry must survive.
        let g = f
            .apply_symbol(|xi| Complex64::new((-0.3 * (xi[0] * xi[0] + xi[1] * xi[1])).exp(), 0.0))
            .unwrap();
        prop_assert!(g.hermitian_defect() < 1e-13);
        // Round trip through physical space.
        let back = g.inverse().unwrap().forward().unwrap();
        let scale = g.data.iter().map(|v| v.norm()).fold(1e-300, f64::max);
        for (x, y) in g.data.iter().zip(back.data.iter()) {
            prop_assert!((x - y).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn physical_fields_round_trip(seed in 0u64..5000) {
        let grid = Grid2D::new(16, 3.0).unwrap();
        let mut rng = cnsk_spectral::rng::SplitMix64::new(seed);
        let f = ScalarField {
            grid,
            repr: Repr::Physical,
            data: (0..grid.len())
                .map(|_| Complex64::new(rng.uniform(-1.0, 1.0), 0.0))
                .collect(),
        };
        let back = f.forward().unwrap().inverse().unwrap();
        for (x, y) in f.data.iter().zip(back.data.iter()) {
            prop_assert!((x - y).norm() <= 1e-12);
        }
    }
}
