//! Consistency checks that span module boundaries.

use num_complex::Complex64;

use cnsk_spectral::grid::{Grid2D, Repr, ScalarField, VectorField};
use cnsk_spectral::morawetz::{self, evolve_scalar};
use cnsk_spectral::params::ModelParams;
use cnsk_spectral::rng;
use cnsk_spectral::semigroup::{self, SpectralState};

fn zero_mean_pair(grid: Grid2D, seed: u64) -> (ScalarField, VectorField) {
    let mut phi0 = rng::random_scalar(grid, seed, 1.0);
    let mut m0 = rng::random_vector(grid, seed ^ 0x9999, 1.0);
    let i0 = grid.zero_mode();
    phi0.data[i0] = Complex64::new(0.0, 0.0);
    m0.comps[0][i0] = Complex64::new(0.0, 0.0);
    m0.comps[1][i0] = Complex64::new(0.0, 0.0);
    (phi0, m0)
}

/// The scalar-equation evolution must reproduce the density component of the
/// coupled system on 20 random states.
#[test]
fn scalar_and_coupled_density_agree() {
    let grid = Grid2D::new(32, 6.0).unwrap();
    for seed in 0..20u64 {
        let kappa0 = if seed % 2 == 0 { 0.25 } else { 0.0 };
        let p = ModelParams::derive(0.4, 0.6, 1.0, kappa0).unwrap();
        let (phi0, m0) = zero_mean_pair(grid, seed);
        let state = SpectralState::new(phi0.clone(), m0.clone(), p).unwrap();
        for &t in &[0.7, 5.0] {
            let coupled = semigroup::evolve(&state, t).unwrap();
            let scalar = evolve_scalar(&phi0, &m0, t, &p).unwrap();
            let scale = phi0.l2_norm();
            for i in 0..grid.len() {
                let d = (coupled.phi.data[i] - scalar.phi.data[i]).norm();
                assert!(d <= 1e-12 * scale, "seed {seed}, t {t}, mode {i}: {d:.2e}");
            }
        }
    }
}

/// The diffusion-wave amplitude of the momentum feeds the same divided
/// differences as the scalar solve; the Morawetz dissipation integral must
/// therefore equal the coupled-system space-time integral of |grad phi|^2.
#[test]
fn dissipation_matches_weighted_spacetime_integral() {
    let grid = Grid2D::new(16, 4.0).unwrap();
    let p = ModelParams::derive(0.5, 0.5, 1.0, 0.25).unwrap();
    let (phi0, m0) = zero_mean_pair(grid, 3);
    let t = 2.5;
    let ledger = morawetz::energy_ledger(&phi0, &m0, &p, t).unwrap();
    // Oracle: trapezoid of ||grad phi(tau)||^2 over [0, t].
    let n = 20_000;
    let h = t / n as f64;
    let mut acc = 0.0;
    for k in 0..=n {
        let tau = k as f64 * h;
        let s = evolve_scalar(&phi0, &m0, tau, &p).unwrap();
        let grad_sq: f64 = (0..grid.len())
            .map(|i| grid.xi_sq_of(i) * s.phi_t.data[i].norm_sqr())
            .sum::<f64>()
            * grid.mode_weight();
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        acc += w * grad_sq * h;
    }
    assert!(
        (ledger.dissipated - acc).abs() <= 1e-6 * acc,
        "closed {} vs trapezoid {}",
        ledger.dissipated,
        acc
    );
}

/// Field snapshots survive the binary format bit-for-bit and the CSV format
/// to full double precision.
#[test]
fn snapshot_formats_round_trip() {
    let grid = Grid2D::new(16, 2.0).unwrap();
    let f = rng::random_scalar(grid, 11, 1.0);
    let dir = std::env::temp_dir().join("cnsk_cross_module_io");
    std::fs::create_dir_all(&dir).unwrap();
    let bin = dir.join("f.bin");
    cnsk_spectral::field_io::write_binary(&f, &bin).unwrap();
    let back = cnsk_spectral::field_io::read_binary(&bin).unwrap();
    assert_eq!(back.data, f.data);
    assert_eq!(back.repr, Repr::Spectral);

    let csv = dir.join("f.csv");
    cnsk_spectral::field_io::write_csv(&f, &csv).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "k1,k2,re,im");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    let re: f64 = first[2].parse().unwrap();
    assert_eq!(re, f.data[0].re);
    std::fs::remove_dir_all(&dir).ok();
}

/// Continuum low-frequency machinery against the box: for the same analytic
/// datum the lattice sum over the low-frequency ball approximates the polar
/// quadrature while the horizon guard holds.
#[test]
fn box_and_continuum_lowfreq_agree() {
    use cnsk_spectral::lowfreq::{self, AnalyticDatum, DatumKind, Kernel, QuadOpts};
    let p = ModelParams::derive(0.5, 0.5, 1.0, 0.25).unwrap();
    let datum = AnalyticDatum::new(DatumKind::Gaussian, 1.0, 1.0);
    let grid = Grid2D::new(128, 32.0 * std::f64::consts::PI).unwrap();
    let c1 = lowfreq::c1(&p);
    for &t in &[1.0, 10.0, 100.0] {
        let continuum =
            lowfreq::lowfreq_norm_sq(&datum, Kernel::HeatComparison, t, &p, QuadOpts::default())
                .unwrap();
        let mut lattice = 0.0;
        for i in 0..grid.len() {
            let xi = grid.xi_of(i);
            let r2 = xi[0] * xi[0] + xi[1] * xi[1];
            if r2.sqrt() > c1 {
                continue;
            }
            let kernel = (-r2 * t).exp();
            lattice += kernel * kernel * datum.hat(xi).norm_sqr();
        }
        lattice *= grid.mode_weight();
        assert!(
            (lattice - continuum).abs() <= 2e-2 * continuum,
            "t = {t}: lattice {lattice} vs continuum {continuum}"
        );
    }
}
