//! Initial-data builders for box experiments.
//!
//! Data are defined directly on the wavenumber lattice by sampling exact
//! continuum transforms, so they are band-limited by construction and the
//! represented field is real (Hermitian coefficients) without any transform
//! in the data path.

use num_complex::Complex64;

use crate::grid::{Grid2D, ScalarField, VectorField};

/// Scalar (density) datum kinds.
///
/// Widths are physical: a Gaussian of width `s` has transform
/// `2 pi s^2 e^{-s^2 |xi|^2 / 2}`. The `Deriv*` kinds multiply by `i xi_1`
/// (zero mean); `DerivLaplaceGaussian` multiplies by `-i xi_1 |xi|^2`, whose
/// cubic vanishing at `xi = 0` makes space-time integrals saturate quickly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarDatumKind {
    Gaussian,
    DerivGaussian,
    DerivLaplaceGaussian,
    GaussianDifference { second_width: f64 },
}

pub fn scalar_datum(
    grid: Grid2D,
    kind: ScalarDatumKind,
    amplitude: f64,
    width: f64,
    offset: [f64; 2],
) -> ScalarField {
    let s2 = width * width;
    let scale = amplitude * 2.0 * std::f64::consts::PI * s2;
    ScalarField::from_spectral_fn(grid, |xi| {
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        let gauss = (-0.5 * s2 * r2).exp();
        let base = match kind {
            ScalarDatumKind::Gaussian => Complex64::new(scale * gauss, 0.0),
            ScalarDatumKind::DerivGaussian => Complex64::new(0.0, xi[0] * scale * gauss),
            ScalarDatumKind::DerivLaplaceGaussian => {
                Complex64::new(0.0, -xi[0] * r2 * scale * gauss)
            }
            ScalarDatumKind::GaussianDifference { second_width } => {
                let g2 = (-0.5 * second_width * second_width * r2).exp();
                Complex64::new(amplitude * (gauss - g2), 0.0)
            }
        };
        let phase = -(xi[0] * offset[0] + xi[1] * offset[1]);
        base * Complex64::new(phase.cos(), phase.sin())
    })
}

/// Divergence-free momentum datum kinds, built as `i xi_perp` times a radial
/// spectral profile (`xi_perp = (-xi_2, xi_1)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolenoidalDatumKind {
    /// Profile `2 pi s^2 e^{-s^2 |xi|^2/2}` (the curl of a physical Gaussian
    /// of width `s`).
    CurlGaussian,
    /// Profile `|xi|^2 (1 - |xi|^2/rho^2)^4_+` with `width = rho`: compact
    /// spectral support and cubic vanishing at the origin.
    CurlSpectralBump,
}

pub fn solenoidal_datum(
    grid: Grid2D,
    kind: SolenoidalDatumKind,
    amplitude: f64,
    width: f64,
) -> VectorField {
    VectorField::from_spectral_fn(grid, |xi| {
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        let profile = match kind {
            SolenoidalDatumKind::CurlGaussian => {
                amplitude
                    * 2.0
                    * std::f64::consts::PI
                    * width
                    * width
                    * (-0.5 * width * width * r2).exp()
            }
            SolenoidalDatumKind::CurlSpectralBump => {
                let u2 = r2 / (width * width);
                if u2 < 1.0 {
                    amplitude * r2 * (1.0 - u2).powi(4)
                } else {
                    0.0
                }
            }
        };
        [
            Complex64::new(0.0, -xi[1] * profile),
            Complex64::new(0.0, xi[0] * profile),
        ]
    })
}
