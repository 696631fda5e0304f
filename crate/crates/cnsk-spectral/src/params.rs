//! Model parameters, characteristic roots and Fourier multipliers.
//!
//! Everything downstream acts mode-by-mode in Fourier space. The density
//! component of the linearized system satisfies, per wavenumber `xi`, the
//! damped-oscillator equation
//!
//! ```text
//! z'' + (nu + nu_tilde) |xi|^2 z' + (kappa0 gamma |xi|^4 + gamma^2 |xi|^2) z = 0,
//! ```
//!
//! whose roots are
//!
//! ```text
//! lambda_pm(xi) = -A (|xi|^2 ± sqrt(|xi|^4 - B^2 |xi|^2 - K^2 |xi|^4)),
//! A = (nu + nu_tilde)/2,  B = 2 gamma/(nu + nu_tilde),  K = 2 sqrt(kappa0 gamma)/(nu + nu_tilde).
//! ```
//!
//! The divided differences of `exp(lambda t)` over the root pair (called `E0`
//! and `E1` here) are the building blocks of the Green matrix. They are
//! evaluated through `sinh`-type identities that stay finite and accurate
//! across the double-root locus `|xi| = B / sqrt(1 - K^2)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Regime classification by the capillarity number `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `K < 1`: real roots appear beyond the degeneracy radius.
    SubCritical,
    /// `K = 1`: roots are complex for every nonzero wavenumber, `Re = -A|xi|^2` exactly.
    Critical,
    /// `K > 1`: roots complex for every nonzero wavenumber.
    SuperCritical,
}

/// Physical coefficients of the linearized system plus derived constants.
///
/// `nu` is the shear viscosity, `nu_tilde = mu + mu'` the combined viscosity
/// entering the gradient-of-divergence term, `gamma = sqrt(P'(1))` the sound
/// coefficient and `kappa0 = kappa / gamma` the reduced capillarity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub nu: f64,
    pub nu_tilde: f64,
    pub gamma: f64,
    pub kappa0: f64,
    /// `(nu + nu_tilde) / 2`
    pub a: f64,
    /// `2 gamma / (nu + nu_tilde)`
    pub b: f64,
    /// `2 sqrt(kappa0 gamma) / (nu + nu_tilde)`
    pub k: f64,
    pub regime: Regime,
}

impl ModelParams {
    /// Derive the full parameter set from the four physical coefficients.
    ///
    /// The regime is assigned by exact comparison of `K` against 1; `K` is
    /// stored exactly as computed, no tolerance is applied.
    pub fn derive(nu: f64, nu_tilde: f64, gamma: f64, kappa0: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::ParamDomain(format!("nu must be positive, got {nu}")));
        }
        if !(nu + nu_tilde > 0.0) || !nu_tilde.is_finite() {
            return Err(Error::ParamDomain(format!(
                "nu + nu_tilde must be positive, got {}",
                nu + nu_tilde
            )));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::ParamDomain(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if !(kappa0 >= 0.0) || !kappa0.is_finite() {
            return Err(Error::ParamDomain(format!(
                "kappa0 must be non-negative, got {kappa0}"
            )));
        }
        let total = nu + nu_tilde;
        let a = 0.5 * total;
        let b = 2.0 * gamma / total;
        let k = 2.0 * (kappa0 * gamma).sqrt() / total;
        let regime = if k < 1.0 {
            Regime::SubCritical
        } else if k == 1.0 {
            Regime::Critical
        } else {
            Regime::SuperCritical
        };
        Ok(Self {
            nu,
            nu_tilde,
            gamma,
            kappa0,
            a,
            b,
            k,
            regime,
        })
    }

    /// Combined viscosity `nu + nu_tilde`.
    pub fn total_viscosity(&self) -> f64 {
        self.nu + self.nu_tilde
    }

    /// Whether the coefficients are already in the normalized form
    /// `nu + nu_tilde = 1`, `gamma = 1` used by the scalar-equation machinery.
    pub fn is_normalized(&self) -> bool {
        (self.total_viscosity() - 1.0).abs() <= 1e-12 && (self.gamma - 1.0).abs() <= 1e-12
    }

    /// Rescale to the normalized form `nu + nu_tilde = 1`, `gamma = 1`.
    ///
    /// Returns the normalized parameters together with the time and space
    /// scale factors `alpha`, `beta` such that `t = alpha t'`, `x = beta x'`
    /// maps the original equation onto the normalized one. The split between
    /// `nu` and `nu_tilde` is kept proportional. `K` (and hence the regime)
    /// is invariant under this rescaling.
    pub fn normalized(&self) -> (Self, f64, f64) {
        let total = self.total_viscosity();
        let beta = self.gamma / total;
        let alpha = self.gamma * beta;
        let kappa0_prime = self.kappa0 * self.gamma / (total * total);
        let p = Self::derive(self.nu / total, self.nu_tilde / total, 1.0, kappa0_prime)
            .expect("rescaled coefficients stay in domain");
        (p, alpha, beta)
    }

    /// Characteristic discriminant `|xi|^4 - B^2 |xi|^2 - K^2 |xi|^4`
    /// as a function of the squared wavenumber.
    pub fn discriminant(&self, xi_sq: f64) -> f64 {
        (1.0 - self.k * self.k) * xi_sq * xi_sq - self.b * self.b * xi_sq
    }

    /// Squared radius `B^2 / (1 - K^2)` of the double-root locus
    /// (`None` when `K >= 1`: the roots never collide away from zero).
    pub fn double_root_xi_sq(&self) -> Option<f64> {
        if self.k < 1.0 {
            Some(self.b * self.b / (1.0 - self.k * self.k))
        } else {
            None
        }
    }
}

/// Both characteristic roots at one squared wavenumber.
#[derive(Debug, Clone, Copy)]
pub struct RootPair {
    /// `-A(|xi|^2 + sqrt(D))`
    pub lambda_plus: Complex64,
    /// `-A(|xi|^2 - sqrt(D))`
    pub lambda_minus: Complex64,
    /// `D = |xi|^4 - B^2|xi|^2 - K^2|xi|^4`
    pub discriminant: f64,
}

impl RootPair {
    /// Residual of the characteristic polynomial at `z`, for testing against
    /// the bound `1e-10 (1 + |xi|^4)`.
    pub fn char_poly_residual(z: Complex64, xi_sq: f64, p: &ModelParams) -> f64 {
        let poly = z * z
            + z * (p.total_viscosity() * xi_sq)
            + Complex64::new(
                p.kappa0 * p.gamma * xi_sq * xi_sq + p.gamma * p.gamma * xi_sq,
                0.0,
            );
        poly.norm()
    }
}

/// Characteristic roots `lambda_pm` at squared wavenumber `xi_sq >= 0`.
///
/// Uses the principal square root of the discriminant; for `D < 0` the two
/// roots are complex conjugates, and at `xi_sq = 0` both are exactly zero.
pub fn lambda_pm(xi_sq: f64, p: &ModelParams) -> RootPair {
    debug_assert!(xi_sq >= 0.0);
    let d = p.discriminant(xi_sq);
    let sq = if d >= 0.0 {
        Complex64::new(d.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-d).sqrt())
    };
    let base = Complex64::new(xi_sq, 0.0);
    RootPair {
        lambda_plus: -p.a * (base + sq),
        lambda_minus: -p.a * (base - sq),
        discriminant: d,
    }
}

/// Threshold on `|A s t|` below which the `sinh(z)/z` and `cosh(z)` factors
/// switch to their series, making the confluent limit exact.
const SERIES_THRESHOLD: f64 = 1e-4;

/// `sinh(sqrt(w))/sqrt(w)` as a function of `w = z^2` (entire, even in `z`).
/// Series truncated at the `z^6` term below the threshold; the omitted term
/// is `w^4/9! < 1e-38` there.
fn sinhc_sq(w: f64) -> f64 {
    if w.abs() < SERIES_THRESHOLD * SERIES_THRESHOLD {
        1.0 + w / 6.0 + w * w / 120.0 + w * w * w / 5040.0
    } else if w > 0.0 {
        let z = w.sqrt();
        z.sinh() / z
    } else {
        let z = (-w).sqrt();
        z.sin() / z
    }
}

/// `cosh(sqrt(w))` as a function of `w = z^2`.
fn cosh_sq(w: f64) -> f64 {
    if w.abs() < SERIES_THRESHOLD * SERIES_THRESHOLD {
        1.0 + w / 2.0 + w * w / 24.0 + w * w * w / 720.0
    } else if w > 0.0 {
        w.sqrt().cosh()
    } else {
        (-w).sqrt().cos()
    }
}

/// Divided difference `E0(t, xi) = (e^{lambda_+ t} - e^{lambda_- t}) / (lambda_+ - lambda_-)`.
///
/// Evaluated as `t e^{-A|xi|^2 t} sinh(A s t)/(A s t)` with `s = sqrt(D)`, so
/// the confluent limit `E0 -> t e^{-A|xi|^2 t}` at a double root is exact.
/// When the roots are real and well separated the `expm1` form
/// `t e^{lambda_- t} expm1(d)/d`, `d = (lambda_+ - lambda_-) t`, is used
/// instead: it never overflows (both roots are non-positive) and carries no
/// cancellation.
///
/// The value is real for every admissible parameter set; complex conjugate
/// roots contribute `sin`/`cos` factors.
pub fn divided_diff_e0(t: f64, xi_sq: f64, p: &ModelParams) -> f64 {
    debug_assert!(t >= 0.0 && xi_sq >= 0.0);
    if t == 0.0 {
        return 0.0;
    }
    let d = p.discriminant(xi_sq);
    let at = p.a * t;
    let w = at * at * d;
    if w.abs() < SERIES_THRESHOLD * SERIES_THRESHOLD || w <= 0.0 {
        // Confluent or oscillatory branch: bounded factors, direct evaluation.
        t * (-p.a * xi_sq * t).exp() * sinhc_sq(w)
    } else {
        // Real separated roots.
        let sd = d.sqrt();
        let lam_minus = -p.a * (xi_sq - sd);
        let dt = -2.0 * p.a * sd * t; // (lambda_+ - lambda_-) t, negative
        t * (lam_minus * t).exp() * dt.exp_m1() / dt
    }
}

/// Divided difference `E1 = dE0/dt
///   = (lambda_+ e^{lambda_+ t} - lambda_- e^{lambda_- t}) / (lambda_+ - lambda_-)`.
///
/// At `t = 0` this is exactly 1.
pub fn divided_diff_e1(t: f64, xi_sq: f64, p: &ModelParams) -> f64 {
    debug_assert!(t >= 0.0 && xi_sq >= 0.0);
    if t == 0.0 {
        return 1.0;
    }
    let d = p.discriminant(xi_sq);
    let at = p.a * t;
    let w = at * at * d;
    let axt = p.a * xi_sq * t;
    if w.abs() < SERIES_THRESHOLD * SERIES_THRESHOLD || w <= 0.0 {
        (-axt).exp() * (cosh_sq(w) - axt * sinhc_sq(w))
    } else {
        let sd = d.sqrt();
        let lam_plus = -p.a * (xi_sq + sd);
        let lam_minus = -p.a * (xi_sq - sd);
        let dt = (lam_plus - lam_minus) * t;
        // lambda_+ e^{lambda_+ t} - lambda_- e^{lambda_- t}
        //   = e^{lambda_- t} (lambda_+ expm1(dt) + (lambda_+ - lambda_-))
        (lam_minus * t).exp() * (1.0 + lam_plus * t * dt.exp_m1() / dt)
    }
}

/// Density-density entry of the Green symbol,
/// `(lambda_+ e^{lambda_- t} - lambda_- e^{lambda_+ t}) / (lambda_+ - lambda_-)`.
///
/// Computed through the identity `G_phiphi = E1 + 2A|xi|^2 E0` (which uses
/// `lambda_+ + lambda_- = -2A|xi|^2`), avoiding cancellation near the double
/// root.
pub fn green_phi_phi(t: f64, xi_sq: f64, p: &ModelParams) -> f64 {
    divided_diff_e1(t, xi_sq, p) + 2.0 * p.a * xi_sq * divided_diff_e0(t, xi_sq, p)
}

/// Heat semigroup symbol `e^{-nu |xi|^2 t}`.
pub fn heat_symbol(t: f64, xi_sq: f64, nu: f64) -> f64 {
    debug_assert!(t >= 0.0);
    (-nu * xi_sq * t).exp()
}

/// Symbol of the solenoidal (Helmholtz) projector, `I - xi xi^T / |xi|^2`.
///
/// At `xi = 0` the identity is returned: the zero mode is assigned to the
/// divergence-free part (constants are divergence-free).
pub fn helmholtz_symbol(xi: [f64; 2]) -> [[f64; 2]; 2] {
    let xi_sq = xi[0] * xi[0] + xi[1] * xi[1];
    if xi_sq == 0.0 {
        return [[1.0, 0.0], [0.0, 1.0]];
    }
    let inv = 1.0 / xi_sq;
    [
        [1.0 - xi[0] * xi[0] * inv, -xi[0] * xi[1] * inv],
        [-xi[0] * xi[1] * inv, 1.0 - xi[1] * xi[1] * inv],
    ]
}

/// Symbols of the inverse elliptic operators used by the auxiliary solves:
/// `dl = (|xi|^2 + kappa0 |xi|^4)^{-1}` (inverse of `-Delta + kappa0 Delta^2`,
/// zero at the zero mode by the zero-mean convention) and
/// `t_op = (1 + kappa0 |xi|^2)^{-1}` (the smoothing operator, 1 at zero).
pub fn inverse_elliptic_symbols(xi_sq: f64, kappa0: f64) -> (f64, f64) {
    debug_assert!(xi_sq >= 0.0);
    let t_op = 1.0 / (1.0 + kappa0 * xi_sq);
    let dl = if xi_sq > 0.0 {
        1.0 / (xi_sq + kappa0 * xi_sq * xi_sq)
    } else {
        0.0
    };
    (dl, t_op)
}

/// Partition-of-unity weights over low / middle / high frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffWeights {
    pub w1: f64,
    pub w_m: f64,
    pub w_inf: f64,
}

/// Plateau and ramp radii of the frequency cutoffs for a parameter set.
///
/// For `K != 1`, with `beta = B / (2 sqrt(|1 - K^2|))`:
/// * `beta > 1`: low cutoff ramps over `[1/2, 1]`;
/// * `beta <= 1 < sqrt(2) beta`: ramps over `[beta, 1]`;
/// * `sqrt(2) beta <= 1`: ramps over `[beta, sqrt(2) beta]`;
///
/// and the high cutoff always ramps over
/// `[2 sqrt(2) beta, 4 beta] = [sqrt(2) B, 2 B] / sqrt(|1 - K^2|)`.
/// For `K = 1` both cutoffs ramp over `[1/2, 1]` and the middle band is empty.
///
/// `|1 - K^2|` is used uniformly in every radius.
#[derive(Debug, Clone, Copy)]
pub struct CutoffRadii {
    /// Low cutoff: 1 on `[0, low_lo]`, 0 on `[low_hi, inf)`.
    pub low_lo: f64,
    pub low_hi: f64,
    /// High cutoff: 0 on `[0, high_lo]`, 1 on `[high_hi, inf)`.
    pub high_lo: f64,
    pub high_hi: f64,
    /// Low-frequency comparison radius `c1` used by the asymptotic estimates.
    pub c1: f64,
}

impl CutoffRadii {
    pub fn for_params(p: &ModelParams) -> Self {
        if p.k == 1.0 {
            return Self {
                low_lo: 0.5,
                low_hi: 1.0,
                high_lo: 0.5,
                high_hi: 1.0,
                c1: 1.0,
            };
        }
        let root = (1.0 - p.k * p.k).abs().sqrt();
        let beta = p.b / (2.0 * root);
        let (low_lo, low_hi, c1) = if beta > 1.0 {
            (0.5, 1.0, 1.0)
        } else if 1.0 < std::f64::consts::SQRT_2 * beta {
            // Ramp interval [beta, 1]; degenerate exactly at beta = 1,
            // where we fall back to the [1/2, 1] ramp.
            if beta < 1.0 {
                (beta, 1.0, 1.0)
            } else {
                (0.5, 1.0, 1.0)
            }
        } else {
            let hi = std::f64::consts::SQRT_2 * beta;
            (beta, hi, hi)
        };
        Self {
            low_lo,
            low_hi,
            high_lo: 2.0 * std::f64::consts::SQRT_2 * beta,
            high_hi: 4.0 * beta,
            c1,
        }
    }
}

/// The standard smooth step built from the bump quotient
/// `psi(s) / (psi(s) + psi(1-s))` with `psi(s) = exp(-1/s)` for `s > 0`.
/// Equals 0 for `s <= 0`, 1 for `s >= 1`, and is C-infinity in between.
fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        a / (a + b)
    }
}

/// Partition-of-unity cutoff weights at wavenumber magnitude `xi_norm`.
///
/// `w1 + w_m + w_inf = 1` pointwise. The plateau radii follow
/// [`CutoffRadii::for_params`]; the transition is the smooth bump-quotient
/// ramp. For `K = 1` the middle weight is identically zero.
pub fn cutoff_weights(xi_norm: f64, p: &ModelParams) -> CutoffWeights {
    debug_assert!(xi_norm >= 0.0);
    let r = CutoffRadii::for_params(p);
    let w1 = 1.0 - smooth_step((xi_norm - r.low_lo) / (r.low_hi - r.low_lo));
    let w_inf = if p.k == 1.0 {
        1.0 - w1
    } else {
        smooth_step((xi_norm - r.high_lo) / (r.high_hi - r.high_lo))
    };
    let w_m = ((1.0 - w1) - w_inf).max(0.0);
    CutoffWeights { w1, w_m, w_inf }
}
