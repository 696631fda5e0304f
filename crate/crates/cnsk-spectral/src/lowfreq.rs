//! Grid-free verification of the low-frequency asymptotics.
//!
//! The long-time behavior of the diffusion-wave momentum is governed by the
//! integral
//!
//! ```text
//! I(t) = (2 pi)^{-2} int_{|xi| <= c1} |kernel(t, xi)|^2 |m0_hat(xi)|^2 dxi,
//! ```
//!
//! whose accumulation over `[1, t]` grows like `log t` exactly when
//! `m0_hat(0) != 0` and stays bounded when the datum has zero mean. The box
//! simulator cannot sustain this regime past `t = O(L^2)`, so everything here
//! stays on the continuum: the datum's transform is a closed form and the
//! only error source is polar quadrature (Gauss-Legendre radially on panels
//! geometrically refined toward the origin, trapezoid in angle, refined until
//! the relative change drops below 1e-9).
//!
//! With this Fourier normalization the polar-coordinates constant is
//! `C_omega = 2 pi / (2 pi)^2 = 1 / (2 pi)`: for a radial datum,
//! `I(t) = C_omega int_0^{c1} |kernel|^2 |m0_hat(r)|^2 r dr`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{divided_diff_e1, CutoffRadii, ModelParams};
use crate::quad::{gauss_legendre, integrate_panels};
use crate::timeseries::TimeSeries;

/// Closed-form initial datum class for the continuum checks.
///
/// Each kind has an exact Fourier transform evaluable at any wavenumber:
///
/// * `Gaussian`: `a e^{-|x|^2/(2 s^2)}`, transform `a 2 pi s^2 e^{-s^2 |xi|^2 / 2}`;
/// * `DerivGaussian`: the `x1`-derivative of the Gaussian (zero mean);
/// * `GaussianDifference`: difference of two unit-mass Gaussians of widths
///   `s` and `s2`, transform `a (e^{-s^2 |xi|^2/2} - e^{-s2^2 |xi|^2/2})`
///   (zero mean);
/// * `RadialBump`: compactly supported `a (1 - |x|^2/R^2)^2_+`, transform
///   `16 pi R^2 a J_3(R|xi|)/(R|xi|)^3`.
///
/// A center offset multiplies the transform by `e^{-i xi . x0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DatumKind {
    Gaussian,
    DerivGaussian,
    GaussianDifference { second_width: f64 },
    RadialBump,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticDatum {
    pub kind: DatumKind,
    pub amplitude: f64,
    pub width: f64,
    pub offset: [f64; 2],
}

impl AnalyticDatum {
    pub fn new(kind: DatumKind, amplitude: f64, width: f64) -> Self {
        Self {
            kind,
            amplitude,
            width,
            offset: [0.0, 0.0],
        }
    }

    /// Exact Fourier transform at `xi`.
    pub fn hat(&self, xi: [f64; 2]) -> Complex64 {
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        let s = self.width;
        let base = match self.kind {
            DatumKind::Gaussian => Complex64::new(
                self.amplitude * 2.0 * std::f64::consts::PI * s * s * (-0.5 * s * s * r2).exp(),
                0.0,
            ),
            DatumKind::DerivGaussian => Complex64::new(
                self.amplitude * 2.0 * std::f64::consts::PI * s * s * (-0.5 * s * s * r2).exp(),
                0.0,
            ) * Complex64::new(0.0, xi[0]),
            DatumKind::GaussianDifference { second_width } => Complex64::new(
                self.amplitude
                    * ((-0.5 * s * s * r2).exp() - (-0.5 * second_width * second_width * r2).exp()),
                0.0,
            ),
            DatumKind::RadialBump => Complex64::new(
                16.0 * std::f64::consts::PI
                    * s
                    * s
                    * self.amplitude
                    * crate::special::j3_over_x3(s * r2.sqrt()),
                0.0,
            ),
        };
        if self.offset == [0.0, 0.0] {
            base
        } else {
            let phase = -(xi[0] * self.offset[0] + xi[1] * self.offset[1]);
            base * Complex64::new(phase.cos(), phase.sin())
        }
    }

    /// `m0_hat(0)` in closed form.
    pub fn hat_at_zero(&self) -> f64 {
        match self.kind {
            DatumKind::Gaussian => {
                self.amplitude * 2.0 * std::f64::consts::PI * self.width * self.width
            }
            DatumKind::DerivGaussian | DatumKind::GaussianDifference { .. } => 0.0,
            DatumKind::RadialBump => {
                std::f64::consts::PI * self.width * self.width * self.amplitude / 3.0
            }
        }
    }

    /// Zero-mean (Hardy-compatible) flag; equivalent to `hat_at_zero == 0`.
    pub fn zero_mean(&self) -> bool {
        self.hat_at_zero() == 0.0
    }

    /// `|x| datum` is integrable for every kind in this class.
    pub fn has_moment(&self) -> bool {
        true
    }

    /// Exact angular reduction where available: for a centered datum,
    /// `|hat(r omega)|^2 = R(r) g(theta)` with `g = 1` (radial kinds) or
    /// `g = cos^2 theta` (the derivative kind), so the angular integral is
    /// `2 pi` or `pi` analytically and only the radial slice along `e1`
    /// needs quadrature. Offset data fall back to full polar quadrature.
    fn angular_factor(&self) -> Option<f64> {
        if self.offset != [0.0, 0.0] {
            return None;
        }
        match self.kind {
            DatumKind::DerivGaussian => Some(std::f64::consts::PI),
            _ => Some(2.0 * std::f64::consts::PI),
        }
    }
}

/// Comparison kernel for the low-frequency integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// `e^{-|xi|^2 t}`, the normalized heat comparison of the two-sided bound.
    HeatComparison,
    /// The exact potential-part kernel `E1(t, xi)`.
    K1Exact,
}

impl Kernel {
    fn eval(self, t: f64, r: f64, p: &ModelParams) -> f64 {
        match self {
            Kernel::HeatComparison => (-r * r * t).exp(),
            Kernel::K1Exact => divided_diff_e1(t, r * r, p),
        }
    }

    /// Maximum radial phase rate of the kernel's oscillation. The exact
    /// kernel oscillates like `cos(A t sqrt(|D(r^2)|))` below the degeneracy
    /// radius, with phase derivative of order `gamma t`; the heat comparison
    /// does not oscillate at all.
    fn phase_rate(self, t: f64, p: &ModelParams) -> f64 {
        match self {
            Kernel::HeatComparison => 0.0,
            Kernel::K1Exact => p.gamma * t,
        }
    }
}

/// Low-frequency comparison radius `c1` for a parameter set.
pub fn c1(p: &ModelParams) -> f64 {
    CutoffRadii::for_params(p).c1
}

/// Constants `Q1 = int_0^{c1} e^{-2s^2} s^3 ds` and
/// `Q2 = int_0^inf e^{-2s^2} s^3 ds = 1/8`, in closed form:
/// `Q1 = (1 - (1 + 2 c1^2) e^{-2 c1^2}) / 8`.
pub fn q_constants(c1: f64) -> (f64, f64) {
    assert!(c1 > 0.0);
    let e = (-2.0 * c1 * c1).exp();
    ((1.0 - (1.0 + 2.0 * c1 * c1) * e) / 8.0, 0.125)
}

/// Linear-weight companions of [`q_constants`],
/// `P1 = int_0^{c1} e^{-2s^2} s ds = (1 - e^{-2 c1^2})/4` and
/// `P2 = int_0^inf e^{-2s^2} s ds = 1/4`.
///
/// These are the radial moments that actually bracket the accumulated
/// low-frequency integral: substituting `s = r sqrt(t)` in `I(t)` leaves the
/// measure `s ds`, so the growth rate of the accumulation satisfies
/// `C_omega |m0_hat(0)|^2 P1 <= d(accumulation)/d(log t) <= C_omega |m0_hat(0)|^2 P2`
/// for `t >= 1`. The cubic-weight pair `Q1`, `Q2` bounds the curvature error
/// term of the same derivation, not the slope.
pub fn p_constants(c1: f64) -> (f64, f64) {
    assert!(c1 > 0.0);
    ((1.0 - (-2.0 * c1 * c1).exp()) / 4.0, 0.25)
}

/// Slope bracket for the log-growth fit of the heat-comparison accumulation:
/// `[C_omega |m0_hat(0)|^2 P1, C_omega |m0_hat(0)|^2 P2]`.
pub fn slope_bracket(c1: f64, hat_at_zero: f64) -> (f64, f64) {
    let c_omega = 1.0 / (2.0 * std::f64::consts::PI);
    let (p1, p2) = p_constants(c1);
    let scale = c_omega * hat_at_zero * hat_at_zero;
    (scale * p1, scale * p2)
}

/// Quadrature controls for [`lowfreq_norm_sq`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOpts {
    pub rel_tol: f64,
    pub max_refinements: u32,
}

impl Default for QuadOpts {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            max_refinements: 6,
        }
    }
}

/// Radial panel chain on `[0, c1]`: geometrically refined toward the origin
/// so the kernel scale `1/sqrt(1 + t)` is always resolved, then subdivided
/// wherever the kernel's oscillation (phase rate `gamma t` for the exact
/// kernel) would exceed a quarter period per panel. The subdivision is only
/// applied below the envelope radius where `e^{-2 A r^2 t}` is above 1e-20;
/// beyond it the integrand is dead regardless of phase.
fn radial_panels(kernel: Kernel, c1: f64, t: f64, p: &ModelParams, extra_levels: u32) -> Vec<f64> {
    let scale = c1 * (1.0 + 2.0 * t).sqrt();
    let levels = (scale.log2().ceil() as i64).clamp(3, 60) as u32 + 2 + extra_levels;
    let mut breaks = Vec::with_capacity(levels as usize + 2);
    breaks.push(0.0);
    for j in (0..=levels).rev() {
        breaks.push(c1 / 2.0_f64.powi(j as i32));
    }
    let rate = kernel.phase_rate(t, p);
    if rate == 0.0 {
        return breaks;
    }
    let h_osc = std::f64::consts::FRAC_PI_2 / rate / 2.0_f64.powi(extra_levels as i32);
    let r_env = (23.0 / (p.a * t).max(1e-300)).sqrt().min(c1);
    let mut refined = Vec::with_capacity(breaks.len());
    refined.push(0.0);
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let width = b - a;
        if a < r_env && width > h_osc {
            let pieces = ((width / h_osc).ceil() as usize).min(1 << 22);
            for k in 1..pieces {
                refined.push(a + width * k as f64 / pieces as f64);
            }
        }
        refined.push(b);
    }
    refined
}

#[allow(clippy::too_many_arguments)]
fn polar_pass(
    datum: &AnalyticDatum,
    kernel: Kernel,
    t: f64,
    p: &ModelParams,
    c1_radius: f64,
    n_theta: usize,
    extra_levels: u32,
    gl_order: usize,
) -> f64 {
    let rule = gauss_legendre(gl_order);
    let breaks = radial_panels(kernel, c1_radius, t, p, extra_levels);
    let norm = 1.0 / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
    if let Some(factor) = datum.angular_factor() {
        // Separable angular dependence: one radial quadrature suffices.
        let mut f = |r: f64| {
            let ker = kernel.eval(t, r, p);
            ker * ker * datum.hat([r, 0.0]).norm_sqr() * r
        };
        return factor * integrate_panels(&mut f, &breaks, &rule) * norm;
    }
    let dtheta = 2.0 * std::f64::consts::PI / n_theta as f64;
    let mut acc = 0.0;
    // Uniform trapezoid in angle (periodic, spectrally accurate), panels of
    // Gauss-Legendre in radius.
    for k in 0..n_theta {
        let theta = k as f64 * dtheta;
        let omega = [theta.cos(), theta.sin()];
        let mut f = |r: f64| {
            let ker = kernel.eval(t, r, p);
            let m = datum.hat([r * omega[0], r * omega[1]]).norm_sqr();
            ker * ker * m * r
        };
        acc += integrate_panels(&mut f, &breaks, &rule);
    }
    acc * dtheta * norm
}

/// `(2 pi)^{-2} int_{|xi| <= c1} |kernel(t, xi)|^2 |m0_hat(xi)|^2 dxi`
/// by adaptive polar quadrature.
pub fn lowfreq_norm_sq(
    datum: &AnalyticDatum,
    kernel: Kernel,
    t: f64,
    p: &ModelParams,
    opts: QuadOpts,
) -> Result<f64> {
    lowfreq_norm_sq_at_radius(datum, kernel, t, p, c1(p), opts)
}

/// Same as [`lowfreq_norm_sq`] with an explicit integration radius.
pub fn lowfreq_norm_sq_at_radius(
    datum: &AnalyticDatum,
    kernel: Kernel,
    t: f64,
    p: &ModelParams,
    radius: f64,
    opts: QuadOpts,
) -> Result<f64> {
    debug_assert!(t >= 0.0);
    let offset_r = (datum.offset[0] * datum.offset[0] + datum.offset[1] * datum.offset[1]).sqrt();
    let mut n_theta = 16.max(8 * (radius * offset_r).ceil() as usize);
    let mut extra = 0;
    let mut prev = polar_pass(datum, kernel, t, p, radius, n_theta, extra, 16);
    let mut last_change = f64::INFINITY;
    for _ in 0..opts.max_refinements {
        n_theta *= 2;
        extra += 1;
        let next = polar_pass(datum, kernel, t, p, radius, n_theta, extra, 24);
        last_change = (next - prev).abs() / next.abs().max(1e-300);
        prev = next;
        if last_change < opts.rel_tol {
            return Ok(next);
        }
    }
    // Absolute floor: values this small are returned as-is (pure roundoff).
    if prev.abs() < 1e-290 {
        return Ok(prev);
    }
    Err(Error::QuadratureNoConvergence { last_change })
}

/// Sampled low-frequency integral with its running time accumulation.
#[derive(Debug, Clone)]
pub struct LowFreqSeries {
    pub times: Vec<f64>,
    /// `I(t)` at each sample.
    pub values: Vec<f64>,
    /// `int_{t_0}^{t_k} I(tau) dtau`.
    pub cumulative: Vec<f64>,
}

impl LowFreqSeries {
    pub fn value_series(&self) -> TimeSeries {
        TimeSeries::new(self.times.clone(), self.values.clone())
    }

    pub fn cumulative_series(&self) -> TimeSeries {
        TimeSeries::new(self.times.clone(), self.cumulative.clone())
    }

    /// CSV rows `t,I,cumulative` with 17-significant-digit floats.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,I,cumulative\n");
        for i in 0..self.times.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e}\n",
                self.times[i], self.values[i], self.cumulative[i]
            ));
        }
        out
    }

    /// Increments of the accumulation over each full decade `[10^k, 10^{k+1}]`
    /// present in the sample range. Sample times are matched to within 1e-9
    /// relative, which the geometric grids used here guarantee.
    pub fn decade_increments(&self) -> Vec<f64> {
        let find = |target: f64| -> Option<usize> {
            self.times
                .iter()
                .position(|&t| (t - target).abs() <= 1e-9 * target)
        };
        let mut out = Vec::new();
        let mut k = self.times[0].log10().round() as i32;
        loop {
            let (a, b) = (10f64.powi(k), 10f64.powi(k + 1));
            match (find(a), find(b)) {
                (Some(i), Some(j)) => out.push(self.cumulative[j] - self.cumulative[i]),
                _ => break,
            }
            k += 1;
        }
        out
    }
}

/// Accumulate `I(t)` over an increasing time grid: the series of sampled
/// values plus the cumulative integral, each inter-sample interval evaluated
/// by adaptive Simpson in `log tau` to relative tolerance 1e-8.
pub fn accumulate_i(
    datum: &AnalyticDatum,
    kernel: Kernel,
    p: &ModelParams,
    t_grid: &[f64],
    opts: QuadOpts,
) -> Result<LowFreqSeries> {
    assert!(!t_grid.is_empty());
    assert!(t_grid.windows(2).all(|w| w[1] > w[0]), "t_grid must increase");
    assert!(t_grid[0] >= 0.0);
    let mut values = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        values.push(lowfreq_norm_sq(datum, kernel, t, p, opts)?);
    }
    let mut cumulative = vec![0.0];
    let mut failed: Option<Error> = None;
    for w in t_grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        // Substitute tau = e^u so long decades integrate with few panels.
        let integral = if a > 0.0 {
            let mut f = |u: f64| {
                let tau = u.exp();
                match lowfreq_norm_sq(datum, kernel, tau, p, opts) {
                    Ok(v) => v * tau,
                    Err(e) => {
                        failed = Some(e);
                        0.0
                    }
                }
            };
            crate::quad::adaptive_simpson(&mut f, a.ln(), b.ln(), 1e-8)
        } else {
            let mut f = |tau: f64| match lowfreq_norm_sq(datum, kernel, tau, p, opts) {
                Ok(v) => v,
                Err(e) => {
                    failed = Some(e);
                    0.0
                }
            };
            crate::quad::adaptive_simpson(&mut f, a, b, 1e-8)
        };
        if let Some(e) = failed.take() {
            return Err(e);
        }
        let prev = *cumulative.last().unwrap();
        cumulative.push(prev + integral);
    }
    Ok(LowFreqSeries {
        times: t_grid.to_vec(),
        values,
        cumulative,
    })
}
