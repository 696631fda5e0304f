//! Exact-in-time evolution of the linearized system and its decompositions.
//!
//! Per mode the Green symbol maps `(phi0_hat, m0_hat)` to
//!
//! ```text
//! phi_hat(t) = G_phiphi phi0_hat - i gamma E0 (xi . m0_hat)
//! m_hat(t)   = -i xi (gamma + kappa0 |xi|^2) E0 phi0_hat
//!              + e^{-nu |xi|^2 t} (I - P) m0_hat + E1 P m0_hat
//! ```
//!
//! with `P = xi xi^T / |xi|^2` the potential projector. The momentum thus
//! splits into the Stokes flow part (heat flow of the solenoidal component)
//! and the diffusion wave part `m(t) - K_nu(t) * m_{0,in}`, which per mode is
//! `-i xi (gamma + kappa0|xi|^2) E0 phi0_hat + E1 P m0_hat`.
//!
//! Every component is an exponential sum in time, so space-time `L^2`
//! integrals are evaluated in closed form; a documented trapezoid rule serves
//! as the independent oracle.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid2D, Repr, ScalarField, VectorField};
use crate::params::{
    self, cutoff_weights, divided_diff_e0, divided_diff_e1, green_phi_phi, heat_symbol,
    lambda_pm, ModelParams,
};
use crate::signal::ExpSignal;

/// Fourier-side state of the coupled system at one time instant.
#[derive(Debug, Clone)]
pub struct SpectralState {
    pub phi: ScalarField,
    pub m: VectorField,
    pub params: ModelParams,
    pub time: f64,
}

impl SpectralState {
    pub fn new(phi: ScalarField, m: VectorField, params: ModelParams) -> Result<Self> {
        if phi.grid != m.grid {
            return Err(Error::GridMismatch);
        }
        if phi.repr != Repr::Spectral || m.repr != Repr::Spectral {
            return Err(Error::RepresentationMismatch {
                expected: "spectral",
                got: "physical",
            });
        }
        Ok(Self {
            phi,
            m,
            params,
            time: 0.0,
        })
    }

    pub fn grid(&self) -> Grid2D {
        self.phi.grid
    }

    /// `sqrt(||phi||^2 + ||m||^2)`.
    pub fn l2_norm(&self) -> f64 {
        let a = self.phi.l2_norm();
        let b = self.m.l2_norm();
        (a * a + b * b).sqrt()
    }

    /// Discrete `H^s x H^{s-1}`-type energy norm in which the semigroup is a
    /// contraction: per mode `(1+|xi|^2)^{s-1} [ w(xi)|phi_hat|^2 + |m_hat|^2 ]`
    /// with the energy weight `w = (gamma + kappa0|xi|^2)/gamma`.
    pub fn energy_norm(&self, s: i32) -> f64 {
        let g = self.grid();
        let w = g.mode_weight();
        let mut acc = 0.0;
        for i in 0..g.len() {
            let x = g.xi_sq_of(i);
            let sob = (1.0 + x).powi(s - 1);
            let m2 = self.m.comps[0][i].norm_sqr() + self.m.comps[1][i].norm_sqr();
            acc += sob * (mode_energy_weight(&self.params, x) * self.phi.data[i].norm_sqr() + m2);
        }
        (acc * w).sqrt()
    }
}

/// Energy weight `(gamma + kappa0 |xi|^2) / gamma` making the per-mode
/// quadratic form non-increasing along the flow.
pub fn mode_energy_weight(p: &ModelParams, xi_sq: f64) -> f64 {
    (p.gamma + p.kappa0 * xi_sq) / p.gamma
}

/// Evolve a time-zero state to time `t` through the exact Green symbol.
///
/// The zero mode is preserved exactly (mass conservation); the odd coupling
/// terms are skipped on the unpaired Nyquist rows so real fields stay real.
pub fn evolve(state0: &SpectralState, t: f64) -> Result<SpectralState> {
    if t < 0.0 {
        return Err(Error::InvalidTime(t));
    }
    if state0.time != 0.0 {
        return Err(Error::InvalidTime(state0.time));
    }
    let g = state0.grid();
    let p = &state0.params;
    let mut phi = ScalarField::zeros(g, Repr::Spectral);
    let mut m = VectorField::zeros(g, Repr::Spectral);
    for i in 0..g.len() {
        let xi = g.xi_of(i);
        let x = xi[0] * xi[0] + xi[1] * xi[1];
        let gpp = green_phi_phi(t, x, p);
        let e0 = divided_diff_e0(t, x, p);
        let e1 = divided_diff_e1(t, x, p);
        let h = heat_symbol(t, x, p.nu);
        let phi0 = state0.phi.data[i];
        let m0 = [state0.m.comps[0][i], state0.m.comps[1][i]];
        let xi_dot_m0 = m0[0] * xi[0] + m0[1] * xi[1];
        let nyquist = g.on_nyquist(i);

        let mut phi_t = gpp * phi0;
        if !nyquist {
            phi_t -= Complex64::new(0.0, p.gamma * e0) * xi_dot_m0;
        }
        phi.data[i] = phi_t;

        // Potential projection of m0 (zero at the zero mode).
        let pm = if x > 0.0 {
            [xi_dot_m0 * xi[0] / x, xi_dot_m0 * xi[1] / x]
        } else {
            [Complex64::new(0.0, 0.0); 2]
        };
        for c in 0..2 {
            let mut v = h * (m0[c] - pm[c]) + e1 * pm[c];
            if !nyquist {
                v -= Complex64::new(0.0, xi[c] * (p.gamma + p.kappa0 * x) * e0) * phi0;
            }
            m.comps[c][i] = v;
        }
    }
    Ok(SpectralState {
        phi,
        m,
        params: *p,
        time: t,
    })
}

/// Helmholtz split of a spectral vector field into (solenoidal, potential).
pub fn project_helmholtz(m: &VectorField) -> Result<(VectorField, VectorField)> {
    let sol = m.apply_matrix_symbol(|xi| {
        let s = params::helmholtz_symbol(xi);
        [
            [Complex64::new(s[0][0], 0.0), Complex64::new(s[0][1], 0.0)],
            [Complex64::new(s[1][0], 0.0), Complex64::new(s[1][1], 0.0)],
        ]
    })?;
    let mut pot = m.clone();
    for c in 0..2 {
        for i in 0..pot.comps[c].len() {
            pot.comps[c][i] -= sol.comps[c][i];
        }
    }
    Ok((sol, pot))
}

/// Diffusion-wave part of the momentum, `m(t) - K_nu(t) * m_{0,in}`:
/// the evolved momentum minus the heat flow of the solenoidal part of the
/// initial momentum.
pub fn diffusion_wave_momentum(state0: &SpectralState, t: f64) -> Result<VectorField> {
    let evolved = evolve(state0, t)?;
    let (sol0, _) = project_helmholtz(&state0.m)?;
    let p = state0.params;
    let heated = sol0.apply_scalar_symbol(|xi| {
        Complex64::new(
            heat_symbol(t, xi[0] * xi[0] + xi[1] * xi[1], p.nu),
            0.0,
        )
    })?;
    let mut out = evolved.m;
    for c in 0..2 {
        for i in 0..out.comps[c].len() {
            out.comps[c][i] -= heated.comps[c][i];
        }
    }
    Ok(out)
}

/// Which solution component a per-mode amplitude or space-time integral
/// refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    /// Density `phi(t)`.
    Phi,
    /// Full diffusion wave `m(t) - K_nu(t) * m_{0,in}` (the `phi0` coupling
    /// plus the potential-part kernel).
    DwMomentum,
    /// Only the potential-part kernel `E1 P m0_hat` (the diffusion wave with
    /// the density coupling suppressed).
    K1Momentum,
    /// Stokes flow part `e^{-nu |xi|^2 t} (I - P) m0_hat`.
    StokesMomentum,
}

/// Exact exponential decomposition of one component at one mode: one signal
/// per field dimension (1 for the density, 2 for momentum components).
///
/// At a confluent double root (detected by
/// `|lambda_+ - lambda_-| < 1e-8 A |xi|^2`) the pair collapses to
/// degree-1 polynomial terms on the common exponent.
#[derive(Debug, Clone)]
pub struct ModeAmplitude {
    pub signals: Vec<ExpSignal>,
    pub confluent: bool,
}

impl ModeAmplitude {
    pub fn exponents(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for s in &self.signals {
            for t in &s.terms {
                if !out.iter().any(|e: &Complex64| (e - t.exponent).norm() == 0.0) {
                    out.push(t.exponent);
                }
            }
        }
        out
    }

    /// `sum_i |signal_i(t)|^2` at one time.
    pub fn norm_sqr_at(&self, t: f64) -> f64 {
        self.signals.iter().map(|s| s.eval(t).norm_sqr()).sum()
    }

    /// Exact `int_0^T sum_i |signal_i|^2 dt`.
    pub fn l2_time_integral(&self, t_end: f64) -> f64 {
        self.signals.iter().map(|s| s.l2_time_integral(t_end)).sum()
    }
}

fn confluence_threshold(p: &ModelParams, xi_sq: f64) -> f64 {
    1e-8 * (p.a * xi_sq).max(1e-300)
}

/// Exponential decomposition of the density mode with explicit initial data
/// `(phi0, phi'(0))`: the solution of
/// `z'' + (nu+nu_tilde)|xi|^2 z' + (kappa0 gamma |xi|^4 + gamma^2 |xi|^2) z = 0`.
/// Shared by the coupled-system amplitudes and the scalar-equation checkers.
pub fn density_mode_signal(
    phi0: Complex64,
    phi_dot0: Complex64,
    xi_sq: f64,
    p: &ModelParams,
) -> ExpSignal {
    let roots = lambda_pm(xi_sq, p);
    let (lp, lm) = (roots.lambda_plus, roots.lambda_minus);
    let mut s = ExpSignal::default();
    if (lp - lm).norm() < confluence_threshold(p, xi_sq) {
        let lam = 0.5 * (lp + lm);
        s.push(phi0, lam, 0);
        s.push(phi_dot0 - lam * phi0, lam, 1);
    } else {
        let denom = lp - lm;
        s.push((-lm * phi0 + phi_dot0) / denom, lp, 0);
        s.push((lp * phi0 - phi_dot0) / denom, lm, 0);
    }
    s
}

/// Per-mode exponential decomposition of the chosen component.
///
/// On the unpaired Nyquist rows the odd coupling terms are suppressed, the
/// same convention [`evolve`] applies, so the signals reproduce the evolved
/// fields at every lattice index.
pub fn mode_amplitude(state0: &SpectralState, component: Component, idx: usize) -> ModeAmplitude {
    let g = state0.grid();
    let p = &state0.params;
    let xi = g.xi_of(idx);
    let x = xi[0] * xi[0] + xi[1] * xi[1];
    let nyquist = g.on_nyquist(idx);
    let phi0 = state0.phi.data[idx];
    let m0 = [state0.m.comps[0][idx], state0.m.comps[1][idx]];
    let xi_dot_m0 = m0[0] * xi[0] + m0[1] * xi[1];
    let pm = if x > 0.0 {
        [xi_dot_m0 * xi[0] / x, xi_dot_m0 * xi[1] / x]
    } else {
        [Complex64::new(0.0, 0.0); 2]
    };
    let sol = [m0[0] - pm[0], m0[1] - pm[1]];
    let roots = lambda_pm(x, p);
    let (lp, lm) = (roots.lambda_plus, roots.lambda_minus);
    let confluent = (lp - lm).norm() < confluence_threshold(p, x);
    let coupling = Complex64::new(0.0, -(p.gamma + p.kappa0 * x));
    // phi'(0) in the scalar reduction of this mode.
    let phi_dot0 = if nyquist {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, -p.gamma) * xi_dot_m0
    };

    let mut signals = Vec::new();
    match component {
        Component::Phi => {
            signals.push(density_mode_signal(phi0, phi_dot0, x, p));
        }
        Component::DwMomentum | Component::K1Momentum => {
            for c in 0..2 {
                let mut s = ExpSignal::default();
                let drive = if component == Component::DwMomentum && !nyquist {
                    coupling * xi[c] * phi0
                } else {
                    Complex64::new(0.0, 0.0)
                };
                if confluent {
                    let lam = 0.5 * (lp + lm);
                    // E0 -> t e^{lam t}, E1 -> (1 + lam t) e^{lam t}.
                    s.push(pm[c], lam, 0);
                    s.push(drive + lam * pm[c], lam, 1);
                } else {
                    let denom = lp - lm;
                    s.push((drive + lp * pm[c]) / denom, lp, 0);
                    s.push(-(drive + lm * pm[c]) / denom, lm, 0);
                }
                signals.push(s);
            }
        }
        Component::StokesMomentum => {
            for coef in sol {
                let mut s = ExpSignal::default();
                s.push(coef, Complex64::new(-p.nu * x, 0.0), 0);
                signals.push(s);
            }
        }
    }
    ModeAmplitude { signals, confluent }
}

/// Closed-form `int_0^T ||component(tau)||^2 dtau` summed over the lattice
/// with the Parseval weight.
pub fn spacetime_l2_closed_form(
    state0: &SpectralState,
    component: Component,
    t_end: f64,
) -> Result<f64> {
    let g = state0.grid();
    let w = g.mode_weight();
    let mut acc = 0.0;
    for i in 0..g.len() {
        acc += mode_amplitude(state0, component, i).l2_time_integral(t_end);
    }
    let total = acc * w;
    if !total.is_finite() {
        return Err(Error::NonFinite("spacetime_l2_closed_form"));
    }
    Ok(total)
}

/// Reproducible quadrature time grid: `0`, then `steps` geometric intervals
/// from `T 1e-4` to `T/10` (ratio `1000^{1/steps}`), then `steps` uniform
/// intervals from `T/10` to `T`.
pub fn quadrature_time_grid(t_end: f64, steps: usize) -> Vec<f64> {
    let mut nodes = Vec::with_capacity(2 * steps + 2);
    nodes.push(0.0);
    let start = t_end * 1e-4;
    let ratio = 1000.0_f64.powf(1.0 / steps as f64);
    let mut t = start;
    for _ in 0..=steps {
        nodes.push(t.min(t_end / 10.0));
        t *= ratio;
    }
    let lo = t_end / 10.0;
    let h = (t_end - lo) / steps as f64;
    for k in 1..=steps {
        nodes.push(lo + h * k as f64);
    }
    nodes
}

/// Composite-trapezoid oracle for the space-time integral, on the documented
/// grid of [`quadrature_time_grid`]. Results are bit-reproducible for a given
/// `(T, steps)`.
pub fn spacetime_l2_quadrature(
    state0: &SpectralState,
    component: Component,
    t_end: f64,
    steps: usize,
) -> f64 {
    assert!(steps >= 16, "steps must be at least 16");
    let g = state0.grid();
    let w = g.mode_weight();
    let mut amps = Vec::with_capacity(g.len());
    for i in 0..g.len() {
        amps.push(mode_amplitude(state0, component, i));
    }
    let norm_sq = |t: f64| -> f64 { amps.iter().map(|a| a.norm_sqr_at(t)).sum::<f64>() * w };
    let nodes = quadrature_time_grid(t_end, steps);
    let mut acc = 0.0;
    let mut prev_t = nodes[0];
    let mut prev_v = norm_sq(prev_t);
    for &t in &nodes[1..] {
        let v = norm_sq(t);
        acc += 0.5 * (t - prev_t) * (prev_v + v);
        prev_t = t;
        prev_v = v;
    }
    acc
}

/// Multiply both state components by the high-frequency weight `w_M + w_inf`.
pub fn high_freq_part(state: &SpectralState) -> Result<SpectralState> {
    scale_by_cutoff(state, |w: &params::CutoffWeights| w.w_m + w.w_inf)
}

/// Multiply both state components by the low-frequency weight `w_1`.
pub fn low_freq_part(state: &SpectralState) -> Result<SpectralState> {
    scale_by_cutoff(state, |w: &params::CutoffWeights| w.w1)
}

fn scale_by_cutoff(
    state: &SpectralState,
    pick: impl Fn(&params::CutoffWeights) -> f64,
) -> Result<SpectralState> {
    let p = state.params;
    let sym = |xi: [f64; 2]| {
        let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        Complex64::new(pick(&cutoff_weights(r, &p)), 0.0)
    };
    Ok(SpectralState {
        phi: state.phi.apply_symbol(sym)?,
        m: state.m.apply_scalar_symbol(sym)?,
        params: state.params,
        time: state.time,
    })
}

/// Full 3x3 Green symbol at one wavenumber.
pub fn green_matrix(t: f64, xi: [f64; 2], p: &ModelParams) -> [[Complex64; 3]; 3] {
    let x = xi[0] * xi[0] + xi[1] * xi[1];
    let gpp = green_phi_phi(t, x, p);
    let e0 = divided_diff_e0(t, x, p);
    let e1 = divided_diff_e1(t, x, p);
    let h = heat_symbol(t, x, p.nu);
    let proj = if x > 0.0 {
        [
            [xi[0] * xi[0] / x, xi[0] * xi[1] / x],
            [xi[1] * xi[0] / x, xi[1] * xi[1] / x],
        ]
    } else {
        [[0.0; 2]; 2]
    };
    let mut g = [[Complex64::new(0.0, 0.0); 3]; 3];
    g[0][0] = Complex64::new(gpp, 0.0);
    for c in 0..2 {
        g[0][1 + c] = Complex64::new(0.0, -p.gamma * e0 * xi[c]);
        g[1 + c][0] = Complex64::new(0.0, -xi[c] * (p.gamma + p.kappa0 * x) * e0);
        for d in 0..2 {
            let delta = if c == d { 1.0 } else { 0.0 };
            g[1 + c][1 + d] =
                Complex64::new(h * (delta - proj[c][d]) + e1 * proj[c][d], 0.0);
        }
    }
    g
}

fn mat_mul(a: &[[Complex64; 3]; 3], b: &[[Complex64; 3]; 3]) -> [[Complex64; 3]; 3] {
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn frobenius(a: &[[Complex64; 3]; 3]) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .map(|v| v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Max relative semigroup defect `||G(t+s) - G(t) G(s)||_F / ||G(t+s)||_F`
/// over the lattice of the given state.
pub fn semigroup_property_check(state: &SpectralState, t: f64, s: f64) -> f64 {
    let g = state.grid();
    let p = &state.params;
    let mut worst = 0.0_f64;
    for i in 0..g.len() {
        let xi = g.xi_of(i);
        let gts = green_matrix(t + s, xi, p);
        let gt = green_matrix(t, xi, p);
        let gs = green_matrix(s, xi, p);
        let prod = mat_mul(&gt, &gs);
        let mut diff = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                diff += (gts[r][c] - prod[r][c]).norm_sqr();
            }
        }
        let rel = diff.sqrt() / frobenius(&gts).max(1e-300);
        worst = worst.max(rel);
    }
    worst
}
