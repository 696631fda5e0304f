//! Exponential-polynomial signals in time.
//!
//! Every entry of the per-mode solution formulas is a finite sum
//! `sum_i c_i t^{p_i} e^{mu_i t}` with `Re mu_i <= 0`; polynomial factors
//! (degree at most 1) appear only at confluent double roots. This module
//! provides the canonical representation together with exact antiderivatives
//! of products of two such signals, which is what every space-time integral
//! in the toolkit reduces to.

use num_complex::Complex64;

/// One term `c t^deg e^{mu t}`.
#[derive(Debug, Clone, Copy)]
pub struct ExpTerm {
    pub coef: Complex64,
    pub exponent: Complex64,
    /// Polynomial degree in `t` (0 or 1; products reach 2).
    pub degree: u8,
}

/// A finite sum of exponential-polynomial terms.
#[derive(Debug, Clone, Default)]
pub struct ExpSignal {
    pub terms: Vec<ExpTerm>,
}

impl ExpSignal {
    pub fn new(terms: Vec<ExpTerm>) -> Self {
        Self { terms }
    }

    pub fn push(&mut self, coef: Complex64, exponent: Complex64, degree: u8) {
        self.terms.push(ExpTerm {
            coef,
            exponent,
            degree,
        });
    }

    /// Evaluate the signal at time `t`.
    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let mut v = term.coef * (term.exponent * t).exp();
            for _ in 0..term.degree {
                v *= t;
            }
            acc += v;
        }
        acc
    }

    /// Time derivative, term by term: `d/dt [c t^p e^{mu t}]
    /// = c mu t^p e^{mu t} + c p t^{p-1} e^{mu t}`.
    pub fn derivative(&self) -> ExpSignal {
        let mut out = ExpSignal::default();
        for term in &self.terms {
            out.push(term.coef * term.exponent, term.exponent, term.degree);
            if term.degree > 0 {
                out.push(
                    term.coef * term.degree as f64,
                    term.exponent,
                    term.degree - 1,
                );
            }
        }
        out
    }

    /// Antiderivative vanishing at `t = 0`, valid when every exponent is
    /// nonzero: `int_0^t c e^{mu s} ds = (c/mu)(e^{mu t} - 1)` and the
    /// degree-1 analog. The constant parts are collected into a single
    /// degree-0 term with exponent 0.
    pub fn antiderivative(&self) -> ExpSignal {
        let mut out = ExpSignal::default();
        let mut constant = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let mu = term.exponent;
            if mu.norm() == 0.0 {
                // int_0^t c s^p ds = c t^{p+1}/(p+1); only needed for the
                // zero mode, where degrees stay at 0.
                out.push(term.coef / (term.degree as f64 + 1.0), mu, term.degree + 1);
                continue;
            }
            match term.degree {
                0 => {
                    out.push(term.coef / mu, mu, 0);
                    constant -= term.coef / mu;
                }
                1 => {
                    // int_0^t c s e^{mu s} ds = c [ (t/mu) e^{mu t} - (e^{mu t}-1)/mu^2 ]
                    out.push(term.coef / mu, mu, 1);
                    out.push(-term.coef / (mu * mu), mu, 0);
                    constant += term.coef / (mu * mu);
                }
                _ => unreachable!("degrees above 1 do not arise in solution formulas"),
            }
        }
        if constant.norm() > 0.0 {
            out.push(constant, Complex64::new(0.0, 0.0), 0);
        }
        out
    }

    /// Exact `int_0^T |signal(t)|^2 dt`.
    ///
    /// Expands the square into pairwise products and integrates each
    /// `t^{p_i+p_j} e^{(mu_i + conj mu_j) t}` in closed form.
    pub fn l2_time_integral(&self, t_end: f64) -> f64 {
        let mut acc = 0.0;
        for a in &self.terms {
            for b in &self.terms {
                let z = a.exponent + b.exponent.conj();
                let p = a.degree + b.degree;
                let omega = omega_p(p, z, t_end);
                acc += (a.coef * b.coef.conj() * omega).re;
            }
        }
        acc
    }

    /// Exact `int_0^T t^extra |signal(t)|^2 dt` (the weighted variant used by
    /// the time-weighted energy estimates).
    pub fn weighted_l2_time_integral(&self, extra: u8, t_end: f64) -> f64 {
        let mut acc = 0.0;
        for a in &self.terms {
            for b in &self.terms {
                let z = a.exponent + b.exponent.conj();
                let p = a.degree + b.degree + extra;
                let omega = omega_p(p, z, t_end);
                acc += (a.coef * b.coef.conj() * omega).re;
            }
        }
        acc
    }

    /// Exact `int_0^T Re[a(t) conj(b(t))] dt` for two signals.
    pub fn cross_time_integral(a: &ExpSignal, b: &ExpSignal, t_end: f64) -> f64 {
        let mut acc = 0.0;
        for ta in &a.terms {
            for tb in &b.terms {
                let z = ta.exponent + tb.exponent.conj();
                let p = ta.degree + tb.degree;
                let omega = omega_p(p, z, t_end);
                acc += (ta.coef * tb.coef.conj() * omega).re;
            }
        }
        acc
    }
}

/// `int_0^T t^p e^{z t} dt` for `p <= 4`, `Re z <= 0`.
///
/// For small `|z T|` the upward recursion cancels catastrophically, so the
/// series `T^{p+1} sum_k (zT)^k / (k! (k+p+1))` is used there instead.
pub fn omega_p(p: u8, z: Complex64, t_end: f64) -> Complex64 {
    debug_assert!(p <= 4);
    debug_assert!(z.re <= 1e-12);
    if t_end == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let zt = z * t_end;
    if zt.norm() < 0.5 {
        return omega_series(p, zt, t_end);
    }
    let ezt = zt.exp();
    let mut omega = (ezt - 1.0) / z;
    let mut t_pow = 1.0;
    for k in 1..=p {
        t_pow *= t_end;
        omega = (t_pow * ezt - k as f64 * omega) / z;
    }
    omega
}

fn omega_series(p: u8, zt: Complex64, t_end: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0); // (zT)^k / k!
    for k in 0..24_u32 {
        sum += pow / (k as f64 + p as f64 + 1.0);
        pow *= zt / (k as f64 + 1.0);
        if pow.norm() < 1e-20 {
            break;
        }
    }
    sum * t_end.powi(p as i32 + 1)
}
