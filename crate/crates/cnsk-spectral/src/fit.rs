//! Least-squares rate fits for sampled diagnostics.

use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;

/// Slope/intercept/goodness-of-fit of a linear model `y = a x + b`.
#[derive(Debug, Clone, Copy)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: usize,
}

/// Ordinary least squares of `y` against `x`.
pub fn fit_linear(xs: &[f64], ys: &[f64]) -> FitResult {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    let denom = n * sxx - sx * sx;
    let num = n * sxy - sx * sy;
    let slope = num / denom;
    let intercept = (sxx * sy - sxy * sx) / denom;
    let sst = n * syy - sy * sy;
    let r_squared = if sst > 0.0 {
        (num * num) / (denom * sst)
    } else {
        // Constant series: a zero-slope model explains it perfectly.
        1.0
    };
    FitResult {
        slope,
        intercept,
        r_squared,
        samples: xs.len(),
    }
}

/// Least squares of `value` against `ln t` over samples inside the window
/// `[t_lo, t_hi]`. Requires `t_lo >= 1` and at least 8 samples.
pub fn fit_log_growth(series: &TimeSeries, t_lo: f64, t_hi: f64) -> Result<FitResult> {
    assert!(t_lo >= 1.0, "log-growth window must start at t >= 1");
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in series.times.iter().zip(series.values.iter()) {
        if t >= t_lo && t <= t_hi {
            xs.push(t.ln());
            ys.push(v);
        }
    }
    if xs.len() < 8 {
        return Err(Error::DegenerateFitWindow {
            lo: t_lo,
            hi: t_hi,
            count: xs.len(),
            need: 8,
        });
    }
    Ok(fit_linear(&xs, &ys))
}

/// Least squares of `ln value` against `ln t`; the slope is the power-law
/// exponent. Requires positive times and values.
pub fn fit_power_law(series: &TimeSeries) -> Result<FitResult> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in series.times.iter().zip(series.values.iter()) {
        if t <= 0.0 || v <= 0.0 {
            return Err(Error::NonFinite("fit_power_law on non-positive sample"));
        }
        xs.push(t.ln());
        ys.push(v.ln());
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateFitWindow {
            lo: f64::NAN,
            hi: f64::NAN,
            count: xs.len(),
            need: 2,
        });
    }
    Ok(fit_linear(&xs, &ys))
}

/// Least squares of `ln value` against `t`; the slope is the exponential
/// rate. Non-positive samples are rejected.
pub fn fit_exponential_rate(series: &TimeSeries) -> Result<FitResult> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in series.times.iter().zip(series.values.iter()) {
        if v <= 0.0 {
            return Err(Error::NonFinite("fit_exponential_rate on non-positive value"));
        }
        xs.push(t);
        ys.push(v.ln());
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateFitWindow {
            lo: f64::NAN,
            hi: f64::NAN,
            count: xs.len(),
            need: 2,
        });
    }
    Ok(fit_linear(&xs, &ys))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_log_model_is_recovered() {
        let times: Vec<f64> = (0..40).map(|i| 10.0_f64.powf(i as f64 / 10.0)).collect();
        let values: Vec<f64> = times.iter().map(|t| 3.0 * t.ln() + 1.0).collect();
        let s = TimeSeries::new(times, values);
        let fit = fit_log_growth(&s, 1.0, 1e4).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let times: Vec<f64> = (0..20).map(|i| 1.0 + i as f64).collect();
        let values = vec![2.5; 20];
        let s = TimeSeries::new(times, values);
        let fit = fit_log_growth(&s, 1.0, 100.0).unwrap();
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn narrow_window_is_rejected() {
        let s = TimeSeries::new(vec![1.0, 2.0, 3.0], vec![0.0, 1.0, 2.0]);
        assert!(fit_log_growth(&s, 1.0, 3.0).is_err());
    }

    #[test]
    fn exponential_rate_recovered() {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.5).collect();
        let values: Vec<f64> = times.iter().map(|t| 7.0 * (-1.3 * t).exp()).collect();
        let s = TimeSeries::new(times, values);
        let fit = fit_exponential_rate(&s).unwrap();
        assert!((fit.slope + 1.3).abs() < 1e-10);
    }

    #[test]
    fn power_law_exponent_recovered() {
        let times: Vec<f64> = (1..40).map(|i| 1.5_f64.powi(i)).collect();
        let values: Vec<f64> = times.iter().map(|t| 0.4 * t.powf(-2.0)).collect();
        let s = TimeSeries::new(times, values);
        let fit = fit_power_law(&s).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-10);
        assert!((fit.intercept - 0.4_f64.ln()).abs() < 1e-10);
    }
}
