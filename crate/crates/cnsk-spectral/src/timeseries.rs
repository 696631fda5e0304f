//! Sampled scalar diagnostics and their CSV form.
//!
//! CSV files carry a `t,value` header and 17-significant-digit decimal
//! floats, enough for exact round-trip of 64-bit values.

use std::path::Path;

use crate::error::Result;

#[derive(Debug, Clone, Default)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(times.len(), values.len());
        Self { times, values }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, t: f64, v: f64) {
        self.times.push(t);
        self.values.push(v);
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Render as `t,value` CSV text.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,value\n");
        for (t, v) in self.times.iter().zip(self.values.iter()) {
            out.push_str(&format!("{t:.16e},{v:.16e}\n"));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Geometric time grid from `t0` to `t1` with `per_decade` samples per
/// decade (endpoints included; ratio `10^{1/per_decade}` exactly).
pub fn geometric_times(t0: f64, t1: f64, per_decade: usize) -> Vec<f64> {
    assert!(t0 > 0.0 && t1 > t0 && per_decade >= 1);
    let ratio = 10.0_f64.powf(1.0 / per_decade as f64);
    let mut out = vec![t0];
    let mut t = t0;
    loop {
        t *= ratio;
        if t >= t1 * (1.0 - 1e-12) {
            out.push(t1);
            return out;
        }
        out.push(t);
    }
}
