//! Run reports: per-check results plus provenance, rendered as key=value
//! text. CSV artifacts are written separately and listed in the manifest.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    /// value must be <= threshold
    Le,
    /// value must be >= threshold
    Ge,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub cmp: Cmp,
    pub pass: bool,
}

impl Check {
    pub fn le(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            cmp: Cmp::Le,
            pass: value <= threshold && value.is_finite(),
        }
    }

    pub fn ge(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            cmp: Cmp::Ge,
            pass: value >= threshold && value.is_finite(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.cmp {
            Cmp::Le => "<=",
            Cmp::Ge => ">=",
        };
        write!(
            f,
            "check name={} value={:.16e} {op} threshold={:.16e} pass={}",
            self.name, self.value, self.threshold, self.pass
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub experiment: String,
    pub config_echo: String,
    pub checks: Vec<Check>,
    pub files: Vec<String>,
    pub wall_time_s: f64,
    pub failure: Option<String>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str("# cnsk run report\n");
        s.push_str(&format!("experiment={}\n", self.experiment));
        s.push_str(&format!("version={}\n", env!("CARGO_PKG_VERSION")));
        s.push_str(&format!("wall_time_s={:.3}\n", self.wall_time_s));
        s.push_str(&format!("result={}\n", if self.passed() { "pass" } else { "fail" }));
        if let Some(f) = &self.failure {
            s.push_str(&format!("error={f}\n"));
        }
        s.push_str("\n[config]\n");
        s.push_str(&self.config_echo);
        s.push_str("\n[checks]\n");
        for c in &self.checks {
            s.push_str(&format!("{c}\n"));
        }
        s.push_str("\n[files]\n");
        for f in &self.files {
            s.push_str(&format!("file={f}\n"));
        }
        s
    }
}
