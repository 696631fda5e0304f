//! Plain-text sectioned experiment configuration.
//!
//! Format: INI-style `key = value` lines under `[section]` headers, `#` or
//! `;` comments. The `experiment` key lives above the first section. Every
//! key is validated against the schema and all problems are reported at
//! once, not just the first.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentId {
    LogGrowth,
    DensityBound,
    DensityDecay,
    EnergyIdentity,
    HighFreqDecay,
    StokesBound,
    SymbolAtlas,
    CrossValidate,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 8] = [
        ExperimentId::LogGrowth,
        ExperimentId::DensityBound,
        ExperimentId::DensityDecay,
        ExperimentId::EnergyIdentity,
        ExperimentId::HighFreqDecay,
        ExperimentId::StokesBound,
        ExperimentId::SymbolAtlas,
        ExperimentId::CrossValidate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::LogGrowth => "log-growth",
            ExperimentId::DensityBound => "density-bound",
            ExperimentId::DensityDecay => "density-decay",
            ExperimentId::EnergyIdentity => "energy-identity",
            ExperimentId::HighFreqDecay => "high-freq-decay",
            ExperimentId::StokesBound => "stokes-bound",
            ExperimentId::SymbolAtlas => "symbol-atlas",
            ExperimentId::CrossValidate => "cross-validate",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            ExperimentId::LogGrowth => {
                "continuum low-frequency accumulation: log-growth fit, slope bracket, decade table"
            }
            ExperimentId::DensityBound => {
                "space-time L2 bound of the density on the box: saturation vs growth"
            }
            ExperimentId::DensityDecay => "(1+t)||phi||^2 boundedness along the run",
            ExperimentId::EnergyIdentity => "exact energy balance of the scalar equation",
            ExperimentId::HighFreqDecay => "exponential decay rate of the high-frequency part",
            ExperimentId::StokesBound => "solenoidal heat-flow identity and space-time bound",
            ExperimentId::SymbolAtlas => "tabulate roots, divided differences and cutoffs",
            ExperimentId::CrossValidate => "closed-form vs trapezoid space-time integrals",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|e| e.name() == s)
    }

    /// Experiments whose horizons must respect the box guard.
    pub fn needs_horizon_guard(self) -> bool {
        matches!(
            self,
            ExperimentId::DensityBound
                | ExperimentId::DensityDecay
                | ExperimentId::EnergyIdentity
                | ExperimentId::StokesBound
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamsSection {
    pub nu: f64,
    pub nu_tilde: f64,
    pub gamma: f64,
    pub kappa0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSection {
    pub n: usize,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatumSection {
    pub kind: String,
    pub amplitude: f64,
    pub width: f64,
    pub second_width: f64,
    pub offset: [f64; 2],
    pub seed: u64,
    pub r_lo: f64,
    pub r_hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSection {
    pub t_start: f64,
    pub t_end: f64,
    pub per_decade: usize,
    pub horizons: Vec<f64>,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub saturation_ratio: f64,
    pub energy_defect: f64,
    pub identity_defect: f64,
    pub rate_tolerance: f64,
    pub oracle_tolerance: f64,
    pub r_squared_min: f64,
    pub decade_spread: f64,
    pub solve_residual: f64,
    pub w_residual: f64,
    pub stokes_c: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            saturation_ratio: 1.05,
            energy_defect: 1e-9,
            identity_defect: 1e-9,
            rate_tolerance: 0.10,
            oracle_tolerance: 1e-4,
            r_squared_min: 0.999,
            decade_spread: 0.02,
            solve_residual: 1e-10,
            w_residual: 1e-9,
            stokes_c: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub params: ParamsSection,
    pub grid: GridSection,
    pub datum: DatumSection,
    pub time: TimeSection,
    pub output_dir: String,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

const KNOWN_KEYS: &[(&str, &[&str])] = &[
    ("", &["experiment"]),
    ("params", &["nu", "nu_tilde", "gamma", "kappa0"]),
    ("grid", &["n", "half_width"]),
    (
        "datum",
        &[
            "kind",
            "amplitude",
            "width",
            "second_width",
            "offset_x",
            "offset_y",
            "seed",
            "r_lo",
            "r_hi",
            "count",
        ],
    ),
    ("time", &["t_start", "t_end", "per_decade", "horizons", "steps"]),
    ("output", &["dir"]),
    (
        "tolerances",
        &[
            "saturation_ratio",
            "energy_defect",
            "identity_defect",
            "rate_tolerance",
            "oracle_tolerance",
            "r_squared_min",
            "decade_spread",
            "solve_residual",
            "w_residual",
            "stokes_c",
        ],
    ),
];

/// Raw key/value map keyed by `section.key` (top level uses the bare key).
fn parse_raw(text: &str) -> Result<BTreeMap<String, String>, Vec<ConfigError>> {
    let mut map = BTreeMap::new();
    let mut errors = Vec::new();
    let mut section = String::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            match name.strip_suffix(']') {
                Some(name) => section = name.trim().to_string(),
                None => errors.push(ConfigError {
                    key: format!("line {}", lineno + 1),
                    message: "unterminated section header".into(),
                }),
            }
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => {
                let key = if section.is_empty() {
                    k.trim().to_string()
                } else {
                    format!("{section}.{}", k.trim())
                };
                // Strip trailing inline comments.
                let v = v.split(['#', ';']).next().unwrap_or("");
                map.insert(key, v.trim().to_string());
            }
            None => errors.push(ConfigError {
                key: format!("line {}", lineno + 1),
                message: format!("expected `key = value`, got `{line}`"),
            }),
        }
    }
    if errors.is_empty() {
        Ok(map)
    } else {
        Err(errors)
    }
}

struct Extractor {
    raw: BTreeMap<String, String>,
    errors: Vec<ConfigError>,
}

impl Extractor {
    fn f64_or(&mut self, key: &str, default: f64) -> f64 {
        match self.raw.get(key) {
            None => default,
            Some(v) => match v.parse::<f64>() {
                Ok(x) => x,
                Err(_) => {
                    self.errors.push(ConfigError {
                        key: key.into(),
                        message: format!("expected a number, got `{v}`"),
                    });
                    default
                }
            },
        }
    }

    fn usize_or(&mut self, key: &str, default: usize) -> usize {
        match self.raw.get(key) {
            None => default,
            Some(v) => match v.parse::<usize>() {
                Ok(x) => x,
                Err(_) => {
                    self.errors.push(ConfigError {
                        key: key.into(),
                        message: format!("expected a non-negative integer, got `{v}`"),
                    });
                    default
                }
            },
        }
    }

    fn u64_or(&mut self, key: &str, default: u64) -> u64 {
        match self.raw.get(key) {
            None => default,
            Some(v) => match v.parse::<u64>() {
                Ok(x) => x,
                Err(_) => {
                    self.errors.push(ConfigError {
                        key: key.into(),
                        message: format!("expected an unsigned integer, got `{v}`"),
                    });
                    default
                }
            },
        }
    }

    fn string_or(&mut self, key: &str, default: &str) -> String {
        self.raw
            .get(key)
            .cloned()
            .unwrap_or_else(|| default.to_string())
    }

    fn f64_list_or(&mut self, key: &str, default: &[f64]) -> Vec<f64> {
        match self.raw.get(key) {
            None => default.to_vec(),
            Some(v) => {
                let mut out = Vec::new();
                for part in v.split(',') {
                    match part.trim().parse::<f64>() {
                        Ok(x) => out.push(x),
                        Err(_) => {
                            self.errors.push(ConfigError {
                                key: key.into(),
                                message: format!("expected comma-separated numbers, got `{v}`"),
                            });
                            return default.to_vec();
                        }
                    }
                }
                out
            }
        }
    }

    fn reject(&mut self, key: &str, message: String) {
        self.errors.push(ConfigError {
            key: key.into(),
            message,
        });
    }
}

/// Defaults that make a minimal config (just the `experiment` key) valid.
fn experiment_defaults(id: ExperimentId) -> (ParamsSection, GridSection, TimeSection) {
    let params = match id {
        ExperimentId::DensityBound | ExperimentId::DensityDecay => ParamsSection {
            nu: 0.05,
            nu_tilde: 0.95,
            gamma: 1.0,
            kappa0: 0.25,
        },
        ExperimentId::StokesBound => ParamsSection {
            nu: 0.05,
            nu_tilde: 0.95,
            gamma: 1.0,
            kappa0: 0.0,
        },
        _ => ParamsSection {
            nu: 0.5,
            nu_tilde: 0.5,
            gamma: 1.0,
            kappa0: 0.25,
        },
    };
    let grid = match id {
        ExperimentId::DensityBound | ExperimentId::DensityDecay => GridSection {
            n: 128,
            half_width: 104.0 * std::f64::consts::PI,
        },
        ExperimentId::StokesBound => GridSection {
            n: 128,
            half_width: 32.0 * std::f64::consts::PI,
        },
        ExperimentId::HighFreqDecay => GridSection {
            n: 32,
            half_width: 8.0 * std::f64::consts::PI,
        },
        ExperimentId::CrossValidate => GridSection {
            n: 32,
            half_width: 16.0,
        },
        // Sized so the default horizon passes the box guard.
        ExperimentId::EnergyIdentity => GridSection {
            n: 64,
            half_width: 15.0 * std::f64::consts::PI,
        },
        _ => GridSection {
            n: 64,
            half_width: 6.0,
        },
    };
    let time = match id {
        ExperimentId::LogGrowth => TimeSection {
            t_start: 1.0,
            t_end: 1e6,
            per_decade: 8,
            horizons: vec![],
            steps: 2048,
        },
        ExperimentId::DensityBound => TimeSection {
            t_start: 1.0,
            t_end: 1e4,
            per_decade: 8,
            horizons: vec![1e2, 1e3, 1e4],
            steps: 2048,
        },
        ExperimentId::DensityDecay => TimeSection {
            t_start: 1.0,
            t_end: 1e4,
            per_decade: 8,
            horizons: vec![],
            steps: 2048,
        },
        ExperimentId::StokesBound => TimeSection {
            t_start: 1.0,
            t_end: 1e3,
            per_decade: 8,
            horizons: vec![1e2, 1e3],
            steps: 2048,
        },
        ExperimentId::HighFreqDecay => TimeSection {
            t_start: 5.0,
            t_end: 40.0,
            per_decade: 8,
            horizons: vec![],
            steps: 70,
        },
        _ => TimeSection {
            t_start: 0.1,
            t_end: 20.0,
            per_decade: 8,
            horizons: vec![],
            steps: 2048,
        },
    };
    (params, grid, time)
}

fn default_datum(id: ExperimentId) -> DatumSection {
    let kind = match id {
        ExperimentId::LogGrowth => "gaussian",
        ExperimentId::DensityBound | ExperimentId::DensityDecay => "deriv-laplace-gaussian",
        ExperimentId::StokesBound => "curl-spectral-bump",
        ExperimentId::HighFreqDecay => "spectral-annulus",
        _ => "seeded-random",
    };
    DatumSection {
        kind: kind.into(),
        amplitude: 1.0,
        width: match id {
            ExperimentId::DensityBound | ExperimentId::DensityDecay => 5.75,
            ExperimentId::StokesBound => 1.8,
            _ => 1.0,
        },
        second_width: 2.0,
        offset: [0.0, 0.0],
        seed: 42,
        r_lo: 1.5,
        r_hi: 2.0,
        count: match id {
            ExperimentId::EnergyIdentity => 20,
            ExperimentId::CrossValidate => 50,
            ExperimentId::StokesBound => 5,
            _ => 1,
        },
    }
}

const SCALAR_DATUM_KINDS: &[&str] = &[
    "gaussian",
    "deriv-gaussian",
    "deriv-laplace-gaussian",
    "gaussian-difference",
    "radial-bump",
];

fn allowed_datum_kinds(id: ExperimentId) -> &'static [&'static str] {
    match id {
        ExperimentId::LogGrowth => SCALAR_DATUM_KINDS,
        ExperimentId::DensityBound | ExperimentId::DensityDecay => &[
            "gaussian",
            "deriv-gaussian",
            "deriv-laplace-gaussian",
            "gaussian-difference",
        ],
        ExperimentId::StokesBound => &["curl-gaussian", "curl-spectral-bump"],
        ExperimentId::HighFreqDecay => &["spectral-annulus"],
        _ => &["seeded-random"],
    }
}

/// Parse and validate; either a complete config or the full error list.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, Vec<ConfigError>> {
    let raw = parse_raw(text)?;
    let mut errors = Vec::new();

    // Unknown keys.
    for key in raw.keys() {
        let (section, name) = match key.split_once('.') {
            Some((s, n)) => (s, n),
            None => ("", key.as_str()),
        };
        let known = KNOWN_KEYS
            .iter()
            .any(|(s, names)| *s == section && names.contains(&name));
        if !known {
            errors.push(ConfigError {
                key: key.clone(),
                message: "unknown key".into(),
            });
        }
    }

    let experiment = match raw.get("experiment") {
        None => {
            errors.push(ConfigError {
                key: "experiment".into(),
                message: "missing (one of: log-growth, density-bound, density-decay, \
                          energy-identity, high-freq-decay, stokes-bound, symbol-atlas, \
                          cross-validate)"
                    .into(),
            });
            None
        }
        Some(name) => match ExperimentId::from_name(name) {
            Some(id) => Some(id),
            None => {
                errors.push(ConfigError {
                    key: "experiment".into(),
                    message: format!("unknown experiment `{name}`"),
                });
                None
            }
        },
    };
    let Some(experiment) = experiment else {
        return Err(errors);
    };

    let (dparams, dgrid, dtime) = experiment_defaults(experiment);
    let ddatum = default_datum(experiment);
    let mut ex = Extractor { raw, errors };

    let params = ParamsSection {
        nu: ex.f64_or("params.nu", dparams.nu),
        nu_tilde: ex.f64_or("params.nu_tilde", dparams.nu_tilde),
        gamma: ex.f64_or("params.gamma", dparams.gamma),
        kappa0: ex.f64_or("params.kappa0", dparams.kappa0),
    };
    if !(params.nu > 0.0) {
        ex.reject("params.nu", format!("must be positive, got {}", params.nu));
    }
    if !(params.nu + params.nu_tilde > 0.0) {
        ex.reject(
            "params.nu_tilde",
            format!("nu + nu_tilde must be positive, got {}", params.nu + params.nu_tilde),
        );
    }
    if !(params.gamma > 0.0) {
        ex.reject(
            "params.gamma",
            format!("must be positive, got {}", params.gamma),
        );
    }
    if !(params.kappa0 >= 0.0) {
        ex.reject(
            "params.kappa0",
            format!("must be non-negative, got {}", params.kappa0),
        );
    }

    let grid = GridSection {
        n: ex.usize_or("grid.n", dgrid.n),
        half_width: ex.f64_or("grid.half_width", dgrid.half_width),
    };
    if grid.n < 8 || !grid.n.is_power_of_two() {
        ex.reject(
            "grid.n",
            format!("must be a power of two >= 8, got {}", grid.n),
        );
    }
    if !(grid.half_width > 0.0) {
        ex.reject(
            "grid.half_width",
            format!("must be positive, got {}", grid.half_width),
        );
    }

    let datum = DatumSection {
        kind: ex.string_or("datum.kind", &ddatum.kind),
        amplitude: ex.f64_or("datum.amplitude", ddatum.amplitude),
        width: ex.f64_or("datum.width", ddatum.width),
        second_width: ex.f64_or("datum.second_width", ddatum.second_width),
        offset: [
            ex.f64_or("datum.offset_x", 0.0),
            ex.f64_or("datum.offset_y", 0.0),
        ],
        seed: ex.u64_or("datum.seed", ddatum.seed),
        r_lo: ex.f64_or("datum.r_lo", ddatum.r_lo),
        r_hi: ex.f64_or("datum.r_hi", ddatum.r_hi),
        count: ex.usize_or("datum.count", ddatum.count),
    };
    if !allowed_datum_kinds(experiment).contains(&datum.kind.as_str()) {
        ex.reject(
            "datum.kind",
            format!(
                "`{}` not valid for {} (expected one of {:?})",
                datum.kind,
                experiment.name(),
                allowed_datum_kinds(experiment)
            ),
        );
    }
    if !(datum.width > 0.0) {
        ex.reject(
            "datum.width",
            format!("must be positive, got {}", datum.width),
        );
    }
    if datum.count == 0 {
        ex.reject("datum.count", "must be at least 1".into());
    }

    let time = TimeSection {
        t_start: ex.f64_or("time.t_start", dtime.t_start),
        t_end: ex.f64_or("time.t_end", dtime.t_end),
        per_decade: ex.usize_or("time.per_decade", dtime.per_decade),
        horizons: ex.f64_list_or("time.horizons", &dtime.horizons),
        steps: ex.usize_or("time.steps", dtime.steps),
    };
    if !(time.t_end > time.t_start) {
        ex.reject(
            "time.t_end",
            format!("must exceed t_start = {}, got {}", time.t_start, time.t_end),
        );
    }
    if time.per_decade == 0 {
        ex.reject("time.per_decade", "must be at least 1".into());
    }
    if !time.horizons.windows(2).all(|w| w[1] > w[0]) {
        ex.reject("time.horizons", "must be strictly increasing".into());
    }
    if experiment == ExperimentId::CrossValidate && time.steps < 16 {
        ex.reject("time.steps", "quadrature needs at least 16 steps".into());
    }

    // Box-truncation check for physically sized data: the box must contain
    // the datum's effective support (ten widths plus the center offset) or
    // periodic wrap-around contaminates the represented field.
    let physical_width_kinds = [
        "gaussian",
        "deriv-gaussian",
        "deriv-laplace-gaussian",
        "gaussian-difference",
    ];
    if matches!(
        experiment,
        ExperimentId::DensityBound | ExperimentId::DensityDecay
    ) && physical_width_kinds.contains(&datum.kind.as_str())
    {
        let eff_width = if datum.kind == "gaussian-difference" {
            datum.width.max(datum.second_width)
        } else {
            datum.width
        };
        let support = (datum.offset[0].powi(2) + datum.offset[1].powi(2)).sqrt()
            + 10.0 * eff_width;
        if grid.half_width < support {
            ex.reject(
                "grid.half_width",
                format!(
                    "box too small for the datum: L = {} < offset + 10 width = {support}; \
                     wrap-around would contaminate the field",
                    grid.half_width
                ),
            );
        }
    }

    // Horizon guard for box experiments: T <= 0.05 (L/pi)^2 / nu.
    if experiment.needs_horizon_guard() {
        let t_max = time
            .horizons
            .iter()
            .copied()
            .fold(time.t_end, f64::max);
        let l_over_pi = grid.half_width / std::f64::consts::PI;
        let limit = 0.05 * l_over_pi * l_over_pi / params.nu;
        if t_max > limit {
            ex.reject(
                "time.t_end",
                format!(
                    "horizon guard violated: T = {t_max} > 0.05 (L/pi)^2 / nu = {limit:.6}; \
                     enlarge the box or shorten the run"
                ),
            );
        }
    }

    let output_dir = ex.string_or("output.dir", "out");
    let dt = Tolerances::default();
    let tolerances = Tolerances {
        saturation_ratio: ex.f64_or("tolerances.saturation_ratio", dt.saturation_ratio),
        energy_defect: ex.f64_or("tolerances.energy_defect", dt.energy_defect),
        identity_defect: ex.f64_or("tolerances.identity_defect", dt.identity_defect),
        rate_tolerance: ex.f64_or("tolerances.rate_tolerance", dt.rate_tolerance),
        oracle_tolerance: ex.f64_or("tolerances.oracle_tolerance", dt.oracle_tolerance),
        r_squared_min: ex.f64_or("tolerances.r_squared_min", dt.r_squared_min),
        decade_spread: ex.f64_or("tolerances.decade_spread", dt.decade_spread),
        solve_residual: ex.f64_or("tolerances.solve_residual", dt.solve_residual),
        w_residual: ex.f64_or("tolerances.w_residual", dt.w_residual),
        stokes_c: ex.f64_or("tolerances.stokes_c", dt.stokes_c),
    };

    if ex.errors.is_empty() {
        Ok(ExperimentConfig {
            experiment,
            params,
            grid,
            datum,
            time,
            output_dir,
            tolerances,
        })
    } else {
        Err(ex.errors)
    }
}

/// Echo the effective configuration as key=value lines for the run report.
pub fn echo_config(c: &ExperimentConfig) -> String {
    let mut s = String::new();
    s.push_str(&format!("experiment={}\n", c.experiment.name()));
    s.push_str(&format!(
        "params.nu={}\nparams.nu_tilde={}\nparams.gamma={}\nparams.kappa0={}\n",
        c.params.nu, c.params.nu_tilde, c.params.gamma, c.params.kappa0
    ));
    s.push_str(&format!(
        "grid.n={}\ngrid.half_width={:.16e}\n",
        c.grid.n, c.grid.half_width
    ));
    s.push_str(&format!(
        "datum.kind={}\ndatum.amplitude={}\ndatum.width={}\ndatum.seed={}\ndatum.count={}\n",
        c.datum.kind, c.datum.amplitude, c.datum.width, c.datum.seed, c.datum.count
    ));
    s.push_str(&format!(
        "time.t_start={}\ntime.t_end={}\ntime.per_decade={}\ntime.steps={}\n",
        c.time.t_start, c.time.t_end, c.time.per_decade, c.time.steps
    ));
    if !c.time.horizons.is_empty() {
        let hs: Vec<String> = c.time.horizons.iter().map(|h| h.to_string()).collect();
        s.push_str(&format!("time.horizons={}\n", hs.join(",")));
    }
    s
}
