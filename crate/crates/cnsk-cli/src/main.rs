//! `cnsk` - experiment harness for the linearized CNSK spectral toolkit.
//!
//! Usage:
//! ```text
//! cnsk run <config-path>        execute an experiment, write CSVs + report
//! cnsk validate <config-path>   check a config, list every problem
//! cnsk list-experiments         show the available experiment ids
//! ```
//!
//! Exit codes: 0 all checks passed, 1 at least one check failed,
//! 2 configuration or runtime error. The output directory comes from the
//! config's `[output] dir`, overridden by `CNSK_OUTPUT_DIR` when set.

mod config;
mod experiments;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use config::{parse_config, ExperimentConfig, ExperimentId};
use report::RunReport;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.first().map(String::as_str) {
        Some("run") => match args.get(1) {
            Some(path) => run_command(path),
            None => usage_error("run requires a config path"),
        },
        Some("validate") => match args.get(1) {
            Some(path) => validate_command(path),
            None => usage_error("validate requires a config path"),
        },
        Some("list-experiments") => {
            for id in ExperimentId::ALL {
                println!("{:<16} {}", id.name(), id.describe());
            }
            ExitCode::SUCCESS
        }
        _ => usage_error("expected one of: run <config>, validate <config>, list-experiments"),
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("cnsk: {msg}");
    ExitCode::from(2)
}

fn load_config(path: &str) -> Result<ExperimentConfig, ExitCode> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cnsk: cannot read {path}: {e}");
            return Err(ExitCode::from(2));
        }
    };
    match parse_config(&text) {
        Ok(cfg) => Ok(cfg),
        Err(errors) => {
            eprintln!("cnsk: invalid config {path}:");
            for e in &errors {
                eprintln!("  {e}");
            }
            Err(ExitCode::from(2))
        }
    }
}

fn validate_command(path: &str) -> ExitCode {
    match load_config(path) {
        Ok(cfg) => {
            println!("ok: {} experiment, output dir `{}`", cfg.experiment.name(), cfg.output_dir);
            ExitCode::SUCCESS
        }
        Err(code) => code,
    }
}

fn run_command(path: &str) -> ExitCode {
    let cfg = match load_config(path) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let out_dir = std::env::var("CNSK_OUTPUT_DIR").unwrap_or_else(|_| cfg.output_dir.clone());
    let out = PathBuf::from(&out_dir);
    if let Err(e) = std::fs::create_dir_all(&out) {
        eprintln!("cnsk: cannot create output dir {out_dir}: {e}");
        return ExitCode::from(2);
    }

    let started = Instant::now();
    let mut report = RunReport {
        experiment: cfg.experiment.name().into(),
        config_echo: config::echo_config(&cfg),
        ..RunReport::default()
    };
    // A checker error marks the experiment failed, it does not crash the run.
    match experiments::dispatch(&cfg) {
        Ok((checks, artifacts)) => {
            report.checks = checks;
            for (name, contents) in &artifacts {
                let path = out.join(name);
                if let Err(e) = std::fs::write(&path, contents) {
                    eprintln!("cnsk: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
                report.files.push(name.clone());
            }
        }
        Err(e) => report.failure = Some(e.to_string()),
    }
    report.wall_time_s = started.elapsed().as_secs_f64();

    let report_path = out.join("report.txt");
    if let Err(e) = std::fs::write(&report_path, report.render()) {
        eprintln!("cnsk: cannot write {}: {e}", report_path.display());
        return ExitCode::from(2);
    }
    for c in &report.checks {
        println!("{c}");
    }
    if let Some(f) = &report.failure {
        println!("experiment error: {f}");
    }
    println!(
        "{}: {} ({} checks, {:.2}s) -> {}",
        cfg.experiment.name(),
        if report.passed() { "PASS" } else { "FAIL" },
        report.checks.len(),
        report.wall_time_s,
        report_path.display()
    );
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
