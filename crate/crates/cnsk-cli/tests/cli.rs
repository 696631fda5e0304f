//! End-to-end checks of the `cnsk` binary: exit codes, config validation,
//! report/CSV artifacts and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::Command;

fn cnsk() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cnsk"))
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("cnsk_cli_tests").join(name);
    std::fs::remove_dir_all(&dir).ok();
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_cfg(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn list_experiments_names_all_eight() {
    let out = cnsk().arg("list-experiments").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in [
        "log-growth",
        "density-bound",
        "density-decay",
        "energy-identity",
        "high-freq-decay",
        "stokes-bound",
        "symbol-atlas",
        "cross-validate",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn missing_subcommand_exits_2() {
    let out = cnsk().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_config_lists_all_errors_and_exits_2() {
    let dir = tmp_dir("invalid");
    let cfg = write_cfg(
        &dir,
        "bad.cfg",
        "experiment = log-growth\n[params]\nnu = -1\nkappa0 = -2\n[grid]\nn = 12\n",
    );
    let out = cnsk().arg("validate").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("params.nu"));
    assert!(text.contains("params.kappa0"));
    assert!(text.contains("grid.n"));
}

#[test]
fn horizon_guard_violation_is_cited() {
    let dir = tmp_dir("guard");
    let cfg = write_cfg(
        &dir,
        "guard.cfg",
        "experiment = density-bound\n[grid]\nn = 16\nhalf_width = 10\n\
         [time]\nhorizons = 10,1000\nt_end = 1000\n",
    );
    let out = cnsk().arg("validate").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("0.05 (L/pi)^2 / nu"), "guard formula not cited: {text}");
}

#[test]
fn minimal_config_validates_with_defaults() {
    let dir = tmp_dir("minimal");
    let cfg = write_cfg(&dir, "min.cfg", "experiment = symbol-atlas\n");
    let out = cnsk().arg("validate").arg(&cfg).output().unwrap();
    assert!(out.status.success());
}

#[test]
fn symbol_atlas_runs_and_writes_artifacts() {
    let dir = tmp_dir("atlas");
    let cfg = write_cfg(&dir, "atlas.cfg", "experiment = symbol-atlas\n");
    let out_dir = dir.join("out");
    let out = cnsk()
        .arg("run")
        .arg(&cfg)
        .env("CNSK_OUTPUT_DIR", &out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(report.contains("result=pass"));
    assert!(report.contains("experiment=symbol-atlas"));
    assert!(report.contains("file=atlas.csv"));
    let atlas = std::fs::read_to_string(out_dir.join("atlas.csv")).unwrap();
    assert!(atlas.starts_with("r,lambda_plus_re"));
}

#[test]
fn failing_check_exits_1_not_crash() {
    let dir = tmp_dir("failing");
    // An impossible tolerance forces a failed check.
    let cfg = write_cfg(
        &dir,
        "fail.cfg",
        "experiment = cross-validate\n[datum]\ncount = 2\n[time]\nsteps = 64\n\
         [tolerances]\noracle_tolerance = 0\n",
    );
    let out_dir = dir.join("out");
    let out = cnsk()
        .arg("run")
        .arg(&cfg)
        .env("CNSK_OUTPUT_DIR", &out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report = std::fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(report.contains("result=fail"));
}

#[test]
fn runs_are_byte_deterministic() {
    let dir = tmp_dir("determinism");
    let cfg = write_cfg(
        &dir,
        "energy.cfg",
        "experiment = energy-identity\n[datum]\ncount = 3\nseed = 9\n\
         [grid]\nn = 32\nhalf_width = 47.1238898038469\n",
    );
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for out_dir in [&out_a, &out_b] {
        let out = cnsk()
            .arg("run")
            .arg(&cfg)
            .env("CNSK_OUTPUT_DIR", out_dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(out_a.join("energy_defects.csv")).unwrap();
    let b = std::fs::read(out_b.join("energy_defects.csv")).unwrap();
    assert_eq!(a, b, "data files differ between identical runs");
}

#[test]
fn zero_amplitude_energy_identity_passes_with_zero_defect() {
    let dir = tmp_dir("zero");
    let cfg = write_cfg(
        &dir,
        "zero.cfg",
        "experiment = energy-identity\n[datum]\namplitude = 0\ncount = 2\n",
    );
    let out_dir = dir.join("out");
    let out = cnsk()
        .arg("run")
        .arg(&cfg)
        .env("CNSK_OUTPUT_DIR", &out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report = std::fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(report.contains("value=0.0000000000000000e0"));
    assert!(report.contains("result=pass"));
}

#[test]
fn growth_mode_demonstrates_hypothesis_necessity() {
    let dir = tmp_dir("growth");
    let cfg = write_cfg(
        &dir,
        "growth.cfg",
        "experiment = density-bound\n\
         [params]\nnu = 0.05\nnu_tilde = 0.95\ngamma = 1.0\nkappa0 = 0.25\n\
         [grid]\nn = 64\nhalf_width = 326.7256359733385\n\
         [datum]\nkind = gaussian\nwidth = 5.75\n\
         [time]\nhorizons = 1e2,1e3\nt_end = 1e3\n",
    );
    let out_dir = dir.join("out");
    let out = cnsk()
        .arg("run")
        .arg(&cfg)
        .env("CNSK_OUTPUT_DIR", &out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(out_dir.join("report.txt")).unwrap();
    assert!(report.contains("growth_increment"));
}
