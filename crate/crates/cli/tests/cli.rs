//! End-to-end runs of the `stm` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use stm_cli::touchstone;

fn stm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stm")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let o = stm(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&read(dir, name)).unwrap()
}

const REFERENCE: &[&str] = &["--l0", "2.24e-9", "--f0", "0.9921e9", "--q0", "70", "--z0", "50"];

fn with<'a>(head: &[&'a str], out: &'a Path, tail: &[&'a str]) -> Vec<&'a str> {
    let mut v = head.to_vec();
    v.extend_from_slice(REFERENCE);
    v.extend_from_slice(tail);
    v.extend(["--out", out.to_str().unwrap()]);
    v
}

#[test]
fn reference_design_lands_near_a_tenth_of_the_carrier() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["design", "--frf", "1e9", "--q0", "70", "--z0", "50", "--out", dir.path().to_str().unwrap()]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("fm = ") && stdout.contains("dC/C0 = "));
    let d = json(dir.path(), "design.json");
    let r = d["fm_over_frf"].as_f64().unwrap();
    assert!((0.08..0.12).contains(&r), "{r}");
    assert!(d["ix_db"].as_f64().unwrap() > 60.0);
    let m = json(dir.path(), "manifest.json");
    for f in m["outputs"].as_array().unwrap() {
        assert!(dir.path().join(f.as_str().unwrap()).exists());
    }
    assert!(m["parameters"]["residuals"]["s31"].as_f64().unwrap() < 1e-9);
}

#[test]
fn missing_flag_is_a_usage_error() {
    let o = stm(&["design", "--q0", "70", "--z0", "50", "--out", "/nonexistent/never"]);
    assert_eq!(o.status.code(), Some(2));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "usage");
    assert!(e["error"]["message"].as_str().unwrap().contains("--frf"));
    let o = stm(&["design", "--frf", "banana"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solver_errors_are_reported_as_json() {
    let dir = tempfile::tempdir().unwrap();
    // a resonance exactly at the carrier has no isolation point
    let o = stm(&["design", "--frf", "1e9", "--f0", "1e9", "--q0", "70", "--z0", "50", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "no-solution");
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn lossless_design_is_unit_norm() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["design", "--frf", "1e9", "--q0", "inf", "--z0", "50", "--out", dir.path().to_str().unwrap()]);
    let d = json(dir.path(), "design.json");
    assert_eq!(d["lossless"]["unit_norm"], true);
    assert!(d["s21"].as_f64().unwrap() > 1.0 - 1e-4);
    assert_eq!(d["circuit"]["q0"], "inf");
}

#[test]
fn design_config_feeds_the_other_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("design");
    ok(&["design", "--frf", "1e9", "--q0", "70", "--z0", "50", "--out", d.to_str().unwrap()]);
    let conf = d.join("design.conf");
    let s = dir.path().join("s");
    ok(&["sparams", "--config", conf.to_str().unwrap(), "--fstart", "1e9", "--fstop", "1e9", "--n", "1", "--out", s.to_str().unwrap()]);
    let m = json(&s, "metrics.json");
    assert!(m["metrics"]["ix_db"].as_f64().unwrap() > 60.0);
    // explicit flags override the file
    let s2 = dir.path().join("s2");
    let args = ["sparams", "--config", conf.to_str().unwrap(), "--dc", "0.1", "--fstart", "1e9", "--fstop", "1e9", "--n", "1"];
    ok(&[&args[..], &["--out", s2.to_str().unwrap()]].concat());
    assert!(json(&s2, "metrics.json")["metrics"]["ix_db"].as_f64().unwrap() < 40.0);
    let a = json(&s2, "manifest.json");
    assert!(!a["args"].as_array().unwrap().iter().any(|x| x == "--config"));
}

#[test]
fn identical_flags_give_identical_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let tail = ["--fm", "1e8", "--dc", "0.5", "--fstart", "0.9e9", "--fstop", "1.1e9", "--n", "41"];
        ok(&with(&["sparams"], d.path(), &tail));
    }
    for f in ["sparams.csv", "sparams.s3p", "metrics.json"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f}");
    }
}

#[test]
fn touchstone_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let tail = ["--fm", "1e8", "--dc", "0.5", "--fstart", "0.9e9", "--fstop", "1.1e9", "--n", "21"];
    ok(&with(&["sparams"], dir.path(), &tail));
    let net = touchstone::parse(&read(dir.path(), "sparams.s3p")).unwrap();
    assert_eq!(net.r, 50.0);
    let csv = read(dir.path(), "sparams.csv");
    let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 21);
    for (row, (f, m)) in rows.iter().zip(net.freq_hz.iter().zip(&net.s)) {
        assert_eq!(row[0], *f);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(row[1 + 2 * (3 * i + j)], m[(i, j)].re);
                assert_eq!(row[2 + 2 * (3 * i + j)], m[(i, j)].im);
            }
        }
    }
}

#[test]
fn unmodulated_output_is_symmetric() {
    let dir = tempfile::tempdir().unwrap();
    let tail = ["--fm", "1e8", "--dc", "0", "--fstart", "0.9e9", "--fstop", "1.1e9", "--n", "11"];
    ok(&with(&["sparams"], dir.path(), &tail));
    let net = touchstone::parse(&read(dir.path(), "sparams.s3p")).unwrap();
    for m in &net.s {
        assert!((m - m.transpose()).iter().all(|z| z.norm() < 1e-12));
    }
}

#[test]
fn time_domain_engine_agrees_with_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let tail = ["--fm", "1e8", "--dc", "0.5", "--fstart", "0.95e9", "--fstop", "1.05e9", "--n", "3", "--engine", "td"];
    ok(&with(&["sparams"], dir.path(), &tail));
    let m = json(dir.path(), "metrics.json");
    assert!(m["max_abs_diff_vs_analytic"].as_f64().unwrap() < 1e-3);
    assert_eq!(m["td_report"]["runs"], 9);
}

#[test]
fn single_cell_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let tail = ["--frf", "1e9", "--n-fm", "1", "--fm-min", "0.1", "--n-dc", "1", "--dc-min", "0.5", "--mode", "retune"];
    ok(&with(&["sweep"], dir.path(), &tail));
    let csv = read(dir.path(), "chart.csv");
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("fm_over_f0,dc_ratio,il_db,rl_db,ix_db,bw_frac\n"));
    let o = json(dir.path(), "optima.json");
    assert_eq!(o["optima"]["p3"]["i_fm"], 0);
    assert_eq!(json(dir.path(), "manifest.json")["parameters"]["mode"], "retune");
}

#[test]
fn unmodulated_spectrum_is_a_single_line() {
    let dir = tempfile::tempdir().unwrap();
    let tail = ["--fm", "1e8", "--dc", "0", "--frf", "1e9", "--topology", "se-delta"];
    ok(&with(&["spectrum"], dir.path(), &tail));
    let csv = read(dir.path(), "spectrum.csv");
    for l in csv.lines().skip(1) {
        let c: Vec<&str> = l.split(',').collect();
        let (k, dbc): (i64, f64) = (c[1].parse().unwrap(), c[3].parse().unwrap());
        if k != 0 {
            assert!(dbc < -150.0, "{l}");
        }
    }
    assert_eq!(csv.lines().count(), 1 + 3 * 17);
}

#[test]
fn single_ended_spectrum_shows_sidebands() {
    let dir = tempfile::tempdir().unwrap();
    let tail = ["--fm", "1e8", "--dc", "0.5", "--frf", "1e9", "--topology", "se-delta"];
    ok(&with(&["spectrum"], dir.path(), &tail));
    let csv = read(dir.path(), "spectrum.csv");
    let side = csv.lines().skip(1).find(|l| l.starts_with("2,1,")).unwrap();
    let dbc: f64 = side.split(',').nth(3).unwrap().parse().unwrap();
    assert!(dbc > -40.0, "{side}");
}

#[test]
fn verify_passes_and_reports_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = ok(&["verify", "--out", dir.path().to_str().unwrap()]);
    let r = json(dir.path(), "verify.json");
    assert_eq!(r["pass"], true);
    let checks = r["checks"].as_array().unwrap();
    for suite in ["oracle-equivalence", "pseudo-lti", "phase-law", "unitarity", "inphase-residual", "matrix-identities"] {
        assert!(checks.iter().any(|c| c["suite"] == suite), "{suite}");
    }
    assert!(String::from_utf8(o.stdout).unwrap().lines().all(|l| l.starts_with("PASS")));
}
