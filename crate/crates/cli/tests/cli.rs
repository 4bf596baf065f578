use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;
use trapcs_cli::RunConfig;
use trapcs_core::trap::voltages_for_mathieu;
use trapcs_core::{AxialSector, TrapKind, TrapParams};

const AMU: f64 = 1.660_539_066_60e-27;
const E_CHARGE: f64 = 1.602_176_634e-19;

fn calcium(kind: TrapKind) -> TrapParams {
    TrapParams {
        mass: 40.0 * AMU,
        charge: E_CHARGE,
        u0: 0.0,
        v0: 0.0,
        omega_rf: 2.0 * PI * 10e6,
        r0: 1e-3,
        z0: 0.707e-3,
        b0: 0.0,
        l: 0,
        kind,
        axial_sector: AxialSector::Even,
    }
}

/// Trap block at Mathieu point `(a_z, q_z)` and scaled cyclotron frequency `wc`.
fn trap_json(kind: &str, a_z: f64, q_z: f64, wc: f64) -> Value {
    let mut p = calcium(TrapKind::Combined);
    let (u0, v0) = voltages_for_mathieu(&p, a_z, q_z);
    p.b0 = wc * p.omega_rf / 2.0 * p.mass / p.charge;
    json!({
        "kind": kind, "mass": p.mass, "charge": p.charge, "u0": u0, "v0": v0,
        "omega_rf": p.omega_rf, "r0": p.r0, "z0": p.z0, "b0": p.b0
    })
}

struct Run {
    dir: TempDir,
}

impl Run {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write_config(&self, name: &str, cfg: &Value) -> PathBuf {
        let path = self.path(name);
        std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
        path
    }

    fn exec(&self, args: &[&str], config: &Path, extra_env: &[(&str, &str)]) -> Output {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_trapcs"));
        cmd.args(args).arg("--config").arg(config);
        for (k, v) in extra_env {
            cmd.env(k, v);
        }
        cmd.output().unwrap()
    }
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// `(header lines, csv header, data rows)`.
fn parse_csv(text: &str) -> (Vec<String>, Vec<String>, Vec<Vec<String>>) {
    let mut header = Vec::new();
    let mut rows = Vec::new();
    let mut columns = Vec::new();
    for line in text.lines() {
        if let Some(h) = line.strip_prefix('#') {
            header.push(h.trim().to_string());
        } else if columns.is_empty() {
            columns = line.split(',').map(str::to_string).collect();
        } else {
            rows.push(line.split(',').map(str::to_string).collect());
        }
    }
    (header, columns, rows)
}

fn without_timestamp(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with("# timestamp:")).collect::<Vec<_>>().join("\n")
}

#[test]
fn simulate_writes_header_and_trajectory() {
    let run = Run::new();
    let cfg = json!({
        "trap": trap_json("combined", 0.5, 0.2, 2.0),
        "initial": {"z_a": [0.3, -0.1], "z_r": [-0.2, 0.25]},
        "duration": 3.0,
        "output": {"samples_per_period": 10}
    });
    let config = run.write_config("run.json", &cfg);
    let out = run.path("traj.csv");
    let o = run.exec(&["simulate", "--out", out.to_str().unwrap()], &config, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let (header, columns, rows) = parse_csv(&text);

    assert!(header[0].starts_with("trapcs "), "{header:?}");
    assert!(header.iter().any(|h| h.starts_with("scheme: length_scale_m=")));
    assert_eq!(columns, ["t", "re_z_a", "im_z_a", "re_z_r", "im_z_r", "xi_a", "eta_a", "xi_r", "eta_r", "h"]);
    assert_eq!(rows.len(), 31);
    let values: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| v.parse().unwrap()).collect()).collect();
    assert!(values.iter().flatten().all(|v| v.is_finite()));
    assert!(values.windows(2).all(|w| w[1][0] > w[0][0]));
    assert!((values.last().unwrap()[0] - 3.0 * PI).abs() < 1e-12);
    assert_eq!(&values[0][1..5], &[0.3, -0.1, -0.2, 0.25]);
    for r in &values {
        // xi eta >= 1 on the disk
        assert!(r[5] * r[6] >= 1.0 - 1e-12 && r[7] * r[8] >= 1.0 - 1e-12);
    }
}

#[test]
fn resolved_config_echo_reproduces_the_run() {
    let run = Run::new();
    let cfg = json!({
        "trap": trap_json("combined", 0.5, 0.2, 2.0),
        "initial": {"z_a": [0.1, 0.0], "z_r": [0.0, 0.2]},
        "duration": 1.0
    });
    let first = run.exec(&["simulate"], &run.write_config("a.json", &cfg), &[]);
    assert!(first.status.success(), "{}", stderr(&first));
    let text = String::from_utf8(first.stdout).unwrap();
    let echo = text.lines().find_map(|l| l.strip_prefix("# config: ")).unwrap();
    let parsed = RunConfig::from_json(echo).unwrap();
    assert_eq!(parsed.to_json(), echo);

    let second = run.exec(&["simulate"], &run.write_config("b.json", &serde_json::from_str(echo).unwrap()), &[]);
    assert!(second.status.success());
    assert_eq!(without_timestamp(&text), without_timestamp(&String::from_utf8(second.stdout).unwrap()));
}

#[test]
fn matched_harmonic_ground_state_is_stationary() {
    // lambda_a = 1 and lambda_r = wc^2/4 - 1/2 = 1
    let run = Run::new();
    let cfg = json!({"trap": trap_json("combined", 1.0, 0.0, 6f64.sqrt()), "duration": 2.0});
    let o = run.exec(&["simulate"], &run.write_config("m.json", &cfg), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, _, rows) = parse_csv(&String::from_utf8(o.stdout).unwrap());
    let h0: f64 = rows[0][9].parse().unwrap();
    for r in &rows {
        for v in &r[1..5] {
            assert!(v.parse::<f64>().unwrap().abs() < 1e-12, "{r:?}");
        }
        assert!((r[9].parse::<f64>().unwrap() - h0).abs() < 1e-12);
    }
}

#[test]
fn stable_paul_trap_stays_bounded() {
    let run = Run::new();
    let cfg = json!({
        "trap": trap_json("paul", 0.0, 0.5, 0.0),
        "initial": {"z_a": [0.2, 0.0], "z_r": [0.1, 0.0]},
        "duration": 20.0
    });
    let o = run.exec(&["simulate"], &run.write_config("p.json", &cfg), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, _, rows) = parse_csv(&String::from_utf8(o.stdout).unwrap());
    let xi_max = rows.iter().map(|r| r[5].parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert!(xi_max.is_finite() && xi_max < 100.0, "{xi_max}");
}

#[test]
fn boundary_breach_exits_nonzero_without_output() {
    // static Paul trap: radial saddle
    let run = Run::new();
    let cfg = json!({"trap": trap_json("paul", 0.1, 0.0, 0.0), "duration": 50.0});
    let out = run.path("never.csv");
    let o = run.exec(&["simulate", "--out", out.to_str().unwrap()], &run.write_config("s.json", &cfg), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("boundary breach"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn config_errors_name_the_key() {
    let run = Run::new();
    let mut trap = trap_json("combined", 0.5, 0.2, 2.0);
    trap["l"] = json!(-1);
    let o = run.exec(&["simulate"], &run.write_config("l.json", &json!({"trap": trap})), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("trap.l"), "{}", stderr(&o));

    let o = run.exec(
        &["simulate"],
        &run.write_config("u.json", &json!({"trap": trap_json("paul", 0.0, 0.3, 0.0), "bogus": 1})),
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bogus"), "{}", stderr(&o));

    let cfg = json!({"trap": trap_json("paul", 0.0, 0.3, 0.0), "integrator": {"rel_tol": -1.0}});
    let o = run.exec(&["simulate"], &run.write_config("t.json", &cfg), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("integrator.rel_tol"), "{}", stderr(&o));

    let o = run.exec(&["simulate"], &run.path("missing.json"), &[]);
    assert_eq!(o.status.code(), Some(1));
}

fn scan_config(kind: &str, u0: [f64; 2], v0: [f64; 2], n: [usize; 2]) -> Value {
    json!({
        "trap": trap_json(kind, 0.0, 0.0, 0.0),
        "grid": {"u0": u0, "v0": v0, "n_u": n[0], "n_v": n[1]}
    })
}

#[test]
fn scan_static_saddle_is_radially_unstable() {
    let run = Run::new();
    let p = calcium(TrapKind::Paul);
    let (u_lo, _) = voltages_for_mathieu(&p, 0.05, 0.0);
    let (u_hi, _) = voltages_for_mathieu(&p, 0.2, 0.0);
    let o =
        run.exec(&["scan"], &run.write_config("g.json", &scan_config("paul", [u_lo, u_hi], [0.0, 0.0], [2, 2])), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, columns, rows) = parse_csv(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(columns, ["u0", "v0", "a_z", "q_z", "stable_axial", "stable_radial", "max_abs_multiplier", "error"]);
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!((r[4].as_str(), r[5].as_str(), r[7].as_str()), ("true", "false", ""), "{r:?}");
    }
}

#[test]
fn scan_straddling_the_boundary_flips_verdict() {
    let run = Run::new();
    let p = calcium(TrapKind::Paul);
    let (_, v_lo) = voltages_for_mathieu(&p, 0.0, 0.85);
    let (_, v_hi) = voltages_for_mathieu(&p, 0.0, 0.95);
    let o =
        run.exec(&["scan"], &run.write_config("b.json", &scan_config("paul", [0.0, 0.0], [v_lo, v_hi], [2, 11])), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, _, rows) = parse_csv(&String::from_utf8(o.stdout).unwrap());
    let verdicts: Vec<bool> = rows[..11].iter().map(|r| r[4] == "true" && r[5] == "true").collect();
    let flips = verdicts.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(flips, 1, "{verdicts:?}");
    let i = verdicts.iter().position(|s| !s).unwrap();
    let q: f64 = rows[i][3].parse().unwrap();
    let q_prev: f64 = rows[i - 1][3].parse().unwrap();
    assert!(q_prev < 0.908 && q > 0.908, "{q_prev} {q}");
}

#[test]
fn scan_requires_rf_and_grid() {
    let run = Run::new();
    let mut cfg = scan_config("paul", [0.0, 0.0], [10.0, 20.0], [2, 2]);
    cfg.as_object_mut().unwrap().remove("grid");
    let o = run.exec(&["scan"], &run.write_config("n.json", &cfg), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grid"));

    let cfg = scan_config("paul", [0.0, 0.0], [10.0, 20.0], [1, 2]);
    let o = run.exec(&["scan"], &run.write_config("one.json", &cfg), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grid.n_u"));
}

#[test]
fn scan_is_byte_identical_across_runs_and_threads() {
    let run = Run::new();
    let p = calcium(TrapKind::Paul);
    let (u_lo, v_lo) = voltages_for_mathieu(&p, -0.1, 0.1);
    let (u_hi, v_hi) = voltages_for_mathieu(&p, 0.1, 0.9);
    let config = run.write_config("d.json", &scan_config("paul", [u_lo, u_hi], [v_lo, v_hi], [5, 7]));
    let a = run.exec(&["scan", "--threads", "1"], &config, &[]);
    let b = run.exec(&["scan"], &config, &[("TRAPCS_THREADS", "4")]);
    assert!(a.status.success() && b.status.success());
    let (a, b) = (String::from_utf8(a.stdout).unwrap(), String::from_utf8(b.stdout).unwrap());
    assert_eq!(without_timestamp(&a), without_timestamp(&b));
    assert_eq!(a.lines().filter(|l| l.starts_with("# timestamp:")).count(), 1);
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stderr(o)))
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()
}

#[test]
fn verify_harmonic_config_passes() {
    let run = Run::new();
    let cfg = json!({
        "trap": trap_json("combined", 0.5, 0.2, 2.0),
        "initial": {"z_a": [0.3, -0.1], "z_r": [-0.2, 0.25]},
        "verify": {"cases": 5}
    });
    let o = run.exec(&["verify", "--seed", "7"], &run.write_config("v.json", &cfg), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(&o);
    assert_eq!(r["pass"], true);
    assert_eq!(r["seed"], 7);
    for name in ["dequantization", "quadratic_overlap", "ehrenfest", "gradient_fd"] {
        assert_eq!(check(&r, name)["status"], "pass", "{name}: {r}");
    }
    assert!(check(&r, "quadratic_overlap")["residual"].as_f64().unwrap() < 1e-5);
    assert!(check(&r, "dequantization")["residual"].as_f64().unwrap() < 1e-7);
}

#[test]
fn verify_anharmonic_overlap_is_approximate() {
    let run = Run::new();
    let cfg = json!({
        "trap": trap_json("combined", 0.5, 0.2, 2.0),
        "anharmonic": {"c2": 0.01},
        "initial": {"z_a": [0.2, 0.0], "z_r": [0.1, 0.0]},
        "verify": {"cases": 5, "overlap_periods": 1.0}
    });
    let o = run.exec(&["verify"], &run.write_config("a.json", &cfg), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(&o);
    assert_eq!(check(&r, "quadratic_overlap")["status"], "approximate");
    assert!(check(&r, "dequantization")["residual"].as_f64().unwrap() < 1e-7);
    assert_eq!(check(&r, "ehrenfest")["status"], "pass");
}

#[test]
fn verify_reports_insufficient_truncation() {
    let run = Run::new();
    let cfg = json!({
        "trap": trap_json("combined", 0.5, 0.2, 2.0),
        "initial": {"z_a": [0.5, 0.0], "z_r": [0.0, 0.0]},
        "verify": {"cases": 2, "truncation": 16}
    });
    let o = run.exec(&["verify"], &run.write_config("t.json", &cfg), &[]);
    assert_eq!(o.status.code(), Some(3));
    let c = check(&report(&o), "dequantization").clone();
    assert_eq!(c["status"], "fail");
    assert!(c["detail"].as_str().unwrap().contains("suggested N"), "{c}");
}

fn dequantize_table(o: &Output) -> std::collections::HashMap<String, f64> {
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .filter_map(|l| {
            let mut parts = l.split([' ', '=']).filter(|s| !s.is_empty());
            let (k, v) = (parts.next()?, parts.next()?);
            Some((k.to_string(), v.parse().ok()?))
        })
        .collect()
}

#[test]
fn dequantize_prints_table_and_oracle() {
    let run = Run::new();
    let cfg = json!({"trap": trap_json("paul", 0.0, 0.4, 0.0), "initial": {"z_a": [0.3, 0.1], "z_r": [0.2, -0.3]}});
    let o = run.exec(&["dequantize"], &run.write_config("d.json", &cfg), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = dequantize_table(&o);
    assert_eq!(t["const_term"], 0.0);
    assert!(t["difference"].abs() < 1e-7, "{t:?}");

    let mut trap = trap_json("combined", 0.5, 0.2, 2.0);
    trap["l"] = json!(2);
    let cfg = json!({"trap": trap, "anharmonic": {"c2": 0.03, "c3": -0.02}, "initial": {"z_a": [0.3, 0.1], "z_r": [0.2, -0.3]}});
    let o = run.exec(&["dequantize"], &run.write_config("l.json", &cfg), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = dequantize_table(&o);
    assert!((t["omega_c_scaled"] - 2.0).abs() < 1e-12);
    assert!((t["const_term"] + t["omega_c_scaled"] / 2.0 * 2.0).abs() < 1e-12, "{t:?}");
    assert!(t["difference"].abs() < 1e-7, "{t:?}");
}
