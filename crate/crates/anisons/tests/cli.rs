use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use anisons::afld::write_field;
use anisons::hash::content_hash;
use anisons::ledger_csv;
use anisons_core::{Field, Grid};
use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_anisons"));
    c.env_remove("ANISONS_THREADS");
    c
}

fn write_config(dir: &Path, cfg: &Value) -> PathBuf {
    let p = dir.join("cfg.json");
    std::fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p
}

fn run_config(dir: &Path, cfg: &Value) -> Output {
    let p = write_config(dir, cfg);
    bin().arg("--config").arg(p).arg("--quiet").output().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_random(command: &str) -> Value {
    json!({
        "command": command,
        "grid": {"n_h": 16, "n_v": 16},
        "solver": {"dt": 0.01, "T": 0.1, "monitor_every": 2},
        "random": {"band_h": 3, "band_v": 3, "umax": 1.0},
        "output": {"dir": "out", "checkpoint_every": 2},
        "seed": 5
    })
}

fn check_manifest(out: &Path) -> Value {
    let m = read_json(&out.join("manifest.json"));
    assert_eq!(m["schema"], "manifest-v1");
    let arts = m["artifacts"].as_array().unwrap();
    assert!(!arts.is_empty());
    for a in arts {
        let p = out.join(a["path"].as_str().unwrap());
        let bytes = std::fs::read(&p).unwrap();
        assert_eq!(a["hash"].as_str().unwrap(), content_hash(&bytes), "{}", p.display());
    }
    m
}

#[test]
fn semantic_errors_exit_2_with_pointers() {
    let d = TempDir::new().unwrap();
    let o = run_config(d.path(), &json!({"grid": {"n_h": 17}, "solver": {"dt": -1.0}}));
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("/grid"), "{e}");
    assert!(e.contains("/solver/dt"), "{e}");
}

#[test]
fn type_errors_exit_2_with_pointers() {
    let d = TempDir::new().unwrap();
    let o = run_config(d.path(), &json!({"verify": {"trials": "many"}}));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/verify/trials"), "{}", stderr(&o));
    let o = run_config(d.path(), &json!({"grid": {"nh": 16}}));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let o = bin().args(["--config", "/nonexistent/cfg.json"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn broken_partition_exits_4() {
    let d = TempDir::new().unwrap();
    let o = run_config(d.path(), &json!({"cutoffs": {"phi_scale": 0.99}, "verify": {"suites": ["partition"]}}));
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    let out = d.path().join("out");
    let v = read_json(&out.join("verify.json"));
    assert_eq!(v["passed"], false);
    let junit = std::fs::read_to_string(out.join("junit.xml")).unwrap();
    assert!(junit.contains("<failure"));
    check_manifest(&out);
}

#[test]
fn passing_verify_exits_0() {
    let d = TempDir::new().unwrap();
    let o =
        run_config(d.path(), &json!({"verify": {"suites": ["partition", "reconstruction", "trilinear"], "grid": 8}}));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = read_json(&d.path().join("out/verify.json"));
    assert_eq!(v["passed"], true);
}

#[test]
fn vertically_constant_inputs_are_small() {
    let d = TempDir::new().unwrap();
    let g = Grid::cube(16).unwrap();
    let u1 = Field::from_fn(&g, |x, y, _| x.cos() * y.sin());
    let u2 = Field::from_fn(&g, |x, y, _| -x.sin() * y.cos());
    let u3 = Field::zeros(&g);
    for (n, f) in [("u1", &u1), ("u2", &u2), ("u3", &u3)] {
        write_field(&d.path().join(format!("{n}.afld")), f).unwrap();
    }
    let o = run_config(
        d.path(),
        &json!({
            "command": "smallness",
            "inputs": {"u1": "u1.afld", "u2": "u2.afld", "u3": "u3.afld"}
        }),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = d.path().join("out");
    let s = read_json(&out.join("smallness.json"));
    assert_eq!(s["verdicts"], json!([true, true, true, true]));
    for k in ["lhs_a_n", "lhs_energy", "lhs_a_n_b0half", "lhs_energy_b0half"] {
        assert_eq!(s[k]["value"].as_f64().unwrap(), 0.0, "{k}");
    }
    assert!(s["uh_l2"].as_f64().unwrap() > 0.0);
    let m = check_manifest(&out);
    let inputs = m["inputs"].as_array().unwrap();
    assert_eq!(inputs.len(), 3);
    let bytes = std::fs::read(d.path().join("u1.afld")).unwrap();
    assert_eq!(inputs[0]["hash"].as_str().unwrap(), content_hash(&bytes));
}

#[test]
fn missing_inputs_are_reported() {
    let d = TempDir::new().unwrap();
    let o = run_config(
        d.path(),
        &json!({"command": "analyze", "inputs": {"u1": "a.afld", "u2": "b.afld", "u3": "c.afld"}}),
    );
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("/inputs/u1") && e.contains("/inputs/u3"), "{e}");
}

#[test]
fn damaged_inputs_exit_1() {
    let d = TempDir::new().unwrap();
    for n in ["u1", "u2", "u3"] {
        std::fs::write(d.path().join(format!("{n}.afld")), b"AFLD0001 truncated").unwrap();
    }
    let o = run_config(
        d.path(),
        &json!({"command": "analyze", "inputs": {"u1": "u1.afld", "u2": "u2.afld", "u3": "u3.afld"}}),
    );
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn simulate_writes_hashed_artifacts() {
    let d = TempDir::new().unwrap();
    let o = run_config(d.path(), &small_random("simulate"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = d.path().join("out");
    let m = check_manifest(&out);
    let paths: Vec<&str> = m["artifacts"].as_array().unwrap().iter().map(|a| a["path"].as_str().unwrap()).collect();
    assert!(paths.contains(&"ledger.csv"));
    assert!(paths.contains(&"summary.json"));
    assert!(paths.iter().any(|p| p.ends_with("_u3.afld")));
    let table = ledger_csv::parse(&std::fs::read_to_string(out.join("ledger.csv")).unwrap()).unwrap();
    assert_eq!(table.meta("config_hash"), m["config_hash"].as_str());
    assert_eq!(table.rows.len(), 6);
    let summary = read_json(&out.join("summary.json"));
    assert_eq!(summary["config_hash"], m["config_hash"]);
}

#[test]
fn decompose_writes_channels() {
    let d = TempDir::new().unwrap();
    let o = run_config(d.path(), &small_random("decompose"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = d.path().join("out");
    let m = check_manifest(&out);
    let paths: Vec<&str> = m["artifacts"].as_array().unwrap().iter().map(|a| a["path"].as_str().unwrap()).collect();
    for ch in ["ubar1", "ubar2", "v1", "v2", "v3", "vf", "w"] {
        assert!(paths.iter().any(|p| p.ends_with(&format!("_{ch}.afld"))), "{ch}");
    }
}

#[test]
fn ledgers_are_byte_identical_across_runs() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        let o = run_config(d.path(), &small_random("simulate"));
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let la = std::fs::read(a.path().join("out/ledger.csv")).unwrap();
    let lb = std::fs::read(b.path().join("out/ledger.csv")).unwrap();
    assert_eq!(la, lb);
}

#[test]
fn seed_override_changes_the_run() {
    let d = TempDir::new().unwrap();
    let p = write_config(d.path(), &small_random("analyze"));
    let run = |seed: &str, out: &str| {
        let o = bin()
            .arg("--config")
            .arg(&p)
            .args(["--quiet", "--seed", seed, "--out"])
            .arg(d.path().join(out))
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(d.path().join(out).join("norms.json")).unwrap()
    };
    assert_ne!(run("1", "a"), run("2", "b"));
}

#[test]
fn thread_count_comes_from_the_environment() {
    let d = TempDir::new().unwrap();
    let p = write_config(d.path(), &json!({"verify": {"suites": ["partition"]}}));
    let o = bin().arg("--config").arg(&p).arg("--quiet").env("ANISONS_THREADS", "0").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("threads"));
    let o = bin().arg("--config").arg(&p).arg("--quiet").env("ANISONS_THREADS", "2").output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o =
        bin().arg("--config").arg(&p).args(["--quiet", "--threads", "1"]).env("ANISONS_THREADS", "0").output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn command_line_overrides_the_config_command() {
    let d = TempDir::new().unwrap();
    let p = write_config(d.path(), &small_random("simulate"));
    let o = bin().arg("smallness").arg("--config").arg(&p).arg("--quiet").output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = d.path().join("out");
    assert!(out.join("smallness.json").exists());
    assert!(!out.join("ledger.csv").exists());
}

#[test]
fn sweep_writes_a_slope_row() {
    let d = TempDir::new().unwrap();
    let cfg = json!({
        "command": "sweep",
        "grid": {"n_h": 32, "n_v": 8},
        "data": {"family": "oscillatory", "eps": 0.25, "phi": {"random": {"band_h": 2, "band_v": 2, "seed": 1, "l2": 1.0}}},
        "sweep": {"values": [0.25, 0.125]}
    });
    let o = run_config(d.path(), &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(d.path().join("out/sweep.csv")).unwrap();
    assert!(csv.starts_with("#schema=sweep-v1"));
    assert!(csv.lines().any(|l| l.starts_with("slope,")), "{csv}");
}
