//! Acceptance criteria, one line each. Runs as a plain binary so every
//! verdict is printed whether it passes or not; exits nonzero on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use anisons::verify_cmd::taylor_green_layers;
use anisons_core::lp::CutoffPair;
use anisons_core::solver::{solve_2dns_layers, SolverConfig};
use anisons_core::verify::{
    refinement_check, verify_bernstein, verify_embeddings, verify_energy_layers, verify_heat_smoothing,
    verify_interpolation, verify_partition, verify_reconstruction, verify_scaling_ensemble, Report,
};
use anisons_core::Grid;
use serde_json::{json, Value};
use tempfile::TempDir;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn worst(r: &Report) -> String {
    r.checks.iter().map(|c| format!("{} {:.2e}/{:.0e}", c.name, c.value, c.bound)).collect::<Vec<_>>().join(", ")
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

/// Runs the CLI on `cfg` inside `dir` and returns the output directory.
fn cli(dir: &Path, cfg: &Value) -> PathBuf {
    let p = dir.join("cfg.json");
    std::fs::write(&p, serde_json::to_string(cfg).unwrap()).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_anisons")).arg("--config").arg(&p).arg("--quiet").output().unwrap();
    assert!(o.status.success(), "anisons failed: {}", String::from_utf8_lossy(&o.stderr));
    dir.join(cfg["output"]["dir"].as_str().unwrap_or("out"))
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn partition() -> Verdict {
    let t = Instant::now();
    let r = verify_partition(&CutoffPair::standard(), 1000).unwrap();
    let el = t.elapsed();
    verdict(r.passed() && el < Duration::from_secs(1), format!("{} in {:.3} s", worst(&r), secs(el)))
}

fn bernstein() -> Verdict {
    let t = Instant::now();
    let r = verify_bernstein(&Grid::cube(32).unwrap(), 200, 0).unwrap();
    let el = t.elapsed();
    let bad = r.failures().count();
    verdict(bad == 0 && el < Duration::from_secs(30), format!("{bad} violations, {:.1} s", secs(el)))
}

fn reconstruction() -> Verdict {
    let r = verify_reconstruction(&Grid::cube(32).unwrap(), 50, 0).unwrap();
    verdict(r.passed(), worst(&r))
}

fn scaling() -> Verdict {
    let r = verify_scaling_ensemble(&Grid::cube(32).unwrap(), 20, 0).unwrap();
    verdict(r.passed(), worst(&r))
}

fn layers() -> Verdict {
    let t = Instant::now();
    let g = Grid::new(64, 16).unwrap();
    let (u1, u2) = taylor_green_layers(&g);
    let s = solve_2dns_layers(&u1, &u2, &SolverConfig::new(1e-3, 1.0).with_monitor_every(100)).unwrap();
    let r = verify_energy_layers(&s, 1e-6);
    // Taylor-Green cells sit on |k|² = 2, so every layer's energy decays as e^{-4t}.
    let mut tg = 0.0f64;
    for smp in &s.samples {
        for (e, e0) in smp.energy.iter().zip(&s.initial_energy) {
            tg = tg.max((e / e0 - (-4.0 * smp.t).exp()).abs() / (-4.0 * smp.t).exp());
        }
    }
    let el = t.elapsed();
    verdict(
        r.passed() && tg < 1e-6 && el < Duration::from_secs(120),
        format!("{}, e^-4t error {tg:.2e}, {:.1} s", worst(&r), secs(el)),
    )
}

fn energy_law() -> Verdict {
    let mut drift = Vec::new();
    let t = Instant::now();
    for dt in [1e-3, 5e-4] {
        let d = TempDir::new().unwrap();
        let out = cli(
            d.path(),
            &json!({
                "command": "simulate",
                "grid": {"n_h": 48, "n_v": 48, "l_h": std::f64::consts::TAU},
                "solver": {"dt": dt, "T": 1.0, "monitor_every": 50},
                "random": {"band_h": 4, "band_v": 4, "umax": 1.0},
                "seed": 3
            }),
        );
        drift.push(f(&read_json(&out.join("summary.json"))["max_energy_drift"]));
    }
    let el = t.elapsed();
    let ratio = drift[0] / drift[1];
    verdict(
        drift[0] < 1e-6 && ratio >= 8.0 && el < Duration::from_secs(300),
        format!("drift {:.2e} at dt 1e-3, {:.2e} at 5e-4, ratio {ratio:.1}, {:.0} s", drift[0], drift[1], secs(el)),
    )
}

/// The 48³ decomposition run shared by two criteria.
fn decomposition_summary() -> Value {
    let d = TempDir::new().unwrap();
    let out = cli(
        d.path(),
        &json!({
            "command": "decompose",
            "grid": {"n_h": 48, "n_v": 48},
            "solver": {"dt": 1e-3, "T": 1.0, "monitor_every": 50},
            "data": {"family": "oscillatory", "eps": 0.0625, "phi": {"modes": [{"amp": 1.0, "freq": [0.0, 2.0, 1.0]}]}},
            "seed": 0
        }),
    );
    read_json(&out.join("summary.json"))
}

fn decomposition(s: &Value) -> Verdict {
    let exact = ["v0h_identity", "w0_identity", "split_residual", "v3_residual"].map(|k| f(&s[k]));
    let w = f(&s["max_w_residual"]);
    let ex = exact.iter().copied().fold(0.0, f64::max);
    verdict(ex < 1e-12 && w < 1e-5, format!("split residuals {ex:.2e}, w residual {w:.2e}"))
}

fn bootstrap(s: &Value) -> Verdict {
    let b = &s["bootstrap"];
    let g = f(&b["growth"]);
    verdict(g < 4.0, format!("growth {g:.3} (initial {:.4e}, max {:.4e})", f(&b["initial"]), f(&b["max"])))
}

fn oscillatory_slope() -> Verdict {
    let d = TempDir::new().unwrap();
    let out = cli(
        d.path(),
        &json!({
            "command": "sweep",
            "grid": {"n_h": 64, "n_v": 16},
            "data": {
                "family": "oscillatory",
                "eps": 0.25,
                "phi": {"random": {"band_h": 2, "band_v": 2, "seed": 1, "l2": 1.0}}
            },
            "sweep": {"param": "eps", "values": [0.25, 0.125, 0.0625]}
        }),
    );
    let s = read_json(&out.join("sweep.json"));
    let slope = s["slopes"].as_array().unwrap().iter().find(|p| p[0] == "u_b4neg").map_or(f64::NAN, |p| f(&p[1]));
    verdict((slope - 0.5).abs() <= 0.1, format!("slope {slope:.4}"))
}

fn embeddings() -> Verdict {
    let mut lines = Vec::new();
    let mut pass = true;
    type Suite = fn(&Grid) -> Report;
    let suites: [(&str, Suite); 3] = [
        ("interpolation", |g| verify_interpolation(g, 10, 0).unwrap()),
        ("heat smoothing", |g| verify_heat_smoothing(g, 10, 10.0, 0).unwrap()),
        ("embeddings", |g| verify_embeddings(g, 10, 10.0, 0).unwrap()),
    ];
    for (name, run) in suites {
        let coarse = run(&Grid::cube(32).unwrap());
        let fine = run(&Grid::cube(64).unwrap());
        let c = refinement_check(&coarse, &fine, 0.2);
        pass &= c.passed() && coarse.passed() && fine.passed();
        let d = c.checks.iter().map(|k| k.value).fold(0.0, f64::max);
        lines.push(format!("{name} {:.1}%", 100.0 * d));
    }
    verdict(pass, format!("max drift {}", lines.join(", ")))
}

fn determinism() -> Verdict {
    let cfg = json!({
        "command": "simulate",
        "grid": {"n_h": 32, "n_v": 32},
        "solver": {"dt": 1e-3, "T": 0.2, "monitor_every": 10},
        "random": {"band_h": 4, "band_v": 4, "umax": 1.0},
        "seed": 11
    });
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let la = std::fs::read(cli(a.path(), &cfg).join("ledger.csv")).unwrap();
    let lb = std::fs::read(cli(b.path(), &cfg).join("ledger.csv")).unwrap();
    verdict(la == lb, format!("{} bytes, identical: {}", la.len(), la == lb))
}

fn main() {
    let mut failed = 0;
    let mut record = |name: &str, v: std::thread::Result<Verdict>| {
        let (tag, detail) = match v {
            Ok(v) if v.pass => ("PASS", v.detail),
            Ok(v) => ("FAIL", v.detail),
            Err(e) => ("FAIL", e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())),
        };
        failed += usize::from(tag == "FAIL");
        println!("{tag} {name}: {detail}");
    };
    let quiet = |f: fn() -> Verdict| catch_unwind(f);
    record("partition of unity", quiet(partition));
    record("bernstein bounds", quiet(bernstein));
    record("reconstruction and lh/hh split", quiet(reconstruction));
    record("scaling invariance", quiet(scaling));
    record("layered 2-D energy identity", quiet(layers));
    record("energy law", quiet(energy_law));
    match catch_unwind(decomposition_summary) {
        Ok(s) => {
            record("decomposition exactness", catch_unwind(AssertUnwindSafe(|| decomposition(&s))));
            record("bootstrap monitor", catch_unwind(AssertUnwindSafe(|| bootstrap(&s))));
        }
        Err(_) => {
            record("decomposition exactness", Ok(verdict(false, "decompose run failed".into())));
            record("bootstrap monitor", Ok(verdict(false, "decompose run failed".into())));
        }
    }
    record("oscillatory-data slope", quiet(oscillatory_slope));
    record("embedding constants under refinement", quiet(embeddings));
    record("determinism", quiet(determinism));
    println!("acceptance: {} failed", failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
