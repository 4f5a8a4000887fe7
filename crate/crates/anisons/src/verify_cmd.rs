//! The `verify` command: suites run in parallel, merged in job order.

use anisons_core::solver::{solve_2dns_layers, SolverConfig};
use anisons_core::verify::{
    refinement_check, trilinear_spot_check, verify_bernstein, verify_embeddings, verify_energy_layers,
    verify_heat_smoothing, verify_interpolation, verify_partition, verify_reconstruction, verify_scaling_ensemble,
    Report,
};
use anisons_core::{Field, Grid};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Suite};
use crate::error::{AppError, AppResult};
use crate::report::VerifyBundle;
use crate::run::Out;

fn profiled(s: Suite) -> bool {
    matches!(s, Suite::Interpolation | Suite::HeatSmoothing | Suite::Embeddings)
}

/// Per-layer identity tolerance of the layered 2-D energy law.
pub const LAYER_TOL: f64 = 1e-6;

/// Taylor-Green cells with amplitude `1 + sin(x₃)/2` in every layer.
pub fn taylor_green_layers(g: &Grid) -> (Field, Field) {
    let amp = |z: f64| 1.0 + 0.5 * z.sin();
    (
        Field::from_fn(g, move |x, y, z| amp(z) * x.cos() * y.sin()),
        Field::from_fn(g, move |x, y, z| -amp(z) * x.sin() * y.cos()),
    )
}

fn run_suite(cfg: &ExperimentConfig, s: Suite, n: usize) -> anisons_core::Result<Report> {
    let v = &cfg.verify;
    let seed = cfg.seed;
    let g = Grid::cube(n)?;
    match s {
        Suite::Partition => verify_partition(&cfg.cutoff_pair(), v.partition_samples),
        Suite::Bernstein => verify_bernstein(&g, v.bernstein_trials, seed),
        Suite::Reconstruction => verify_reconstruction(&g, v.trials, seed),
        Suite::Scaling => verify_scaling_ensemble(&g, v.trials, seed),
        Suite::Interpolation => verify_interpolation(&g, v.trials, seed),
        Suite::HeatSmoothing => verify_heat_smoothing(&g, v.trials, v.horizon, seed),
        Suite::Embeddings => verify_embeddings(&g, v.trials, v.horizon, seed),
        Suite::EnergyLayers => {
            let (u1, u2) = taylor_green_layers(&g);
            let sc: SolverConfig = cfg.solver_config();
            Ok(verify_energy_layers(&solve_2dns_layers(&u1, &u2, &sc)?, LAYER_TOL))
        }
        Suite::Trilinear => trilinear_spot_check(&g, seed),
    }
}

pub fn verify(cfg: &ExperimentConfig, out: &mut Out) -> AppResult<()> {
    let v = &cfg.verify;
    let mut jobs: Vec<(Suite, usize)> = Vec::new();
    for &s in &v.suites {
        jobs.push((s, v.grid));
        if profiled(s) && v.refine_grid > 0 {
            jobs.push((s, v.refine_grid));
        }
    }
    out.say(&format!("verify: {} jobs", jobs.len()));
    let done: Vec<anisons_core::Result<Report>> = jobs.par_iter().map(|(s, n)| run_suite(cfg, *s, *n)).collect();
    let mut reports = Vec::new();
    for (i, r) in done.into_iter().enumerate() {
        let r = r.map_err(|e| AppError::core("/verify", &format!("suite {}", suite_file(jobs[i].0)), e))?;
        let refine = i > 0 && jobs[i - 1].0 == jobs[i].0;
        if refine {
            let c = refinement_check(reports.last().expect("coarse run precedes"), &r, v.refine_tol);
            reports.push(r);
            reports.push(c);
        } else {
            reports.push(r);
        }
    }
    for r in &reports {
        let name = match r.grid {
            Some((h, _)) if !r.suite.ends_with("refinement") => format!("reports/{}_{h}.json", slug(&r.suite)),
            _ => format!("reports/{}.json", slug(&r.suite)),
        };
        out.json(&name, r)?;
        let status = if r.passed() { "pass" } else { "FAIL" };
        out.say(&format!("  {status} {} ({} checks, {} profiles)", r.suite, r.checks.len(), r.profiles.len()));
    }
    let bundle = VerifyBundle::new(&out.config_hash, &out.cutoff_hash, reports);
    out.bytes("verify.json", bundle.to_json().as_bytes())?;
    out.bytes("junit.xml", bundle.to_junit().as_bytes())?;
    if bundle.passed {
        Ok(())
    } else {
        let names: Vec<String> =
            bundle.reports.iter().flat_map(|r| r.failures().map(move |c| format!("{}: {}", r.suite, c.name))).collect();
        Err(AppError::Verification(names.join(", ")))
    }
}

fn suite_file(s: Suite) -> &'static str {
    match s {
        Suite::Partition => "partition",
        Suite::Bernstein => "bernstein",
        Suite::Reconstruction => "reconstruction",
        Suite::Scaling => "scaling",
        Suite::Interpolation => "interpolation",
        Suite::HeatSmoothing => "heat_smoothing",
        Suite::Embeddings => "embeddings",
        Suite::EnergyLayers => "energy_layers",
        Suite::Trilinear => "trilinear",
    }
}

fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' }).collect()
}
