//! Command execution: one function per command, all writing through [`Out`].

use std::fs;
use std::path::{Path, PathBuf};

use anisons_core::data::smallness_report;
use anisons_core::field::{random_vec_field, rng_from_seed};
use anisons_core::lp::DyadicLadder;
use anisons_core::norms::{b0half_shells, b4_0half_shells, b4_neg_blocks, norm_h};
use anisons_core::solver::{bootstrap_monitor, run_decomposition, simulate, WResidual};
use anisons_core::spectral::leray_project;
use anisons_core::{Band, Field, VecField};
use rayon::prelude::*;
use serde::Serialize;

use crate::afld;
use crate::config::{Command, ExperimentConfig, SweepParam};
use crate::error::{AppError, AppResult};
use crate::hash::content_hash;
use crate::ledger_csv;
use crate::verify_cmd;

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub path: String,
    pub hash: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputRecord {
    pub name: String,
    /// File path, or `generated`.
    pub source: String,
    pub hash: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema: &'static str,
    version: &'static str,
    command: &'static str,
    config_hash: &'a str,
    cutoff_hash: &'a str,
    config: &'a ExperimentConfig,
    inputs: &'a [InputRecord],
    artifacts: &'a [Artifact],
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    config_hash: &'a str,
    cutoff_hash: &'a str,
    #[serde(flatten)]
    body: T,
}

/// Writes artifacts under the output directory and remembers their hashes.
pub struct Out {
    dir: PathBuf,
    pub config_hash: String,
    pub cutoff_hash: String,
    artifacts: Vec<Artifact>,
    quiet: bool,
}

impl Out {
    fn new(cfg: &ExperimentConfig, quiet: bool) -> AppResult<Self> {
        let dir = cfg.output.dir.clone();
        let probe = dir.join(".anisons-probe");
        let ok = fs::create_dir_all(&dir).and_then(|_| fs::write(&probe, b"")).and_then(|_| fs::remove_file(&probe));
        if let Err(e) = ok {
            return Err(AppError::config("/output/dir", format!("{} is not writable: {e}", dir.display())));
        }
        Ok(Self {
            dir,
            config_hash: cfg.hash(),
            cutoff_hash: cfg.cutoff_pair().hash().to_string(),
            artifacts: Vec::new(),
            quiet,
        })
    }

    pub fn say(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    pub fn bytes(&mut self, rel: &str, bytes: &[u8]) -> AppResult<()> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| AppError::io(parent, e))?;
        }
        fs::write(&path, bytes).map_err(|e| AppError::io(&path, e))?;
        self.artifacts.push(Artifact { path: rel.to_string(), hash: content_hash(bytes) });
        Ok(())
    }

    /// Pretty JSON with the config and cutoff hashes prepended.
    pub fn json(&mut self, rel: &str, body: &impl Serialize) -> AppResult<()> {
        let s = Stamped { config_hash: &self.config_hash, cutoff_hash: &self.cutoff_hash, body };
        let mut text = serde_json::to_string_pretty(&s).expect("serializable");
        text.push('\n');
        self.bytes(rel, text.as_bytes())
    }

    pub fn field(&mut self, rel: &str, f: &Field) -> AppResult<()> {
        self.bytes(rel, &afld::encode(f))
    }

    fn manifest(&self, cfg: &ExperimentConfig, inputs: &[InputRecord]) -> AppResult<PathBuf> {
        let m = Manifest {
            schema: "manifest-v1",
            version: env!("CARGO_PKG_VERSION"),
            command: cfg.command.name(),
            config_hash: &self.config_hash,
            cutoff_hash: &self.cutoff_hash,
            config: cfg,
            inputs,
            artifacts: &self.artifacts,
        };
        let mut text = serde_json::to_string_pretty(&m).expect("serializable");
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text).map_err(|e| AppError::io(&path, e))?;
        Ok(path)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub threads: Option<usize>,
    pub quiet: bool,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub manifest: PathBuf,
    pub artifacts: Vec<Artifact>,
}

/// Runs a validated config. Verification failures still write every
/// artifact before returning [`AppError::Verification`].
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> AppResult<Outcome> {
    cfg.validate().map_err(AppError::Config)?;
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        b = b.num_threads(n);
    }
    let pool = b.build().map_err(|e| AppError::config("", format!("cannot start {:?} threads: {e}", opts.threads)))?;
    pool.install(|| run_in_pool(cfg, opts))
}

fn run_in_pool(cfg: &ExperimentConfig, opts: &RunOptions) -> AppResult<Outcome> {
    let mut out = Out::new(cfg, opts.quiet)?;
    let mut inputs = Vec::new();
    let verdict = match cfg.command {
        Command::Analyze => analyze(cfg, &mut out, &mut inputs, true),
        Command::Smallness => analyze(cfg, &mut out, &mut inputs, false),
        Command::Simulate => simulate_cmd(cfg, &mut out, &mut inputs),
        Command::Decompose => decompose_cmd(cfg, &mut out, &mut inputs),
        Command::Verify => verify_cmd::verify(cfg, &mut out),
        Command::Sweep => sweep(cfg, &mut out),
    };
    let manifest = out.manifest(cfg, &inputs)?;
    out.say(&format!("{}: wrote {} artifacts to {}", cfg.command.name(), out.artifacts.len(), out.dir.display()));
    verdict?;
    Ok(Outcome { manifest, artifacts: out.artifacts })
}

fn physical_max(u: &VecField) -> f64 {
    u.comps.iter().flat_map(|f| f.to_physical_real()).fold(0.0, |m, x| m.max(x.abs()))
}

/// The initial velocity of the run and a record of where it came from.
pub fn initial_field(cfg: &ExperimentConfig) -> AppResult<(VecField, Vec<InputRecord>)> {
    let names = ["u1", "u2", "u3"];
    if let Some(inp) = &cfg.inputs {
        let u = afld::read_vec_field(inp.paths())?;
        let mut rec = Vec::new();
        for (name, p) in names.iter().zip(inp.paths()) {
            let bytes = fs::read(p).map_err(|e| AppError::io(p, e))?;
            rec.push(InputRecord {
                name: name.to_string(),
                source: p.display().to_string(),
                hash: content_hash(&bytes),
            });
        }
        return Ok((u, rec));
    }
    let u = if let Some(d) = &cfg.data {
        d.generate(&cfg.base_grid()).map_err(|e| AppError::core("/data", "data generation", e))?
    } else if let Some(r) = &cfg.random {
        let g = cfg.base_grid();
        let u = leray_project(&random_vec_field(&g, Band::new(r.band_h, r.band_v), &mut rng_from_seed(cfg.seed)));
        let m = physical_max(&u);
        if m > 0.0 {
            u.scale(r.umax / m)
        } else {
            u
        }
    } else {
        return Err(AppError::config("", "no initial data"));
    };
    let rec = names
        .iter()
        .zip(&u.comps)
        .map(|(n, f)| InputRecord {
            name: n.to_string(),
            source: "generated".into(),
            hash: content_hash(&afld::encode(f)),
        })
        .collect();
    Ok((u, rec))
}

#[derive(Serialize)]
struct ComponentNorms {
    name: &'static str,
    l2: f64,
    b0half: f64,
    b0half_shells: Vec<(i32, f64)>,
    b4_0half: f64,
    b4neg: f64,
    h_0_half: f64,
}

#[derive(Serialize)]
struct NormsBody {
    grid: anisons_core::Grid,
    divergence_defect: f64,
    u_l2: f64,
    u_b0half: f64,
    uh_b0half: f64,
    u_b4neg: f64,
    components: Vec<ComponentNorms>,
}

fn norms_of(ladder: &DyadicLadder, u: &VecField) -> NormsBody {
    let names = ["u1", "u2", "u3"];
    let all: Vec<&Field> = u.comps.iter().collect();
    let components = names
        .iter()
        .zip(&u.comps)
        .map(|(name, f)| {
            let b = b0half_shells(ladder, &[f]);
            ComponentNorms {
                name,
                l2: f.l2_norm(),
                b0half: b.besov_sum(),
                b0half_shells: b.shells().collect(),
                b4_0half: b4_0half_shells(ladder, &[f]).besov_sum(),
                b4neg: b4_neg_blocks(ladder, &[f]).norm(),
                h_0_half: norm_h(f, 0.0, 0.5).value,
            }
        })
        .collect();
    NormsBody {
        grid: *u.grid(),
        divergence_defect: u.divergence_defect(),
        u_l2: u.l2_norm(),
        u_b0half: b0half_shells(ladder, &all).besov_sum(),
        uh_b0half: b0half_shells(ladder, &all[..2]).besov_sum(),
        u_b4neg: b4_neg_blocks(ladder, &all).norm(),
        components,
    }
}

fn analyze(cfg: &ExperimentConfig, out: &mut Out, inputs: &mut Vec<InputRecord>, norms: bool) -> AppResult<()> {
    let (u, rec) = initial_field(cfg)?;
    *inputs = rec;
    let ladder = DyadicLadder::new(u.grid(), &cfg.cutoff_pair());
    let rep = smallness_report(&ladder, &u, cfg.constants.smallness())
        .map_err(|e| AppError::core("/constants", "smallness evaluation", e))?;
    if rep.warning() {
        out.say(&format!("warning: Λ_h⁻¹ discarded a fraction {:e} of ∂₃u₀", rep.discarded_fraction));
    }
    out.say(&format!("smallness verdicts {:?}", rep.verdicts));
    out.json("smallness.json", &rep)?;
    if norms {
        out.json("norms.json", &norms_of(&ladder, &u))?;
    }
    Ok(())
}

/// Indices of the monitor rows that get a checkpoint: every `every`-th row
/// and always the last.
fn checkpoint_rows(rows: usize, every: usize) -> Vec<usize> {
    let mut v: Vec<usize> = if every == 0 { Vec::new() } else { (0..rows).step_by(every).collect() };
    if rows > 0 && v.last() != Some(&(rows - 1)) {
        v.push(rows - 1);
    }
    v
}

fn monitor_rows(cfg: &ExperimentConfig) -> usize {
    let s = cfg.solver_config();
    let n = s.steps().unwrap_or(0);
    n / s.monitor_every + 1 + usize::from(!n.is_multiple_of(s.monitor_every))
}

fn step_of(t: f64, dt: f64) -> usize {
    (t / dt).round() as usize
}

#[derive(Serialize)]
struct SimulateBody {
    steps: usize,
    dt: f64,
    t_end: f64,
    max_energy_drift: f64,
    max_divergence: f64,
    accumulators: Vec<(String, f64)>,
}

fn simulate_cmd(cfg: &ExperimentConfig, out: &mut Out, inputs: &mut Vec<InputRecord>) -> AppResult<()> {
    let (u, rec) = initial_field(cfg)?;
    *inputs = rec;
    let ladder = DyadicLadder::new(u.grid(), &cfg.cutoff_pair());
    let sc = cfg.solver_config();
    let mut row = 0usize;
    let keep = checkpoint_rows(monitor_rows(cfg), cfg.output.checkpoint_every);
    let mut saved: Vec<(usize, VecField)> = Vec::new();
    out.say(&format!("simulate: {} steps on {}", sc.steps().unwrap_or(0), u.grid()));
    let s = simulate(&u, &ladder, &sc, &mut |t, st| {
        if keep.contains(&row) {
            saved.push((step_of(t, sc.dt), st.clone()));
        }
        row += 1;
        Ok(())
    })
    .map_err(|e| AppError::core("/solver", "simulate", e))?;
    if saved.last().map(|x| x.0) != Some(s.steps) {
        saved.push((s.steps, s.final_state.clone()));
    }
    for (step, st) in &saved {
        for (i, f) in st.comps.iter().enumerate() {
            out.field(&format!("checkpoints/step{step:07}_u{}.afld", i + 1), f)?;
        }
    }
    out.bytes("ledger.csv", ledger_csv::to_csv(&s.ledger, &out.config_hash.clone()).as_bytes())?;
    out.json(
        "summary.json",
        &SimulateBody {
            steps: s.steps,
            dt: sc.dt,
            t_end: sc.t_end,
            max_energy_drift: s.max_energy_drift,
            max_divergence: s.max_divergence,
            accumulators: s.ledger.accumulator_values(),
        },
    )?;
    out.say(&format!("simulate: max energy drift {:e}", s.max_energy_drift));
    Ok(())
}

#[derive(Serialize)]
struct DecomposeBody {
    steps: usize,
    bootstrap: anisons_core::solver::BootstrapStatus,
    v0h_identity: f64,
    w0_identity: f64,
    split_residual: f64,
    v3_residual: f64,
    max_w_residual: f64,
    max_div_u: f64,
    max_div_v: f64,
    max_div_h_ubar: f64,
    max_energy_drift: f64,
    max_layer_drift: f64,
    w_residuals: Vec<WResidual>,
    accumulators: Vec<(String, f64)>,
}

fn decompose_cmd(cfg: &ExperimentConfig, out: &mut Out, inputs: &mut Vec<InputRecord>) -> AppResult<()> {
    let (u, rec) = initial_field(cfg)?;
    *inputs = rec;
    let ladder = DyadicLadder::new(u.grid(), &cfg.cutoff_pair());
    let sc = cfg.solver_config();
    let keep = checkpoint_rows(monitor_rows(cfg), cfg.output.checkpoint_every);
    let mut row = 0usize;
    let mut saved: Vec<(usize, Vec<(&'static str, Field)>)> = Vec::new();
    out.say(&format!("decompose: {} steps on {}", sc.steps().unwrap_or(0), u.grid()));
    let s = run_decomposition(&u, &ladder, &sc, &mut |st| {
        if keep.contains(&row) {
            let ch = vec![
                ("ubar1", st.ubar[0].clone()),
                ("ubar2", st.ubar[1].clone()),
                ("v1", st.v.comps[0].clone()),
                ("v2", st.v.comps[1].clone()),
                ("v3", st.v.comps[2].clone()),
                ("vf", st.v_f.clone()),
                ("w", st.w.clone()),
            ];
            saved.push((step_of(st.t, sc.dt), ch));
        }
        row += 1;
        Ok(())
    })
    .map_err(|e| AppError::core("/solver", "decompose", e))?;
    for (step, ch) in &saved {
        for (name, f) in ch {
            out.field(&format!("channels/step{step:07}_{name}.afld"), f)?;
        }
    }
    let bootstrap =
        bootstrap_monitor(&s.ledger, cfg.constants.c).map_err(|e| AppError::core("/constants/C", "bootstrap", e))?;
    out.bytes("ledger.csv", ledger_csv::to_csv(&s.ledger, &out.config_hash.clone()).as_bytes())?;
    out.say(&format!("decompose: bootstrap growth {:.3}, crossing {:?}", bootstrap.growth, bootstrap.crossing));
    out.json(
        "summary.json",
        &DecomposeBody {
            steps: s.steps,
            bootstrap,
            v0h_identity: s.v0h_identity,
            w0_identity: s.w0_identity,
            split_residual: s.split_residual,
            v3_residual: s.v3_residual,
            max_w_residual: s.w_residuals.iter().map(|r| r.relative).fold(0.0, f64::max),
            max_div_u: s.max_div_u,
            max_div_v: s.max_div_v,
            max_div_h_ubar: s.max_div_h_ubar,
            max_energy_drift: s.max_energy_drift,
            max_layer_drift: s.max_layer_drift,
            w_residuals: s.w_residuals.clone(),
            accumulators: s.ledger.accumulator_values(),
        },
    )
}

/// Least-squares slope of `ln y` against `ln x`; `None` unless every pair
/// is positive and finite and the `x` are not all equal.
pub fn loglog_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 || pts.iter().any(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return None;
    }
    let n = pts.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = pts.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

const SWEEP_COLUMNS: [&str; 12] = [
    "u_l2",
    "u_b0half",
    "u_b4neg",
    "u3_b4neg",
    "u3_b0half",
    "inv_lambda_d3_u0",
    "uh_b0half",
    "lhs_a_n",
    "lhs_energy",
    "bootstrap_growth",
    "max_energy_drift",
    "max_w_residual",
];

fn sweep_point(cfg: &ExperimentConfig, x: f64) -> AppResult<Vec<f64>> {
    let base = cfg.data.as_ref().expect("validated");
    let fam = match cfg.sweep.param {
        SweepParam::Eps => base.with_eps(x),
        SweepParam::Delta => base.with_delta(x),
    };
    let u = fam.generate(&cfg.base_grid()).map_err(|e| AppError::core("/sweep/values", "data generation", e))?;
    let ladder = DyadicLadder::new(u.grid(), &cfg.cutoff_pair());
    let n = norms_of(&ladder, &u);
    let rep = smallness_report(&ladder, &u, cfg.constants.smallness())
        .map_err(|e| AppError::core("/constants", "smallness evaluation", e))?;
    let mut row = vec![
        n.u_l2,
        n.u_b0half,
        n.u_b4neg,
        rep.u3_b4,
        rep.u3_b0half,
        rep.inv_lambda_d3_u0,
        rep.uh_b0half,
        rep.lhs_a_n.value,
        rep.lhs_energy.value,
    ];
    if cfg.sweep.solve {
        let s = run_decomposition(&u, &ladder, &cfg.solver_config(), &mut |_| Ok(()))
            .map_err(|e| AppError::core("/solver", &format!("sweep point {x}"), e))?;
        let b = bootstrap_monitor(&s.ledger, cfg.constants.c)
            .map_err(|e| AppError::core("/constants/C", "bootstrap", e))?;
        row.extend([b.growth, s.max_energy_drift, s.w_residuals.iter().map(|r| r.relative).fold(0.0, f64::max)]);
    } else {
        row.extend([f64::NAN; 3]);
    }
    Ok(row)
}

#[derive(Serialize)]
struct SweepBody<'a> {
    param: SweepParam,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Option<f64>>>,
    /// Log-log slope of each column against the parameter.
    slopes: Vec<(&'static str, Option<f64>)>,
    grid: anisons_core::Grid,
    values: &'a [f64],
}

fn sweep(cfg: &ExperimentConfig, out: &mut Out) -> AppResult<()> {
    let values = &cfg.sweep.values;
    out.say(&format!("sweep: {} points", values.len()));
    let rows: Vec<Vec<f64>> = values.par_iter().map(|x| sweep_point(cfg, *x)).collect::<AppResult<_>>()?;
    let slopes: Vec<(&'static str, Option<f64>)> = SWEEP_COLUMNS
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let pts: Vec<(f64, f64)> = values.iter().zip(&rows).map(|(x, r)| (*x, r[j])).collect();
            (*c, loglog_slope(&pts))
        })
        .collect();
    let pname = match cfg.sweep.param {
        SweepParam::Eps => "eps",
        SweepParam::Delta => "delta",
    };
    let mut csv = format!(
        "#schema=sweep-v1\n#config_hash={}\n#cutoff_hash={}\n{pname},{}\n",
        out.config_hash,
        out.cutoff_hash,
        SWEEP_COLUMNS.join(",")
    );
    let cell = |v: f64| if v.is_nan() { String::new() } else { format!("{v:e}") };
    for (x, r) in values.iter().zip(&rows) {
        csv.push_str(&cell(*x));
        for v in r {
            csv.push(',');
            csv.push_str(&cell(*v));
        }
        csv.push('\n');
    }
    csv.push_str("slope");
    for (_, s) in &slopes {
        csv.push(',');
        csv.push_str(&s.map_or(String::new(), cell));
    }
    csv.push('\n');
    out.bytes("sweep.csv", csv.as_bytes())?;
    for (c, s) in &slopes {
        if let Some(s) = s {
            out.say(&format!("sweep: slope of {c} = {s:.4}"));
        }
    }
    out.json(
        "sweep.json",
        &SweepBody {
            param: cfg.sweep.param,
            columns: SWEEP_COLUMNS.to_vec(),
            rows: rows.iter().map(|r| r.iter().map(|v| (!v.is_nan()).then_some(*v)).collect()).collect(),
            slopes,
            grid: cfg.base_grid(),
            values,
        },
    )
}
