//! Experiment configuration. The JSON schema shipped in `schema/` documents
//! every field and default; [`ExperimentConfig::parse`] reports problems with
//! JSON-pointer paths into the document.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anisons_core::data::{oscillatory_period, DataFamily, Profile, SmallnessConstants};
use anisons_core::lp::{CutoffPair, CutoffProfile};
use anisons_core::solver::{Exponents, Scheme, SolverConfig};
use anisons_core::Grid;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Analyze,
    Simulate,
    Decompose,
    #[default]
    Verify,
    Smallness,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Simulate => "simulate",
            Command::Decompose => "decompose",
            Command::Verify => "verify",
            Command::Smallness => "smallness",
            Command::Sweep => "sweep",
        }
    }

    fn needs_field(self) -> bool {
        !matches!(self, Command::Verify | Command::Sweep)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub n_h: usize,
    pub n_v: usize,
    /// `null` picks `2π`, halved until `sin(x₁/ε)` plus `fit_spare`
    /// wavenumbers fit the dealiasing band.
    pub l_h: Option<f64>,
    pub l_v: f64,
    pub fit_spare: i64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n_h: 32, n_v: 32, l_h: None, l_v: 2.0 * PI, fit_spare: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub scheme: Scheme,
    pub cfl_safety: f64,
    pub dealias: bool,
    pub monitor_every: usize,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            dt: d.dt,
            t_end: d.t_end,
            scheme: d.scheme,
            cfl_safety: d.cfl_safety,
            dealias: d.dealias,
            monitor_every: d.monitor_every,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constants {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "N")]
    pub n: u32,
    /// Also sets the bootstrap level `1/(16 C)`.
    #[serde(rename = "C")]
    pub c: f64,
    pub eps0: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub mu: f64,
}

impl Default for Constants {
    fn default() -> Self {
        let s = SmallnessConstants::default();
        let e = Exponents::default();
        Self {
            l: s.l,
            m: s.m,
            n: s.n,
            c: s.c,
            eps0: s.eps0,
            lambda: e.lambda,
            kappa: e.kappa,
            gamma: e.gamma,
            mu: e.mu,
        }
    }
}

impl Constants {
    pub fn smallness(&self) -> SmallnessConstants {
        SmallnessConstants { l: self.l, m: self.m, n: self.n, c: self.c, eps0: self.eps0 }
    }

    pub fn exponents(&self) -> Exponents {
        Exponents { lambda: self.lambda, kappa: self.kappa, gamma: self.gamma, mu: self.mu }
    }
}

/// Leray-projected random band-limited velocity drawn from the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomData {
    pub band_h: i64,
    pub band_v: i64,
    /// Rescaled so that `max|u|` over the grid points equals this.
    pub umax: f64,
}

impl Default for RandomData {
    fn default() -> Self {
        Self { band_h: 4, band_v: 4, umax: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub u1: PathBuf,
    pub u2: PathBuf,
    pub u3: PathBuf,
}

impl Inputs {
    pub fn paths(&self) -> [&Path; 3] {
        [&self.u1, &self.u2, &self.u3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Partition,
    Bernstein,
    Reconstruction,
    Scaling,
    Interpolation,
    HeatSmoothing,
    Embeddings,
    EnergyLayers,
    Trilinear,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Partition,
        Suite::Bernstein,
        Suite::Reconstruction,
        Suite::Scaling,
        Suite::Interpolation,
        Suite::HeatSmoothing,
        Suite::Embeddings,
        Suite::EnergyLayers,
        Suite::Trilinear,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    pub suites: Vec<Suite>,
    /// Cube size of the ensembles.
    pub grid: usize,
    /// Cube size the profiled constants are compared against; 0 skips the comparison.
    pub refine_grid: usize,
    pub trials: usize,
    pub bernstein_trials: usize,
    pub partition_samples: usize,
    /// Largest time of the heat-flow samples.
    pub horizon: f64,
    /// Allowed relative drift of profiled constants under refinement.
    pub refine_tol: f64,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            suites: Suite::ALL.to_vec(),
            grid: 16,
            refine_grid: 32,
            trials: 10,
            bernstein_trials: 50,
            partition_samples: 1000,
            horizon: 10.0,
            refine_tol: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Eps,
    Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    /// Also run the decomposition at every point.
    pub solve: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { param: SweepParam::Eps, values: vec![0.25, 0.125, 0.0625], solve: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// Checkpoint every this many monitor rows; 0 writes the final state only.
    pub checkpoint_every: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), checkpoint_every: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub grid: GridSpec,
    pub solver: SolverSpec,
    /// Named family; exclusive with `random` and `inputs`.
    pub data: Option<DataFamily>,
    pub random: Option<RandomData>,
    /// AFLD1 component files; relative paths start at the config file.
    pub inputs: Option<Inputs>,
    pub constants: Constants,
    pub cutoffs: CutoffProfile,
    pub verify: VerifySpec,
    pub sweep: SweepSpec,
    pub output: OutputSpec,
    pub seed: u64,
}

fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut s = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => s.push_str(&format!("/{index}")),
            Segment::Map { key } => s.push_str(&format!("/{}", escape(key))),
            // externally tagged: the variant name is the key of the object
            Segment::Enum { variant } => s.push_str(&format!("/{}", escape(variant))),
            Segment::Unknown => {}
        }
    }
    s
}

fn field_error<T: serde::de::DeserializeOwned>(at: &str, v: &serde_json::Value) -> Option<ConfigError> {
    serde_path_to_error::deserialize::<_, T>(v)
        .err()
        .map(|e| ConfigError::new(&format!("{at}{}", pointer(e.path())), e.inner().to_string()))
}

/// The data family is a tagged enum, which serde parses from a buffer that
/// forgets paths. Re-checks each member on its own to find the failing one.
fn locate_data_error(text: &str) -> Option<ConfigError> {
    let v: serde_json::Value = serde_json::from_str(text).ok()?;
    let obj = v.get("data")?.as_object()?;
    for (k, val) in obj {
        let at = format!("/data/{}", escape(k));
        let e = match k.as_str() {
            "family" => field_error::<String>(&at, val),
            "eps" | "delta" => field_error::<f64>(&at, val),
            "phi" | "psi" => field_error::<Profile>(&at, val),
            "w" => field_error::<[Profile; 3]>(&at, val),
            _ => Some(ConfigError::new(&at, format!("unknown field `{k}`"))),
        };
        if e.is_some() {
            return e;
        }
    }
    None
}

fn finite(errs: &mut Vec<ConfigError>, at: &str, x: f64) -> bool {
    if x.is_finite() {
        true
    } else {
        errs.push(ConfigError::new(at, "must be finite"));
        false
    }
}

fn positive(errs: &mut Vec<ConfigError>, at: &str, x: f64) {
    if finite(errs, at, x) && x <= 0.0 {
        errs.push(ConfigError::new(at, format!("must be positive, got {x}")));
    }
}

fn nonnegative(errs: &mut Vec<ConfigError>, at: &str, x: f64) {
    if finite(errs, at, x) && x < 0.0 {
        errs.push(ConfigError::new(at, format!("must be nonnegative, got {x}")));
    }
}

fn check_profile(errs: &mut Vec<ConfigError>, at: &str, p: &Profile) {
    match p {
        Profile::Modes(terms) => {
            for (i, t) in terms.iter().enumerate() {
                finite(errs, &format!("{at}/modes/{i}/amp"), t.amp);
                for (j, f) in t.freq.iter().chain(&t.phase).enumerate() {
                    let key = if j < 3 { format!("freq/{j}") } else { format!("phase/{}", j - 3) };
                    finite(errs, &format!("{at}/modes/{i}/{key}"), *f);
                }
            }
        }
        Profile::Random { band_h, band_v, l2, .. } => {
            if *band_h < 0 {
                errs.push(ConfigError::new(&format!("{at}/random/band_h"), "must be nonnegative"));
            }
            if *band_v < 0 {
                errs.push(ConfigError::new(&format!("{at}/random/band_v"), "must be nonnegative"));
            }
            nonnegative(errs, &format!("{at}/random/l2"), *l2);
        }
    }
}

fn check_family(errs: &mut Vec<ConfigError>, d: &DataFamily) {
    let eps = d.eps();
    if finite(errs, "/data/eps", eps) && !(eps > 0.0 && eps < 1.0) {
        errs.push(ConfigError::new("/data/eps", format!("must lie in (0, 1), got {eps}")));
    }
    match d {
        DataFamily::Oscillatory { phi, .. } => check_profile(errs, "/data/phi", phi),
        DataFamily::SlowVarying { delta, psi, w, .. } => {
            nonnegative(errs, "/data/delta", *delta);
            check_profile(errs, "/data/psi", psi);
            for (i, p) in w.iter().enumerate() {
                check_profile(errs, &format!("/data/w/{i}"), p);
            }
        }
        DataFamily::Combined { delta, psi, phi, .. } => {
            nonnegative(errs, "/data/delta", *delta);
            check_profile(errs, "/data/psi", psi);
            check_profile(errs, "/data/phi", phi);
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a config document. Input paths and the output
    /// directory are resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, Vec<ConfigError>> {
        let cfg = Self::from_json(text, base_dir)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses without the semantic checks of [`validate`](Self::validate).
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, Vec<ConfigError>> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let at = pointer(e.path());
            let refined = if at == "/data" { locate_data_error(text) } else { None };
            vec![refined.unwrap_or_else(|| ConfigError::new(&at, e.inner().to_string()))]
        })?;
        if cfg.output.dir.is_relative() {
            cfg.output.dir = base_dir.join(&cfg.output.dir);
        }
        if let Some(inp) = &mut cfg.inputs {
            for p in [&mut inp.u1, &mut inp.u2, &mut inp.u3] {
                if p.is_relative() {
                    *p = base_dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    /// Checks every invariant the parser cannot, collecting all failures.
    pub fn validate(&self) -> Result<(), Vec<ConfigError>> {
        let mut errs = Vec::new();
        let g = &self.grid;
        if let Some(l) = g.l_h {
            positive(&mut errs, "/grid/l_h", l);
        }
        positive(&mut errs, "/grid/l_v", g.l_v);
        if g.fit_spare < 0 {
            errs.push(ConfigError::new("/grid/fit_spare", "must be nonnegative"));
        }
        if errs.is_empty() {
            if let Err(e) = Grid::with_periods(g.n_h, g.n_v, g.l_h.unwrap_or(2.0 * PI), g.l_v) {
                errs.push(ConfigError::new("/grid", e.to_string()));
            }
        }

        let s = &self.solver;
        positive(&mut errs, "/solver/dt", s.dt);
        nonnegative(&mut errs, "/solver/T", s.t_end);
        positive(&mut errs, "/solver/cfl_safety", s.cfl_safety);
        if !s.dealias {
            errs.push(ConfigError::new("/solver/dealias", "the 2/3 rule cannot be switched off"));
        }
        if s.monitor_every == 0 {
            errs.push(ConfigError::new("/solver/monitor_every", "must be at least 1"));
        }
        if s.dt > 0.0 && s.t_end >= 0.0 && s.dt.is_finite() && s.t_end.is_finite() {
            let n = s.t_end / s.dt;
            if (n - n.round()).abs() > 1e-9 * n.max(1.0) {
                errs.push(ConfigError::new(
                    "/solver/T",
                    format!("{} is not a whole number of steps {}", s.t_end, s.dt),
                ));
            }
        }

        let k = &self.constants;
        for (name, x) in [("L", k.l), ("M", k.m), ("C", k.c), ("eps0", k.eps0)] {
            nonnegative(&mut errs, &format!("/constants/{name}"), x);
        }
        if k.n < 2 {
            errs.push(ConfigError::new("/constants/N", format!("must be at least 2, got {}", k.n)));
        }
        if matches!(self.command, Command::Decompose) || (self.command == Command::Sweep && self.sweep.solve) {
            positive(&mut errs, "/constants/C", k.c);
        }
        for (name, x) in [("lambda", k.lambda), ("kappa", k.kappa), ("gamma", k.gamma), ("mu", k.mu)] {
            positive(&mut errs, &format!("/constants/{name}"), x);
        }

        if let Err(e) = CutoffPair::new(self.cutoffs) {
            errs.push(ConfigError::new("/cutoffs", e.to_string()));
        }

        let sources = [self.data.is_some(), self.random.is_some(), self.inputs.is_some()];
        let count = sources.iter().filter(|x| **x).count();
        if count > 1 {
            errs.push(ConfigError::new("", "data, random and inputs are mutually exclusive"));
        }
        if self.command.needs_field() && count == 0 {
            errs.push(ConfigError::new("", format!("{} needs one of data, random or inputs", self.command.name())));
        }
        if let Some(d) = &self.data {
            check_family(&mut errs, d);
        }
        if let Some(r) = &self.random {
            if r.band_h < 0 || r.band_v < 0 {
                errs.push(ConfigError::new("/random", "bands must be nonnegative"));
            }
            nonnegative(&mut errs, "/random/umax", r.umax);
        }
        if let Some(inp) = &self.inputs {
            for (name, p) in [("u1", &inp.u1), ("u2", &inp.u2), ("u3", &inp.u3)] {
                if !p.is_file() {
                    errs.push(ConfigError::new(&format!("/inputs/{name}"), format!("{} does not exist", p.display())));
                }
            }
        }

        if self.command == Command::Verify {
            let v = &self.verify;
            if v.suites.is_empty() {
                errs.push(ConfigError::new("/verify/suites", "must name at least one suite"));
            }
            if Grid::cube(v.grid).is_err() {
                errs.push(ConfigError::new("/verify/grid", format!("{} is not a valid grid size", v.grid)));
            }
            if v.refine_grid != 0 && (Grid::cube(v.refine_grid).is_err() || v.refine_grid <= v.grid) {
                errs.push(ConfigError::new("/verify/refine_grid", "must be 0 or a valid grid size above grid"));
            }
            for (name, x) in [("trials", v.trials), ("bernstein_trials", v.bernstein_trials)] {
                if x == 0 {
                    errs.push(ConfigError::new(&format!("/verify/{name}"), "must be at least 1"));
                }
            }
            if v.partition_samples < 1000 {
                errs.push(ConfigError::new("/verify/partition_samples", "must be at least 1000"));
            }
            positive(&mut errs, "/verify/horizon", v.horizon);
            positive(&mut errs, "/verify/refine_tol", v.refine_tol);
        }

        if self.command == Command::Sweep {
            let w = &self.sweep;
            match &self.data {
                None => errs.push(ConfigError::new("/data", "sweep needs a data family")),
                Some(DataFamily::Oscillatory { .. }) if w.param == SweepParam::Delta => {
                    errs.push(ConfigError::new("/sweep/param", "the oscillatory family has no delta"))
                }
                _ => {}
            }
            if w.values.len() < 2 {
                errs.push(ConfigError::new("/sweep/values", "need at least two points for a slope"));
            }
            for (i, x) in w.values.iter().enumerate() {
                let at = format!("/sweep/values/{i}");
                match w.param {
                    SweepParam::Eps if !(*x > 0.0 && *x < 1.0) => {
                        errs.push(ConfigError::new(&at, format!("eps must lie in (0, 1), got {x}")))
                    }
                    SweepParam::Delta if !(x.is_finite() && *x > 0.0) => {
                        errs.push(ConfigError::new(&at, format!("delta must be positive for a log-log slope, got {x}")))
                    }
                    _ => {}
                }
            }
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    pub fn cutoff_pair(&self) -> CutoffPair {
        CutoffPair::new(self.cutoffs).expect("validated")
    }

    pub fn solver_config(&self) -> SolverConfig {
        let s = &self.solver;
        SolverConfig {
            dt: s.dt,
            t_end: s.t_end,
            scheme: s.scheme,
            cfl_safety: s.cfl_safety,
            dealias: s.dealias,
            monitor_every: s.monitor_every,
            exponents: self.constants.exponents(),
        }
    }

    /// Smallest `ε` the run generates data for.
    fn min_eps(&self) -> Option<f64> {
        let d = self.data.as_ref()?;
        let mut e = d.eps();
        if self.command == Command::Sweep && self.sweep.param == SweepParam::Eps {
            e = self.sweep.values.iter().copied().fold(e, f64::min);
        }
        Some(e)
    }

    /// Hash of everything that can change results; the output section is
    /// left out so a run reproduces its stamps in any directory.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputSpec::default();
        crate::hash::config_hash(&c)
    }

    /// Base grid of the run, with `l_h` fitted when left open.
    pub fn base_grid(&self) -> Grid {
        let g = &self.grid;
        let l_h = g.l_h.unwrap_or_else(|| match self.min_eps() {
            Some(e) => oscillatory_period(g.n_h, e, g.fit_spare),
            None => 2.0 * PI,
        });
        Grid::with_periods(g.n_h, g.n_v, l_h, g.l_v).expect("validated")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<ExperimentConfig, Vec<ConfigError>> {
        ExperimentConfig::parse(s, Path::new(""))
    }

    #[test]
    fn empty_document_is_the_default_verify_run() {
        let c = parse("{}").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.command, Command::Verify);
        assert_eq!(c.base_grid().l_h, 2.0 * PI);
    }

    #[test]
    fn type_errors_carry_pointers() {
        let e = parse(r#"{"solver": {"dt": "x"}}"#).unwrap_err();
        assert_eq!(e[0].pointer, "/solver/dt");
        let e = parse(r#"{"verify": {"suites": ["partition", "nope"]}}"#).unwrap_err();
        assert_eq!(e[0].pointer, "/verify/suites/1");
        let e = parse(r#"{"grid": {"n_x": 3}}"#).unwrap_err();
        assert_eq!(e[0].pointer, "/grid/n_x");
        let e =
            parse(r#"{"data": {"family": "oscillatory", "eps": 0.5, "phi": {"modes": [{"amp": 1}]}}}"#).unwrap_err();
        assert_eq!(e[0].pointer, "/data/phi/modes/0");
        assert!(parse("{").unwrap_err()[0].pointer.is_empty());
    }

    #[test]
    fn semantic_errors_are_all_reported() {
        let e = parse(r#"{"solver": {"dt": -1, "monitor_every": 0}, "constants": {"N": 1, "mu": 0}}"#).unwrap_err();
        let at: Vec<&str> = e.iter().map(|x| x.pointer.as_str()).collect();
        assert_eq!(at, ["/solver/dt", "/solver/monitor_every", "/constants/N", "/constants/mu"]);
        let e = parse(r#"{"solver": {"dt": 0.3, "T": 1}}"#).unwrap_err();
        assert_eq!(e[0].pointer, "/solver/T");
        let e = parse(r#"{"grid": {"n_h": 14}}"#).unwrap_err();
        assert_eq!(e[0].pointer, "/grid");
        let e = parse(r#"{"cutoffs": {"a": 0.5, "b": 1.2, "phi_scale": 1}}"#).unwrap_err();
        assert_eq!(e[0].pointer, "/cutoffs");
    }

    #[test]
    fn data_sources() {
        let e = parse(r#"{"command": "simulate"}"#).unwrap_err();
        assert!(e[0].message.contains("needs one of"));
        let e =
            parse(r#"{"command": "simulate", "random": {}, "inputs": {"u1": "a", "u2": "b", "u3": "c"}}"#).unwrap_err();
        assert!(e.iter().any(|x| x.message.contains("mutually exclusive")));
        assert!(e.iter().any(|x| x.pointer == "/inputs/u2"));
        let e = parse(r#"{"command": "analyze", "data": {"family": "oscillatory", "eps": 2, "phi": {"modes": []}}}"#)
            .unwrap_err();
        assert_eq!(e[0].pointer, "/data/eps");
    }

    #[test]
    fn open_period_fits_the_smallest_eps() {
        let c = parse(
            r#"{"command": "sweep", "grid": {"n_h": 48, "n_v": 16},
                "data": {"family": "oscillatory", "eps": 0.25, "phi": {"modes": []}},
                "sweep": {"values": [0.25, 0.125, 0.0625]}}"#,
        )
        .unwrap();
        assert_eq!(c.base_grid().l_h, PI);
    }

    #[test]
    fn pointer_tokens_are_escaped() {
        assert_eq!(escape("a/b~c"), "a~1b~0c");
    }

    #[test]
    fn hash_ignores_the_output_section() {
        let a = parse(r#"{"seed": 3, "output": {"dir": "x", "checkpoint_every": 2}}"#).unwrap();
        let b = parse(r#"{"seed": 3}"#).unwrap();
        let c = parse(r#"{"seed": 4}"#).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(b.hash(), c.hash());
        assert_eq!(a.hash().len(), 16);
    }

    #[test]
    fn partial_cutoffs_keep_defaults() {
        let c = parse(r#"{"cutoffs": {"phi_scale": 0.5}}"#).unwrap();
        assert_eq!(c.cutoffs.a, CutoffProfile::default().a);
        assert_eq!(c.cutoffs.phi_scale, 0.5);
        assert!(parse(r#"{"cutoffs": {"c": 1}}"#).is_err());
    }
}
