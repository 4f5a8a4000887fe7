//! Time integration of the anisotropic system, of the layered 2-D system and
//! of the decomposition pipeline.

mod ans;
mod decompose;
mod layers;

use alloc::vec::Vec;

use num_complex::Complex64;

pub use ans::{simulate, step_ans, AnsIntegrator, SimulationSummary};
pub use decompose::{
    bootstrap_monitor, pressure_diagnostic, run_decomposition, BootstrapStatus, DecompositionState,
    DecompositionSummary, WResidual, BOOTSTRAP_COLUMN,
};
pub use layers::{layer_energy_profile, solve_2dns_layers, LayerSample, LayeredIntegrator, LayeredSummary};

use crate::error::{Error, Result};

/// Time-stepping scheme. Only integrating-factor RK4 is provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Scheme {
    #[default]
    #[cfg_attr(feature = "serde", serde(rename = "IF-RK4"))]
    IfRk4,
}

/// Exponents of the time weights in the weighted norms.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Exponents {
    /// Damping exponent for `f`, applied to `v^h`.
    pub lambda: f64,
    /// Accepted for completeness; no monitored quantity uses it.
    pub kappa: f64,
    /// Damping exponent for `g^h`, applied to `ū^h`.
    pub gamma: f64,
    /// Damping exponent for `ħ`, applied to `w`.
    pub mu: f64,
}

impl Default for Exponents {
    fn default() -> Self {
        Self { lambda: 1.0, kappa: 1.0, gamma: 1.0, mu: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SolverConfig {
    pub dt: f64,
    /// Final time; must be a whole number of steps.
    #[cfg_attr(feature = "serde", serde(rename = "T"))]
    pub t_end: f64,
    pub scheme: Scheme,
    pub cfl_safety: f64,
    /// Must stay on; the nonlinear term is always evaluated with the 2/3 rule.
    pub dealias: bool,
    pub monitor_every: usize,
    pub exponents: Exponents,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            scheme: Scheme::IfRk4,
            cfl_safety: 0.5,
            dealias: true,
            monitor_every: 10,
            exponents: Exponents::default(),
        }
    }
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self { dt, t_end, ..Self::default() }
    }

    pub fn with_monitor_every(mut self, m: usize) -> Self {
        self.monitor_every = m;
        self
    }

    /// Number of steps to reach `t_end`.
    pub fn steps(&self) -> Result<usize> {
        self.validate()?;
        Ok(libm::round(self.t_end / self.dt) as usize)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive and finite");
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad("T must be nonnegative and finite");
        }
        let n = self.t_end / self.dt;
        if (n - libm::round(n)).abs() > 1e-9 * n.max(1.0) {
            return bad("T must be a whole number of steps dt");
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety.is_finite()) {
            return bad("cfl_safety must be positive");
        }
        if !self.dealias {
            return bad("dealias must be on");
        }
        if self.monitor_every == 0 {
            return bad("monitor_every must be at least 1");
        }
        let e = self.exponents;
        if [e.lambda, e.kappa, e.gamma, e.mu].iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return bad("weight exponents must be positive and finite");
        }
        Ok(())
    }

    /// Step indices at which monitors run: every `monitor_every` steps and the last.
    pub(crate) fn monitor_steps(&self) -> Result<Vec<usize>> {
        let n = self.steps()?;
        let mut out: Vec<usize> = (0..=n).step_by(self.monitor_every).collect();
        if *out.last().expect("nonempty") != n {
            out.push(n);
        }
        Ok(out)
    }
}

/// Quadrature of `∫ 2k|c(τ)|² dτ` over one step, per mode. The free decay
/// `e^{−kτ}c₀` is kept exact and the forced remainder `r = c − e^{−kτ}c₀` is
/// replaced by its cubic Hermite interpolant from `c`, `N` at both ends
/// (`ċ = −kc + N`); the remainder terms use 6-point Gauss-Legendre.
#[derive(Clone, Debug)]
pub(crate) struct DissipationRule {
    h: f64,
    k: Vec<f64>,
    decay: Vec<f64>,
    /// `e^{−k h s_j}` per mode and node.
    nodes: Vec<[f64; 6]>,
}

#[allow(clippy::excessive_precision)]
const GL_X: [f64; 6] = [
    -0.932_469_514_203_152_1,
    -0.661_209_386_466_264_5,
    -0.238_619_186_083_196_9,
    0.238_619_186_083_196_9,
    0.661_209_386_466_264_5,
    0.932_469_514_203_152_1,
];
#[allow(clippy::excessive_precision)]
const GL_W: [f64; 6] = [
    0.171_324_492_379_170_4,
    0.360_761_573_048_138_6,
    0.467_913_934_572_691_0,
    0.467_913_934_572_691_0,
    0.360_761_573_048_138_6,
    0.171_324_492_379_170_4,
];

fn gl_node(j: usize) -> f64 {
    0.5 * (GL_X[j] + 1.0)
}

impl DissipationRule {
    pub(crate) fn new(kh2: &[f64], h: f64) -> Self {
        let nodes = kh2.iter().map(|&k| core::array::from_fn(|j| libm::exp(-k * h * gl_node(j)))).collect();
        Self { h, k: kh2.to_vec(), decay: kh2.iter().map(|&k| libm::exp(-k * h)).collect(), nodes }
    }

    /// Sum over components and modes; `c[comp][mode]`.
    pub(crate) fn apply<V: AsRef<[Complex64]>>(&self, c0: &[V], n0: &[V], c1: &[V], n1: &[V]) -> f64 {
        let h = self.h;
        let herm: [[f64; 3]; 6] = core::array::from_fn(|j| {
            let s = gl_node(j);
            [s * s * s - 2.0 * s * s + s, -2.0 * s * s * s + 3.0 * s * s, s * s * s - s * s]
        });
        let mut acc = 0.0;
        for comp in 0..c0.len() {
            let (c0, n0, c1, n1) = (c0[comp].as_ref(), n0[comp].as_ref(), c1[comp].as_ref(), n1[comp].as_ref());
            for b in 0..self.k.len() {
                let k = self.k[b];
                if k == 0.0 {
                    continue;
                }
                let e = self.decay[b];
                let r1 = c1[b] - c0[b] * e;
                let dr1 = n1[b] - r1 * k;
                let mut rem = 0.0;
                for j in 0..6 {
                    let [h10, h01, h11] = herm[j];
                    let r = n0[b] * (h * h10) + r1 * h01 + dr1 * (h * h11);
                    rem += 0.5 * GL_W[j] * (2.0 * (c0[b].conj() * r).re * self.nodes[b][j] + r.norm_sqr());
                }
                acc += c0[b].norm_sqr() * (1.0 - e * e) + 2.0 * k * h * rem;
            }
        }
        acc
    }
}
