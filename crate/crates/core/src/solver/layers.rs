use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{DissipationRule, SolverConfig};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::spectral::{derivative, Axis};
use crate::transform::Transformer;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

type Plane2 = [Vec<Complex64>; 2];

/// `−P_h∇_h·(ū⊗ū)` on the horizontal dealiasing box of one layer.
#[derive(Clone)]
struct Nonlinear2 {
    n: usize,
    tr: Transformer,
    idx: Vec<usize>,
    neg: Vec<usize>,
    xi: Vec<[f64; 2]>,
    kh2: Vec<f64>,
    z: Vec<Complex64>,
    q1: Vec<Complex64>,
    q2: Vec<Complex64>,
}

impl Nonlinear2 {
    fn new(g: &Grid) -> Self {
        let n = g.n_h;
        let k = g.dealias_cutoff(n);
        let (mut idx, mut neg, mut xi, mut kh2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for i1 in 0..n {
            for i2 in 0..n {
                if Grid::wavenumber(i1, n).abs() <= k && Grid::wavenumber(i2, n).abs() <= k {
                    idx.push(i1 * n + i2);
                    neg.push(((n - i1) % n) * n + (n - i2) % n);
                    let x = [g.xi_h(i1), g.xi_h(i2)];
                    kh2.push(x[0] * x[0] + x[1] * x[1]);
                    xi.push(x);
                }
            }
        }
        Self {
            n,
            tr: Transformer::new(g),
            idx,
            neg,
            xi,
            kh2,
            z: vec![ZERO; n * n],
            q1: vec![ZERO; n * n],
            q2: vec![ZERO; n * n],
        }
    }

    fn len(&self) -> usize {
        self.idx.len()
    }

    fn zeros(&self) -> Plane2 {
        [vec![ZERO; self.len()], vec![ZERO; self.len()]]
    }

    fn project(&self, s: &mut Plane2) {
        for (b, x) in self.xi.iter().enumerate() {
            let k2 = x[0] * x[0] + x[1] * x[1];
            if k2 > 0.0 {
                let d = (s[0][b] * x[0] + s[1][b] * x[1]) / k2;
                s[0][b] -= d * x[0];
                s[1][b] -= d * x[1];
            }
        }
    }

    fn eval(&mut self, u: &Plane2, out: &mut Plane2) -> f64 {
        self.z.fill(ZERO);
        for (b, &p) in self.idx.iter().enumerate() {
            self.z[p] = u[0][b] + I * u[1][b];
        }
        self.tr.plane_to_physical(&mut self.z);
        let mut umax2 = 0.0f64;
        for p in 0..self.n * self.n {
            let (a, b) = (self.z[p].re, self.z[p].im);
            umax2 = umax2.max(a * a + b * b);
            self.q1[p] = Complex64::new(a * a, b * b);
            self.q2[p] = Complex64::new(a * b, 0.0);
        }
        self.tr.plane_to_spectral(&mut self.q1);
        self.tr.plane_to_spectral(&mut self.q2);
        for (b, (&p, &m)) in self.idx.iter().zip(&self.neg).enumerate() {
            let (z, zm) = (self.q1[p], self.q1[m].conj());
            let p11 = (z + zm) * 0.5;
            let p22 = (z - zm) * Complex64::new(0.0, -0.5);
            let p12 = (self.q2[p] + self.q2[m].conj()) * 0.5;
            let x = self.xi[b];
            let mut f = [-I * (x[0] * p11 + x[1] * p12), -I * (x[0] * p12 + x[1] * p22)];
            let k2 = self.kh2[b];
            if k2 > 0.0 {
                let d = (f[0] * x[0] + f[1] * x[1]) / k2;
                f[0] -= d * x[0];
                f[1] -= d * x[1];
            }
            out[0][b] = f[0];
            out[1][b] = f[1];
        }
        libm::sqrt(umax2)
    }
}

/// Independent 2-D Navier-Stokes solves, one per vertical grid layer, for a
/// horizontal field `ū^h(x_h, x₃)`.
#[derive(Clone)]
pub struct LayeredIntegrator {
    grid: Grid,
    tr: Transformer,
    nl: Nonlinear2,
    layers: Vec<Plane2>,
    k1: Vec<Plane2>,
    tmp: [Plane2; 4],
    e_half: Vec<f64>,
    e_full: Vec<f64>,
    dt: f64,
    cfl_safety: f64,
    dx: f64,
    t: f64,
    step: usize,
    umax: Vec<f64>,
    e0: Vec<f64>,
    diss: Vec<f64>,
    rule: DissipationRule,
    truncated: f64,
}

impl LayeredIntegrator {
    /// Starts from the 3-D spectral components `(ū¹, ū²)`. Each layer is
    /// truncated to the horizontal dealiasing box and projected.
    pub fn new(u1: &Field, u2: &Field, dt: f64, cfl_safety: f64) -> Result<Self> {
        let g = *u1.grid();
        if *u2.grid() != g {
            return Err(Error::GridMismatch);
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidConfig("dt must be positive and finite".into()));
        }
        let mut tr = Transformer::new(&g);
        let nl = Nonlinear2::new(&g);
        let (nh, nv) = (g.n_h, g.n_v);
        let mut layers: Vec<Plane2> = (0..nv).map(|_| nl.zeros()).collect();
        let mut truncated = 0.0;
        for (c, f) in [u1, u2].into_iter().enumerate() {
            let mut data = f.coeffs().to_vec();
            tr.vertical_to_physical(&mut data);
            for (l, layer) in layers.iter_mut().enumerate() {
                let plane: Vec<Complex64> = (0..nh * nh).map(|p| data[p * nv + l]).collect();
                let total: f64 = plane.iter().map(|z| z.norm_sqr()).sum();
                let mut kept = 0.0;
                for (b, &p) in nl.idx.iter().enumerate() {
                    layer[c][b] = plane[p];
                    kept += plane[p].norm_sqr();
                }
                truncated += (total - kept).max(0.0) / nv as f64;
            }
        }
        let mut nl = nl;
        for layer in &mut layers {
            nl.project(layer);
        }
        let e_half = nl.kh2.iter().map(|k| libm::exp(-0.5 * dt * k)).collect();
        let e_full = nl.kh2.iter().map(|k| libm::exp(-dt * k)).collect();
        let mut k1: Vec<Plane2> = (0..nv).map(|_| nl.zeros()).collect();
        let umax = layers.iter().zip(&mut k1).map(|(l, k)| nl.eval(l, k)).collect();
        let tmp = [nl.zeros(), nl.zeros(), nl.zeros(), nl.zeros()];
        let rule = DissipationRule::new(&nl.kh2, dt);
        let mut out = Self {
            grid: g,
            tr,
            nl,
            layers,
            k1,
            tmp,
            e_half,
            e_full,
            dt,
            cfl_safety,
            dx: g.spacing().0,
            t: 0.0,
            step: 0,
            umax,
            e0: Vec::new(),
            diss: vec![0.0; nv],
            rule,
            truncated,
        };
        out.e0 = out.layer_energies();
        Ok(out)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn truncated_energy(&self) -> f64 {
        self.truncated
    }

    /// `‖ū^h(t,·,x₃)‖²` per layer, as mean squares over the layer.
    pub fn layer_energies(&self) -> Vec<f64> {
        self.layers.iter().map(|l| l.iter().flatten().map(|c| c.norm_sqr()).sum()).collect()
    }

    pub fn initial_layer_energies(&self) -> &[f64] {
        &self.e0
    }

    /// `2∫₀^t ‖∇_hū^h(·,x₃)‖²` per layer.
    pub fn layer_dissipation(&self) -> &[f64] {
        &self.diss
    }

    /// Worst relative defect of the per-layer energy identity. Layers whose
    /// initial energy is below `1e-12` of the largest one are measured
    /// against that floor.
    pub fn max_layer_drift(&self) -> f64 {
        let e = self.layer_energies();
        let emax = self.e0.iter().copied().fold(0.0, f64::max);
        if emax == 0.0 {
            return 0.0;
        }
        (0..e.len())
            .map(|l| (e[l] + self.diss[l] - self.e0[l]).abs() / self.e0[l].max(1e-12 * emax))
            .fold(0.0, f64::max)
    }

    pub fn umax(&self) -> f64 {
        self.umax.iter().copied().fold(0.0, f64::max)
    }

    /// Current `(ū¹, ū²)` as 3-D spectral fields.
    pub fn state(&mut self) -> [Field; 2] {
        let g = self.grid;
        let (nh, nv) = (g.n_h, g.n_v);
        let mut out = Vec::with_capacity(2);
        for c in 0..2 {
            let mut data = vec![ZERO; g.len()];
            let mut plane = vec![ZERO; nh * nh];
            for (l, layer) in self.layers.iter().enumerate() {
                plane.fill(ZERO);
                for (b, &p) in self.nl.idx.iter().enumerate() {
                    plane[p] = layer[c][b];
                }
                for (p, z) in plane.iter().enumerate() {
                    data[p * nv + l] = *z;
                }
            }
            self.tr.vertical_to_spectral(&mut data);
            out.push(Field::from_coeffs_unchecked(&g, data, true));
        }
        let u2 = out.pop().expect("two components");
        let u1 = out.pop().expect("two components");
        [u1, u2]
    }

    pub fn step(&mut self) -> Result<()> {
        let (h, n) = (self.dt, self.nl.len());
        for l in 0..self.layers.len() {
            if self.umax[l] > 0.0 {
                let limit = self.cfl_safety * self.dx / self.umax[l];
                if h > limit {
                    return Err(Error::Cfl { step: self.step, t: self.t, umax: self.umax[l], dt: h, limit });
                }
            }
        }
        for l in 0..self.layers.len() {
            let (c0, n0) = (self.layers[l].clone(), self.k1[l].clone());
            let (eh, ef) = (&self.e_half, &self.e_full);
            let u = &mut self.layers[l];
            let k1 = &self.k1[l];
            let [a, k2, k3, k4] = &mut self.tmp;
            for c in 0..2 {
                for b in 0..n {
                    a[c][b] = (u[c][b] + k1[c][b] * (0.5 * h)) * eh[b];
                }
            }
            self.nl.eval(a, k2);
            for c in 0..2 {
                for b in 0..n {
                    a[c][b] = u[c][b] * eh[b] + k2[c][b] * (0.5 * h);
                }
            }
            self.nl.eval(a, k3);
            for c in 0..2 {
                for b in 0..n {
                    a[c][b] = u[c][b] * ef[b] + k3[c][b] * (h * eh[b]);
                }
            }
            self.nl.eval(a, k4);
            for c in 0..2 {
                for b in 0..n {
                    u[c][b] = u[c][b] * ef[b]
                        + (k1[c][b] * ef[b] + (k2[c][b] + k3[c][b]) * (2.0 * eh[b]) + k4[c][b]) * (h / 6.0);
                }
            }
            self.nl.project(u);
            if !u.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { step: self.step + 1, t: (self.step + 1) as f64 * h });
            }
            self.umax[l] = self.nl.eval(&self.layers[l], &mut self.k1[l]);
            self.diss[l] += self.rule.apply(&c0, &n0, &self.layers[l], &self.k1[l]);
        }
        self.step += 1;
        self.t = self.step as f64 * h;
        Ok(())
    }
}

/// Layer diagnostics at one monitor time.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerSample {
    pub t: f64,
    pub energy: Vec<f64>,
    pub dissipation: Vec<f64>,
    /// Per-layer `‖∂₃ū^h‖²_{L²_h}` and `‖∇_h∂₃ū^h‖²_{L²_h}` (mean squares).
    pub d3_energy: Vec<f64>,
    pub grad_h_d3_energy: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LayeredSummary {
    pub samples: Vec<LayerSample>,
    pub initial_energy: Vec<f64>,
    pub max_layer_drift: f64,
    pub final_state: [Field; 2],
}

/// Mean square over each horizontal layer `x₃ = j L_v / n_v`, summed over `comps`.
pub fn layer_energy_profile(comps: &[&Field]) -> Vec<f64> {
    let g = *comps[0].grid();
    let (np, nv) = (g.plane_len(), g.n_v);
    let mut tr = Transformer::new(&g);
    let mut e = vec![0.0; nv];
    for f in comps {
        let mut data = f.coeffs().to_vec();
        tr.vertical_to_physical(&mut data);
        for p in 0..np {
            for (l, el) in e.iter_mut().enumerate() {
                *el += data[p * nv + l].norm_sqr();
            }
        }
    }
    e
}

/// Solves the layered 2-D system from `(ū¹₀, ū²₀)` to `cfg.t_end`.
pub fn solve_2dns_layers(u1: &Field, u2: &Field, cfg: &SolverConfig) -> Result<LayeredSummary> {
    cfg.validate()?;
    let flat = crate::field::VecField::new(u1.clone(), u2.clone(), Field::zeros(u1.grid()))?;
    if !flat.is_divergence_free(1e-10) {
        return Err(Error::InadmissibleData("initial layers are not horizontally divergence-free".into()));
    }
    let monitors = cfg.monitor_steps()?;
    let mut it = LayeredIntegrator::new(u1, u2, cfg.dt, cfg.cfl_safety)?;
    let mut samples = Vec::with_capacity(monitors.len());
    let mut max_drift = 0.0f64;
    for &s in &monitors {
        while it.steps_taken() < s {
            it.step()?;
            max_drift = max_drift.max(it.max_layer_drift());
        }
        let st = it.state();
        let d3 = [derivative(&st[0], Axis::X3), derivative(&st[1], Axis::X3)];
        let gd3 = [
            derivative(&d3[0], Axis::X1),
            derivative(&d3[0], Axis::X2),
            derivative(&d3[1], Axis::X1),
            derivative(&d3[1], Axis::X2),
        ];
        samples.push(LayerSample {
            t: it.t(),
            energy: it.layer_energies(),
            dissipation: it.layer_dissipation().to_vec(),
            d3_energy: layer_energy_profile(&[&d3[0], &d3[1]]),
            grad_h_d3_energy: layer_energy_profile(&gd3.iter().collect::<Vec<_>>()),
        });
    }
    Ok(LayeredSummary {
        samples,
        initial_energy: it.initial_layer_energies().to_vec(),
        max_layer_drift: max_drift,
        final_state: it.state(),
    })
}
