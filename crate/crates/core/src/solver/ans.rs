use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{DissipationRule, SolverConfig};
use crate::error::{Error, Result};
use crate::field::{Field, VecField};
use crate::grid::Grid;
use crate::ledger::NormLedger;
use crate::lp::DyadicLadder;
use crate::norms::{b0half_shells, b4_neg_blocks};
use crate::transform::Transformer;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Velocity restricted to the dealiasing box: `comps[c][b]` is the
/// coefficient of component `c` at band position `b`.
pub(crate) type BandState = [Vec<Complex64>; 3];

/// Evaluates `−P∇·(u⊗u)` on the dealiasing box.
#[derive(Clone)]
pub(crate) struct Nonlinear3 {
    grid: Grid,
    tr: Transformer,
    /// Storage index of every band position.
    pub(crate) idx: Vec<usize>,
    /// Storage index of `−ξ` for every band position.
    neg: Vec<usize>,
    pub(crate) xi: Vec<[f64; 3]>,
    pub(crate) kh2: Vec<f64>,
    z1: Vec<Complex64>,
    z2: Vec<Complex64>,
    q: [Vec<Complex64>; 3],
}

impl Nonlinear3 {
    pub(crate) fn new(grid: &Grid) -> Self {
        let g = *grid;
        let mut idx = Vec::new();
        let mut neg = Vec::new();
        let mut xi = Vec::new();
        let mut kh2 = Vec::new();
        for n in 0..g.len() {
            let (i1, i2, i3) = g.unindex(n);
            if g.keeps(i1, i2, i3) {
                idx.push(n);
                neg.push(g.index((g.n_h - i1) % g.n_h, (g.n_h - i2) % g.n_h, (g.n_v - i3) % g.n_v));
                let x = [g.xi_h(i1), g.xi_h(i2), g.xi_v(i3)];
                kh2.push(x[0] * x[0] + x[1] * x[1]);
                xi.push(x);
            }
        }
        let n = g.len();
        Self {
            grid: g,
            tr: Transformer::new(&g),
            idx,
            neg,
            xi,
            kh2,
            z1: vec![ZERO; n],
            z2: vec![ZERO; n],
            q: [vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]],
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.idx.len()
    }

    pub(crate) fn zeros(&self) -> BandState {
        let n = self.len();
        [vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]]
    }

    /// Restriction of `u` to the band and the energy left outside it.
    pub(crate) fn restrict(&self, u: &VecField) -> (BandState, f64) {
        let mut s = self.zeros();
        let mut kept = 0.0;
        for c in 0..3 {
            let co = u.comps[c].coeffs();
            for (b, &n) in self.idx.iter().enumerate() {
                s[c][b] = co[n];
                kept += co[n].norm_sqr();
            }
        }
        (s, (u.energy() - kept).max(0.0))
    }

    pub(crate) fn expand(&self, s: &BandState) -> VecField {
        let mk = |c: usize| {
            let mut co = vec![ZERO; self.grid.len()];
            for (b, &n) in self.idx.iter().enumerate() {
                co[n] = s[c][b];
            }
            Field::from_coeffs_unchecked(&self.grid, co, true)
        };
        VecField { comps: [mk(0), mk(1), mk(2)] }
    }

    pub(crate) fn project(&self, s: &mut BandState) {
        for b in 0..self.len() {
            let x = self.xi[b];
            let k2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            if k2 == 0.0 {
                continue;
            }
            let d = (s[0][b] * x[0] + s[1][b] * x[1] + s[2][b] * x[2]) / k2;
            for c in 0..3 {
                s[c][b] -= d * x[c];
            }
        }
    }

    /// Writes `−P∇·(u⊗u)` into `out` and returns `max |u|` over grid points.
    pub(crate) fn eval(&mut self, u: &BandState, out: &mut BandState) -> f64 {
        self.z1.fill(ZERO);
        self.z2.fill(ZERO);
        for (b, &n) in self.idx.iter().enumerate() {
            self.z1[n] = u[0][b] + I * u[1][b];
            self.z2[n] = u[2][b];
        }
        self.tr.to_physical_dealiased(&mut self.z1);
        self.tr.to_physical_dealiased(&mut self.z2);
        let mut umax2 = 0.0f64;
        let [q1, q2, q3] = &mut self.q;
        for p in 0..self.z1.len() {
            let (a, b, c) = (self.z1[p].re, self.z1[p].im, self.z2[p].re);
            umax2 = umax2.max(a * a + b * b + c * c);
            q1[p] = Complex64::new(a * a, b * b);
            q2[p] = Complex64::new(c * c, a * b);
            q3[p] = Complex64::new(a * c, b * c);
        }
        for q in &mut self.q {
            self.tr.to_spectral_dealiased(q);
        }
        let split = |q: &[Complex64], n: usize, m: usize| {
            let (z, zm) = (q[n], q[m].conj());
            ((z + zm) * 0.5, (z - zm) * Complex64::new(0.0, -0.5))
        };
        for (b, (&n, &m)) in self.idx.iter().zip(&self.neg).enumerate() {
            let (p11, p22) = split(&self.q[0], n, m);
            let (p33, p12) = split(&self.q[1], n, m);
            let (p13, p23) = split(&self.q[2], n, m);
            let x = self.xi[b];
            let mut f = [
                -I * (x[0] * p11 + x[1] * p12 + x[2] * p13),
                -I * (x[0] * p12 + x[1] * p22 + x[2] * p23),
                -I * (x[0] * p13 + x[1] * p23 + x[2] * p33),
            ];
            let k2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            if k2 > 0.0 {
                let d = (f[0] * x[0] + f[1] * x[1] + f[2] * x[2]) / k2;
                for c in 0..3 {
                    f[c] -= d * x[c];
                }
            }
            for c in 0..3 {
                out[c][b] = f[c];
            }
        }
        libm::sqrt(umax2)
    }
}

/// Lawson RK4 with the horizontal heat semigroup as integrating factor.
pub(crate) fn lawson_rk4(
    nl: &mut Nonlinear3,
    u: &mut BandState,
    k1: &BandState,
    h: f64,
    e_half: &[f64],
    e_full: &[f64],
    tmp: &mut [BandState; 4],
) {
    let n = nl.len();
    let [a, k2, k3, k4] = tmp;
    for c in 0..3 {
        for b in 0..n {
            a[c][b] = (u[c][b] + k1[c][b] * (0.5 * h)) * e_half[b];
        }
    }
    nl.eval(a, k2);
    for c in 0..3 {
        for b in 0..n {
            a[c][b] = u[c][b] * e_half[b] + k2[c][b] * (0.5 * h);
        }
    }
    nl.eval(a, k3);
    for c in 0..3 {
        for b in 0..n {
            a[c][b] = u[c][b] * e_full[b] + k3[c][b] * (h * e_half[b]);
        }
    }
    nl.eval(a, k4);
    for c in 0..3 {
        for b in 0..n {
            u[c][b] = u[c][b] * e_full[b]
                + (k1[c][b] * e_full[b] + (k2[c][b] + k3[c][b]) * (2.0 * e_half[b]) + k4[c][b]) * (h / 6.0);
        }
    }
    nl.project(u);
}

/// Integrator for the anisotropic system that also tracks the energy law
/// `‖u(t)‖² + 2∫‖∇_h u‖² = ‖u₀‖²` (energies are sums of squared coefficients).
#[derive(Clone)]
pub struct AnsIntegrator {
    nl: Nonlinear3,
    u: BandState,
    k1: BandState,
    tmp: [BandState; 4],
    e_half: Vec<f64>,
    e_full: Vec<f64>,
    dt: f64,
    cfl_safety: f64,
    dx_min: f64,
    t: f64,
    step: usize,
    umax: f64,
    e0: f64,
    diss: f64,
    rule: DissipationRule,
    truncated: f64,
}

impl AnsIntegrator {
    /// Starts from `u0`, which is truncated to the dealiasing box and projected.
    pub fn new(u0: &VecField, dt: f64, cfl_safety: f64) -> Result<Self> {
        let g = *u0.grid();
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidConfig("dt must be positive and finite".into()));
        }
        if !u0.is_real() {
            return Err(Error::NotReal);
        }
        let mut nl = Nonlinear3::new(&g);
        let (mut u, truncated) = nl.restrict(u0);
        nl.project(&mut u);
        let e_half = nl.kh2.iter().map(|k| libm::exp(-0.5 * dt * k)).collect();
        let e_full = nl.kh2.iter().map(|k| libm::exp(-dt * k)).collect();
        let mut k1 = nl.zeros();
        let umax = nl.eval(&u, &mut k1);
        let tmp = [nl.zeros(), nl.zeros(), nl.zeros(), nl.zeros()];
        let (dh, dv) = g.spacing();
        let rule = DissipationRule::new(&nl.kh2, dt);
        let mut out = Self {
            nl,
            u,
            k1,
            tmp,
            e_half,
            e_full,
            dt,
            cfl_safety,
            dx_min: dh.min(dv),
            t: 0.0,
            step: 0,
            umax,
            e0: 0.0,
            diss: 0.0,
            rule,
            truncated,
        };
        out.e0 = out.energy();
        Ok(out)
    }

    pub fn grid(&self) -> &Grid {
        &self.nl.grid
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `max |u|` over grid points at the current time.
    pub fn umax(&self) -> f64 {
        self.umax
    }

    /// Energy of the initial field that lay outside the dealiasing box.
    pub fn truncated_energy(&self) -> f64 {
        self.truncated
    }

    pub fn state(&self) -> VecField {
        self.nl.expand(&self.u)
    }

    pub fn energy(&self) -> f64 {
        self.u.iter().flatten().map(|c| c.norm_sqr()).sum()
    }

    pub fn initial_energy(&self) -> f64 {
        self.e0
    }

    /// `2∫₀^t ‖∇_h u‖²`, integrated mode by mode with the heat factor exact.
    pub fn dissipation(&self) -> f64 {
        self.diss
    }

    /// `|‖u‖² + 2∫‖∇_h u‖² − ‖u₀‖²| / ‖u₀‖²` (zero for zero data).
    pub fn energy_drift(&self) -> f64 {
        if self.e0 == 0.0 {
            0.0
        } else {
            (self.energy() + self.diss - self.e0).abs() / self.e0
        }
    }

    /// Largest stable step under the advective bound.
    pub fn cfl_limit(&self) -> f64 {
        if self.umax == 0.0 {
            f64::INFINITY
        } else {
            self.cfl_safety * self.dx_min / self.umax
        }
    }

    pub fn step(&mut self) -> Result<()> {
        let limit = self.cfl_limit();
        if self.dt > limit {
            return Err(Error::Cfl { step: self.step, t: self.t, umax: self.umax, dt: self.dt, limit });
        }
        let (c0, n0) = (self.u.clone(), self.k1.clone());
        lawson_rk4(&mut self.nl, &mut self.u, &self.k1, self.dt, &self.e_half, &self.e_full, &mut self.tmp);
        self.step += 1;
        self.t = self.step as f64 * self.dt;
        if !self.u.iter().flatten().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite { step: self.step, t: self.t });
        }
        self.umax = self.nl.eval(&self.u, &mut self.k1);
        self.diss += self.rule.apply(&c0, &n0, &self.u, &self.k1);
        Ok(())
    }
}

fn check_solenoidal(u: &VecField) -> Result<()> {
    if !u.is_divergence_free(1e-10) {
        return Err(Error::InadmissibleData(alloc::format!(
            "velocity is not divergence-free (relative defect {:e})",
            u.divergence_defect()
        )));
    }
    Ok(())
}

/// One integrating-factor RK4 step of the anisotropic system.
pub fn step_ans(u: &VecField, dt: f64, cfl_safety: f64) -> Result<VecField> {
    check_solenoidal(u)?;
    let mut it = AnsIntegrator::new(u, dt, cfl_safety)?;
    it.step()?;
    Ok(it.state())
}

#[derive(Debug, Clone)]
pub struct SimulationSummary {
    pub ledger: NormLedger,
    pub steps: usize,
    pub max_energy_drift: f64,
    pub max_divergence: f64,
    pub final_state: VecField,
}

/// Integrates to `cfg.t_end`, recording energy-law and norm columns at
/// monitor steps and handing each monitored state to `observer`.
pub fn simulate(
    u0: &VecField,
    ladder: &DyadicLadder,
    cfg: &SolverConfig,
    observer: &mut dyn FnMut(f64, &VecField) -> Result<()>,
) -> Result<SimulationSummary> {
    cfg.validate()?;
    if *u0.grid() != *ladder.grid() {
        return Err(Error::GridMismatch);
    }
    check_solenoidal(u0)?;
    let monitors = cfg.monitor_steps()?;
    let mut it = AnsIntegrator::new(u0, cfg.dt, cfg.cfl_safety)?;
    let mut ledger = NormLedger::for_ladder(ladder);
    let (mut max_drift, mut max_div) = (0.0f64, 0.0f64);
    let mut state = it.state();
    for (i, &s) in monitors.iter().enumerate() {
        if i > 0 {
            while it.steps_taken() < s {
                it.step()?;
                max_drift = max_drift.max(it.energy_drift());
            }
            state = it.state();
        }
        let t = it.t();
        let div = state.divergence_defect();
        max_div = max_div.max(div);
        let comps: Vec<&Field> = state.comps.iter().collect();
        let b = b0half_shells(ladder, &comps);
        let b4 = b4_neg_blocks(ladder, &comps).norm();
        ledger.cl_accumulate(crate::ledger::TimeExponent::Inf, "u", t, &b.clone().into())?;
        ledger.record(
            t,
            &[
                ("energy", it.energy()),
                ("dissipation", it.dissipation()),
                ("energy_law", it.energy() + it.dissipation()),
                ("energy_drift", it.energy_drift()),
                ("div_u", div),
                ("umax", it.umax()),
                ("u_b0half", b.besov_sum()),
                ("u_b4neg", b4),
                ("u_cl_inf", ledger.cl_value("u", crate::ledger::TimeExponent::Inf)?),
            ],
        )?;
        observer(t, &state)?;
    }
    Ok(SimulationSummary {
        ledger,
        steps: it.steps_taken(),
        max_energy_drift: max_drift,
        max_divergence: max_div,
        final_state: state,
    })
}
