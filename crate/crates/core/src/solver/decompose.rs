use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{AnsIntegrator, LayeredIntegrator, SolverConfig};
use crate::data::biot_savart_split;
use crate::error::{Error, Result};
use crate::field::{Field, VecField};
use crate::ledger::{NormLedger, ShellSnapshot, TimeExponent};
use crate::lp::DyadicLadder;
use crate::norms::{b0half_shells, b0half_shells_grad_h, b4_0half_shells, b4_neg_blocks};
use crate::spectral::{dealiased_product, derivative, horizontal_heat, horizontal_multiplier, Axis, HorizontalSymbol};

/// Ledger column holding `‖v^h‖_{B^{0,1/2}(t)}`.
pub const BOOTSTRAP_COLUMN: &str = "vh_Bt";

/// `u·∇u` with the 2/3 rule.
fn advection(u: &VecField) -> VecField {
    let comp = |i: usize| {
        let mut acc = Field::zeros(u.grid());
        for (j, ax) in [Axis::X1, Axis::X2, Axis::X3].into_iter().enumerate() {
            acc = &acc + &dealiased_product(&u.comps[j], &derivative(&u.comps[i], ax));
        }
        acc
    };
    VecField { comps: [comp(0), comp(1), comp(2)] }
}

fn pressure_of(f: &VecField) -> Field {
    let g = *f.grid();
    let mut co = vec![Complex64::new(0.0, 0.0); g.len()];
    let [f1, f2, f3] = &f.comps;
    for (idx, c) in co.iter_mut().enumerate() {
        let (i1, i2, i3) = g.unindex(idx);
        let x = [g.xi_h_odd(i1), g.xi_h_odd(i2), g.xi_v_odd(i3)];
        let k2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        if k2 > 0.0 {
            let d = f1.coeffs()[idx] * x[0] + f2.coeffs()[idx] * x[1] + f3.coeffs()[idx] * x[2];
            *c = Complex64::new(-d.im, d.re) / k2;
        }
    }
    Field::from_coeffs_unchecked(&g, co, f.is_real())
}

/// Pressure `p` with `−Δp = div(u·∇u)`, the mean set to zero; the product is
/// formed with the 2/3 rule.
pub fn pressure_diagnostic(u: &VecField) -> Field {
    pressure_of(&advection(u))
}

/// Fields of the decomposition at one time.
#[derive(Debug, Clone)]
pub struct DecompositionState {
    pub t: f64,
    pub u: VecField,
    /// Layered 2-D part `ū^h`.
    pub ubar: [Field; 2],
    /// `u − (ū^h, 0)`.
    pub v: VecField,
    /// `e^{tΔ_h} u³_{0,hh}`.
    pub v_f: Field,
    /// `v³ − v_F`.
    pub w: Field,
    pub p: Field,
}

/// Residual of `∂_t w − Δ_h w + v·∇v³ + ū^h·∇_h v³ + ∂₃p` and the sizes of its terms.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct WResidual {
    pub t: f64,
    pub relative: f64,
    pub residual: f64,
    pub dt_w: f64,
    pub lap_h_w: f64,
    pub advection: f64,
    pub d3_p: f64,
}

#[derive(Debug, Clone)]
pub struct DecompositionSummary {
    pub ledger: NormLedger,
    pub steps: usize,
    /// `‖v₀^h + ∇_hΔ_h⁻¹∂₃u₀³‖ / ‖u₀‖` (coefficient maximum).
    pub v0h_identity: f64,
    /// `‖w₀ − u³_{0,lh}‖ / ‖u₀‖` (coefficient maximum).
    pub w0_identity: f64,
    pub w_residuals: Vec<WResidual>,
    pub max_div_u: f64,
    pub max_div_v: f64,
    pub max_div_h_ubar: f64,
    /// Largest coefficient of `u − (ū^h, 0) − v` and of `v³ − v_F − w`.
    pub split_residual: f64,
    pub v3_residual: f64,
    pub max_energy_drift: f64,
    pub max_layer_drift: f64,
}

struct Snapshot {
    t: f64,
    u: VecField,
    ubar: [Field; 2],
}

fn l2(f: &Field) -> f64 {
    libm::sqrt(f.energy()) * f.grid().l2_factor()
}

fn w_residual(ring: &VecDeque<Snapshot>, hh: &Field, dt: f64) -> Result<WResidual> {
    let c = &ring[2];
    let g = *c.u.grid();
    let kh2 = |i1: usize, i2: usize| g.xi_h(i1) * g.xi_h(i1) + g.xi_h(i2) * g.xi_h(i2);
    // (∂_t − Δ_h)w = e^{tΔ_h} ∂_t(e^{−tΔ_h} w), differenced with the stiff factor removed
    let mut d = Field::zeros(&g);
    for (s, wt) in ring.iter().zip([1.0, -8.0, 0.0, 8.0, -1.0]) {
        if wt == 0.0 {
            continue;
        }
        let w = &s.u.comps[2] - &horizontal_heat(hh, s.t)?;
        let tau = s.t - c.t;
        let lifted = w.map_real(|i1, i2, _| libm::exp(kh2(i1, i2) * tau));
        d = &d + &lifted.scale(wt / (12.0 * dt));
    }
    let wc = &c.u.comps[2] - &horizontal_heat(hh, c.t)?;
    let lap = wc.map_real(|i1, i2, _| -kh2(i1, i2));
    let dtw = &d + &lap;
    let v = VecField::new(&c.u.comps[0] - &c.ubar[0], &c.u.comps[1] - &c.ubar[1], c.u.comps[2].clone())?;
    let v3 = &v.comps[2];
    let mut adv = Field::zeros(&g);
    for (j, ax) in [Axis::X1, Axis::X2, Axis::X3].into_iter().enumerate() {
        adv = &adv + &dealiased_product(&v.comps[j], &derivative(v3, ax));
    }
    for (j, ax) in [Axis::X1, Axis::X2].into_iter().enumerate() {
        adv = &adv + &dealiased_product(&c.ubar[j], &derivative(v3, ax));
    }
    let dp3 = derivative(&pressure_diagnostic(&c.u), Axis::X3);
    let res = &(&d + &adv) + &dp3;
    let terms = [l2(&dtw), l2(&lap), l2(&adv), l2(&dp3)];
    let scale = terms.iter().copied().fold(0.0, f64::max);
    let residual = l2(&res);
    Ok(WResidual {
        t: c.t,
        relative: if scale > 0.0 { residual / scale } else { 0.0 },
        residual,
        dt_w: terms[0],
        lap_h_w: terms[1],
        advection: terms[2],
        d3_p: terms[3],
    })
}

/// Running state of the monitored norms. Time accumulators are fed at every
/// step; rows are written at monitor steps.
#[derive(Default)]
struct Monitor {
    last_t: Option<f64>,
    f: f64,
    gh: f64,
    hbar: f64,
    int_f: f64,
    int_gh: f64,
    int_hbar: f64,
    latest: Vec<(&'static str, f64)>,
}

fn bt(ledger: &NormLedger, tag: &str) -> Result<f64> {
    Ok(ledger.cl_value(tag, TimeExponent::Inf)? + ledger.cl_value(&alloc::format!("grad_h_{tag}"), TimeExponent::P2)?)
}

/// The fields entering the monitored norms at one time.
struct Channels<'a> {
    t: f64,
    ubar: [&'a Field; 2],
    vh: [&'a Field; 2],
    v_f: &'a Field,
    w: &'a Field,
}

impl Monitor {
    fn accumulate(
        &mut self,
        ledger: &mut NormLedger,
        ladder: &DyadicLadder,
        c: &Channels,
        cfg: &SolverConfig,
    ) -> Result<()> {
        let t = c.t;
        let [ub1, ub2] = c.ubar;
        let lam = |f: &Field| horizontal_multiplier(&derivative(f, Axis::X3), HorizontalSymbol::InvLambdaH).field();
        let lam_d3 = [lam(ub1), lam(ub2)];
        let d3 = [derivative(ub1, Axis::X3), derivative(ub2, Axis::X3)];
        let vf_grad = [derivative(c.v_f, Axis::X1), derivative(c.v_f, Axis::X2)];

        let ubar_b = b0half_shells(ladder, &c.ubar);
        let ubar_gb = b0half_shells_grad_h(ladder, &c.ubar);
        let vh_b = b0half_shells(ladder, &c.vh);
        let vh_gb = b0half_shells_grad_h(ladder, &c.vh);
        let w_b = b0half_shells(ladder, &[c.w]);
        let w_gb = b0half_shells_grad_h(ladder, &[c.w]);
        let vf4 = b4_neg_blocks(ladder, &[c.v_f]);
        let vf4g = b4_neg_blocks(ladder, &[&vf_grad[0], &vf_grad[1]]);
        let ubar4 = b4_0half_shells(ladder, &c.ubar).besov_sum();
        let vf40 = b4_0half_shells(ladder, &[c.v_f]).besov_sum();
        let vf4_norm = vf4.norm();

        let pairs: [(&str, ShellSnapshot, ShellSnapshot); 6] = [
            ("ubar", ubar_b.clone().into(), ubar_gb.clone().into()),
            (
                "lam_d3_ubar",
                b0half_shells(ladder, &[&lam_d3[0], &lam_d3[1]]).into(),
                b0half_shells_grad_h(ladder, &[&lam_d3[0], &lam_d3[1]]).into(),
            ),
            (
                "d3_ubar",
                b0half_shells(ladder, &[&d3[0], &d3[1]]).into(),
                b0half_shells_grad_h(ladder, &[&d3[0], &d3[1]]).into(),
            ),
            ("vh", vh_b.clone().into(), vh_gb.clone().into()),
            ("w", w_b.clone().into(), w_gb.clone().into()),
            ("vf_b4", vf4.into(), vf4g.into()),
        ];
        for (tag, a, ga) in &pairs {
            ledger.cl_accumulate(TimeExponent::Inf, tag, t, a)?;
            ledger.cl_accumulate(TimeExponent::P2, &alloc::format!("grad_h_{tag}"), t, ga)?;
        }

        let sq = |x: f64| x * x;
        let f = sq(w_b.besov_sum()) * sq(w_gb.besov_sum()) + sq(sq(ubar4)) + sq(sq(vf40));
        let gh = sq(ubar_b.besov_sum()) * sq(ubar_gb.besov_sum());
        let hbar = sq(sq(ubar4));
        if let Some(t0) = self.last_t {
            let h = t - t0;
            self.int_f += 0.5 * h * (self.f + f);
            self.int_gh += 0.5 * h * (self.gh + gh);
            self.int_hbar += 0.5 * h * (self.hbar + hbar);
        }
        self.last_t = Some(t);
        (self.f, self.gh, self.hbar) = (f, gh, hbar);
        let e = cfg.exponents;
        let damp = |k: f64, i: f64| libm::exp(-2.0 * k * i);
        ledger.weighted_cl_accumulate("f", "vh", f * damp(e.lambda, self.int_f), t, &vh_b.clone().into())?;
        ledger.weighted_cl_accumulate("gh", "ubar", gh * damp(e.gamma, self.int_gh), t, &ubar_b.clone().into())?;
        ledger.weighted_cl_accumulate("hbar", "w", hbar * damp(e.mu, self.int_hbar), t, &w_b.clone().into())?;

        self.latest = vec![
            ("ubar_b0half", ubar_b.besov_sum()),
            ("grad_h_ubar_b0half", ubar_gb.besov_sum()),
            ("vh_b0half", vh_b.besov_sum()),
            ("w_b0half", w_b.besov_sum()),
            ("vf_b4neg", vf4_norm),
            ("ubar_b4_0half", ubar4),
            ("vf_b4_0half", vf40),
            ("f", f),
            ("g_h", gh),
            ("hbar", hbar),
            ("int_f", self.int_f),
            ("int_g_h", self.int_gh),
            ("int_hbar", self.int_hbar),
            ("vh_lambda_b0half", vh_b.besov_sum() * libm::exp(-e.lambda * self.int_f)),
        ];
        Ok(())
    }

    fn record(&self, ledger: &mut NormLedger, s: &DecompositionState, extra: &[(&str, f64)]) -> Result<()> {
        let [ub1, ub2] = &s.ubar;
        let flat = VecField::new(ub1.clone(), ub2.clone(), Field::zeros(ub1.grid()))?;
        let mut row: Vec<(&str, f64)> = vec![
            ("div_u", s.u.divergence_defect()),
            ("div_v", s.v.divergence_defect()),
            ("div_h_ubar", flat.divergence_defect()),
        ];
        row.extend_from_slice(&self.latest);
        row.extend_from_slice(&[
            ("ubar_Bt", bt(ledger, "ubar")?),
            ("lam_d3_ubar_Bt", bt(ledger, "lam_d3_ubar")?),
            ("d3_ubar_Bt", bt(ledger, "d3_ubar")?),
            (BOOTSTRAP_COLUMN, bt(ledger, "vh")?),
            ("w_Bt", bt(ledger, "w")?),
            ("vf_B4t", bt(ledger, "vf_b4")?),
            ("wcl_vh_f", ledger.weighted_value("f", "vh")?),
            ("wcl_ubar_gh", ledger.weighted_value("gh", "ubar")?),
            ("wcl_w_hbar", ledger.weighted_value("hbar", "w")?),
        ]);
        row.extend_from_slice(extra);
        ledger.record(s.t, &row)
    }
}

/// Runs the full solution and the layered 2-D part side by side. The
/// Chemin-Lerner accumulators and time weights are fed at every step; at
/// monitor steps `v`, `v_F`, `w` and `p` are formed, a ledger row is written
/// and the state is passed to `observer`.
pub fn run_decomposition(
    u0: &VecField,
    ladder: &DyadicLadder,
    cfg: &SolverConfig,
    observer: &mut dyn FnMut(&DecompositionState) -> Result<()>,
) -> Result<DecompositionSummary> {
    cfg.validate()?;
    let g = *u0.grid();
    if g != *ladder.grid() {
        return Err(Error::GridMismatch);
    }
    if !u0.is_divergence_free(1e-10) {
        return Err(Error::InadmissibleData(alloc::format!(
            "initial velocity is not divergence-free (relative defect {:e})",
            u0.divergence_defect()
        )));
    }
    let scale = u0.max_abs().max(f64::MIN_POSITIVE);
    let (curl, div) = biot_savart_split(&u0.comps[0], &u0.comps[1]);
    let [c1, c2] = &curl;
    // v₀^h = −∇_hΔ_h⁻¹∂₃u₀³
    let expect = horizontal_multiplier(&derivative(&u0.comps[2], Axis::X3), HorizontalSymbol::GradInvLaplacianH).fields;
    let v0h_identity = div[0].max_diff(&expect[0].scale(-1.0)).max(div[1].max_diff(&expect[1].scale(-1.0))) / scale;
    let (lh, hh) = ladder.split_lh_hh(&u0.comps[2])?;
    let w0 = &u0.comps[2] - &hh;
    let w0_identity = w0.max_diff(&lh) / scale;

    let mut ans = AnsIntegrator::new(u0, cfg.dt, cfg.cfl_safety)?;
    let mut lay = LayeredIntegrator::new(c1, c2, cfg.dt, cfg.cfl_safety)?;
    let monitors = cfg.monitor_steps()?;
    let n = cfg.steps()?;
    let mut keep = vec![false; n + 1];
    for &m in &monitors {
        if m >= 4 {
            keep[m - 4..=m].iter_mut().for_each(|k| *k = true);
        }
    }
    let mut ring: VecDeque<Snapshot> = VecDeque::with_capacity(5);
    let mut ledger = NormLedger::for_ladder(ladder);
    let mut mon = Monitor::default();
    let mut summary = DecompositionSummary {
        ledger: NormLedger::for_ladder(ladder),
        steps: 0,
        v0h_identity,
        w0_identity,
        w_residuals: Vec::new(),
        max_div_u: 0.0,
        max_div_v: 0.0,
        max_div_h_ubar: 0.0,
        split_residual: 0.0,
        v3_residual: 0.0,
        max_energy_drift: 0.0,
        max_layer_drift: 0.0,
    };
    let mut next = 0;
    for step in 0..=n {
        if step > 0 {
            ans.step()?;
            lay.step()?;
            summary.max_energy_drift = summary.max_energy_drift.max(ans.energy_drift());
            summary.max_layer_drift = summary.max_layer_drift.max(lay.max_layer_drift());
        }
        let t = ans.t();
        let u = ans.state();
        let ubar = lay.state();
        let v = VecField::new(&u.comps[0] - &ubar[0], &u.comps[1] - &ubar[1], u.comps[2].clone())?;
        let v_f = horizontal_heat(&hh, t)?;
        let w = &v.comps[2] - &v_f;
        let ch = Channels { t, ubar: [&ubar[0], &ubar[1]], vh: [&v.comps[0], &v.comps[1]], v_f: &v_f, w: &w };
        mon.accumulate(&mut ledger, ladder, &ch, cfg)?;
        if keep[step] {
            if ring.len() == 5 {
                ring.pop_front();
            }
            ring.push_back(Snapshot { t, u: u.clone(), ubar: ubar.clone() });
        }
        if monitors.get(next) != Some(&step) {
            continue;
        }
        next += 1;
        let p = pressure_diagnostic(&u);
        let state = DecompositionState { t, u, ubar, v, v_f, w, p };

        let split = (0..2)
            .map(|i| (&state.u.comps[i] - &state.ubar[i]).max_diff(&state.v.comps[i]))
            .fold(state.u.comps[2].max_diff(&state.v.comps[2]), f64::max);
        let v3 = (&state.v_f + &state.w).max_diff(&state.v.comps[2]);
        summary.split_residual = summary.split_residual.max(split);
        summary.v3_residual = summary.v3_residual.max(v3);

        let mut extra: Vec<(&str, f64)> = vec![
            ("energy", ans.energy()),
            ("dissipation", ans.dissipation()),
            ("energy_drift", ans.energy_drift()),
            ("layer_drift", lay.max_layer_drift()),
            ("split_residual", split),
            ("v3_residual", v3),
        ];
        if step == 0 {
            extra.push(("v0h_identity", v0h_identity));
            extra.push(("w0_identity", w0_identity));
        }
        if ring.len() == 5 && step >= 4 {
            let r = w_residual(&ring, &hh, cfg.dt)?;
            extra.push(("w_residual", r.relative));
            summary.w_residuals.push(r);
        }
        mon.record(&mut ledger, &state, &extra)?;
        let last = ledger.rows().last().expect("row just recorded");
        let col = |name: &str| {
            let i = ledger.columns().iter().position(|c| c == name).expect("recorded column");
            last.values[i]
        };
        summary.max_div_u = summary.max_div_u.max(col("div_u"));
        summary.max_div_v = summary.max_div_v.max(col("div_v"));
        summary.max_div_h_ubar = summary.max_div_h_ubar.max(col("div_h_ubar"));
        observer(&state)?;
    }
    summary.steps = ans.steps_taken();
    summary.ledger = ledger;
    Ok(summary)
}

/// Outcome of watching `‖v^h‖_{B^{0,1/2}(t)}` against the bootstrap level.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BootstrapStatus {
    /// `1/(16 C)`.
    pub threshold: f64,
    /// `1/(32 C)`.
    pub margin: f64,
    /// First time the monitored norm exceeds `threshold`, if any.
    pub crossing: Option<f64>,
    pub margin_crossing: Option<f64>,
    pub initial: f64,
    pub max: f64,
    /// `max / initial` (zero for a zero trajectory).
    pub growth: f64,
}

fn first_crossing(series: &[(f64, f64)], level: f64) -> Option<f64> {
    let (t0, v0) = *series.first()?;
    if v0 > level {
        return Some(t0);
    }
    series.windows(2).find(|w| w[1].1 > level).map(|w| {
        let ((ta, va), (tb, vb)) = (w[0], w[1]);
        ta + (tb - ta) * (level - va) / (vb - va)
    })
}

/// Watches the ledger column [`BOOTSTRAP_COLUMN`] against `1/(16 C)` and `1/(32 C)`.
pub fn bootstrap_monitor(ledger: &NormLedger, c_threshold: f64) -> Result<BootstrapStatus> {
    if !(c_threshold > 0.0 && c_threshold.is_finite()) {
        return Err(Error::InvalidConfig("bootstrap constant must be positive".into()));
    }
    let series: Vec<(f64, f64)> = ledger.column(BOOTSTRAP_COLUMN)?.into_iter().filter(|(_, v)| !v.is_nan()).collect();
    let threshold = 1.0 / (16.0 * c_threshold);
    let margin = 1.0 / (32.0 * c_threshold);
    let initial = series.first().map_or(0.0, |x| x.1);
    let max = series.iter().map(|x| x.1).fold(0.0, f64::max);
    Ok(BootstrapStatus {
        threshold,
        margin,
        crossing: first_crossing(&series, threshold),
        margin_crossing: first_crossing(&series, margin),
        initial,
        max,
        growth: if initial > 0.0 { max / initial } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{random_vec_field, rng_from_seed, Band};
    use crate::grid::Grid;
    use crate::spectral::leray_project;

    #[test]
    fn pressure_of_taylor_green() {
        let g = Grid::new(16, 8).unwrap();
        let u = VecField::new(
            Field::from_fn(&g, |x, y, _| libm::cos(x) * libm::sin(y)),
            Field::from_fn(&g, |x, y, _| -libm::sin(x) * libm::cos(y)),
            Field::zeros(&g),
        )
        .unwrap();
        let p = pressure_diagnostic(&u);
        let exact = Field::from_fn(&g, |x, y, _| -(libm::cos(2.0 * x) + libm::cos(2.0 * y)) / 4.0);
        assert!(p.max_diff(&exact) < 1e-14);
        assert_eq!(pressure_diagnostic(&VecField::zeros(&g)).max_abs(), 0.0);
    }

    #[test]
    fn advection_plus_pressure_gradient_is_solenoidal() {
        let g = Grid::new(16, 16).unwrap();
        let u = leray_project(&random_vec_field(&g, Band::new(5, 5), &mut rng_from_seed(9)));
        let f = advection(&u);
        let p = pressure_of(&f);
        let s = VecField::new(
            &f.comps[0] + &derivative(&p, Axis::X1),
            &f.comps[1] + &derivative(&p, Axis::X2),
            &f.comps[2] + &derivative(&p, Axis::X3),
        )
        .unwrap();
        assert!(leray_project(&s).max_diff(&s) < 1e-11 * f.max_abs());
    }

    #[test]
    fn two_dimensional_curl_data_leaves_v_zero() {
        let g = Grid::new(16, 8).unwrap();
        let ld = DyadicLadder::standard(&g);
        let psi = Field::from_fn(&g, |x, y, _| libm::sin(x) * libm::cos(2.0 * y) + 0.3 * libm::cos(x + y));
        let u = VecField::new(derivative(&psi, Axis::X2).scale(-1.0), derivative(&psi, Axis::X1), Field::zeros(&g))
            .unwrap();
        let mut vmax = 0.0f64;
        let s = run_decomposition(&u, &ld, &SolverConfig::new(1e-3, 0.05), &mut |st| {
            vmax = vmax.max(st.v.max_abs());
            Ok(())
        })
        .unwrap();
        assert!(vmax < 1e-9, "{vmax}");
        assert!(s.v0h_identity < 1e-14 && s.w0_identity < 1e-14);
        let b = bootstrap_monitor(&s.ledger, 1.0).unwrap();
        assert_eq!(b.crossing, None);
    }

    #[test]
    fn random_data_decomposition() {
        let g = Grid::new(16, 16).unwrap();
        let ld = DyadicLadder::standard(&g);
        let u = leray_project(&random_vec_field(&g, Band::new(4, 4), &mut rng_from_seed(1)));
        let s = run_decomposition(&u, &ld, &SolverConfig::new(1e-3, 0.02), &mut |_| Ok(())).unwrap();
        assert_eq!(s.split_residual, 0.0);
        assert!(s.v3_residual < 1e-15);
        assert!(s.v0h_identity < 1e-12 && s.w0_identity < 1e-12);
        assert!(!s.w_residuals.is_empty());
        for r in &s.w_residuals {
            assert!(r.relative < 1e-5, "{r:?}");
        }
        assert!(s.max_div_u < 1e-10 && s.max_div_v < 1e-10 && s.max_div_h_ubar < 1e-10);
    }

    #[test]
    fn bootstrap_ramp() {
        let g = Grid::new(8, 8).unwrap();
        let mut l = NormLedger::new(&g, "x");
        let dt = 0.01;
        for i in 0..=100 {
            let t = i as f64 * dt;
            l.record(t, &[(BOOTSTRAP_COLUMN, t / 8.0)]).unwrap();
        }
        // 1/(16 C) = 1/16 is reached at t = 0.5
        let b = bootstrap_monitor(&l, 1.0).unwrap();
        assert!((b.crossing.unwrap() - 0.5).abs() <= dt);
        assert!((b.margin_crossing.unwrap() - 0.25).abs() <= dt);
        assert_eq!(bootstrap_monitor(&l, 0.1).unwrap().crossing, None);
    }
}
