//! Executable checks of the Littlewood-Paley identities, the Bernstein
//! bounds, the embedding inequalities and the layered energy identity.
//!
//! Hard bounds (support-derived constants) become [`Check`]s with a pass/fail
//! verdict. Inequalities with unnamed constants are profiled: every suite
//! reports the worst empirical ratio in a [`ConstantProfile`], and
//! [`refinement_check`] compares two resolutions.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{nested_random_field, random_field, rng_from_seed, Band, Field};
use crate::grid::{Grid, Measure};
use crate::ledger::{ClAccumulator, ShellSnapshot, TimeExponent};
use crate::lp::{CutoffPair, DyadicLadder};
use crate::norms::{
    b0half_shells, b0half_shells_grad_h, b4_0half_shells, b4_neg_blocks, norm_b0half, norm_b4_0half, norm_b4_neg,
};
use crate::solver::LayeredSummary;
use crate::spectral::{dealiased_product, derivative, grad_h, horizontal_heat, Axis};

/// Where a check was worst.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Witness {
    pub seed: Option<u64>,
    pub shell: Option<i32>,
    /// Integer wavenumber of the largest coefficient of the offending field.
    pub mode: Option<[i64; 3]>,
    /// Sample point (a time, or `τ` for the partition checks).
    pub at: Option<f64>,
    pub layer: Option<usize>,
}

/// A hard bound: `pass` iff `value <= bound`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
    pub witness: Witness,
}

impl Check {
    fn new(name: &str, value: f64, bound: f64, witness: Witness) -> Self {
        Self { name: name.to_string(), value, bound, pass: value <= bound, witness }
    }
}

/// Worst empirical ratio of an inequality with an unnamed constant.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConstantProfile {
    pub name: String,
    pub samples: usize,
    pub max: f64,
    pub mean: f64,
    pub witness: Witness,
}

#[derive(Debug, Clone, Default)]
struct Tracker {
    n: usize,
    sum: f64,
    max: f64,
    witness: Witness,
}

impl Tracker {
    fn push(&mut self, r: f64, w: impl FnOnce() -> Witness) {
        if !r.is_finite() {
            return;
        }
        if self.n == 0 || r > self.max {
            self.max = r;
            self.witness = w();
        }
        self.n += 1;
        self.sum += r;
    }

    fn profile(self, name: &str) -> ConstantProfile {
        ConstantProfile {
            name: name.to_string(),
            samples: self.n,
            max: self.max,
            mean: if self.n > 0 { self.sum / self.n as f64 } else { 0.0 },
            witness: self.witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Report {
    pub suite: String,
    /// `(n_h, n_v)` of the grid the suite ran on.
    pub grid: Option<(usize, usize)>,
    pub seed: Option<u64>,
    pub cutoff_hash: String,
    pub checks: Vec<Check>,
    pub profiles: Vec<ConstantProfile>,
    pub notes: Vec<String>,
}

impl Report {
    fn new(suite: &str, grid: Option<&Grid>, seed: Option<u64>, cutoffs: &CutoffPair) -> Self {
        Self {
            suite: suite.to_string(),
            grid: grid.map(|g| (g.n_h, g.n_v)),
            seed,
            cutoff_hash: cutoffs.hash().to_string(),
            checks: Vec::new(),
            profiles: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// True iff every hard check passed. Profiles never fail a report.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn profile(&self, name: &str) -> Option<&ConstantProfile> {
        self.profiles.iter().find(|p| p.name == name)
    }
}

fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add(i as u64)
}

fn trial_field(grid: &Grid, band: Band, seed: u64) -> Field {
    random_field(grid, band, &mut rng_from_seed(seed))
}

/// Amplitude decay of the profiling ensemble. Fast enough that
/// `‖∇_h a‖_{B^{0,1/2}}` converges as the grid is refined.
pub const PROFILE_DECAY: f64 = 4.0;

/// Member of the profiling ensemble: a nested full-band field with
/// [`PROFILE_DECAY`], so the same seed on a finer grid refines the same sample.
pub fn profile_field(grid: &Grid, seed: u64) -> Field {
    nested_random_field(grid, Band::new(grid.n_h as i64 / 2, grid.n_v as i64 / 2).with_decay(PROFILE_DECAY), seed)
}

/// Integer wavenumber of the largest coefficient.
pub fn dominant_mode(a: &Field) -> [i64; 3] {
    let g = a.grid();
    let (idx, _) =
        a.coeffs()
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bm), (i, c)| if c.norm_sqr() > bm { (i, c.norm_sqr()) } else { (bi, bm) });
    let (i1, i2, i3) = g.unindex(idx);
    [Grid::wavenumber(i1, g.n_h), Grid::wavenumber(i2, g.n_h), Grid::wavenumber(i3, g.n_v)]
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (libm::log(lo), libm::log(hi));
    (0..n).map(move |j| libm::exp(a + (b - a) * j as f64 / (n - 1).max(1) as f64))
}

/// Checks both partitions of unity, the plateau `χ = 1` below `3/4` and the
/// supports of `φ` and `χ` on `samples` log-spaced `τ` in `[1e-3, 1e3]`.
pub fn verify_partition(c: &CutoffPair, samples: usize) -> Result<Report> {
    if samples < 1000 {
        return Err(Error::InvalidConfig(format!("partition check needs at least 1000 samples, got {samples}")));
    }
    let mut r = Report::new("partition", None, None, c);
    let mut worst = [(0.0f64, 0.0f64); 5];
    let mut bump = |i: usize, d: f64, tau: f64| {
        if d > worst[i].0 {
            worst[i] = (d, tau);
        }
    };
    for tau in log_spaced(1e-3, 1e3, samples) {
        let hom: f64 = (-60..=60).map(|j| c.phi(libm::ldexp(tau, -j))).sum();
        let inh: f64 = c.chi(tau) + (0..=60).map(|j| c.phi(libm::ldexp(tau, -j))).sum::<f64>();
        bump(0, libm::fabs(hom - 1.0), tau);
        bump(1, libm::fabs(inh - 1.0), tau);
        if tau < 0.75 {
            bump(2, libm::fabs(c.chi(tau) - 1.0), tau);
        }
        if !(0.75..=8.0 / 3.0).contains(&tau) {
            bump(3, libm::fabs(c.phi(tau)), tau);
        }
        if tau > 4.0 / 3.0 {
            bump(4, libm::fabs(c.chi(tau)), tau);
        }
    }
    let names = ["homogeneous partition", "inhomogeneous partition", "chi plateau", "phi support", "chi support"];
    let bounds = [1e-12, 1e-12, 0.0, 1e-14, 1e-14];
    for ((name, bound), (d, tau)) in names.iter().zip(bounds).zip(worst) {
        r.checks.push(Check::new(name, d, bound, Witness { at: Some(tau), ..Default::default() }));
    }
    Ok(r)
}

/// Physical values of a real field, `(i1 * n_h + i2) * n_v + i3` order.
fn physical(a: &Field) -> Vec<f64> {
    a.to_physical().iter().map(|z| z.re).collect()
}

/// `‖a‖_{L^p_h(L^q_v)}` under cell averages; `p` or `q` infinite allowed.
pub fn mixed_norm(a: &Field, p: f64, q: f64) -> f64 {
    let g = a.grid();
    let v = physical(a);
    let avg_q = |line: &[f64]| {
        if q.is_infinite() {
            line.iter().fold(0.0f64, |m, x| m.max(libm::fabs(*x)))
        } else {
            libm::pow(line.iter().map(|x| libm::pow(libm::fabs(*x), q)).sum::<f64>() / line.len() as f64, 1.0 / q)
        }
    };
    let inner: Vec<f64> = v.chunks_exact(g.n_v).map(avg_q).collect();
    if p.is_infinite() {
        inner.iter().fold(0.0f64, |m, x| m.max(*x))
    } else {
        libm::pow(inner.iter().map(|x| libm::pow(*x, p)).sum::<f64>() / inner.len() as f64, 1.0 / p)
    }
}

fn l2(a: &Field) -> f64 {
    libm::sqrt(a.energy())
}

struct Bound {
    name: &'static str,
    worst: f64,
    witness: Witness,
}

impl Bound {
    fn new(name: &'static str) -> Self {
        Self { name, worst: 0.0, witness: Witness::default() }
    }

    fn push(&mut self, ratio: f64, bound: f64, seed: u64, shell: i32, b: &Field) {
        let x = ratio / bound;
        if x.is_finite() && x > self.worst {
            self.worst = x;
            self.witness =
                Witness { seed: Some(seed), shell: Some(shell), mode: Some(dominant_mode(b)), ..Default::default() };
        }
    }
}

/// Anisotropic Bernstein inequalities with support-derived constants, on
/// `trials` full-band random fields (each field is tested on every shell).
///
/// Vertical blocks `Δ_ℓ^v a`: `‖∂₃·‖ ≤ (8/3)2^ℓ‖·‖`, `‖·‖ ≤ (4/3)2^{-ℓ}‖∂₃·‖`,
/// `‖·‖_{L²_h(L^∞_v)} ≤ M_ℓ^{1/2}‖·‖_{L²}`. Horizontal blocks `Δ_k^h a`:
/// `‖∇_h·‖ ≤ (8/3)2^k‖·‖`, `‖·‖ ≤ (4/3)2^{-k}‖∇_h·‖`,
/// `‖·‖ ≤ (4√2/3)2^{-k} max_i‖∂_i·‖`, `‖·‖_{L⁴_h(L²_v)} ≤ M_k^{1/4}‖·‖_{L²}`,
/// `‖·‖_{L^∞_h(L²_v)} ≤ M_k^{1/2}‖·‖_{L²}`. `M` counts the lattice points
/// where the block multiplier is nonzero. Each ratio is reported divided by
/// its bound and passes up to `1e-10` relative slack.
pub fn verify_bernstein(grid: &Grid, trials: usize, seed: u64) -> Result<Report> {
    let ladder = DyadicLadder::standard(grid);
    let mut r = Report::new("bernstein", Some(grid), Some(seed), ladder.cutoffs());
    let band = Band::new(grid.n_h as i64 / 2, grid.n_v as i64 / 2);
    let mut bounds = [
        "vertical derivative upper",
        "vertical derivative lower",
        "vertical L2 to Linf",
        "horizontal gradient upper",
        "horizontal gradient lower",
        "horizontal gradient lower (sup)",
        "horizontal L2 to L4",
        "horizontal L2 to Linf",
    ]
    .map(Bound::new);
    let count = |m: &[f64]| m.iter().filter(|x| **x != 0.0).count() as f64;
    let m_v: Vec<f64> = ladder.shells_v().map(|l| count(ladder.phi_v(l).expect("shell"))).collect();
    let m_h: Vec<f64> = ladder.shells_h().map(|k| count(ladder.phi_h(k).expect("shell"))).collect();
    for i in 0..trials {
        let s = trial_seed(seed, i);
        let a = trial_field(grid, band, s);
        for (li, l) in ladder.shells_v().enumerate() {
            let b = ladder.delta_v(l, &a)?;
            let nb = l2(&b);
            if nb == 0.0 {
                continue;
            }
            let nd = l2(&derivative(&b, Axis::X3));
            let w = libm::exp2(l as f64);
            bounds[0].push(nd / nb, 8.0 / 3.0 * w, s, l, &b);
            bounds[1].push(nb / nd, 4.0 / 3.0 / w, s, l, &b);
            bounds[2].push(mixed_norm(&b, 2.0, f64::INFINITY) / nb, libm::sqrt(m_v[li]), s, l, &b);
        }
        for (ki, k) in ladder.shells_h().enumerate() {
            let b = ladder.delta_h(k, &a)?;
            let nb = l2(&b);
            if nb == 0.0 {
                continue;
            }
            let [d1, d2] = grad_h(&b);
            let (n1, n2) = (l2(&d1), l2(&d2));
            let ng = libm::hypot(n1, n2);
            let w = libm::exp2(k as f64);
            bounds[3].push(ng / nb, 8.0 / 3.0 * w, s, k, &b);
            bounds[4].push(nb / ng, 4.0 / 3.0 / w, s, k, &b);
            bounds[5].push(nb / n1.max(n2), 4.0 * core::f64::consts::SQRT_2 / 3.0 / w, s, k, &b);
            bounds[6].push(mixed_norm(&b, 4.0, 2.0) / nb, libm::sqrt(libm::sqrt(m_h[ki])), s, k, &b);
            bounds[7].push(mixed_norm(&b, f64::INFINITY, 2.0) / nb, libm::sqrt(m_h[ki]), s, k, &b);
        }
    }
    for b in bounds {
        r.checks.push(Check::new(b.name, b.worst, 1.0 + 1e-10, b.witness));
    }
    Ok(r)
}

/// Sample times for heat-flow trajectories: `0` and a geometric ladder from
/// `1e-5` up to `horizon`.
pub fn heat_times(horizon: f64) -> Vec<f64> {
    let mut t = vec![0.0];
    let mut s = 1e-5;
    while s < horizon {
        t.push(s);
        s *= 1.5;
    }
    t.push(horizon);
    t
}

const SUP_NOTE: &str = "L-infinity in time is the maximum over the sampled times only";

/// Interpolation `‖a‖_{B^{0,1/2}} ≲ ‖a‖^{1/2}‖∂₃a‖^{1/2}` on random fields, and
/// its `L̃^p_T` version (`p = 2, ∞`) on horizontal heat flows of the same
/// fields.
pub fn verify_interpolation(grid: &Grid, trials: usize, seed: u64) -> Result<Report> {
    let ladder = DyadicLadder::standard(grid);
    let mut r = Report::new("interpolation", Some(grid), Some(seed), ladder.cutoffs());
    let times = heat_times(1.0);
    let mut stat = Tracker::default();
    let mut p2 = Tracker::default();
    let mut pinf = Tracker::default();
    for i in 0..trials {
        let s = trial_seed(seed, i);
        let a = profile_field(grid, s);
        let d3 = derivative(&a, Axis::X3);
        let wit = || Witness { seed: Some(s), mode: Some(dominant_mode(&a)), ..Default::default() };
        if l2(&d3) == 0.0 {
            continue;
        }
        stat.push(norm_b0half(&ladder, &a) / libm::sqrt(l2(&a) * l2(&d3)), wit);

        let mut cl = [ClAccumulator::new(TimeExponent::P2), ClAccumulator::new(TimeExponent::Inf)];
        let (mut e_a, mut e_d, mut sup_a, mut sup_d) = (0.0, 0.0, 0.0f64, 0.0f64);
        let mut last: Option<(f64, f64, f64)> = None;
        for &t in &times {
            let at = horizontal_heat(&a, t)?;
            let snap: ShellSnapshot = b0half_shells(&ladder, &[&at]).into();
            for c in &mut cl {
                c.push("a", t, &snap, 1.0)?;
            }
            let (x, y) = (at.energy(), derivative(&at, Axis::X3).energy());
            if let Some((t0, x0, y0)) = last {
                e_a += 0.5 * (t - t0) * (x + x0);
                e_d += 0.5 * (t - t0) * (y + y0);
            }
            sup_a = sup_a.max(x);
            sup_d = sup_d.max(y);
            last = Some((t, x, y));
        }
        p2.push(cl[0].value() / libm::sqrt(libm::sqrt(e_a) * libm::sqrt(e_d)), wit);
        pinf.push(cl[1].value() / libm::sqrt(libm::sqrt(sup_a) * libm::sqrt(sup_d)), wit);
    }
    r.profiles.push(stat.profile("interpolation"));
    r.profiles.push(p2.profile("interpolation L2 in time"));
    r.profiles.push(pinf.profile("interpolation Linf in time"));
    r.notes.push(SUP_NOTE.to_string());
    Ok(r)
}

/// `B₄^{-1/2,1/2}(T)` accumulators of a trajectory: the field and its
/// horizontal gradient.
struct B4Time {
    sup: ClAccumulator,
    grad: ClAccumulator,
}

impl B4Time {
    fn new() -> Self {
        Self { sup: ClAccumulator::new(TimeExponent::Inf), grad: ClAccumulator::new(TimeExponent::P2) }
    }

    fn push(&mut self, ladder: &DyadicLadder, t: f64, a: &Field) -> Result<()> {
        let [d1, d2] = grad_h(a);
        self.sup.push("a", t, &b4_neg_blocks(ladder, &[a]).into(), 1.0)?;
        self.grad.push("grad_h_a", t, &b4_neg_blocks(ladder, &[&d1, &d2]).into(), 1.0)
    }

    fn value(&self) -> f64 {
        self.sup.value() + self.grad.value()
    }
}

/// Heat smoothing `‖e^{tΔ_h}a_hh‖_{B₄^{-1/2,1/2}(∞)} ≲ ‖a‖_{B₄^{-1/2,1/2}}`; the
/// time norms run over [`heat_times`]`(horizon)`.
pub fn verify_heat_smoothing(grid: &Grid, trials: usize, horizon: f64, seed: u64) -> Result<Report> {
    let ladder = DyadicLadder::standard(grid);
    let mut r = Report::new("heat smoothing", Some(grid), Some(seed), ladder.cutoffs());
    let mut tr = Tracker::default();
    for i in 0..trials {
        let s = trial_seed(seed, i);
        let a = profile_field(grid, s);
        let ratio = heat_smoothing_ratio(&ladder, &a, horizon)?;
        tr.push(ratio, || Witness { seed: Some(s), mode: Some(dominant_mode(&a)), ..Default::default() });
    }
    r.profiles.push(tr.profile("heat smoothing"));
    r.notes.push(SUP_NOTE.to_string());
    Ok(r)
}

/// `‖e^{tΔ_h}a_hh‖_{B₄^{-1/2,1/2}(∞)} / ‖a‖_{B₄^{-1/2,1/2}}` (0 when `a_hh = 0`).
pub fn heat_smoothing_ratio(ladder: &DyadicLadder, a: &Field, horizon: f64) -> Result<f64> {
    let (_, hh) = ladder.split_lh_hh(a)?;
    let mut acc = B4Time::new();
    for t in heat_times(horizon) {
        acc.push(ladder, t, &horizontal_heat(&hh, t)?)?;
    }
    let den = norm_b4_neg(ladder, a);
    Ok(if den > 0.0 { acc.value() / den } else { 0.0 })
}

/// Profiles of the embedding chain on random fields and their horizontal
/// heat flows over [`heat_times`]`(horizon)`:
///
/// * `B4 interpolation`: `‖a‖²_{B₄^{0,1/2}} / (‖a‖_{B^{0,1/2}}‖∇_h a‖_{B^{0,1/2}})`
/// * `B4 interpolation in time`: `‖a‖²_{L̃⁴_t(B₄^{0,1/2})} / (‖a‖_{L̃^∞_t(B^{0,1/2})}‖∇_h a‖_{L̃²_t(B^{0,1/2})})`
/// * `B4 embedding`: `‖a‖_{L̃⁴_T(B₄^{0,1/2})} / ‖a‖_{B₄^{-1/2,1/2}(T)}`
/// * `heat smoothing`: as [`heat_smoothing_ratio`]
pub fn verify_embeddings(grid: &Grid, trials: usize, horizon: f64, seed: u64) -> Result<Report> {
    let ladder = DyadicLadder::standard(grid);
    let mut r = Report::new("embeddings", Some(grid), Some(seed), ladder.cutoffs());
    let times = heat_times(horizon);
    let mut tk = [Tracker::default(), Tracker::default(), Tracker::default(), Tracker::default()];
    for i in 0..trials {
        let s = trial_seed(seed, i);
        let a = profile_field(grid, s);
        let wit = || Witness { seed: Some(s), mode: Some(dominant_mode(&a)), ..Default::default() };
        let bg = b0half_shells_grad_h(&ladder, &[&a]).besov_sum();
        tk[0].push(libm::pow(norm_b4_0half(&ladder, &a), 2.0) / (norm_b0half(&ladder, &a) * bg), wit);

        let mut l4 = ClAccumulator::new(TimeExponent::P4);
        let mut sup = ClAccumulator::new(TimeExponent::Inf);
        let mut grad = ClAccumulator::new(TimeExponent::P2);
        let mut b4 = B4Time::new();
        let (_, hh) = ladder.split_lh_hh(&a)?;
        let mut smooth = B4Time::new();
        for &t in &times {
            let at = horizontal_heat(&a, t)?;
            l4.push("a", t, &b4_0half_shells(&ladder, &[&at]).into(), 1.0)?;
            sup.push("a", t, &b0half_shells(&ladder, &[&at]).into(), 1.0)?;
            grad.push("grad_h_a", t, &b0half_shells_grad_h(&ladder, &[&at]).into(), 1.0)?;
            b4.push(&ladder, t, &at)?;
            smooth.push(&ladder, t, &horizontal_heat(&hh, t)?)?;
        }
        tk[1].push(libm::pow(l4.value(), 2.0) / (sup.value() * grad.value()), wit);
        tk[2].push(l4.value() / b4.value(), wit);
        let den = norm_b4_neg(&ladder, &a);
        if den > 0.0 {
            tk[3].push(smooth.value() / den, wit);
        }
    }
    let names = ["B4 interpolation", "B4 interpolation in time", "B4 embedding", "heat smoothing"];
    for (t, name) in tk.into_iter().zip(names) {
        r.profiles.push(t.profile(name));
    }
    r.notes.push(SUP_NOTE.to_string());
    Ok(r)
}

/// Compares the profiles two runs share: `pass` iff
/// `|max_fine / max_coarse − 1| < tol`.
pub fn refinement_check(coarse: &Report, fine: &Report, tol: f64) -> Report {
    let mut r = Report {
        suite: format!("{} refinement", coarse.suite),
        grid: fine.grid,
        seed: fine.seed,
        cutoff_hash: fine.cutoff_hash.clone(),
        checks: Vec::new(),
        profiles: Vec::new(),
        notes: vec![format!("{:?} against {:?}", coarse.grid, fine.grid)],
    };
    for pc in &coarse.profiles {
        if let Some(pf) = fine.profile(&pc.name) {
            let drift = if pc.max > 0.0 {
                libm::fabs(pf.max / pc.max - 1.0)
            } else if pf.max == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            let mut c = Check::new(&format!("{} drift", pc.name), drift, tol, pf.witness.clone());
            c.pass = drift < tol;
            r.checks.push(c);
        }
    }
    r
}

/// The exact dyadic rescale `λa(λx)` with `λ = 2`: the same coefficients on
/// the torus contracted by 2, scaled by 2. Both fields carry the Lebesgue
/// measure of their period cell.
pub fn dyadic_rescale(a: &Field) -> (Field, Field) {
    let g0 = a.grid().with_measure(Measure::Lebesgue);
    let g1 = g0.contracted(2.0);
    let a0 = Field::from_coeffs_unchecked(&g0, a.coeffs().to_vec(), a.is_real());
    let a1 = Field::from_coeffs_unchecked(&g1, a.coeffs().iter().map(|c| c * 2.0).collect(), a.is_real());
    (a0, a1)
}

fn rel(x: f64, y: f64) -> f64 {
    let s = libm::fabs(x).max(libm::fabs(y));
    if s == 0.0 {
        0.0
    } else {
        libm::fabs(x - y) / s
    }
}

/// Scaling invariance of `B^{0,1/2}` and `B₄^{-1/2,1/2}` under the dyadic
/// rescale of every field in `fields`.
pub fn verify_scaling(fields: &[(u64, Field)], cutoffs: &CutoffPair) -> Result<Report> {
    let mut r = Report::new("scaling", fields.first().map(|(_, f)| f.grid()), fields.first().map(|(s, _)| *s), cutoffs);
    let mut worst = [(0.0, Witness::default()), (0.0, Witness::default())];
    for (s, a) in fields {
        let (a0, a1) = dyadic_rescale(a);
        let l0 = DyadicLadder::new(a0.grid(), cutoffs);
        let l1 = DyadicLadder::new(a1.grid(), cutoffs);
        let d = [rel(norm_b0half(&l0, &a0), norm_b0half(&l1, &a1)), rel(norm_b4_neg(&l0, &a0), norm_b4_neg(&l1, &a1))];
        for (w, x) in worst.iter_mut().zip(d) {
            if x > w.0 {
                *w = (x, Witness { seed: Some(*s), mode: Some(dominant_mode(a)), ..Default::default() });
            }
        }
    }
    let [(b0, w0), (b4, w4)] = worst;
    r.checks.push(Check::new("B0half scaling", b0, 1e-10, w0));
    r.checks.push(Check::new("B4neg scaling", b4, 1e-10, w4));
    Ok(r)
}

/// [`verify_scaling`] on `trials` random fields.
pub fn verify_scaling_ensemble(grid: &Grid, trials: usize, seed: u64) -> Result<Report> {
    let fields: Vec<(u64, Field)> = (0..trials)
        .map(|i| {
            let s = trial_seed(seed, i);
            (s, profile_field(grid, s))
        })
        .collect();
    let mut r = verify_scaling(&fields, &CutoffPair::standard())?;
    r.seed = Some(seed);
    Ok(r)
}

/// Reconstruction `Σ_ℓ Δ_ℓ^v a + a_{ξ₃=0} = a` and `a_lh + a_hh = a` on random
/// fields, relative to `‖a‖`.
pub fn verify_reconstruction(grid: &Grid, trials: usize, seed: u64) -> Result<Report> {
    let ladder = DyadicLadder::standard(grid);
    let mut r = Report::new("reconstruction", Some(grid), Some(seed), ladder.cutoffs());
    let mut worst = [(0.0, Witness::default()), (0.0, Witness::default())];
    for i in 0..trials {
        let s = trial_seed(seed, i);
        let a = trial_field(grid, Band::new(grid.n_h as i64 / 2, grid.n_v as i64 / 2), s);
        let na = l2(&a);
        let sum = ladder.vertical_sum(&a)?.try_add(&ladder.vertical_mean(&a)?)?;
        let (lh, hh) = ladder.split_lh_hh(&a)?;
        let d = [l2(&sum.try_sub(&a)?) / na, l2(&lh.try_add(&hh)?.try_sub(&a)?) / na];
        for (w, x) in worst.iter_mut().zip(d) {
            if x > w.0 {
                *w = (x, Witness { seed: Some(s), mode: Some(dominant_mode(&a)), ..Default::default() });
            }
        }
    }
    let [(v, wv), (h, wh)] = worst;
    r.checks.push(Check::new("vertical reconstruction", v, 1e-12, wv));
    r.checks.push(Check::new("lh/hh reconstruction", h, 1e-12, wh));
    Ok(r)
}

/// Energy identities of a layered 2-D solution.
///
/// Per layer, `‖ā(t)‖² + 2∫‖∇_hā‖²` against `‖ā₀‖²` (relative to the layer's
/// initial energy, floored at `1e-12` of the largest one), checked against
/// `tol`. For the `∂₃` bound the quantity `Q(t) = ‖∂₃ā(t)‖² + ∫‖∇_h∂₃ā‖²`
/// (trapezoid over the samples) is compared with `Q(0)exp(C‖ā₀‖²_{L^∞_v(L²_h)})`;
/// the smallest admissible `C` is reported as the profile `gronwall constant`,
/// and the only hard check is that every `Q` is finite. All squares are
/// layer mean squares.
pub fn verify_energy_layers(summary: &LayeredSummary, tol: f64) -> Report {
    let g = *summary.final_state[0].grid();
    let mut r = Report::new("energy layers", Some(&g), None, &CutoffPair::standard());
    let e0 = &summary.initial_energy;
    let floor = 1e-12 * e0.iter().copied().fold(0.0, f64::max);
    let (mut worst, mut wit) = (0.0f64, Witness::default());
    for s in &summary.samples {
        for (j, ((e, d), e0)) in s.energy.iter().zip(&s.dissipation).zip(e0).enumerate() {
            let x = libm::fabs(e + d - e0) / e0.max(floor).max(f64::MIN_POSITIVE);
            if x > worst {
                worst = x;
                wit = Witness { at: Some(s.t), layer: Some(j), ..Default::default() };
            }
        }
    }
    r.checks.push(Check::new("layer energy identity", worst, tol, wit));

    let m = e0.iter().copied().fold(0.0, f64::max);
    let nl = e0.len();
    let mut integral = vec![0.0; nl];
    let mut finite = true;
    let mut c = Tracker::default();
    let q0: Vec<f64> = summary.samples.first().map_or(vec![0.0; nl], |s| s.d3_energy.clone());
    let q_floor = 1e-12 * q0.iter().copied().fold(0.0, f64::max);
    for (n, s) in summary.samples.iter().enumerate() {
        if n > 0 {
            let p = &summary.samples[n - 1];
            for j in 0..nl {
                integral[j] += 0.5 * (s.t - p.t) * (s.grad_h_d3_energy[j] + p.grad_h_d3_energy[j]);
            }
        }
        for j in 0..nl {
            let q = s.d3_energy[j] + integral[j];
            finite &= q.is_finite();
            if q0[j] > q_floor && m > 0.0 && q0[j] > 0.0 {
                let cj = (libm::log(q / q0[j]) / m).max(0.0);
                c.push(cj, || Witness { at: Some(s.t), layer: Some(j), ..Default::default() });
            }
        }
    }
    r.checks.push(Check::new("d3 energy finite", if finite { 0.0 } else { f64::INFINITY }, 0.0, Witness::default()));
    r.profiles.push(c.profile("gronwall constant"));
    r.notes.push("gronwall constant is reported, not asserted".to_string());
    r
}

/// One-time trilinear pairing `Σ_ℓ 2^ℓ|(Δ_ℓ^v(ab) | Δ_ℓ^v c)|` over
/// `‖a‖_{B₄^{0,1/2}}‖b‖_{B^{0,1/2}}‖c‖^{1/2}_{B^{0,1/2}}‖∇_h c‖^{1/2}_{B^{0,1/2}}`.
/// Archived, never asserted.
pub fn trilinear_ratio(ladder: &DyadicLadder, a: &Field, b: &Field, c: &Field) -> Result<f64> {
    let ab = dealiased_product(a, b);
    let g = ladder.grid();
    let f2 = g.l2_factor() * g.l2_factor();
    let mut lhs = 0.0;
    for l in ladder.shells_v() {
        let x = ladder.delta_v(l, &ab)?;
        let y = ladder.delta_v(l, c)?;
        let dot: Complex64 = x.coeffs().iter().zip(y.coeffs()).map(|(p, q)| p * q.conj()).sum();
        lhs += libm::exp2(l as f64) * dot.norm() * f2;
    }
    let rhs = norm_b4_0half(ladder, a)
        * norm_b0half(ladder, b)
        * libm::sqrt(norm_b0half(ladder, c) * b0half_shells_grad_h(ladder, &[c]).besov_sum());
    Ok(if rhs > 0.0 { lhs / rhs } else { 0.0 })
}

/// [`trilinear_ratio`] for three random fields drawn from `seed`.
pub fn trilinear_spot_check(grid: &Grid, seed: u64) -> Result<Report> {
    let ladder = DyadicLadder::standard(grid);
    let mut r = Report::new("trilinear spot check", Some(grid), Some(seed), ladder.cutoffs());
    let [a, b, c] = [0, 1, 2].map(|i| profile_field(grid, trial_seed(seed, i)));
    let ratio = trilinear_ratio(&ladder, &a, &b, &c)?;
    let mut t = Tracker::default();
    t.push(ratio, || Witness { seed: Some(seed), ..Default::default() });
    r.profiles.push(t.profile("trilinear"));
    r.notes.push("single configuration, archived only".to_string());
    Ok(r)
}
