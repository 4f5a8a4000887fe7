//! Time-stamped norm records and Chemin-Lerner accumulators.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{Field, VecField};
use crate::grid::Grid;
use crate::lp::DyadicLadder;
use crate::norms::{b0half_shells, combine_b4, shell_weight, B4Blocks, VerticalShells};

/// Time exponent `p` of a Chemin-Lerner norm `L̃^p_T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TimeExponent {
    P1,
    P2,
    P4,
    Inf,
}

impl TimeExponent {
    pub fn from_p(p: f64) -> Option<Self> {
        if p == 1.0 {
            Some(Self::P1)
        } else if p == 2.0 {
            Some(Self::P2)
        } else if p == 4.0 {
            Some(Self::P4)
        } else if p.is_infinite() && p > 0.0 {
            Some(Self::Inf)
        } else {
            None
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::P1 => "1",
            Self::P2 => "2",
            Self::P4 => "4",
            Self::Inf => "inf",
        }
    }

    fn exponent(self) -> Option<i32> {
        match self {
            Self::P1 => Some(1),
            Self::P2 => Some(2),
            Self::P4 => Some(4),
            Self::Inf => None,
        }
    }
}

/// Shell-structured values at one instant, ready for time accumulation.
#[derive(Debug, Clone, PartialEq)]
pub enum ShellSnapshot {
    /// `‖Δ_ℓ^v a‖` in some mixed norm, summed as `Σ_ℓ 2^{ℓ/2}(·)`.
    Vertical(VerticalShells),
    /// Blocks of the `B₄^{-1/2,1/2}` norm.
    B4(B4Blocks),
}

impl From<VerticalShells> for ShellSnapshot {
    fn from(v: VerticalShells) -> Self {
        Self::Vertical(v)
    }
}

impl From<B4Blocks> for ShellSnapshot {
    fn from(b: B4Blocks) -> Self {
        Self::B4(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Layout {
    Vertical { l_min: i32, n: usize },
    B4 { l_min: i32, k_min: i32, nl: usize, nk: usize },
}

impl ShellSnapshot {
    fn layout(&self) -> Layout {
        match self {
            Self::Vertical(v) => Layout::Vertical { l_min: v.l_min, n: v.values.len() },
            Self::B4(b) => {
                Layout::B4 { l_min: b.l_min, k_min: b.k_min, nl: b.low.len(), nk: b.block.first().map_or(0, Vec::len) }
            }
        }
    }

    fn flat(&self) -> Vec<f64> {
        match self {
            Self::Vertical(v) => v.values.clone(),
            Self::B4(b) => b.block.iter().flatten().chain(&b.low).copied().collect(),
        }
    }

    /// Norm of the snapshot itself.
    pub fn norm(&self) -> f64 {
        match self {
            Self::Vertical(v) => v.besov_sum(),
            Self::B4(b) => b.norm(),
        }
    }
}

impl Layout {
    fn combine(&self, roots: &[f64]) -> f64 {
        match *self {
            Layout::Vertical { l_min, .. } => {
                roots.iter().enumerate().map(|(i, v)| shell_weight(l_min + i as i32) * v).sum()
            }
            Layout::B4 { l_min, k_min, nl, nk } => {
                let block: Vec<Vec<f64>> = (0..nl).map(|li| roots[li * nk..(li + 1) * nk].to_vec()).collect();
                let low = &roots[nl * nk..];
                combine_b4(l_min, k_min, &block, low)
                    .iter()
                    .enumerate()
                    .map(|(i, v)| shell_weight(l_min + i as i32) * v)
                    .sum()
            }
        }
    }
}

/// Running per-shell `∫ w(t) |x(t)|^p dt` (trapezoid rule), or the running
/// maximum for `p = ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClAccumulator {
    p: TimeExponent,
    layout: Option<Layout>,
    last: Option<(f64, Vec<f64>)>,
    acc: Vec<f64>,
}

impl ClAccumulator {
    pub fn new(p: TimeExponent) -> Self {
        Self { p, layout: None, last: None, acc: Vec::new() }
    }

    pub fn exponent(&self) -> TimeExponent {
        self.p
    }

    pub fn last_time(&self) -> Option<f64> {
        self.last.as_ref().map(|(t, _)| *t)
    }

    /// Adds the sample `(t, snap)` with time weight `w` (ignored for `p = ∞`).
    pub fn push(&mut self, tag: &str, t: f64, snap: &ShellSnapshot, w: f64) -> Result<()> {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::NegativeWeight(w));
        }
        if let Some((last, _)) = &self.last {
            if !(t > *last) {
                return Err(Error::NonMonotoneTime { tag: tag.to_string(), t, last: *last });
            }
        }
        let layout = snap.layout();
        match self.layout {
            None => {
                self.layout = Some(layout);
                self.acc = vec![0.0; snap.flat().len()];
            }
            Some(l) if l != layout => {
                return Err(Error::InvalidConfig(alloc::format!("shell layout of '{tag}' changed between samples")))
            }
            _ => {}
        }
        let vals = snap.flat();
        match self.p.exponent() {
            None => {
                for (a, v) in self.acc.iter_mut().zip(&vals) {
                    *a = a.max(*v);
                }
                self.last = Some((t, Vec::new()));
            }
            Some(e) => {
                let integrand: Vec<f64> = vals.iter().map(|v| w * libm::pow(*v, e as f64)).collect();
                if let Some((last, prev)) = &self.last {
                    let h = 0.5 * (t - last);
                    for ((a, p), c) in self.acc.iter_mut().zip(prev).zip(&integrand) {
                        *a += h * (p + c);
                    }
                }
                self.last = Some((t, integrand));
            }
        }
        Ok(())
    }

    /// Per-entry `(∫ ...)^{1/p}` (or running max).
    pub fn roots(&self) -> Vec<f64> {
        match self.p.exponent() {
            None => self.acc.clone(),
            Some(e) => self.acc.iter().map(|a| libm::pow(*a, 1.0 / e as f64)).collect(),
        }
    }

    /// Current Chemin-Lerner norm (0 before any sample).
    pub fn value(&self) -> f64 {
        match self.layout {
            None => 0.0,
            Some(l) => l.combine(&self.roots()),
        }
    }

    /// Per-shell weighted values `2^{ℓ/2}(∫ ...)^{1/p}` for vertical layouts.
    pub fn shell_values(&self) -> Vec<f64> {
        match self.layout {
            Some(Layout::Vertical { l_min, .. }) => {
                self.roots().iter().enumerate().map(|(i, v)| shell_weight(l_min + i as i32) * v).collect()
            }
            _ => Vec::new(),
        }
    }
}

/// One ledger row: a time and one value per registered column (`NaN` where
/// the column was not recorded at that time).
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRow {
    pub t: f64,
    pub values: Vec<f64>,
}

/// Per-timestep record of tracked norms plus Chemin-Lerner accumulators.
#[derive(Debug, Clone, PartialEq)]
pub struct NormLedger {
    grid: Grid,
    cutoff_hash: String,
    columns: Vec<String>,
    rows: Vec<LedgerRow>,
    cl: BTreeMap<(String, TimeExponent), ClAccumulator>,
    weighted: BTreeMap<(String, String), ClAccumulator>,
}

impl NormLedger {
    pub fn new(grid: &Grid, cutoff_hash: &str) -> Self {
        Self {
            grid: *grid,
            cutoff_hash: cutoff_hash.to_string(),
            columns: Vec::new(),
            rows: Vec::new(),
            cl: BTreeMap::new(),
            weighted: BTreeMap::new(),
        }
    }

    pub fn for_ladder(ladder: &DyadicLadder) -> Self {
        Self::new(ladder.grid(), ladder.cutoffs().hash())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cutoff_hash(&self) -> &str {
        &self.cutoff_hash
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[LedgerRow] {
        &self.rows
    }

    /// Records nonnegative values at time `t`. Values recorded at the time of
    /// the last row are merged into it; earlier times are rejected.
    pub fn record(&mut self, t: f64, entries: &[(&str, f64)]) -> Result<()> {
        for (name, v) in entries {
            if v.is_nan() || *v < 0.0 {
                return Err(Error::NegativeEntry { name: name.to_string(), value: *v });
            }
        }
        let new_row = match self.rows.last() {
            Some(r) if r.t == t => false,
            Some(r) if !(t > r.t) => {
                return Err(Error::NonMonotoneTime { tag: "ledger".into(), t, last: r.t });
            }
            _ => true,
        };
        if new_row {
            self.rows.push(LedgerRow { t, values: vec![f64::NAN; self.columns.len()] });
        }
        for (name, v) in entries {
            let col = match self.columns.iter().position(|c| c == name) {
                Some(c) => c,
                None => {
                    self.columns.push(name.to_string());
                    for r in &mut self.rows {
                        r.values.push(f64::NAN);
                    }
                    self.columns.len() - 1
                }
            };
            self.rows.last_mut().expect("row exists").values[col] = *v;
        }
        Ok(())
    }

    /// Time series of one column, skipping rows where it is missing.
    pub fn column(&self, name: &str) -> Result<Vec<(f64, f64)>> {
        let c = self.columns.iter().position(|x| x == name).ok_or_else(|| Error::UnknownTag(name.to_string()))?;
        Ok(self.rows.iter().filter(|r| !r.values[c].is_nan()).map(|r| (r.t, r.values[c])).collect())
    }

    /// Feeds a shell snapshot of the field tagged `tag` into its `L̃^p`
    /// accumulator.
    pub fn cl_accumulate(&mut self, p: TimeExponent, tag: &str, t: f64, snap: &ShellSnapshot) -> Result<()> {
        self.cl.entry((tag.to_string(), p)).or_insert_with(|| ClAccumulator::new(p)).push(tag, t, snap, 1.0)
    }

    /// [`Self::cl_accumulate`] for the `B^{0,1/2}` shells of a field.
    pub fn cl_accumulate_field(
        &mut self,
        ladder: &DyadicLadder,
        p: TimeExponent,
        tag: &str,
        t: f64,
        a: &Field,
    ) -> Result<()> {
        self.cl_accumulate(p, tag, t, &b0half_shells(ladder, &[a]).into())
    }

    /// [`Self::cl_accumulate`] for the `B^{0,1/2}` shells of a vector field.
    pub fn cl_accumulate_vec(
        &mut self,
        ladder: &DyadicLadder,
        p: TimeExponent,
        tag: &str,
        t: f64,
        u: &VecField,
    ) -> Result<()> {
        let comps: Vec<&Field> = u.comps.iter().collect();
        self.cl_accumulate(p, tag, t, &b0half_shells(ladder, &comps).into())
    }

    /// Adds `f_t |Δ_ℓ a(t)|²` to the weighted accumulator `(weight_tag, tag)`.
    pub fn weighted_cl_accumulate(
        &mut self,
        weight_tag: &str,
        tag: &str,
        f_t: f64,
        t: f64,
        snap: &ShellSnapshot,
    ) -> Result<()> {
        if !(f_t >= 0.0) {
            return Err(Error::NegativeWeight(f_t));
        }
        let key = alloc::format!("{tag}|{weight_tag}");
        self.weighted
            .entry((weight_tag.to_string(), tag.to_string()))
            .or_insert_with(|| ClAccumulator::new(TimeExponent::P2))
            .push(&key, t, snap, f_t)
    }

    pub fn cl(&self, tag: &str, p: TimeExponent) -> Result<&ClAccumulator> {
        self.cl.get(&(tag.to_string(), p)).ok_or_else(|| Error::UnknownTag(alloc::format!("{tag}@L{}", p.label())))
    }

    pub fn cl_value(&self, tag: &str, p: TimeExponent) -> Result<f64> {
        Ok(self.cl(tag, p)?.value())
    }

    pub fn weighted_value(&self, weight_tag: &str, tag: &str) -> Result<f64> {
        self.weighted
            .get(&(weight_tag.to_string(), tag.to_string()))
            .map(ClAccumulator::value)
            .ok_or_else(|| Error::UnknownTag(alloc::format!("{tag}|{weight_tag}")))
    }

    /// Registered accumulators as `(name, value)`, in a stable order.
    pub fn accumulator_values(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> =
            self.cl.iter().map(|((tag, p), a)| (alloc::format!("cl_{tag}_L{}", p.label()), a.value())).collect();
        out.extend(self.weighted.iter().map(|((w, tag), a)| (alloc::format!("wcl_{tag}_{w}"), a.value())));
        out
    }
}

/// Time-ordered samples of a vector field together with their ledger.
#[derive(Debug, Clone)]
pub struct Trajectory {
    samples: Vec<(f64, VecField)>,
    pub ledger: NormLedger,
}

impl Trajectory {
    pub fn new(ledger: NormLedger) -> Self {
        Self { samples: Vec::new(), ledger }
    }

    pub fn push(&mut self, t: f64, u: VecField) -> Result<()> {
        if let Some((last, _)) = self.samples.last() {
            if !(t > *last) {
                return Err(Error::NonMonotoneTime { tag: "trajectory".into(), t, last: *last });
            }
        }
        self.samples.push((t, u));
        Ok(())
    }

    pub fn samples(&self) -> &[(f64, VecField)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::norm_b0half;
    use crate::spectral::horizontal_heat;

    fn setup() -> (Grid, DyadicLadder, Field) {
        let g = Grid::new(8, 16).unwrap();
        let ld = DyadicLadder::standard(&g);
        let a = Field::from_fn(&g, |x, _, z| libm::cos(x) * libm::cos(z) + 0.3 * libm::sin(3.0 * z));
        (g, ld, a)
    }

    #[test]
    fn constant_in_time_l2() {
        let (g, ld, a) = setup();
        let mut led = NormLedger::for_ladder(&ld);
        for i in 0..=10 {
            led.cl_accumulate_field(&ld, TimeExponent::P2, "a", 0.2 * i as f64, &a).unwrap();
        }
        let want = libm::sqrt(2.0) * norm_b0half(&ld, &a);
        assert!((led.cl_value("a", TimeExponent::P2).unwrap() - want).abs() < 1e-13);
        assert_eq!(led.grid(), &g);
    }

    #[test]
    fn sup_of_decaying_trajectory_is_initial_value() {
        let (_, ld, a) = setup();
        let mut led = NormLedger::for_ladder(&ld);
        for i in 0..20 {
            let t = 0.05 * i as f64;
            led.cl_accumulate_field(&ld, TimeExponent::Inf, "a", t, &horizontal_heat(&a, t).unwrap()).unwrap();
        }
        assert!((led.cl_value("a", TimeExponent::Inf).unwrap() - norm_b0half(&ld, &a)).abs() < 1e-15);
    }

    #[test]
    fn heat_flow_l2_closed_form() {
        let g = Grid::new(8, 16).unwrap();
        let ld = DyadicLadder::standard(&g);
        let a0 = Field::from_fn(&g, |x, _, z| libm::cos(x) * libm::cos(z));
        let (tmax, n) = (1.0, 2000);
        let mut led = NormLedger::for_ladder(&ld);
        for i in 0..=n {
            let t = tmax * i as f64 / n as f64;
            led.cl_accumulate_field(&ld, TimeExponent::P2, "a", t, &horizontal_heat(&a0, t).unwrap()).unwrap();
        }
        // ‖Δ_ℓ a(t)‖² = e^{-2t}‖Δ_ℓ a₀‖²
        let want = libm::sqrt((1.0 - libm::exp(-2.0 * tmax)) / 2.0) * norm_b0half(&ld, &a0);
        let got = led.cl_value("a", TimeExponent::P2).unwrap();
        assert!((got - want).abs() < 1e-6 * want);
    }

    #[test]
    fn weighted_accumulator() {
        let (_, ld, a) = setup();
        let snap: ShellSnapshot = b0half_shells(&ld, &[&a]).into();
        let mut led = NormLedger::for_ladder(&ld);
        let n = 4000;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            led.weighted_cl_accumulate("zero", "a", 0.0, t, &snap).unwrap();
            led.weighted_cl_accumulate("one", "a", 1.0, t, &snap).unwrap();
            led.weighted_cl_accumulate("exp", "a", libm::exp(-t), t, &snap).unwrap();
            led.cl_accumulate(TimeExponent::P2, "a", t, &snap).unwrap();
        }
        assert_eq!(led.weighted_value("zero", "a").unwrap(), 0.0);
        let plain = led.cl_value("a", TimeExponent::P2).unwrap();
        assert!((led.weighted_value("one", "a").unwrap() - plain).abs() < 1e-12 * plain);
        let want = libm::sqrt(1.0 - libm::exp(-1.0)) * norm_b0half(&ld, &a);
        assert!((led.weighted_value("exp", "a").unwrap() - want).abs() < 1e-7 * want);
        assert_eq!(led.weighted_cl_accumulate("neg", "a", -1.0, 2.0, &snap), Err(Error::NegativeWeight(-1.0)));
    }

    #[test]
    fn rejects_nonmonotone_time_and_unknown_tags() {
        let (_, ld, a) = setup();
        let mut led = NormLedger::for_ladder(&ld);
        led.cl_accumulate_field(&ld, TimeExponent::P1, "a", 1.0, &a).unwrap();
        assert!(matches!(
            led.cl_accumulate_field(&ld, TimeExponent::P1, "a", 1.0, &a),
            Err(Error::NonMonotoneTime { .. })
        ));
        assert!(matches!(led.cl_value("b", TimeExponent::P1), Err(Error::UnknownTag(_))));
    }

    #[test]
    fn rows_merge_and_grow_columns() {
        let (g, _, _) = setup();
        let mut led = NormLedger::new(&g, "x");
        led.record(0.0, &[("a", 1.0)]).unwrap();
        led.record(0.0, &[("b", 2.0)]).unwrap();
        led.record(0.5, &[("a", 3.0)]).unwrap();
        assert_eq!(led.columns(), ["a", "b"]);
        assert_eq!(led.rows().len(), 2);
        assert!(led.rows()[1].values[1].is_nan());
        assert_eq!(led.column("b").unwrap(), [(0.0, 2.0)]);
        assert!(led.record(0.2, &[("a", 1.0)]).is_err());
        assert!(led.record(1.0, &[("a", -1.0)]).is_err());
    }
}
