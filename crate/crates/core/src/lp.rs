//! Dyadic cutoffs, anisotropic Littlewood-Paley blocks, the low/high
//! horizontal split and the vertical Bony decomposition.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::spectral::dealiased_product;

/// Parameters of the smoothed-step cutoff: `χ = 1` on `[0, a]`, `χ = 0` on
/// `[b, ∞)`, with an `exp(-1/x)` transition in between.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CutoffProfile {
    pub a: f64,
    pub b: f64,
    /// Multiplies `φ`. Anything other than 1 breaks the partition of unity;
    /// only useful to exercise the partition check.
    pub phi_scale: f64,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        Self { a: 0.75, b: 4.0 / 3.0, phi_scale: 1.0 }
    }
}

/// The pair `(φ, χ)` with `φ(τ) = χ(τ/2) − χ(τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffPair {
    profile: CutoffProfile,
    hash: String,
}

/// `exp(-1/x)`-based smooth step: 0 at 0, 1 at 1, flat to all orders at both ends.
fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let g0 = libm::exp(-1.0 / s);
    let g1 = libm::exp(-1.0 / (1.0 - s));
    g0 / (g0 + g1)
}

impl CutoffPair {
    /// Builds the cutoffs; rejects profiles whose supports would leave
    /// `|τ| ≤ 4/3` (for `χ`) or `[3/4, 8/3]` (for `φ`).
    pub fn new(profile: CutoffProfile) -> Result<Self> {
        let CutoffProfile { a, b, phi_scale } = profile;
        if !(a.is_finite() && b.is_finite() && phi_scale.is_finite()) {
            return Err(Error::InvalidCutoff("parameters must be finite".into()));
        }
        if a < 0.75 {
            return Err(Error::InvalidCutoff(alloc::format!("plateau end {a} is below 3/4")));
        }
        if b > 4.0 / 3.0 {
            return Err(Error::InvalidCutoff(alloc::format!("support end {b} exceeds 4/3")));
        }
        if a >= b {
            return Err(Error::InvalidCutoff(alloc::format!("plateau end {a} must be below support end {b}")));
        }
        let mut pair = Self { profile, hash: String::new() };
        pair.hash = pair.compute_hash();
        Ok(pair)
    }

    pub fn standard() -> Self {
        Self::new(CutoffProfile::default()).expect("default profile is valid")
    }

    pub fn profile(&self) -> CutoffProfile {
        self.profile
    }

    #[inline]
    pub fn chi(&self, tau: f64) -> f64 {
        let t = libm::fabs(tau);
        let CutoffProfile { a, b, .. } = self.profile;
        if t <= a {
            1.0
        } else if t >= b {
            0.0
        } else {
            smooth_step((b - t) / (b - a))
        }
    }

    #[inline]
    pub fn phi(&self, tau: f64) -> f64 {
        self.profile.phi_scale * (self.chi(0.5 * tau) - self.chi(tau))
    }

    /// Open support of `φ`: `(a, 2b)`.
    pub fn phi_support(&self) -> (f64, f64) {
        (self.profile.a, 2.0 * self.profile.b)
    }

    /// 16 hex digits identifying the profile, written into every output.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    fn compute_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"cutoff-v1");
        for v in [self.profile.a, self.profile.b, self.profile.phi_scale] {
            h.update(v.to_le_bytes());
        }
        for i in 0..=512 {
            let tau = 3.0 * i as f64 / 512.0;
            h.update(self.chi(tau).to_le_bytes());
            h.update(self.phi(tau).to_le_bytes());
        }
        let digest = h.finalize();
        let mut s = String::with_capacity(16);
        for byte in &digest[..8] {
            let _ = write!(s, "{byte:02x}");
        }
        s
    }
}

impl Default for CutoffPair {
    fn default() -> Self {
        Self::standard()
    }
}

/// Shells of the grid and their cutoff values, cached per grid.
#[derive(Debug, Clone)]
pub struct DyadicLadder {
    grid: Grid,
    cutoffs: CutoffPair,
    pub k_min: i32,
    pub k_max: i32,
    pub l_min: i32,
    pub l_max: i32,
    /// `φ(2^{-k}|ξ_h|)` on the horizontal plane, one entry per shell.
    phi_h: Vec<Vec<f64>>,
    /// `φ(2^{-ℓ}|ξ₃|)` along the vertical axis, one entry per shell.
    phi_v: Vec<Vec<f64>>,
}

/// Shells `j` whose support `(lo 2^j, hi 2^j)` meets `[t_min, t_max]`.
fn shell_range(lo: f64, hi: f64, t_min: f64, t_max: f64) -> (i32, i32) {
    let mut j_min = libm::floor(libm::log2(t_min / hi)) as i32 - 1;
    while hi * libm::exp2(j_min as f64) <= t_min {
        j_min += 1;
    }
    let mut j_max = libm::ceil(libm::log2(t_max / lo)) as i32 + 1;
    while lo * libm::exp2(j_max as f64) >= t_max {
        j_max -= 1;
    }
    (j_min, j_max)
}

impl DyadicLadder {
    pub fn new(grid: &Grid, cutoffs: &CutoffPair) -> Self {
        let (lo, hi) = cutoffs.phi_support();
        let (hmin, hmax) = grid.xi_h_range();
        let (vmin, vmax) = grid.xi_v_range();
        let (k_min, k_max) = shell_range(lo, hi, hmin, hmax);
        let (l_min, l_max) = shell_range(lo, hi, vmin, vmax);
        let mut ladder = Self {
            grid: *grid,
            cutoffs: cutoffs.clone(),
            k_min,
            k_max,
            l_min,
            l_max,
            phi_h: Vec::new(),
            phi_v: Vec::new(),
        };
        ladder.phi_h = (k_min..=k_max).map(|k| ladder.plane_values(k, |c, t| c.phi(t))).collect();
        ladder.phi_v = (l_min..=l_max).map(|l| ladder.line_values(l, |c, t| c.phi(t))).collect();
        ladder
    }

    pub fn standard(grid: &Grid) -> Self {
        Self::new(grid, &CutoffPair::standard())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cutoffs(&self) -> &CutoffPair {
        &self.cutoffs
    }

    pub fn shells_h(&self) -> core::ops::RangeInclusive<i32> {
        self.k_min..=self.k_max
    }

    pub fn shells_v(&self) -> core::ops::RangeInclusive<i32> {
        self.l_min..=self.l_max
    }

    fn plane_values(&self, k: i32, f: impl Fn(&CutoffPair, f64) -> f64) -> Vec<f64> {
        let g = &self.grid;
        let s = libm::exp2(-k as f64);
        let mut out = Vec::with_capacity(g.plane_len());
        for i1 in 0..g.n_h {
            for i2 in 0..g.n_h {
                let r = libm::hypot(g.xi_h(i1), g.xi_h(i2));
                out.push(f(&self.cutoffs, s * r));
            }
        }
        out
    }

    fn line_values(&self, l: i32, f: impl Fn(&CutoffPair, f64) -> f64) -> Vec<f64> {
        let g = &self.grid;
        let s = libm::exp2(-l as f64);
        (0..g.n_v).map(|i| f(&self.cutoffs, s * libm::fabs(g.xi_v(i)))).collect()
    }

    /// `φ(2^{-k}|ξ_h|)` indexed by `i1 * n_h + i2`.
    pub fn phi_h(&self, k: i32) -> Result<&[f64]> {
        self.check_h(k)?;
        Ok(&self.phi_h[(k - self.k_min) as usize])
    }

    /// `φ(2^{-ℓ}|ξ₃|)` indexed by `i3`.
    pub fn phi_v(&self, l: i32) -> Result<&[f64]> {
        self.check_v(l)?;
        Ok(&self.phi_v[(l - self.l_min) as usize])
    }

    /// `χ(2^{-k}|ξ_h|)` for any integer `k`.
    pub fn chi_h(&self, k: i32) -> Vec<f64> {
        self.plane_values(k, |c, t| c.chi(t))
    }

    /// `χ(2^{-ℓ}|ξ₃|)` for any integer `ℓ`.
    pub fn chi_v(&self, l: i32) -> Vec<f64> {
        self.line_values(l, |c, t| c.chi(t))
    }

    fn check_h(&self, k: i32) -> Result<()> {
        if k < self.k_min || k > self.k_max {
            return Err(Error::ShellOutOfRange { shell: k, min: self.k_min, max: self.k_max });
        }
        Ok(())
    }

    fn check_v(&self, l: i32) -> Result<()> {
        if l < self.l_min || l > self.l_max {
            return Err(Error::ShellOutOfRange { shell: l, min: self.l_min, max: self.l_max });
        }
        Ok(())
    }

    fn check_grid(&self, a: &Field) -> Result<()> {
        if *a.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    fn apply_plane(&self, a: &Field, plane: &[f64]) -> Field {
        let nh = self.grid.n_h;
        a.map_real(|i1, i2, _| plane[i1 * nh + i2])
    }

    fn apply_line(&self, a: &Field, line: &[f64]) -> Field {
        a.map_real(|_, _, i3| line[i3])
    }

    /// `Δ_k^h a`.
    pub fn delta_h(&self, k: i32, a: &Field) -> Result<Field> {
        self.check_grid(a)?;
        Ok(self.apply_plane(a, self.phi_h(k)?))
    }

    /// `Δ_ℓ^v a`.
    pub fn delta_v(&self, l: i32, a: &Field) -> Result<Field> {
        self.check_grid(a)?;
        Ok(self.apply_line(a, self.phi_v(l)?))
    }

    /// `S_k^h a`.
    pub fn s_h(&self, k: i32, a: &Field) -> Result<Field> {
        self.check_grid(a)?;
        Ok(self.apply_plane(a, &self.chi_h(k)))
    }

    /// `S_ℓ^v a`.
    pub fn s_v(&self, l: i32, a: &Field) -> Result<Field> {
        self.check_grid(a)?;
        Ok(self.apply_line(a, &self.chi_v(l)))
    }

    /// The `ξ₃ = 0` plane of `a`, which no vertical block sees.
    pub fn vertical_mean(&self, a: &Field) -> Result<Field> {
        self.check_grid(a)?;
        Ok(a.map_real(|_, _, i3| if i3 == 0 { 1.0 } else { 0.0 }))
    }

    /// `(a_lh, a_hh)` with `a_lh = Σ_ℓ S^h_{ℓ−1}Δ^v_ℓ a`. On the `ξ₃ = 0`
    /// plane the mean `ξ = 0` goes to `a_lh` and everything else to `a_hh`,
    /// so that `a_lh + a_hh = a` on every mode.
    pub fn split_lh_hh(&self, a: &Field) -> Result<(Field, Field)> {
        self.check_grid(a)?;
        let g = self.grid;
        let nh = g.n_h;
        // combined multiplier m(ξ) = Σ_ℓ χ(2^{-(ℓ-1)}|ξ_h|) φ(2^{-ℓ}|ξ₃|)
        let mut m = vec![0.0; g.len()];
        for l in self.shells_v() {
            let chi = self.chi_h(l - 1);
            let phi = self.phi_v(l)?;
            for (idx, mv) in m.iter_mut().enumerate() {
                let (i1, i2, i3) = g.unindex(idx);
                *mv += chi[i1 * nh + i2] * phi[i3];
            }
        }
        m[0] = 1.0;
        let mut lh = a.coeffs().to_vec();
        let mut hh = a.coeffs().to_vec();
        for ((l, h), mv) in lh.iter_mut().zip(hh.iter_mut()).zip(&m) {
            *l *= *mv;
            *h -= *l;
        }
        Ok((Field::from_coeffs_unchecked(&g, lh, a.is_real()), Field::from_coeffs_unchecked(&g, hh, a.is_real())))
    }

    /// Vertical Bony decomposition `ab = T + R` with `T = Σ_ℓ S^v_{ℓ−1}a Δ^v_ℓ b`
    /// and `R = Σ_ℓ Δ^v_ℓ a S^v_{ℓ+2}b + a₀b₀`, where `a₀, b₀` are the vertical
    /// means. All products are dealiased.
    pub fn bony_v(&self, a: &Field, b: &Field) -> Result<(Field, Field)> {
        self.check_grid(a)?;
        self.check_grid(b)?;
        let g = self.grid;
        let mut t = Field::zeros(&g);
        let mut r = dealiased_product(&self.vertical_mean(a)?, &self.vertical_mean(b)?);
        for l in self.shells_v() {
            let db = self.delta_v(l, b)?;
            if db.max_abs() > 0.0 {
                let sa = self.s_v(l - 1, a)?;
                t = &t + &dealiased_product(&sa, &db);
            }
            let da = self.delta_v(l, a)?;
            if da.max_abs() > 0.0 {
                let sb = self.s_v(l + 2, b)?;
                r = &r + &dealiased_product(&da, &sb);
            }
        }
        Ok((t, r))
    }

    /// `Σ_ℓ Δ^v_ℓ a`, i.e. `a` minus its vertical mean.
    pub fn vertical_sum(&self, a: &Field) -> Result<Field> {
        self.check_grid(a)?;
        let mut acc = vec![Complex64::new(0.0, 0.0); self.grid.n_v];
        for l in self.shells_v() {
            for (x, p) in acc.iter_mut().zip(self.phi_v(l)?) {
                *x += p;
            }
        }
        Ok(a.map_modes(|_, _, i3| acc[i3], true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{random_field, rng_from_seed, Band};

    #[test]
    fn cutoff_values() {
        let c = CutoffPair::standard();
        assert_eq!(c.phi(0.5), 0.0);
        assert_eq!(c.chi(0.5), 1.0);
        assert!((c.phi(1.0) + c.phi(2.0) - 1.0).abs() < 1e-15);
        assert_eq!(c.chi(4.0 / 3.0), 0.0);
        assert_eq!(c.phi(8.0 / 3.0), 0.0);
        assert_eq!(c.phi(0.75), 0.0);
        assert_eq!(c.hash().len(), 16);
    }

    #[test]
    fn rejects_bad_profiles() {
        for (a, b) in [(0.7, 1.2), (0.8, 1.4), (1.0, 0.9)] {
            assert!(CutoffPair::new(CutoffProfile { a, b, phi_scale: 1.0 }).is_err());
        }
        let narrow = CutoffPair::new(CutoffProfile { a: 0.8, b: 1.2, phi_scale: 1.0 }).unwrap();
        assert_ne!(narrow.hash(), CutoffPair::standard().hash());
    }

    #[test]
    fn ladder_covers_all_frequencies() {
        let g = Grid::new(32, 16).unwrap();
        let ld = DyadicLadder::standard(&g);
        // vertical frequencies 1..=8
        assert_eq!((ld.l_min, ld.l_max), (-1, 3));
        for i in 1..g.n_v {
            let s: f64 = ld.shells_v().map(|l| ld.phi_v(l).unwrap()[i]).sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
        for p in 1..g.plane_len() {
            let s: f64 = ld.shells_h().map(|k| ld.phi_h(k).unwrap()[p]).sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
        assert!(ld.phi_v(ld.l_max + 1).is_err());
    }

    #[test]
    fn block_of_single_vertical_mode() {
        let g = Grid::new(16, 16).unwrap();
        let ld = DyadicLadder::standard(&g);
        let a = Field::mode(&g, [0, 0, 4], Complex64::new(1.0, 0.0));
        for l in ld.shells_v() {
            let nonzero = ld.delta_v(l, &a).unwrap().max_abs() > 0.0;
            assert_eq!(nonzero, l == 1 || l == 2, "shell {l}");
        }
    }

    #[test]
    fn low_frequencies_pass_s_v() {
        let g = Grid::new(16, 32).unwrap();
        let ld = DyadicLadder::standard(&g);
        let a = random_field(&g, Band::new(4, 5), &mut rng_from_seed(4));
        // 5 < (3/4) 2^3
        assert_eq!(ld.s_v(3, &a).unwrap(), a);
    }

    #[test]
    fn split_examples() {
        let g = Grid::new(32, 32).unwrap();
        let ld = DyadicLadder::standard(&g);
        let one = Complex64::new(1.0, 0.0);
        let a = Field::mode(&g, [1, 0, 8], one);
        let (lh, hh) = ld.split_lh_hh(&a).unwrap();
        assert!(lh.max_diff(&a) < 1e-15 && hh.max_abs() < 1e-15);
        let b = Field::mode(&g, [8, 0, 1], one);
        let (lh, hh) = ld.split_lh_hh(&b).unwrap();
        assert!(hh.max_diff(&b) < 1e-15 && lh.max_abs() < 1e-15);
    }

    #[test]
    fn bony_of_constant_and_low_high_pair() {
        let g = Grid::new(8, 64).unwrap();
        let ld = DyadicLadder::standard(&g);
        let a = random_field(&g, Band::new(2, 6), &mut rng_from_seed(8));
        let c = Field::constant(&g, 2.5);
        let (t, r) = ld.bony_v(&a, &c).unwrap();
        assert_eq!(t.max_abs(), 0.0);
        assert!(r.max_diff(&a.dealiased().scale(2.5)) < 1e-13);

        let one = Complex64::new(1.0, 0.0);
        let lo = Field::mode(&g, [0, 0, 1], one);
        let hi = Field::mode(&g, [0, 0, 16], one);
        let (t, r) = ld.bony_v(&lo, &hi).unwrap();
        let prod = Field::mode(&g, [0, 0, 17], one);
        assert!(t.max_diff(&prod) < 1e-14);
        assert!(r.max_abs() < 1e-14);
    }
}
