//! Anisotropic Sobolev and Besov norms.
//!
//! All B-norms are finite sums over the vertical shells of a
//! [`DyadicLadder`]. The `ξ₃ = 0` plane belongs to no vertical shell; its L²
//! mass is reported separately as the vertical-mean channel.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::field::Field;
use crate::lp::DyadicLadder;
use crate::transform::Transformer;

/// A norm together with the share of mass skipped on singular modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkippedNorm {
    pub value: f64,
    /// `‖a on skipped modes‖ / ‖a‖`.
    pub skipped_fraction: f64,
}

/// `‖a‖_{H^{s,s'}}`: `(Σ |ξ_h|^{2s} |ξ₃|^{2s'} |â(ξ)|²)^{1/2}`. Modes where
/// the weight is singular (`ξ_h = 0` with `s < 0`, `ξ₃ = 0` with `s' < 0`) are
/// skipped and reported.
pub fn norm_h(a: &Field, s: f64, s3: f64) -> SkippedNorm {
    let g = a.grid();
    let mut sum = 0.0;
    let mut skipped = 0.0;
    let mut total = 0.0;
    for (idx, c) in a.coeffs().iter().enumerate() {
        let m = c.norm_sqr();
        if m == 0.0 {
            continue;
        }
        total += m;
        let (i1, i2, i3) = g.unindex(idx);
        let kh2 = g.xi_h(i1) * g.xi_h(i1) + g.xi_h(i2) * g.xi_h(i2);
        let kv2 = g.xi_v(i3) * g.xi_v(i3);
        if (s < 0.0 && kh2 == 0.0) || (s3 < 0.0 && kv2 == 0.0) {
            skipped += m;
            continue;
        }
        sum += weight_pow(kh2, s) * weight_pow(kv2, s3) * m;
    }
    SkippedNorm {
        value: libm::sqrt(sum) * g.l2_factor(),
        skipped_fraction: if total > 0.0 { libm::sqrt(skipped / total) } else { 0.0 },
    }
}

/// `(x²)^s` with `0^0 = 1`.
fn weight_pow(x2: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        libm::pow(x2, s)
    }
}

/// Block norms `‖Δ_ℓ^v a‖` for every shell of a ladder, in some mixed norm.
#[derive(Debug, Clone, PartialEq)]
pub struct VerticalShells {
    pub l_min: i32,
    /// Unweighted block norms, `values[i]` belongs to shell `l_min + i`.
    pub values: Vec<f64>,
    /// Norm of the `ξ₃ = 0` plane in the same mixed norm.
    pub vertical_mean: f64,
}

impl VerticalShells {
    /// `Σ_ℓ 2^{ℓ/2} values[ℓ]`.
    pub fn besov_sum(&self) -> f64 {
        self.weighted().iter().sum()
    }

    /// `2^{ℓ/2} values[ℓ]` per shell.
    pub fn weighted(&self) -> Vec<f64> {
        self.values.iter().enumerate().map(|(i, v)| shell_weight(self.l_min + i as i32) * v).collect()
    }

    pub fn shells(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| (self.l_min + i as i32, *v))
    }
}

#[inline]
pub(crate) fn shell_weight(l: i32) -> f64 {
    libm::exp2(0.5 * l as f64)
}

/// Per-`ξ₃` sums `Σ_{ξ_h} w(ξ_h) |â(ξ_h, ξ₃)|²` over all components.
fn vertical_energy(comps: &[&Field], weight: Option<&dyn Fn(usize, usize) -> f64>) -> Vec<f64> {
    let g = comps[0].grid();
    let mut e = vec![0.0; g.n_v];
    for f in comps {
        assert_eq!(f.grid(), g, "components live on different grids");
        for (idx, c) in f.coeffs().iter().enumerate() {
            let (i1, i2, i3) = g.unindex(idx);
            let w = weight.map_or(1.0, |w| w(i1, i2));
            e[i3] += w * c.norm_sqr();
        }
    }
    e
}

fn shells_from_energy(ladder: &DyadicLadder, e: &[f64], factor: f64) -> VerticalShells {
    let values = ladder
        .shells_v()
        .map(|l| {
            let phi = ladder.phi_v(l).expect("shell inside ladder");
            libm::sqrt(phi.iter().zip(e).map(|(p, x)| p * p * x).sum::<f64>()) * factor
        })
        .collect();
    VerticalShells { l_min: ladder.l_min, values, vertical_mean: libm::sqrt(e[0]) * factor }
}

/// L² block norms `‖Δ_ℓ^v a‖_{L²}` of a scalar or vector field.
pub fn b0half_shells(ladder: &DyadicLadder, comps: &[&Field]) -> VerticalShells {
    shells_from_energy(ladder, &vertical_energy(comps, None), ladder.grid().l2_factor())
}

/// L² block norms of `∇_h a`, taken over all components.
pub fn b0half_shells_grad_h(ladder: &DyadicLadder, comps: &[&Field]) -> VerticalShells {
    let g = *ladder.grid();
    let w = move |i1: usize, i2: usize| {
        let (a, b) = (g.xi_h_odd(i1), g.xi_h_odd(i2));
        a * a + b * b
    };
    shells_from_energy(ladder, &vertical_energy(comps, Some(&w)), g.l2_factor())
}

/// `‖a‖_{B^{0,1/2}} = Σ_ℓ 2^{ℓ/2} ‖Δ_ℓ^v a‖_{L²}`.
pub fn norm_b0half(ladder: &DyadicLadder, a: &Field) -> f64 {
    b0half_shells(ladder, &[a]).besov_sum()
}

/// Block norms `‖Δ_ℓ^v a‖_{L⁴_h(L²_v)}`.
pub fn b4_0half_shells(ladder: &DyadicLadder, comps: &[&Field]) -> VerticalShells {
    let g = *ladder.grid();
    let nl = ladder.shells_v().count();
    let np = g.plane_len();
    let mut gsum = vec![vec![0.0; np]; nl];
    let mut mean = vec![0.0; np];
    let mut t = Transformer::new(&g);
    let mut plane = vec![Complex64::new(0.0, 0.0); np];
    for i3 in 0..g.n_v {
        for f in comps {
            if !extract_plane(f, i3, None, &mut plane) {
                continue;
            }
            t.plane_to_physical(&mut plane);
            if i3 == 0 {
                for (m, b) in mean.iter_mut().zip(&plane) {
                    *m += b.norm_sqr();
                }
                continue;
            }
            for (li, l) in ladder.shells_v().enumerate() {
                let p = ladder.phi_v(l).expect("shell inside ladder")[i3];
                if p == 0.0 {
                    continue;
                }
                for (gs, b) in gsum[li].iter_mut().zip(&plane) {
                    *gs += p * p * b.norm_sqr();
                }
            }
        }
    }
    let factor = g.l4l2_factor();
    VerticalShells {
        l_min: ladder.l_min,
        values: gsum.iter().map(|gl| l4_of_sq(gl) * factor).collect(),
        vertical_mean: l4_of_sq(&mean) * factor,
    }
}

/// `(mean G²)^{1/4}` for a pointwise squared vertical norm `G`.
fn l4_of_sq(gl: &[f64]) -> f64 {
    let m = gl.iter().map(|x| x * x).sum::<f64>() / gl.len() as f64;
    libm::sqrt(libm::sqrt(m))
}

/// Copies the horizontal plane `ξ₃ = i3` of `f` (optionally weighted) into
/// `plane`; returns false if it is identically zero.
fn extract_plane(f: &Field, i3: usize, weight: Option<&[f64]>, plane: &mut [Complex64]) -> bool {
    let g = f.grid();
    let c = f.coeffs();
    let mut any = false;
    for (p, v) in plane.iter_mut().enumerate() {
        let x = c[p * g.n_v + i3] * weight.map_or(1.0, |w| w[p]);
        any |= x.re != 0.0 || x.im != 0.0;
        *v = x;
    }
    any
}

/// `‖a‖_{B₄^{0,1/2}} = Σ_ℓ 2^{ℓ/2} ‖Δ_ℓ^v a‖_{L⁴_h(L²_v)}`.
pub fn norm_b4_0half(ladder: &DyadicLadder, a: &Field) -> f64 {
    b4_0half_shells(ladder, &[a]).besov_sum()
}

/// Ingredients of the `B₄^{-1/2,1/2}` norm.
#[derive(Debug, Clone, PartialEq)]
pub struct B4Blocks {
    pub l_min: i32,
    pub k_min: i32,
    /// `block[ℓ][k] = ‖Δ_k^h Δ_ℓ^v a‖_{L⁴_h(L²_v)}`, zero for `k < ℓ − 1`.
    pub block: Vec<Vec<f64>>,
    /// `low[ℓ] = ‖S^h_{ℓ−1} Δ_ℓ^v a‖_{L²}`.
    pub low: Vec<f64>,
}

impl B4Blocks {
    /// Per-shell bracket `(Σ_{k≥ℓ−1} 2^{−k} block²)^{1/2} + low`.
    pub fn shell_terms(&self) -> Vec<f64> {
        combine_b4(self.l_min, self.k_min, &self.block, &self.low)
    }

    pub fn norm(&self) -> f64 {
        self.shell_terms().iter().enumerate().map(|(i, v)| shell_weight(self.l_min + i as i32) * v).sum()
    }
}

pub(crate) fn combine_b4(l_min: i32, k_min: i32, block: &[Vec<f64>], low: &[f64]) -> Vec<f64> {
    block
        .iter()
        .zip(low)
        .enumerate()
        .map(|(li, (row, lo))| {
            let l = l_min + li as i32;
            let s: f64 = row
                .iter()
                .enumerate()
                .filter(|(ki, _)| k_min + *ki as i32 >= l - 1)
                .map(|(ki, v)| libm::exp2(-(k_min + ki as i32) as f64) * v * v)
                .sum();
            libm::sqrt(s) + lo
        })
        .collect()
}

/// Computes every block of the `B₄^{-1/2,1/2}` norm of a scalar or vector field.
pub fn b4_neg_blocks(ladder: &DyadicLadder, comps: &[&Field]) -> B4Blocks {
    let g = *ladder.grid();
    let np = g.plane_len();
    let nk = ladder.shells_h().count();
    let ls: Vec<i32> = ladder.shells_v().collect();
    let mut gsum = vec![vec![vec![0.0; np]; nk]; ls.len()];
    let mut t = Transformer::new(&g);
    let mut plane = vec![Complex64::new(0.0, 0.0); np];
    for (ki, k) in ladder.shells_h().enumerate() {
        let phih = ladder.phi_h(k).expect("shell inside ladder");
        for i3 in 1..g.n_v {
            // shells that see this vertical frequency and use horizontal shell k
            let active: Vec<(usize, f64)> = ls
                .iter()
                .enumerate()
                .filter_map(|(li, &l)| {
                    let p = ladder.phi_v(l).expect("shell inside ladder")[i3];
                    (p != 0.0 && k >= l - 1).then_some((li, p))
                })
                .collect();
            if active.is_empty() {
                continue;
            }
            for f in comps {
                if !extract_plane(f, i3, Some(phih), &mut plane) {
                    continue;
                }
                t.plane_to_physical(&mut plane);
                for &(li, p) in &active {
                    for (gs, b) in gsum[li][ki].iter_mut().zip(&plane) {
                        *gs += p * p * b.norm_sqr();
                    }
                }
            }
        }
    }
    let factor = g.l4l2_factor();
    let block = gsum.iter().map(|row| row.iter().map(|gl| l4_of_sq(gl) * factor).collect()).collect();

    // low part: ‖S^h_{ℓ-1} Δ^v_ℓ a‖_{L²}
    let low = ls
        .iter()
        .map(|&l| {
            let chi = ladder.chi_h(l - 1);
            let phi = ladder.phi_v(l).expect("shell inside ladder");
            let mut s = 0.0;
            for f in comps {
                for (idx, c) in f.coeffs().iter().enumerate() {
                    let (i1, i2, i3) = g.unindex(idx);
                    let m = chi[i1 * g.n_h + i2] * phi[i3];
                    s += m * m * c.norm_sqr();
                }
            }
            libm::sqrt(s) * g.l2_factor()
        })
        .collect();
    B4Blocks { l_min: ladder.l_min, k_min: ladder.k_min, block, low }
}

/// `‖a‖_{B₄^{-1/2,1/2}}`.
pub fn norm_b4_neg(ladder: &DyadicLadder, a: &Field) -> f64 {
    b4_neg_blocks(ladder, &[a]).norm()
}
