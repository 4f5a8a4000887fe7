//! Spectral scalar and vector fields.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::transform::{negation_map, Transformer};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Scalar field stored by its Fourier coefficients on `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: *grid, coeffs: vec![ZERO; grid.len()], real: true }
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[0] = Complex64::new(value, 0.0);
        f
    }

    /// Wraps a coefficient array. `real` asserts Hermitian symmetry; it is
    /// cleared if the coefficients do not have it.
    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>, real: bool) -> Self {
        assert_eq!(coeffs.len(), grid.len(), "coefficient array does not match grid");
        let mut f = Self { grid: *grid, coeffs, real: false };
        f.real = real && f.hermitian_defect() <= 1e-13;
        f
    }

    /// Wraps coefficients that are Hermitian by construction, without checking.
    pub(crate) fn from_coeffs_unchecked(grid: &Grid, coeffs: Vec<Complex64>, real: bool) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self { grid: *grid, coeffs, real }
    }

    /// Single complex exponential `amp * e^{i(k1 x1 + k2 x2 + k3 x3)}` with
    /// integer wavenumbers.
    pub fn mode(grid: &Grid, k: [i64; 3], amp: Complex64) -> Self {
        let mut f = Self::zeros(grid);
        let idx = grid.index(
            Grid::position(k[0], grid.n_h).expect("k1 off grid"),
            Grid::position(k[1], grid.n_h).expect("k2 off grid"),
            Grid::position(k[2], grid.n_v).expect("k3 off grid"),
        );
        f.coeffs[idx] = amp;
        f.real = k == [0, 0, 0] && amp.im == 0.0;
        f
    }

    /// Samples a real function at the grid points and transforms it.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let (dh, dv) = grid.spacing();
        let mut data = vec![ZERO; grid.len()];
        for (idx, v) in data.iter_mut().enumerate() {
            let (i1, i2, i3) = grid.unindex(idx);
            *v = Complex64::new(f(i1 as f64 * dh, i2 as f64 * dh, i3 as f64 * dv), 0.0);
        }
        Transformer::new(grid).to_spectral(&mut data);
        let mut out = Self { grid: *grid, coeffs: data, real: true };
        out.symmetrize();
        out
    }

    pub fn from_physical(grid: &Grid, values: &[f64]) -> Self {
        assert_eq!(values.len(), grid.len());
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Transformer::new(grid).to_spectral(&mut data);
        let mut out = Self { grid: *grid, coeffs: data, real: true };
        out.symmetrize();
        out
    }

    pub fn from_physical_complex(grid: &Grid, mut values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), grid.len());
        Transformer::new(grid).to_spectral(&mut values);
        Self::from_coeffs(grid, values, true)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Coefficient at integer wavenumber `k`, zero when off-grid.
    pub fn coeff(&self, k: [i64; 3]) -> Complex64 {
        let g = &self.grid;
        match (Grid::position(k[0], g.n_h), Grid::position(k[1], g.n_h), Grid::position(k[2], g.n_v)) {
            (Some(a), Some(b), Some(c)) => self.coeffs[g.index(a, b, c)],
            _ => ZERO,
        }
    }

    /// Point values on the grid.
    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        Transformer::new(&self.grid).to_physical(&mut data);
        data
    }

    pub fn to_physical_real(&self) -> Vec<f64> {
        self.to_physical().into_iter().map(|c| c.re).collect()
    }

    /// Largest `|c(-xi) - conj c(xi)|` relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let neg = negation_map(&self.grid);
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        self.coeffs.iter().enumerate().map(|(i, c)| (self.coeffs[neg[i]] - c.conj()).norm()).fold(0.0, f64::max) / scale
    }

    /// Replaces the coefficients by their Hermitian part, making the field real.
    pub fn symmetrize(&mut self) {
        let neg = negation_map(&self.grid);
        let old = self.coeffs.clone();
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            *c = (old[i] + old[neg[i]].conj()) * 0.5;
        }
        self.real = true;
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sum of squared coefficient moduli (cell-averaged `|a|^2`).
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// L^2 norm under the grid's measure.
    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.energy()) * self.grid.l2_factor()
    }

    /// Coefficientwise multiplication by `symbol(i1, i2, i3)`.
    pub fn map_modes(&self, symbol: impl Fn(usize, usize, usize) -> Complex64, keeps_real: bool) -> Field {
        let g = self.grid;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let (i1, i2, i3) = g.unindex(idx);
                c * symbol(i1, i2, i3)
            })
            .collect();
        Field { grid: g, coeffs, real: self.real && keeps_real }
    }

    /// Coefficientwise multiplication by a real symbol (keeps reality when the
    /// symbol is even).
    pub fn map_real(&self, symbol: impl Fn(usize, usize, usize) -> f64) -> Field {
        self.map_modes(|a, b, c| Complex64::new(symbol(a, b, c), 0.0), true)
    }

    /// Zeroes the modes outside the dealiasing box.
    pub fn dealiased(&self) -> Field {
        let g = self.grid;
        self.map_real(|a, b, c| if g.keeps(a, b, c) { 1.0 } else { 0.0 })
    }

    pub fn scale(&self, s: f64) -> Field {
        Field { grid: self.grid, coeffs: self.coeffs.iter().map(|c| c * s).collect(), real: self.real }
    }

    pub fn try_add(&self, other: &Field) -> Result<Field> {
        self.zip(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Field) -> Result<Field> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect();
        Ok(Field { grid: self.grid, coeffs, real: self.real && other.real })
    }

    /// Largest coefficientwise distance to `other` (panics on grid mismatch).
    pub fn max_diff(&self, other: &Field) -> f64 {
        assert_eq!(self.grid, other.grid);
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Same coefficients on another grid with identical point counts.
    pub fn regrid(&self, grid: &Grid) -> Field {
        assert_eq!((grid.n_h, grid.n_v), (self.grid.n_h, self.grid.n_v));
        Field { grid: *grid, coeffs: self.coeffs.clone(), real: self.real }
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.try_add(rhs).expect("grid mismatch")
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.try_sub(rhs).expect("grid mismatch")
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.scale(rhs)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scale(-1.0)
    }
}

/// Three-component field `(u1, u2, u3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VecField {
    pub comps: [Field; 3],
}

impl VecField {
    pub fn new(u1: Field, u2: Field, u3: Field) -> Result<Self> {
        if u1.grid != u2.grid || u1.grid != u3.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self { comps: [u1, u2, u3] })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self { comps: [Field::zeros(grid), Field::zeros(grid), Field::zeros(grid)] }
    }

    pub fn grid(&self) -> &Grid {
        self.comps[0].grid()
    }

    pub fn horizontal(&self) -> [&Field; 2] {
        [&self.comps[0], &self.comps[1]]
    }

    pub fn is_real(&self) -> bool {
        self.comps.iter().all(Field::is_real)
    }

    pub fn energy(&self) -> f64 {
        self.comps.iter().map(Field::energy).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.energy()) * self.grid().l2_factor()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(Field::max_abs).fold(0.0, f64::max)
    }

    /// Spectral divergence `i xi . u_hat` (odd frequencies).
    pub fn divergence(&self) -> Field {
        let g = *self.grid();
        let mut out = vec![ZERO; g.len()];
        for (idx, o) in out.iter_mut().enumerate() {
            let (i1, i2, i3) = g.unindex(idx);
            let xi = [g.xi_h_odd(i1), g.xi_h_odd(i2), g.xi_v_odd(i3)];
            let s: Complex64 = (0..3).map(|a| self.comps[a].coeffs[idx] * xi[a]).sum();
            *o = Complex64::new(-s.im, s.re);
        }
        Field::from_coeffs_unchecked(&g, out, self.is_real())
    }

    /// `max |xi . u_hat(xi)| / max |u_hat|`, zero for the zero field.
    pub fn divergence_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        self.divergence().max_abs() / scale
    }

    pub fn is_divergence_free(&self, tol: f64) -> bool {
        self.divergence_defect() <= tol
    }

    pub fn try_add(&self, other: &VecField) -> Result<VecField> {
        Ok(VecField {
            comps: [
                self.comps[0].try_add(&other.comps[0])?,
                self.comps[1].try_add(&other.comps[1])?,
                self.comps[2].try_add(&other.comps[2])?,
            ],
        })
    }

    pub fn try_sub(&self, other: &VecField) -> Result<VecField> {
        Ok(VecField {
            comps: [
                self.comps[0].try_sub(&other.comps[0])?,
                self.comps[1].try_sub(&other.comps[1])?,
                self.comps[2].try_sub(&other.comps[2])?,
            ],
        })
    }

    pub fn scale(&self, s: f64) -> VecField {
        VecField { comps: [self.comps[0].scale(s), self.comps[1].scale(s), self.comps[2].scale(s)] }
    }

    pub fn max_diff(&self, other: &VecField) -> f64 {
        (0..3).map(|a| self.comps[a].max_diff(&other.comps[a])).fold(0.0, f64::max)
    }

    pub fn regrid(&self, grid: &Grid) -> VecField {
        VecField { comps: [self.comps[0].regrid(grid), self.comps[1].regrid(grid), self.comps[2].regrid(grid)] }
    }
}

/// Parameters of a random band-limited ensemble member.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Band {
    /// Largest |wavenumber| drawn on each horizontal axis.
    pub h: i64,
    /// Largest |wavenumber| drawn on the vertical axis.
    pub v: i64,
    /// Amplitudes scale like `(1 + |k|^2)^(-decay/2)` in integer wavenumbers.
    pub decay: f64,
}

impl Band {
    pub fn new(h: i64, v: i64) -> Self {
        Self { h, v, decay: 0.0 }
    }

    /// A quarter of each axis length, the default ensemble band.
    pub fn quarter(grid: &Grid) -> Self {
        Self::new(grid.n_h as i64 / 4, grid.n_v as i64 / 4)
    }

    pub fn with_decay(mut self, decay: f64) -> Self {
        self.decay = decay;
        self
    }
}

/// Real random field with independent Gaussian coefficients inside `band`
/// (Nyquist planes excluded), Hermitian-symmetric by construction.
pub fn random_field(grid: &Grid, band: Band, rng: &mut ChaCha8Rng) -> Field {
    let g = *grid;
    let neg = negation_map(&g);
    let mut coeffs = vec![ZERO; g.len()];
    let kh = band.h.min(g.n_h as i64 / 2 - 1);
    let kv = band.v.min(g.n_v as i64 / 2 - 1);
    for idx in 0..g.len() {
        let partner = neg[idx];
        if partner < idx {
            continue;
        }
        let (i1, i2, i3) = g.unindex(idx);
        let k = [Grid::wavenumber(i1, g.n_h), Grid::wavenumber(i2, g.n_h), Grid::wavenumber(i3, g.n_v)];
        if k[0].abs() > kh || k[1].abs() > kh || k[2].abs() > kv {
            continue;
        }
        let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        let amp = libm::pow(1.0 + k2, -0.5 * band.decay);
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        if partner == idx {
            coeffs[idx] = Complex64::new(re * amp, 0.0);
        } else {
            let c = Complex64::new(re, im) * (amp * core::f64::consts::FRAC_1_SQRT_2);
            coeffs[idx] = c;
            coeffs[partner] = c.conj();
        }
    }
    Field::from_coeffs_unchecked(&g, coeffs, true)
}

/// Deterministic generator for ensembles, keyed by a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real vector field with each component drawn from `band`.
pub fn random_vec_field(grid: &Grid, band: Band, rng: &mut ChaCha8Rng) -> VecField {
    VecField { comps: [random_field(grid, band, rng), random_field(grid, band, rng), random_field(grid, band, rng)] }
}

/// Random real field whose coefficient at each wavenumber does not depend on
/// the grid: modes are drawn in order of `max(|k₁|, |k₂|, |k₃|)`, then
/// lexicographically, and modes outside `band` or the grid still consume
/// their draws. A finer grid therefore refines the same sample.
pub fn nested_random_field(grid: &Grid, band: Band, seed: u64) -> Field {
    let g = *grid;
    let mut rng = rng_from_seed(seed);
    let mut coeffs = vec![ZERO; g.len()];
    let kh = band.h.min(g.n_h as i64 / 2 - 1);
    let kv = band.v.min(g.n_v as i64 / 2 - 1);
    let m_max = band.h.max(band.v).max(0);
    for m in 0..=m_max {
        for k1 in -m..=m {
            for k2 in -m..=m {
                for k3 in -m..=m {
                    let k = [k1, k2, k3];
                    if k.iter().map(|x| x.abs()).max() != Some(m) || k < [-k1, -k2, -k3] {
                        continue;
                    }
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    if k1.abs() > kh || k2.abs() > kh || k3.abs() > kv {
                        continue;
                    }
                    let pos = |k: [i64; 3]| {
                        g.index(
                            Grid::position(k[0], g.n_h).expect("inside band"),
                            Grid::position(k[1], g.n_h).expect("inside band"),
                            Grid::position(k[2], g.n_v).expect("inside band"),
                        )
                    };
                    let amp = libm::pow(1.0 + (k1 * k1 + k2 * k2 + k3 * k3) as f64, -0.5 * band.decay);
                    if m == 0 {
                        coeffs[0] = Complex64::new(re * amp, 0.0);
                    } else {
                        let c = Complex64::new(re, im) * (amp * core::f64::consts::FRAC_1_SQRT_2);
                        coeffs[pos(k)] = c;
                        coeffs[pos([-k1, -k2, -k3])] = c.conj();
                    }
                }
            }
        }
    }
    Field::from_coeffs_unchecked(&g, coeffs, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_unit_norm() {
        let g = Grid::new(8, 8).unwrap();
        assert!((Field::constant(&g, 1.0).l2_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cosine_norm_and_reality() {
        let g = Grid::new(16, 8).unwrap();
        let f = Field::from_fn(&g, |x, _, _| libm::cos(x));
        assert!(f.is_real());
        assert!((f.l2_norm() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((f.coeff([1, 0, 0]).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn random_fields_are_hermitian_and_band_limited() {
        let g = Grid::new(16, 8).unwrap();
        let mut rng = rng_from_seed(7);
        let f = random_field(&g, Band::new(3, 2), &mut rng);
        assert!(f.hermitian_defect() < 1e-15);
        assert_eq!(f.coeff([4, 0, 0]), ZERO);
        assert_eq!(f.coeff([0, 0, 3]), ZERO);
        assert!(f.coeff([3, -3, 2]).norm() > 0.0);
        let phys = f.to_physical();
        assert!(phys.iter().all(|c| c.im.abs() < 1e-12));
    }

    #[test]
    fn parseval_in_physical_space() {
        let g = Grid::new(16, 16).unwrap();
        let mut rng = rng_from_seed(11);
        for _ in 0..5 {
            let f = random_field(&g, Band::quarter(&g), &mut rng);
            let phys = f.to_physical();
            let mean_sq: f64 = phys.iter().map(|c| c.norm_sqr()).sum::<f64>() / g.len() as f64;
            assert!((libm::sqrt(mean_sq) - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
        }
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = Field::zeros(&Grid::new(8, 8).unwrap());
        let b = Field::zeros(&Grid::new(16, 8).unwrap());
        assert_eq!(a.try_add(&b), Err(Error::GridMismatch));
    }

    #[test]
    fn nested_fields_refine() {
        let band = Band::new(4, 4).with_decay(1.0);
        let a = nested_random_field(&Grid::cube(16).unwrap(), band, 3);
        let b = nested_random_field(&Grid::cube(32).unwrap(), band, 3);
        for k in (-7i64..=7).flat_map(|x| (-7i64..=7).flat_map(move |y| (-7i64..=7).map(move |z| [x, y, z]))) {
            assert_eq!(a.coeff(k), b.coeff(k));
        }
        assert!(a.hermitian_defect() == 0.0 && a.max_abs() > 0.0);
        // a wider band keeps the shared modes
        let c = nested_random_field(&Grid::cube(32).unwrap(), Band::new(8, 8).with_decay(1.0), 3);
        assert_eq!(c.coeff([1, -2, 3]), b.coeff([1, -2, 3]));
        assert_eq!(b.coeff([5, 0, 0]), ZERO);
    }
}
