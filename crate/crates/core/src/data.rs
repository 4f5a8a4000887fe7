//! Initial data: Biot-Savart splitting, the oscillatory and slowly varying
//! data families, the vertical frequency cut and the smallness functionals.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{random_field, rng_from_seed, Band, Field, VecField};
use crate::grid::Grid;
use crate::lp::DyadicLadder;
use crate::norms::{b0half_shells, b4_neg_blocks, norm_b0half};
use crate::spectral::{derivative, div_h, horizontal_multiplier, leray_project, Axis, HorizontalSymbol};

/// `(u_curl, u_div)` with `u_div = ∇_hΔ_h⁻¹ div_h u^h` and `u_curl = u^h − u_div`.
/// Modes with `ξ_h = 0` land in `u_curl`.
pub fn biot_savart_split(u1: &Field, u2: &Field) -> ([Field; 2], [Field; 2]) {
    let d = div_h(u1, u2);
    let mut out = horizontal_multiplier(&d, HorizontalSymbol::GradInvLaplacianH).fields.into_iter();
    let div = [out.next().expect("two components"), out.next().expect("two components")];
    let curl = [u1 - &div[0], u2 - &div[1]];
    (curl, div)
}

/// One term `amp · Π_i cos(freq_i x_i − phase_i)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeTerm {
    pub amp: f64,
    /// Physical frequencies; each must be an integer multiple of `2π/L`.
    pub freq: [f64; 3],
    #[cfg_attr(feature = "serde", serde(default))]
    pub phase: [f64; 3],
}

/// Scalar generator profile.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Profile {
    /// Finite trigonometric sum.
    Modes(Vec<ModeTerm>),
    /// Band-limited Gaussian field scaled to the given L² norm.
    Random { band_h: i64, band_v: i64, seed: u64, l2: f64 },
}

impl Profile {
    pub fn zero() -> Self {
        Profile::Modes(Vec::new())
    }

    /// Samples the profile on `grid`.
    pub fn build(&self, grid: &Grid) -> Result<Field> {
        match self {
            Profile::Modes(terms) => {
                for t in terms {
                    check_freq(grid, t.freq)?;
                }
                if terms.is_empty() {
                    return Ok(Field::zeros(grid));
                }
                Ok(Field::from_fn(grid, |x, y, z| {
                    terms
                        .iter()
                        .map(|t| {
                            t.amp
                                * libm::cos(t.freq[0] * x - t.phase[0])
                                * libm::cos(t.freq[1] * y - t.phase[1])
                                * libm::cos(t.freq[2] * z - t.phase[2])
                        })
                        .sum()
                }))
            }
            Profile::Random { band_h, band_v, seed, l2 } => {
                let f = random_field(grid, Band::new(*band_h, *band_v), &mut rng_from_seed(*seed));
                let n = f.l2_norm();
                Ok(if n > 0.0 { f.scale(l2 / n) } else { f })
            }
        }
    }
}

fn check_freq(grid: &Grid, freq: [f64; 3]) -> Result<()> {
    let units = [grid.kh_unit(), grid.kh_unit(), grid.kv_unit()];
    let ns = [grid.n_h, grid.n_h, grid.n_v];
    for i in 0..3 {
        let k = freq[i] / units[i];
        let kr = libm::round(k);
        if (k - kr).abs() > 1e-9 || kr.abs() >= (ns[i] / 2) as f64 {
            return Err(Error::InadmissibleData(alloc::format!(
                "frequency {} on axis {} is not a grid frequency (unit {}, {} points)",
                freq[i],
                i + 1,
                units[i],
                ns[i]
            )));
        }
    }
    Ok(())
}

/// Named data families.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum DataFamily {
    /// `sin(x₁/ε)(0, −∂₃φ, ∂₂φ)`.
    Oscillatory { eps: f64, phi: Profile },
    /// `(v₀^h + ε(−ln ε)^δ w₀^h, (−ln ε)^δ w₀³)(x_h, εx₃)` with
    /// `v₀^h = ∇_h^⊥ψ` and `w₀` the Leray projection of `(w1, w2, w3)`.
    SlowVarying { eps: f64, delta: f64, psi: Profile, w: [Profile; 3] },
    /// `(v^h, 0)(x_h, εx₃) + (−ln ε)^δ sin(x₁/ε)(0, −ε^{1/2}∂₃φ, ε^{−1/2}∂₂φ)(x_h, εx₃)`
    /// with `v^h = ∇_h^⊥ψ`.
    Combined { eps: f64, delta: f64, psi: Profile, phi: Profile },
}

impl DataFamily {
    pub fn eps(&self) -> f64 {
        match self {
            DataFamily::Oscillatory { eps, .. }
            | DataFamily::SlowVarying { eps, .. }
            | DataFamily::Combined { eps, .. } => *eps,
        }
    }

    /// Same family with a different `ε`.
    pub fn with_eps(&self, e: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            DataFamily::Oscillatory { eps, .. }
            | DataFamily::SlowVarying { eps, .. }
            | DataFamily::Combined { eps, .. } => *eps = e,
        }
        out
    }

    pub fn with_delta(&self, d: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            DataFamily::SlowVarying { delta, .. } | DataFamily::Combined { delta, .. } => *delta = d,
            DataFamily::Oscillatory { .. } => {}
        }
        out
    }

    /// Whether profiles are stretched vertically (`x₃ ↦ εx₃`).
    pub fn stretched(&self) -> bool {
        !matches!(self, DataFamily::Oscillatory { .. })
    }

    /// Grid the data lives on: `base` itself, or `base` with its vertical
    /// period divided by `ε` for the stretched families.
    pub fn target_grid(&self, base: &Grid) -> Result<Grid> {
        let eps = self.eps();
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InadmissibleData(alloc::format!("eps = {eps} must lie in (0, 1)")));
        }
        if self.stretched() {
            let mut g = *base;
            g.l_v = base.l_v / eps;
            g.validate()?;
            Ok(g)
        } else {
            Ok(*base)
        }
    }

    /// Generates the divergence-free initial velocity. Profiles are given in
    /// unstretched coordinates on `base`.
    pub fn generate(&self, base: &Grid) -> Result<VecField> {
        let target = self.target_grid(base)?;
        let u = match self {
            DataFamily::Oscillatory { eps, phi } => {
                let phi = phi.build(base)?;
                let a2 = derivative(&phi, Axis::X3).scale(-1.0);
                let a3 = derivative(&phi, Axis::X2);
                VecField::new(Field::zeros(base), times_sin_x1(&a2, 1.0 / eps)?, times_sin_x1(&a3, 1.0 / eps)?)?
            }
            DataFamily::SlowVarying { eps, delta, psi, w } => {
                let lf = log_factor(*eps, *delta)?;
                let (v1, v2) = perp_grad(&psi.build(base)?);
                let w0 = leray_project(&VecField::new(w[0].build(base)?, w[1].build(base)?, w[2].build(base)?)?);
                let [w1, w2, w3] = &w0.comps;
                let s = eps * lf;
                VecField::new(&v1 + &w1.scale(s), &v2 + &w2.scale(s), w3.scale(lf))?.regrid(&target)
            }
            DataFamily::Combined { eps, delta, psi, phi } => {
                let lf = log_factor(*eps, *delta)?;
                let (v1, v2) = perp_grad(&psi.build(base)?);
                let phi = phi.build(base)?;
                let se = libm::sqrt(*eps);
                let a2 = derivative(&phi, Axis::X3).scale(-se * lf);
                let a3 = derivative(&phi, Axis::X2).scale(lf / se);
                let osc2 = times_sin_x1(&a2, 1.0 / eps)?;
                let osc3 = times_sin_x1(&a3, 1.0 / eps)?;
                VecField::new(v1, &v2 + &osc2, osc3)?.regrid(&target)
            }
        };
        check_band(&u)?;
        if !u.is_divergence_free(1e-12) {
            return Err(Error::InadmissibleData(alloc::format!(
                "generated field has divergence defect {:e}",
                u.divergence_defect()
            )));
        }
        Ok(u)
    }
}

/// `(−ln ε)^δ` with `δ ∈ (0, 1/4)`.
fn log_factor(eps: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::InadmissibleData(alloc::format!("delta = {delta} must lie in (0, 1/4)")));
    }
    Ok(libm::pow(-libm::log(eps), delta))
}

fn perp_grad(psi: &Field) -> (Field, Field) {
    (derivative(psi, Axis::X2).scale(-1.0), derivative(psi, Axis::X1))
}

/// `sin(k x₁) a` for a grid frequency `k`.
fn times_sin_x1(a: &Field, k: f64) -> Result<Field> {
    let g = *a.grid();
    check_freq(&g, [k, 0.0, 0.0])?;
    let s = Field::from_fn(&g, |x, _, _| libm::sin(k * x));
    let mut phys = a.to_physical_real();
    for (p, sv) in phys.iter_mut().zip(s.to_physical_real()) {
        *p *= sv;
    }
    Ok(Field::from_physical(&g, &phys))
}

/// Rejects data with mass outside the dealiasing box.
fn check_band(u: &VecField) -> Result<()> {
    let scale = u.max_abs();
    for (i, f) in u.comps.iter().enumerate() {
        let outside = f.coeffs().iter().enumerate().filter(|(idx, _)| {
            let (i1, i2, i3) = f.grid().unindex(*idx);
            !f.grid().keeps(i1, i2, i3)
        });
        for (_, c) in outside {
            if c.norm() > 1e-12 * scale {
                return Err(Error::InadmissibleData(alloc::format!(
                    "component {} has modes beyond the dealiasing cutoff; refine the grid or raise eps",
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

/// Keeps exactly the modes with `|ξ₃| ≤ 1/N` or `|ξ₃| ≥ N`.
pub fn freq_cut_n(a: &Field, n: u32) -> Result<Field> {
    if n < 2 {
        return Err(Error::InvalidConfig(alloc::format!("N = {n} must be at least 2")));
    }
    let g = *a.grid();
    let nf = n as f64;
    Ok(a.map_real(|_, _, i3| {
        let x = libm::fabs(g.xi_v(i3));
        if x <= 1.0 / nf || x >= nf {
            1.0
        } else {
            0.0
        }
    }))
}

/// A value that may have overflowed to `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Guarded {
    pub value: f64,
    pub overflow: bool,
}

impl Guarded {
    fn finite(value: f64) -> Self {
        Self { value, overflow: false }
    }

    fn infinite() -> Self {
        Self { value: f64::INFINITY, overflow: true }
    }
}

/// Largest argument for which `exp` is finite.
const LN_MAX: f64 = 709.782712893384;

/// `coeff · exp(x)`, with `0 · exp(∞) = 0`.
fn times_exp(coeff: f64, x: f64) -> Guarded {
    if coeff == 0.0 {
        return Guarded::finite(0.0);
    }
    let l = libm::log(coeff) + x;
    if !(l < LN_MAX) {
        Guarded::infinite()
    } else {
        Guarded::finite(coeff * libm::exp(x))
    }
}

/// `𝔄_N = N^{1/2} x e^{C x²} + y exp(N² e^{C x²})` for `x = ‖u₀^h‖`, `y = ‖(u₀^h)_N‖`.
pub fn functional_a_n(u0h_norm: f64, cut_norm: f64, n: u32, c: f64) -> Result<Guarded> {
    if !(u0h_norm >= 0.0 && cut_norm >= 0.0 && c >= 0.0) || n < 2 {
        return Err(Error::InvalidConfig("functional inputs must be nonnegative with N >= 2".into()));
    }
    let e = c * u0h_norm * u0h_norm;
    let first = times_exp(libm::sqrt(n as f64) * u0h_norm, e);
    let inner = if e < LN_MAX { (n as f64) * (n as f64) * libm::exp(e) } else { f64::INFINITY };
    let second = times_exp(cut_norm, inner);
    let value = first.value + second.value;
    Ok(Guarded { value, overflow: first.overflow || second.overflow || value.is_infinite() })
}

/// Constants of the smallness conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SmallnessConstants {
    pub l: f64,
    pub m: f64,
    pub n: u32,
    pub c: f64,
    pub eps0: f64,
}

impl Default for SmallnessConstants {
    fn default() -> Self {
        Self { l: 1.0, m: 1.0, n: 4, c: 1.0, eps0: 0.1 }
    }
}

/// Every ingredient and left-hand side of the smallness conditions.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SmallnessReport {
    /// `‖Λ_h⁻¹∂₃u₀‖_{B^{0,1/2}}`.
    pub inv_lambda_d3_u0: f64,
    /// Share of `∂₃u₀` on `ξ_h = 0` modes, discarded by `Λ_h⁻¹`.
    pub discarded_fraction: f64,
    /// `‖u₀³‖_{B₄^{-1/2,1/2}}`.
    pub u3_b4: f64,
    /// `‖u₀³‖_{B^{0,1/2}}`.
    pub u3_b0half: f64,
    pub uh_l2: f64,
    pub d3_uh_l2: f64,
    /// `‖u₀^h‖_{B^{0,1/2}}` and `‖(u₀^h)_N‖_{B^{0,1/2}}`.
    pub uh_b0half: f64,
    pub uh_cut_b0half: f64,
    pub a_n: Guarded,
    /// Condition with `𝔄_N` and the `B₄` norm of `u₀³`.
    pub lhs_a_n: Guarded,
    /// Condition with `‖u₀^h‖_{L²}‖∂₃u₀^h‖_{L²}` and the `B₄` norm of `u₀³`.
    pub lhs_energy: Guarded,
    /// `lhs_a_n` with `‖u₀³‖_{B^{0,1/2}}` in place of the `B₄` norm.
    pub lhs_a_n_b0half: Guarded,
    /// `lhs_energy` with `‖u₀³‖_{B^{0,1/2}}` in place of the `B₄` norm.
    pub lhs_energy_b0half: Guarded,
    pub constants: SmallnessConstants,
    /// `lhs ≤ ε₀` for each of the four conditions, in the order above.
    pub verdicts: [bool; 4],
}

impl SmallnessReport {
    pub fn warning(&self) -> bool {
        self.discarded_fraction > crate::spectral::DISCARD_WARN
    }
}

/// `lead · exp(L(1 + b⁴) · exp(inner_exp))` where `inner_exp` may be `+∞`.
fn condition(lead: f64, l: f64, b: f64, inner_exp: f64) -> Guarded {
    if lead == 0.0 {
        return Guarded::finite(0.0);
    }
    let pref = l * (1.0 + b * b * b * b);
    let outer = if pref == 0.0 {
        0.0
    } else if inner_exp < LN_MAX {
        pref * libm::exp(inner_exp)
    } else {
        f64::INFINITY
    };
    times_exp(lead, outer)
}

/// Evaluates the smallness conditions for `u0`.
pub fn smallness_report(ladder: &DyadicLadder, u0: &VecField, k: SmallnessConstants) -> Result<SmallnessReport> {
    if *u0.grid() != *ladder.grid() {
        return Err(Error::GridMismatch);
    }
    let mut lam = Vec::with_capacity(3);
    let mut discarded = 0.0f64;
    let mut total = 0.0f64;
    for f in &u0.comps {
        let out = horizontal_multiplier(&derivative(f, Axis::X3), HorizontalSymbol::InvLambdaH);
        let e = derivative(f, Axis::X3).energy();
        discarded += out.discarded_fraction * out.discarded_fraction * e;
        total += e;
        lam.push(out.field());
    }
    let discarded_fraction = if total > 0.0 { libm::sqrt(discarded / total) } else { 0.0 };
    let lam_refs: Vec<&Field> = lam.iter().collect();
    let inv_lambda_d3_u0 = b0half_shells(ladder, &lam_refs).besov_sum();

    let [u1, u2, u3] = &u0.comps;
    let u3_b4 = b4_neg_blocks(ladder, &[u3]).norm();
    let u3_b0half = norm_b0half(ladder, u3);
    let l2 = |f: &Field| f.energy();
    let uh_l2 = libm::sqrt(l2(u1) + l2(u2)) * u0.grid().l2_factor();
    let d3 = [derivative(u1, Axis::X3), derivative(u2, Axis::X3)];
    let d3_uh_l2 = libm::sqrt(l2(&d3[0]) + l2(&d3[1])) * u0.grid().l2_factor();
    let uh_b0half = b0half_shells(ladder, &[u1, u2]).besov_sum();
    let cut = [freq_cut_n(u1, k.n)?, freq_cut_n(u2, k.n)?];
    let uh_cut_b0half = b0half_shells(ladder, &[&cut[0], &cut[1]]).besov_sum();
    let a_n = functional_a_n(uh_b0half, uh_cut_b0half, k.n, k.c)?;

    let a4_exp = if a_n.value.is_finite() { k.m * libm::pow(a_n.value, 4.0) } else { f64::INFINITY };
    let a4_exp = if k.m == 0.0 { 0.0 } else { a4_exp };
    let p = k.m * uh_l2 * d3_uh_l2;
    let ee = if p < LN_MAX { libm::exp(p) } else { f64::INFINITY };

    let lhs_a_n = condition(inv_lambda_d3_u0, k.l, u3_b4, a4_exp);
    let lhs_energy = condition(inv_lambda_d3_u0, k.l, u3_b4, ee);
    let lhs_a_n_b0half = condition(inv_lambda_d3_u0, k.l, u3_b0half, a4_exp);
    let lhs_energy_b0half = condition(inv_lambda_d3_u0, k.l, u3_b0half, ee);
    let verdicts = [lhs_a_n, lhs_energy, lhs_a_n_b0half, lhs_energy_b0half].map(|g| g.value <= k.eps0);
    Ok(SmallnessReport {
        inv_lambda_d3_u0,
        discarded_fraction,
        u3_b4,
        u3_b0half,
        uh_l2,
        d3_uh_l2,
        uh_b0half,
        uh_cut_b0half,
        a_n,
        lhs_a_n,
        lhs_energy,
        lhs_a_n_b0half,
        lhs_energy_b0half,
        constants: k,
        verdicts,
    })
}

/// Oscillatory family with `φ = cos(a x₂) cos(b x₃)`.
pub fn oscillatory_cos(eps: f64, a: f64, b: f64) -> DataFamily {
    DataFamily::Oscillatory {
        eps,
        phi: Profile::Modes(alloc::vec![ModeTerm { amp: 1.0, freq: [0.0, a, b], phase: [0.0; 3] }]),
    }
}

/// Horizontal period that makes `sin(x₁/ε)` fit the dealiasing band of an
/// `n_h`-point axis while leaving `spare` grid wavenumbers for the profile:
/// `2π` if possible, otherwise `2π/2^j` for the smallest such `j`.
pub fn oscillatory_period(n_h: usize, eps: f64, spare: i64) -> f64 {
    let g = Grid::new(n_h, 8).expect("valid horizontal size");
    let kmax = g.dealias_cutoff(n_h) - spare;
    let mut l = 2.0 * PI;
    while (1.0 / eps) * l / (2.0 * PI) > kmax as f64 && l > 1e-6 {
        l *= 0.5;
    }
    l
}
