//! Derivatives, Leray projection, the horizontal heat semigroup and
//! horizontal Fourier multipliers.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field, VecField};
use crate::grid::Grid;
use crate::transform::Transformer;

/// Discarded-mass fraction above which a multiplier result is flagged.
pub const DISCARD_WARN: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            1 => Some(Axis::X1),
            2 => Some(Axis::X2),
            3 => Some(Axis::X3),
            _ => None,
        }
    }
}

/// Odd-multiplier frequency along `axis` at storage position (i1, i2, i3).
#[inline]
pub(crate) fn odd_xi(g: &Grid, axis: Axis, i1: usize, i2: usize, i3: usize) -> f64 {
    match axis {
        Axis::X1 => g.xi_h_odd(i1),
        Axis::X2 => g.xi_h_odd(i2),
        Axis::X3 => g.xi_v_odd(i3),
    }
}

#[inline]
fn times_i(c: Complex64, s: f64) -> Complex64 {
    Complex64::new(-c.im * s, c.re * s)
}

/// `∂_axis a`: multiplies the coefficient at ξ by `i ξ_axis`.
pub fn derivative(a: &Field, axis: Axis) -> Field {
    let g = *a.grid();
    a.map_modes(|i1, i2, i3| Complex64::new(0.0, odd_xi(&g, axis, i1, i2, i3)), true)
}

/// Horizontal gradient `(∂₁a, ∂₂a)`.
pub fn grad_h(a: &Field) -> [Field; 2] {
    [derivative(a, Axis::X1), derivative(a, Axis::X2)]
}

/// `∂₁u¹ + ∂₂u²`.
pub fn div_h(u1: &Field, u2: &Field) -> Field {
    &derivative(u1, Axis::X1) + &derivative(u2, Axis::X2)
}

/// `∂₁u² − ∂₂u¹`.
pub fn curl_h(u1: &Field, u2: &Field) -> Field {
    &derivative(u2, Axis::X1) - &derivative(u1, Axis::X2)
}

/// Leray projection `u − ∇Δ⁻¹ div u`. Modes whose wavevector vanishes are
/// left unchanged.
pub fn leray_project(u: &VecField) -> VecField {
    let mut out = u.clone();
    leray_in_place(&mut out);
    out
}

pub(crate) fn leray_in_place(u: &mut VecField) {
    let g = *u.grid();
    let [c1, c2, c3] = &mut u.comps;
    let (c1, c2, c3) = (c1.coeffs_mut(), c2.coeffs_mut(), c3.coeffs_mut());
    for idx in 0..g.len() {
        let (i1, i2, i3) = g.unindex(idx);
        let xi = [g.xi_h_odd(i1), g.xi_h_odd(i2), g.xi_v_odd(i3)];
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if k2 == 0.0 {
            continue;
        }
        let dot = (c1[idx] * xi[0] + c2[idx] * xi[1] + c3[idx] * xi[2]) / k2;
        c1[idx] -= dot * xi[0];
        c2[idx] -= dot * xi[1];
        c3[idx] -= dot * xi[2];
    }
}

/// `e^{tΔ_h} a`.
pub fn horizontal_heat(a: &Field, t: f64) -> Result<Field> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    let g = *a.grid();
    let f1: Vec<f64> = (0..g.n_h).map(|i| libm::exp(-t * g.xi_h(i) * g.xi_h(i))).collect();
    Ok(a.map_real(|i1, i2, _| f1[i1] * f1[i2]))
}

/// Horizontal multipliers singular on `ξ_h = 0`.
#[derive(Clone, Copy)]
pub enum HorizontalSymbol<'a> {
    /// `Λ_h⁻¹`, symbol `|ξ_h|⁻¹`.
    InvLambdaH,
    /// `∇_hΔ_h⁻¹`, two output components.
    GradInvLaplacianH,
    /// `∇_h^⊥Δ_h⁻¹ = (−∂₂, ∂₁)Δ_h⁻¹`, two output components.
    PerpGradInvLaplacianH,
    /// `∂₃Λ_h⁻¹`.
    D3InvLambdaH,
    /// Caller-supplied even real symbol of `(ξ₁, ξ₂)`, bounded on `ξ_h ≠ 0`.
    Bounded(&'a dyn Fn(f64, f64) -> f64),
}

/// Result of a horizontal multiplier: the output components plus the share of
/// the input mass that sat on discarded `ξ_h = 0` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierOutput {
    pub fields: Vec<Field>,
    /// `‖a restricted to discarded modes‖ / ‖a‖` (0 for the zero field).
    pub discarded_fraction: f64,
}

impl MultiplierOutput {
    pub fn warning(&self) -> bool {
        self.discarded_fraction > DISCARD_WARN
    }

    /// First (or only) component.
    pub fn field(self) -> Field {
        self.fields.into_iter().next().expect("multiplier output has a component")
    }
}

/// Applies `symbol` on `ξ_h ≠ 0` modes and sets `ξ_h = 0` modes to zero.
/// Odd symbols treat the horizontal Nyquist entries as `ξ_h = 0`.
pub fn horizontal_multiplier(a: &Field, symbol: HorizontalSymbol<'_>) -> MultiplierOutput {
    let g = *a.grid();
    let odd = matches!(symbol, HorizontalSymbol::GradInvLaplacianH | HorizontalSymbol::PerpGradInvLaplacianH);
    let ncomp = if odd { 2 } else { 1 };
    let mut outs = vec![vec![Complex64::new(0.0, 0.0); g.len()]; ncomp];
    let mut discarded = 0.0;
    let mut total = 0.0;
    for (idx, &c) in a.coeffs().iter().enumerate() {
        let (i1, i2, i3) = g.unindex(idx);
        total += c.norm_sqr();
        let (x1, x2) = if odd { (g.xi_h_odd(i1), g.xi_h_odd(i2)) } else { (g.xi_h(i1), g.xi_h(i2)) };
        let kh2 = x1 * x1 + x2 * x2;
        if kh2 == 0.0 {
            discarded += c.norm_sqr();
            continue;
        }
        match symbol {
            HorizontalSymbol::InvLambdaH => outs[0][idx] = c / libm::sqrt(kh2),
            HorizontalSymbol::D3InvLambdaH => outs[0][idx] = times_i(c, g.xi_v_odd(i3) / libm::sqrt(kh2)),
            HorizontalSymbol::GradInvLaplacianH => {
                // i ξ / (−|ξ_h|²)
                outs[0][idx] = times_i(c, -x1 / kh2);
                outs[1][idx] = times_i(c, -x2 / kh2);
            }
            HorizontalSymbol::PerpGradInvLaplacianH => {
                // (−iξ₂, iξ₁) / (−|ξ_h|²)
                outs[0][idx] = times_i(c, x2 / kh2);
                outs[1][idx] = times_i(c, -x1 / kh2);
            }
            HorizontalSymbol::Bounded(f) => outs[0][idx] = c * f(x1, x2),
        }
    }
    let discarded_fraction = if total > 0.0 { libm::sqrt(discarded / total) } else { 0.0 };
    let real = a.is_real();
    MultiplierOutput {
        fields: outs.into_iter().map(|c| Field::from_coeffs_unchecked(&g, c, real)).collect(),
        discarded_fraction,
    }
}

/// Inverse of the full Laplacian on `ξ ≠ 0`; the zero mode maps to zero.
pub fn inv_laplacian(a: &Field) -> Field {
    let g = *a.grid();
    a.map_real(|i1, i2, i3| {
        let (a, b, c) = (g.xi_h(i1), g.xi_h(i2), g.xi_v(i3));
        let k2 = a * a + b * b + c * c;
        if k2 == 0.0 {
            0.0
        } else {
            -1.0 / k2
        }
    })
}

/// Product `ab` formed in physical space from the dealiased parts of `a` and
/// `b`, truncated back to the dealiasing box.
pub fn dealiased_product(a: &Field, b: &Field) -> Field {
    assert_eq!(a.grid(), b.grid(), "fields live on different grids");
    let g = *a.grid();
    let mut t = Transformer::new(&g);
    let mut pa = a.dealiased().into_coeffs();
    let mut pb = b.dealiased().into_coeffs();
    t.to_physical_dealiased(&mut pa);
    t.to_physical_dealiased(&mut pb);
    for (x, y) in pa.iter_mut().zip(&pb) {
        *x *= y;
    }
    t.to_spectral_dealiased(&mut pa);
    let real = a.is_real() && b.is_real();
    Field::from_coeffs_unchecked(&g, pa, real)
}

/// Gradient `(∂₁a, ∂₂a, ∂₃a)`.
pub fn gradient(a: &Field) -> VecField {
    VecField { comps: [derivative(a, Axis::X1), derivative(a, Axis::X2), derivative(a, Axis::X3)] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{random_field, random_vec_field, rng_from_seed, Band};
    use core::f64::consts::PI;

    fn g16() -> Grid {
        Grid::new(16, 16).unwrap()
    }

    #[test]
    fn derivative_of_constant_and_sine() {
        let g = g16();
        assert_eq!(derivative(&Field::constant(&g, 3.0), Axis::X2).max_abs(), 0.0);
        let s = Field::from_fn(&g, |_, _, z| libm::sin(z));
        let c = Field::from_fn(&g, |_, _, z| libm::cos(z));
        assert!(derivative(&s, Axis::X3).max_diff(&c) < 1e-15);
    }

    /// Direct evaluation of the Fourier series at an arbitrary point.
    fn eval(a: &Field, x: [f64; 3]) -> f64 {
        let g = a.grid();
        a.coeffs()
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let (i1, i2, i3) = g.unindex(idx);
                let ph = g.xi_h(i1) * x[0] + g.xi_h(i2) * x[1] + g.xi_v(i3) * x[2];
                (c * Complex64::new(libm::cos(ph), libm::sin(ph))).re
            })
            .sum()
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let g = Grid::with_periods(8, 8, 2.0 * PI, 4.0 * PI).unwrap();
        let mut rng = rng_from_seed(3);
        let a = random_field(&g, Band::new(2, 2), &mut rng);
        let h = 1e-3;
        for (axis, e) in [(Axis::X1, 0), (Axis::X2, 1), (Axis::X3, 2)] {
            let d = derivative(&a, axis);
            for p in [[0.3, 1.1, 2.0], [4.0, 0.2, 7.5]] {
                let at = |s: f64| {
                    let mut q = p;
                    q[e] += s * h;
                    eval(&a, q)
                };
                let fd = (8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * h);
                let exact = eval(&d, p);
                assert!((fd - exact).abs() < 1e-8 * a.max_abs().max(1.0), "{fd} vs {exact}");
            }
        }
    }

    #[test]
    fn derivatives_commute() {
        let g = g16();
        let a = random_field(&g, Band::quarter(&g), &mut rng_from_seed(1));
        let x = derivative(&derivative(&a, Axis::X1), Axis::X3);
        let y = derivative(&derivative(&a, Axis::X3), Axis::X1);
        assert_eq!(x, y);
    }

    #[test]
    fn leray_kills_gradients_and_keeps_solenoidal_fields() {
        let g = g16();
        let mut rng = rng_from_seed(5);
        let phi = random_field(&g, Band::quarter(&g), &mut rng);
        let p = leray_project(&gradient(&phi));
        assert!(p.max_abs() < 1e-13 * gradient(&phi).max_abs());

        let u = leray_project(&random_vec_field(&g, Band::quarter(&g), &mut rng));
        assert!(u.is_divergence_free(1e-12));
        assert!(leray_project(&u).max_diff(&u) < 1e-13 * u.max_abs());
    }

    #[test]
    fn leray_single_mode_formula() {
        let g = g16();
        let mut rng = rng_from_seed(9);
        let u = random_vec_field(&g, Band::new(2, 2), &mut rng);
        let p = leray_project(&u);
        let k = [1i64, -2, 1];
        let xi = [k[0] as f64, k[1] as f64, k[2] as f64];
        let uh: Vec<Complex64> = (0..3).map(|a| u.comps[a].coeff(k)).collect();
        let dot = uh[0] * xi[0] + uh[1] * xi[1] + uh[2] * xi[2];
        for a in 0..3 {
            let want = uh[a] - dot * xi[a] / 6.0;
            assert!((p.comps[a].coeff(k) - want).norm() < 1e-15);
        }
        // (sin x1, 0, 0) is a gradient
        let s = Field::from_fn(&g, |x, _, _| libm::sin(x));
        let v = VecField::new(s, Field::zeros(&g), Field::zeros(&g)).unwrap();
        assert!(leray_project(&v).max_abs() < 1e-15);
    }

    #[test]
    fn heat_examples() {
        let g = g16();
        let c1 = Field::from_fn(&g, |x, _, _| libm::cos(x));
        assert_eq!(horizontal_heat(&c1, 0.0).unwrap(), c1);
        let h = horizontal_heat(&c1, 1.0).unwrap();
        assert!(h.max_diff(&c1.scale(libm::exp(-1.0))) < 1e-15);
        let c3 = Field::from_fn(&g, |_, _, z| libm::cos(z));
        assert_eq!(horizontal_heat(&c3, 2.5).unwrap(), c3);
        assert_eq!(horizontal_heat(&c3, -1.0), Err(Error::NegativeTime(-1.0)));
    }

    #[test]
    fn multiplier_examples() {
        let g = g16();
        let c1 = Field::from_fn(&g, |x, _, _| libm::cos(x));
        let out = horizontal_multiplier(&c1, HorizontalSymbol::InvLambdaH);
        assert!(!out.warning());
        assert!(out.field().max_diff(&c1) < 1e-15);

        let a = Field::from_fn(&g, |x, _, z| libm::sin(x) * libm::sin(z));
        let want = Field::from_fn(&g, |x, _, z| libm::sin(x) * libm::cos(z));
        let out = horizontal_multiplier(&a, HorizontalSymbol::D3InvLambdaH);
        assert!(out.field().max_diff(&want) < 1e-15);

        let c3 = Field::from_fn(&g, |_, _, z| libm::cos(z));
        let out = horizontal_multiplier(&c3, HorizontalSymbol::InvLambdaH);
        assert!(out.warning());
        assert!((out.discarded_fraction - 1.0).abs() < 1e-12);
        assert_eq!(out.field().max_abs(), 0.0);
    }

    #[test]
    fn bounded_table_symbol() {
        let g = g16();
        let a = random_field(&g, Band::quarter(&g), &mut rng_from_seed(2));
        let sym = |x: f64, y: f64| 1.0 / (1.0 + x * x + y * y);
        let out = horizontal_multiplier(&a, HorizontalSymbol::Bounded(&sym)).field();
        let k = [1i64, 2, -1];
        assert!((out.coeff(k) - a.coeff(k) / 6.0).norm() < 1e-15);
    }
}
