use anisons_core::data::{biot_savart_split, oscillatory_period, DataFamily, Profile};
use anisons_core::field::{nested_random_field, random_field, random_vec_field, rng_from_seed};
use anisons_core::ledger::{ClAccumulator, TimeExponent};
use anisons_core::lp::{CutoffPair, CutoffProfile, DyadicLadder};
use anisons_core::norms::{b0half_shells, b0half_shells_grad_h, norm_b0half, norm_b4_0half, norm_b4_neg, norm_h};
use anisons_core::spectral::{
    dealiased_product, derivative, horizontal_heat, horizontal_multiplier, leray_project, Axis, HorizontalSymbol,
};
use anisons_core::verify::{dyadic_rescale, mixed_norm};
use anisons_core::{Band, Field, Grid, VecField};
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::new(16, 8).unwrap()
}

fn field(seed: u64) -> Field {
    random_field(&grid(), Band::new(6, 3), &mut rng_from_seed(seed))
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parseval(seed in any::<u64>()) {
        let a = field(seed);
        prop_assert!(rel(mixed_norm(&a, 2.0, 2.0), a.l2_norm()) < 1e-12);
        prop_assert_eq!(a.hermitian_defect(), 0.0);
    }

    #[test]
    fn leray_is_idempotent_and_solenoidal(seed in any::<u64>()) {
        let u = random_vec_field(&grid(), Band::new(6, 3), &mut rng_from_seed(seed));
        let p = leray_project(&u);
        prop_assert!(leray_project(&p).max_diff(&p) <= 1e-12 * u.max_abs());
        prop_assert!(p.is_divergence_free(1e-12));
    }

    #[test]
    fn heat_is_a_semigroup(seed in any::<u64>(), t in 0.0f64..1.0, s in 0.0f64..1.0) {
        let a = field(seed);
        let two = horizontal_heat(&horizontal_heat(&a, t).unwrap(), s).unwrap();
        let one = horizontal_heat(&a, t + s).unwrap();
        prop_assert!(two.try_sub(&one).unwrap().l2_norm() <= 1e-12 * a.l2_norm());
    }

    #[test]
    fn derivatives_commute(seed in any::<u64>(), i in 1usize..4, j in 1usize..4) {
        let a = field(seed);
        let (x, y) = (Axis::from_index(i).unwrap(), Axis::from_index(j).unwrap());
        let (xy, yx) = (derivative(&derivative(&a, x), y), derivative(&derivative(&a, y), x));
        // products of the two symbols in either order: equal up to rounding
        prop_assert!(xy.max_diff(&yx) <= 4.0 * f64::EPSILON * xy.max_abs());
    }

    #[test]
    fn partition_of_unity(tau in 1e-3f64..1e3, a in 0.75f64..1.2, gap in 0.01f64..0.13) {
        let b = (a + gap).min(4.0 / 3.0);
        prop_assume!(b > a);
        let c = CutoffPair::new(CutoffProfile { a, b, phi_scale: 1.0 }).unwrap();
        let hom: f64 = (-40..=40).map(|j| c.phi(tau * 2f64.powi(-j))).sum();
        let inh: f64 = c.chi(tau) + (0..=40).map(|j| c.phi(tau * 2f64.powi(-j))).sum::<f64>();
        prop_assert!((hom - 1.0).abs() < 1e-12);
        prop_assert!((inh - 1.0).abs() < 1e-12);
        prop_assert!((0..=40).filter(|j| c.phi(tau * 2f64.powi(*j - 20)) != 0.0).count() <= 2);
    }

    #[test]
    fn blocks_are_orthogonal_and_commute(seed in any::<u64>()) {
        let a = field(seed);
        let l = DyadicLadder::standard(&grid());
        for p in l.shells_v() {
            let dp = l.delta_v(p, &a).unwrap();
            for q in l.shells_v().filter(|q| (q - p).abs() >= 2) {
                prop_assert_eq!(l.delta_v(q, &dp).unwrap().max_abs(), 0.0);
            }
            for k in l.shells_h() {
                let hv = l.delta_h(k, &dp).unwrap();
                let vh = l.delta_v(p, &l.delta_h(k, &a).unwrap()).unwrap();
                prop_assert!(hv.max_diff(&vh) <= 4.0 * f64::EPSILON * a.max_abs());
            }
        }
    }

    #[test]
    fn split_and_vertical_sum_reconstruct(seed in any::<u64>()) {
        let a = field(seed);
        let l = DyadicLadder::standard(&grid());
        let (lh, hh) = l.split_lh_hh(&a).unwrap();
        prop_assert!(lh.try_add(&hh).unwrap().try_sub(&a).unwrap().l2_norm() < 1e-12 * a.l2_norm());
        let s = l.vertical_sum(&a).unwrap().try_add(&l.vertical_mean(&a).unwrap()).unwrap();
        prop_assert!(s.try_sub(&a).unwrap().l2_norm() < 1e-12 * a.l2_norm());
    }

    #[test]
    fn bony_reproduces_the_product(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (field(s1), field(s2));
        let l = DyadicLadder::standard(&grid());
        let (t, r) = l.bony_v(&a, &b).unwrap();
        let ab = dealiased_product(&a, &b);
        prop_assert!(t.try_add(&r).unwrap().try_sub(&ab).unwrap().l2_norm() < 1e-10 * ab.l2_norm());
    }

    #[test]
    fn norms_are_seminorms(s1 in any::<u64>(), s2 in any::<u64>(), c in -3.0f64..3.0) {
        let (a, b) = (field(s1), field(s2));
        let l = DyadicLadder::standard(&grid());
        let sum = a.try_add(&b).unwrap();
        let norms: [&dyn Fn(&Field) -> f64; 4] = [
            &|f| norm_b0half(&l, f),
            &|f| norm_b4_neg(&l, f),
            &|f| norm_b4_0half(&l, f),
            &|f| norm_h(f, 1.0, 0.5).value,
        ];
        for n in norms {
            prop_assert!(n(&sum) <= (n(&a) + n(&b)) * (1.0 + 1e-12));
            prop_assert!(rel(n(&a.scale(c)), c.abs() * n(&a)) < 1e-12 || c == 0.0);
            prop_assert!(n(&a) >= 0.0);
        }
        prop_assert!(rel(norm_h(&a, 0.0, 0.0).value, a.l2_norm()) < 1e-14);
    }

    #[test]
    fn scaling_invariance(seed in any::<u64>()) {
        let a = field(seed);
        let c = CutoffPair::standard();
        let (a0, a1) = dyadic_rescale(&a);
        let (l0, l1) = (DyadicLadder::new(a0.grid(), &c), DyadicLadder::new(a1.grid(), &c));
        prop_assert!(rel(norm_b0half(&l0, &a0), norm_b0half(&l1, &a1)) < 1e-10);
        prop_assert!(rel(norm_b4_neg(&l0, &a0), norm_b4_neg(&l1, &a1)) < 1e-10);
    }

    #[test]
    fn biot_savart_is_a_projection_pair(seed in any::<u64>()) {
        let u = random_vec_field(&grid(), Band::new(6, 3), &mut rng_from_seed(seed));
        let (curl, div) = biot_savart_split(&u.comps[0], &u.comps[1]);
        let (again, rest) = biot_savart_split(&curl[0], &curl[1]);
        prop_assert!(again[0].max_diff(&curl[0]) < 1e-13 && again[1].max_diff(&curl[1]) < 1e-13);
        prop_assert!(rest[0].max_abs() < 1e-13 && rest[1].max_abs() < 1e-13);
        let flat = VecField::new(curl[0].clone(), curl[1].clone(), Field::zeros(&grid())).unwrap();
        prop_assert!(flat.is_divergence_free(1e-12));
        prop_assert!(curl[0].try_add(&div[0]).unwrap().max_diff(&u.comps[0]) < 1e-13);
    }

    #[test]
    fn lambda_d3_identity_for_solenoidal_data(seed in any::<u64>()) {
        // ‖Λ_h⁻¹∂₃u₀‖ = ‖(Λ_h⁻¹∂₃u₀^h, −Λ_h⁻¹div_h u₀^h)‖ in B^{0,1/2}
        let u = leray_project(&random_vec_field(&grid(), Band::new(6, 3), &mut rng_from_seed(seed)));
        let l = DyadicLadder::standard(&grid());
        let lam = |f: &Field| horizontal_multiplier(f, HorizontalSymbol::InvLambdaH).field();
        let d3: Vec<Field> = u.comps.iter().map(|f| lam(&derivative(f, Axis::X3))).collect();
        let lhs = b0half_shells(&l, &[&d3[0], &d3[1], &d3[2]]).besov_sum();
        let div = derivative(&u.comps[0], Axis::X1).try_add(&derivative(&u.comps[1], Axis::X2)).unwrap();
        let rhs = b0half_shells(&l, &[&d3[0], &d3[1], &lam(&div).scale(-1.0)]).besov_sum();
        prop_assert!(rel(lhs, rhs) < 1e-10);
    }

    #[test]
    fn generated_data_is_solenoidal(seed in any::<u64>(), j in 2u32..4, fam in 0usize..3) {
        let eps = 1.0 / f64::from(1u32 << j);
        let base = Grid::with_periods(32, 16, oscillatory_period(32, eps, 2), 2.0 * std::f64::consts::PI).unwrap();
        let p = |s: u64| Profile::Random { band_h: 2, band_v: 2, seed: s, l2: 1.0 };
        let family = match fam {
            0 => DataFamily::Oscillatory { eps, phi: p(seed) },
            1 => DataFamily::SlowVarying { eps, delta: 0.2, psi: p(seed), w: [p(seed ^ 1), p(seed ^ 2), p(seed ^ 3)] },
            _ => DataFamily::Combined { eps, delta: 0.2, psi: p(seed), phi: p(seed ^ 1) },
        };
        let u = family.generate(&base).unwrap();
        let m = u.comps.iter().flat_map(|f| f.coeffs()).map(|c| c.norm()).fold(0.0, f64::max);
        let g = *u.grid();
        let div_max = u.divergence().coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        prop_assert!(div_max < 1e-12 * m * g.kh_unit().max(g.kv_unit()) * 32.0, "{div_max} {m}");
        prop_assert!(u.is_divergence_free(1e-12));
    }

    #[test]
    fn chemin_lerner_accumulators_do_not_decrease(seed in any::<u64>(), dts in prop::collection::vec(1e-3f64..0.5, 2..8)) {
        let l = DyadicLadder::standard(&grid());
        let mut acc: Vec<ClAccumulator> =
            [TimeExponent::P1, TimeExponent::P2, TimeExponent::P4, TimeExponent::Inf].map(ClAccumulator::new).into();
        let mut last = vec![0.0; 4];
        let mut t = 0.0;
        for (i, dt) in dts.iter().enumerate() {
            let a = field(seed.wrapping_add(i as u64));
            let snap = b0half_shells_grad_h(&l, &[&a]).into();
            for (c, prev) in acc.iter_mut().zip(&mut last) {
                c.push("a", t, &snap, 1.0).unwrap();
                prop_assert!(c.value() >= *prev);
                *prev = c.value();
            }
            t += dt;
        }
    }

    #[test]
    fn nested_ensembles_refine(seed in any::<u64>()) {
        let band = Band::new(3, 3).with_decay(2.0);
        let a = nested_random_field(&Grid::cube(8).unwrap(), band, seed);
        let b = nested_random_field(&Grid::cube(16).unwrap(), band, seed);
        for k in [[1, 0, 0], [2, -3, 1], [-3, 3, 3], [0, 0, -2]] {
            prop_assert_eq!(a.coeff(k), b.coeff(k));
        }
    }
}
