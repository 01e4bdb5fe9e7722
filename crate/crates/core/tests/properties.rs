use proptest::prelude::*;

use supermum::berezin::{berezin_integral, jacobian_berezinian, Box as SuperBox};
use supermum::fixtures::{self as fx};
use supermum::linalg::{det_bird, det_cofactor};
use supermum::ranks::{rr_supercurve, rr_susy};
use supermum::supermatrix::{
    ber, berezinian, sm_exp_nilpotent, sm_inverse, sm_mul, supertrace, supertranspose, Route, SuperMatrix,
};
use supermum::supernum::rat;
use supermum::susydisk::{
    alpha_map, exterior_derivative, norm_triviality_check, project_oneform, ramond_change_audit, residue,
    transform_section, BerSection, Model,
};
use supermum::{Parity, GE};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

fn shape(i: u8) -> (usize, usize) {
    [(1, 1), (2, 2), (3, 2)][i as usize % 3]
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn grassmann_ring_laws(seed in any::<u64>(), l in 0u32..5) {
        let mut rng = fx::rng(seed);
        let (a, b, c) = (fx::random_ge(&mut rng, l, None), fx::random_ge(&mut rng, l, None), fx::random_ge(&mut rng, l, None));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        let (x, y) = (fx::random_odd(&mut rng, l), fx::random_odd(&mut rng, l));
        prop_assert_eq!(&x * &y, -(&y * &x));
        prop_assert!((&x * &x).is_zero());
        let e = fx::random_even(&mut rng, l);
        prop_assert_eq!(&e * &a, &a * &e);
        prop_assert_eq!((&a * &b).involution(), &a.involution() * &b.involution());
    }

    #[test]
    fn grassmann_inverse_and_leibniz(seed in any::<u64>(), l in 1u32..5) {
        let mut rng = fx::rng(seed);
        let u = &fx::random_ge(&mut rng, l, None).soul() + &GE::one(l);
        let inv = u.inverse().unwrap();
        prop_assert!((&u * &inv).is_one());
        prop_assert!((&inv * &u).is_one());
        let (x, y) = (fx::random_odd(&mut rng, l), fx::random_ge(&mut rng, l, None));
        let lhs = (&x * &y).derive(1).unwrap();
        let rhs = &(&x.derive(1).unwrap() * &y) - &(&x * &y.derive(1).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bird_agrees_with_cofactor(seed in any::<u64>(), n in 1usize..5) {
        let mut rng = fx::rng(seed);
        let m: Vec<Vec<GE>> = (0..n).map(|_| (0..n).map(|_| fx::random_even(&mut rng, 3)).collect()).collect();
        let one = GE::one(3);
        prop_assert_eq!(det_bird(&m, &one), det_cofactor(&m, &one));
    }

    #[test]
    fn berezinian_is_multiplicative(seed in any::<u64>(), s in any::<u8>(), wide in any::<bool>()) {
        let mut rng = fx::rng(seed);
        let (p, q) = shape(s);
        let l = if wide { 4 } else { 2 };
        let x = fx::random_invertible_even(&mut rng, p, q, l);
        let y = fx::random_invertible_even(&mut rng, p, q, l);
        prop_assert_eq!(ber(&sm_mul(&x, &y).unwrap()).unwrap(), &ber(&x).unwrap() * &ber(&y).unwrap());
        let both = berezinian(&x, Route::Both).unwrap();
        prop_assert_eq!(&both, &berezinian(&x, Route::ViaA).unwrap());
        let xi = sm_inverse(&x).unwrap();
        prop_assert_eq!(sm_mul(&x, &xi).unwrap(), SuperMatrix::identity(p, q, l));
        prop_assert!((&ber(&xi).unwrap() * &both).is_one());
    }

    #[test]
    fn supertranspose_preserves_ber_and_str(seed in any::<u64>(), s in any::<u8>()) {
        let mut rng = fx::rng(seed);
        let (p, q) = shape(s);
        let x = fx::random_invertible_even(&mut rng, p, q, 4);
        let xt = supertranspose(&x);
        prop_assert_eq!(ber(&xt).unwrap(), ber(&x).unwrap());
        prop_assert_eq!(supertrace(&xt).unwrap(), supertrace(&x).unwrap());
        let y = fx::random_invertible_even(&mut rng, p, q, 4);
        prop_assert_eq!(supertranspose(&sm_mul(&x, &y).unwrap()), sm_mul(&supertranspose(&y), &xt).unwrap());
    }

    #[test]
    fn ber_of_exp_is_exp_of_str(seed in any::<u64>(), s in any::<u8>()) {
        let mut rng = fx::rng(seed);
        let (p, q) = shape(s);
        let x = fx::random_nilpotent_even(&mut rng, p, q, 4);
        let lhs = ber(&sm_exp_nilpotent(&x).unwrap()).unwrap();
        prop_assert_eq!(lhs, supertrace(&x).unwrap().exp_nilpotent().unwrap());
    }

    #[test]
    fn berezin_change_of_variables(seed in any::<u64>(), m in 1usize..3, n in 1u32..4) {
        let mut rng = fx::rng(seed);
        let bx = SuperBox::new((0..m).map(|i| (rat(i as i64 - 1, 1), rat(i as i64 + 1, 2))).collect()).unwrap();
        let (c, image) = fx::random_poly_change(&mut rng, m, n, &bx);
        let f = fx::random_poly(&mut rng, m, n, 3, None);
        let pulled = f.compose(&c).unwrap().mul(&jacobian_berezinian(&c).unwrap());
        prop_assert_eq!(berezin_integral(&pulled, &bx).unwrap(), berezin_integral(&f, &image).unwrap());
    }

    #[test]
    fn residue_is_invariant_under_ns_changes(seed in any::<u64>()) {
        let mut rng = fx::rng(seed);
        let c = fx::random_ns_change(&mut rng, 2, 2, 8);
        let s = BerSection { weight: 1, f: fx::random_series(&mut rng, 2, -3, 3, Parity::Even) };
        let t = transform_section(&s, &c).unwrap();
        prop_assert_eq!(residue(&t).unwrap(), residue(&s).unwrap());
        let s = BerSection { weight: 1, f: fx::random_series(&mut rng, 2, -2, 3, Parity::Odd) };
        let t = transform_section(&s, &c).unwrap();
        prop_assert_eq!(residue(&t).unwrap(), residue(&s).unwrap());
    }

    #[test]
    fn alpha_map_consistency(seed in any::<u64>(), odd in any::<bool>()) {
        let mut rng = fx::rng(seed);
        let p = if odd { Parity::Odd } else { Parity::Even };
        let f = fx::random_series(&mut rng, 3, -2, 4, p);
        let s = BerSection { weight: 1, f: f.clone() };
        let back = project_oneform(&alpha_map(&s).unwrap());
        prop_assert!(back.f.agrees_with(&f));
        let a = alpha_map(&BerSection { weight: 1, f: f.d_theta(Model::NS) }).unwrap();
        let d = exterior_derivative(&f);
        prop_assert!(a.w_coeff.agrees_with(&d.w_coeff));
        prop_assert!(a.dtheta_coeff.agrees_with(&d.dtheta_coeff));
    }

    #[test]
    fn ramond_changes_pass_the_audit(seed in any::<u64>()) {
        let mut rng = fx::rng(seed);
        let c = fx::random_ramond_change(&mut rng, 2, 2, 6);
        let rep = ramond_change_audit(&c).unwrap();
        prop_assert!(rep.all_pass, "{:?}", rep);
    }

    #[test]
    fn norm_of_unit_is_trivial(seed in any::<u64>(), l in 1u32..5) {
        let mut rng = fx::rng(seed);
        let g0 = fx::random_even_unit(&mut rng, l);
        let g1 = fx::random_odd(&mut rng, l);
        prop_assert!(norm_triviality_check(&g0, &g1).unwrap().is_one());
    }

    #[test]
    fn riemann_roch_super_euler_characteristic(deg in -50i64..50, g in 2i64..40, dj in -5i64..5) {
        let a = rr_supercurve(deg, g, dj).unwrap();
        prop_assert_eq!(a.s_chi(), -dj);
        prop_assert_eq!(rr_supercurve(deg + 1, g, dj).unwrap().s_chi(), a.s_chi());
        let b = rr_susy(deg, g).unwrap();
        prop_assert_eq!((b.even, b.odd), (deg - g + 1, deg));
        prop_assert_eq!(b.s_chi(), 1 - g);
    }
}
