use supermum::fixtures::{self, alternative_policy, rescale_ramond_puncture};
use supermum::mumford::{
    build_ns_matrices, build_ramond_matrices, mumford_ns, mumford_ns_punctured, mumford_ns_punctured_with,
    mumford_ns_with, mumford_ramond, mumford_ramond_with, LeftInversePolicy, RamondPolicies,
};
use supermum::supermatrix::{ber, BlockShape};
use supermum::supernum::rat;
use supermum::{linalg, Parity, GE};

#[test]
fn identity_aligned_ramond_is_one() {
    let d = fixtures::ramond_identity_fixture(2);
    let res = mumford_ramond(&d).unwrap();
    assert!(res.scalar.is_one());
    for v in res.ber.values() {
        assert!(v.is_one());
    }
    assert_eq!(res.generator, "d_{−1} d_{1/2}^{−5}");
}

#[test]
fn identity_aligned_ns_is_one() {
    for g in [2, 3] {
        let d = fixtures::ns_identity_fixture(2, g, 0);
        let res = mumford_ns(&d).unwrap();
        assert!(res.scalar.is_one(), "g = {g}");
        assert!(res.ber.values().all(GE::is_one));
    }
    let d = fixtures::ns_identity_fixture(2, 2, 1);
    assert!(mumford_ns_punctured(&d).unwrap().scalar.is_one());
    let d0 = fixtures::ns_identity_fixture(2, 2, 0);
    assert_eq!(mumford_ns_punctured(&d0).unwrap_err().name(), "NoPunctures");
}

#[test]
fn g2_ns_shapes() {
    let d = fixtures::ns_identity_fixture(0, 2, 0);
    let m = build_ns_matrices(&d, &LeftInversePolicy::LexFirst).unwrap();
    assert_eq!(m.a1.shape().n_rows(), 2);
    assert_eq!(m.b1.shape().n_rows(), 1);
    assert_eq!(m.m2.entries()[1], vec![GE::zero(0), GE::one(0)]);
}

#[test]
fn ramond_generic_products_and_shapes() {
    let mut rng = fixtures::rng(11);
    let d = fixtures::ramond_generic_fixture(&mut rng, 2, 8, 2);
    let m = build_ramond_matrices(&d, &RamondPolicies::default()).unwrap();
    let l = 2;
    assert_eq!(linalg::mat_mul(m.a.entries(), m.a_prime.entries(), l), linalg::identity(3, l));
    assert_eq!(linalg::mat_mul(m.b.entries(), m.b_prime.entries(), l), linalg::identity(2, l));
    for x in [&m.m0, &m.m_half, &m.m_one] {
        assert_eq!(x.shape(), BlockShape::square(3, 3));
    }
}

fn ramond_alternative(rng: &mut fixtures::FixtureRng, d: &supermum::mumford::RamondLocalData) -> RamondPolicies {
    let m = build_ramond_matrices(d, &RamondPolicies::default()).unwrap();
    let r = d.r() as usize;
    let g = d.g as usize;
    let mut a_cols = vec![Parity::Odd];
    a_cols.extend(std::iter::repeat_n(Parity::Even, r - 1));
    RamondPolicies {
        a: alternative_policy(rng, m.a_prime.entries(), r, r, d.l, &a_cols),
        b: alternative_policy(rng, m.b_prime.entries(), g, r, d.l, &vec![Parity::Even; g]),
    }
}

#[test]
fn ramond_scalar_ignores_left_inverse_choice() {
    let mut rng = fixtures::rng(21);
    for _ in 0..10 {
        let d = fixtures::ramond_generic_fixture(&mut rng, 2, 8, 2);
        let base = mumford_ramond(&d).unwrap();
        let alt = ramond_alternative(&mut rng, &d);
        let other = mumford_ramond_with(&d, &alt).unwrap();
        assert_eq!(base.scalar, other.scalar);
        assert_eq!(base.ber["M0"], other.ber["M0"]);
    }
}

#[test]
fn ns_scalar_ignores_left_inverse_choice() {
    let mut rng = fixtures::rng(22);
    for i in 0..10 {
        let g = if i % 2 == 0 { 3 } else { 4 };
        let d = fixtures::ns_generic_fixture(&mut rng, g, 0, 2);
        let m = build_ns_matrices(&d, &LeftInversePolicy::LexFirst).unwrap();
        let k = (g - 1) as usize;
        let alt = alternative_policy(&mut rng, m.a1.entries(), k, k, 2, &vec![Parity::Even; k]);
        let base = mumford_ns(&d).unwrap();
        let other = mumford_ns_with(&d, &alt).unwrap();
        assert_eq!(base.scalar, other.scalar);
        assert!(base.scalar.is_even());
        let b1 = build_ns_matrices(&d, &alt).unwrap().b1;
        assert_eq!(linalg::mat_mul(b1.entries(), m.a1.entries(), 2), linalg::identity(k, 2));
    }
}

#[test]
fn ramond_scalar_survives_rescaling_a_puncture() {
    let mut rng = fixtures::rng(23);
    for (i, lam) in [rat(2, 1), rat(-1, 3), rat(3, 2), rat(5, 1), rat(-2, 7)].iter().enumerate() {
        let d = fixtures::ramond_generic_fixture(&mut rng, 2, 8, 2);
        let before = mumford_ramond(&d).unwrap();
        let moved = rescale_ramond_puncture(&d, i % 3, lam).unwrap();
        assert_ne!(moved, d);
        let after = mumford_ramond(&moved).unwrap();
        assert_eq!(before.scalar, after.scalar);
    }
}

#[test]
fn punctured_times_ber_m_prime_is_unpunctured() {
    let mut rng = fixtures::rng(24);
    for n in [1, 2] {
        let d = fixtures::ns_generic_fixture(&mut rng, 3, n, 2);
        let p = mumford_ns_punctured(&d).unwrap();
        let m = build_ns_matrices(&d, &LeftInversePolicy::LexFirst).unwrap();
        let mp = m.m_prime.unwrap();
        assert_eq!(mp.shape(), BlockShape::square(n as usize, n as usize));
        assert_eq!(&p.scalar * &ber(&mp).unwrap(), mumford_ns(&d).unwrap().scalar);
        let alt = LeftInversePolicy::GivenRows(vec![0, 1]);
        assert_eq!(mumford_ns_punctured_with(&d, &alt).unwrap().scalar, p.scalar);
    }
}

#[test]
fn results_carry_an_input_hash() {
    let d = fixtures::ramond_identity_fixture(2);
    let a = mumford_ramond(&d).unwrap();
    let mut e = d.clone();
    e.eta[0][0] = supermum::mumford::LocalCoeff::lead(GE::int(2, 2), GE::zero(2));
    let b = mumford_ramond(&e).unwrap();
    assert_eq!(a.input_sha256.len(), 64);
    assert_ne!(a.input_sha256, b.input_sha256);
    assert_eq!(b.scalar, GE::scalar(2, rat(1, 2)));
}
