//! Seeded random generators and constructed inputs shared by the test suites
//! and the acceptance run.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::berezin::{self, PolyChange, PolySuperFunction};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::mumford::{pairing, LeftInversePolicy, LocalCoeff, NSLocalData, RamondLocalData, Table};
use crate::supermatrix::{BlockShape, MatrixParity, SuperMatrix};
use crate::supernum::{rat, OddIndex, Parity, Rational, GE};
use crate::susydisk::{transform_section, BerSection, DiskChange, Model, Series};

pub type FixtureRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero rational p/q with |p| ≤ 4, 1 ≤ q ≤ 3.
pub fn small_rational(rng: &mut FixtureRng) -> Rational {
    loop {
        let p: i64 = rng.gen_range(-4..=4);
        if p != 0 {
            return rat(p, rng.gen_range(1..=3));
        }
    }
}

/// Random element of the given parity (or mixed when `None`).
pub fn random_ge(rng: &mut FixtureRng, l: u32, parity: Option<Parity>) -> GE {
    let mut terms = Vec::new();
    for mask in 0..(1u64 << l) {
        let idx = OddIndex::from_mask(mask);
        if parity.is_some_and(|p| idx.parity() != p) {
            continue;
        }
        if rng.gen_bool(0.6) {
            terms.push((idx, small_rational(rng)));
        }
    }
    let mut g = GE::zero(l);
    for (idx, q) in terms {
        g = &g + &GE::monomial(l, idx, q);
    }
    g
}

pub fn random_even(rng: &mut FixtureRng, l: u32) -> GE {
    random_ge(rng, l, Some(Parity::Even))
}

pub fn random_odd(rng: &mut FixtureRng, l: u32) -> GE {
    random_ge(rng, l, Some(Parity::Odd))
}

/// Even element with nonzero body.
pub fn random_even_unit(rng: &mut FixtureRng, l: u32) -> GE {
    &random_even(rng, l).soul() + &GE::scalar(l, small_rational(rng))
}

/// Even element with zero body.
pub fn random_even_nilpotent(rng: &mut FixtureRng, l: u32) -> GE {
    random_even(rng, l).soul()
}

fn random_of(rng: &mut FixtureRng, l: u32, p: Parity) -> GE {
    random_ge(rng, l, Some(p))
}

/// Even square supermatrix with body-invertible diagonal blocks.
pub fn random_invertible_even(rng: &mut FixtureRng, p: usize, q: usize, l: u32) -> SuperMatrix {
    let shape = BlockShape::square(p, q);
    loop {
        let entries: Mat = (0..p + q)
            .map(|i| {
                (0..p + q)
                    .map(|j| random_of(rng, l, SuperMatrix::expected_entry_parity(&shape, Parity::Even, i, j)))
                    .collect()
            })
            .collect();
        let m = SuperMatrix::new(shape, MatrixParity::Even, l, entries).expect("parities are consistent");
        let a = linalg::body(&m.block(0, 0));
        let d = linalg::body(&m.block(1, 1));
        if !linalg::rational_det(&a).is_zero() && !linalg::rational_det(&d).is_zero() {
            return m;
        }
    }
}

/// Even square supermatrix whose entries all have zero body.
pub fn random_nilpotent_even(rng: &mut FixtureRng, p: usize, q: usize, l: u32) -> SuperMatrix {
    let shape = BlockShape::square(p, q);
    let entries: Mat = (0..p + q)
        .map(|i| {
            (0..p + q)
                .map(|j| match SuperMatrix::expected_entry_parity(&shape, Parity::Even, i, j) {
                    Parity::Even => random_even_nilpotent(rng, l),
                    Parity::Odd => random_odd(rng, l),
                })
                .collect()
        })
        .collect();
    SuperMatrix::new(shape, MatrixParity::Even, l, entries).expect("parities are consistent")
}

/// Series on [k_min, k_max] with coefficients of parity (p, p + 1).
pub fn random_series(rng: &mut FixtureRng, l: u32, k_min: i64, k_max: i64, p: Parity) -> Series {
    let coeffs: Vec<(i64, GE, GE)> =
        (k_min..=k_max).map(|k| (k, random_of(rng, l, p), random_of(rng, l, p.flip()))).collect();
    Series::new(l, k_min, k_max, coeffs).expect("window is non-empty")
}

fn even_poly(l: u32, coeffs: Vec<GE>) -> Series {
    let mut s = Series::zero(l, 0, crate::susydisk::EXACT);
    for (k, c) in coeffs.into_iter().enumerate() {
        s = &s + &Series::monomial(k as i64, c, GE::zero(l));
    }
    s
}

/// ∫₀^z of a θ-free series.
fn integrate(s: &Series) -> Series {
    let l = s.l();
    let mut out = Series::zero(l, 0, s.k_max().saturating_add(1));
    for (&k, (a, _)) in s.terms() {
        assert!(k >= 0, "integrand must be regular");
        out = out
            .try_add(&Series::monomial(k + 1, a.scale(&rat(1, k + 1)), GE::zero(l)))
            .expect("same L");
    }
    out
}

/// NS-superconformal change z' = F + θΛ, θ' = Ψ + Gθ with Λ = ΨG and
/// F' = G² − ΨΨ', built from random polynomials of degree `deg` and known
/// on [0, order].
pub fn random_ns_change(rng: &mut FixtureRng, l: u32, deg: usize, order: i64) -> DiskChange {
    let mut gc = vec![random_even_unit(rng, l)];
    gc.extend((0..deg).map(|_| random_even(rng, l)));
    let g = even_poly(l, gc);
    let psi = even_poly(l, (0..=deg).map(|_| random_odd(rng, l)).collect());
    let lambda = &psi * &g;
    let f_prime = &(&g * &g) - &(&psi * &psi.d_z());
    let f = integrate(&f_prime);
    // θΛ = −Λθ for odd Λ.
    let z_image = (&f + &(&lambda.neg() * &Series::theta(l))).truncate(order).expect("window");
    let theta_image = (&psi + &(&g * &Series::theta(l))).truncate(order).expect("window");
    DiskChange::new(z_image, theta_image, Model::NS).expect("valid change")
}

/// The rescaling z' = z/λ², θ' = θ/λ.
pub fn ns_scaling(l: u32, lambda: &Rational) -> DiskChange {
    let inv = lambda.recip();
    let z_image = Series::z(l).scale_q(&(&inv * &inv));
    let theta_image = Series::theta(l).scale_q(&inv);
    DiskChange::new(z_image, theta_image, Model::NS).expect("valid change")
}

/// Ramond-superconformal change z' = f + λθ, θ' = ψ + gθ with g(0) = ±1,
/// λ = fgψ and f = c·z·exp ∫((g² − 1)/z + ψψ'), known on [0, order].
pub fn random_ramond_change(rng: &mut FixtureRng, l: u32, deg: usize, order: i64) -> DiskChange {
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let mut gc = vec![GE::int(l, sign)];
    gc.extend((0..deg).map(|_| random_even(rng, l)));
    let g = even_poly(l, gc);
    let psi = even_poly(l, (0..=deg).map(|_| random_odd(rng, l)).collect());
    let integrand = &(&(&g * &g) - &Series::one(l)).shift(-1) + &(&psi * &psi.d_z());
    let h = integrate(&integrand).truncate(order).expect("window");
    let mut e = Series::one(l).truncate(order).expect("window");
    let mut term = e.clone();
    for n in 1..=order {
        term = (&term * &h).truncate(order).expect("window").scale_q(&rat(1, n));
        e = &e + &term;
    }
    let c = random_even_unit(rng, l);
    let f = e.shift(1).scale(&c).truncate(order).expect("window");
    let lam = (&(&f * &g) * &psi).truncate(order).expect("window");
    let z_image = &f + &(&lam * &Series::theta(l));
    let theta_image = &psi.truncate(order).expect("window") + &(&g * &Series::theta(l));
    DiskChange::new(z_image, theta_image, Model::Ramond).expect("valid change")
}

/// Random polynomial superfunction in m even and n odd variables.
pub fn random_poly(rng: &mut FixtureRng, m: usize, n: u32, max_deg: u32, parity: Option<Parity>) -> PolySuperFunction {
    let mut f = PolySuperFunction::zero(m, n);
    for _ in 0..4 {
        let exps: Vec<u32> = (0..m).map(|_| rng.gen_range(0..=max_deg)).collect();
        let mask = loop {
            let mask = rng.gen_range(0..(1u64 << n));
            if parity.is_none_or(|p| OddIndex::from_mask(mask).parity() == p) {
                break mask;
            }
        };
        let t = PolySuperFunction::monomial(m, n, exps, OddIndex::from_mask(mask), small_rational(rng));
        f = f.add(&t);
    }
    f
}

/// Change with y_i = a_i x_i + b_i (a_i > 0) and ζ = M ξ plus x-dependent
/// cubic corrections; returns the change and the image of `bx`.
pub fn random_poly_change(rng: &mut FixtureRng, m: usize, n: u32, bx: &berezin::Box) -> (PolyChange, berezin::Box) {
    let mut y = Vec::with_capacity(m);
    let mut image = Vec::with_capacity(m);
    for (i, (lo, hi)) in bx.intervals().iter().enumerate() {
        let a = small_rational(rng).abs();
        let b = small_rational(rng);
        y.push(PolySuperFunction::x(m, n, i + 1).scale(&a).add(&PolySuperFunction::constant(m, n, b.clone())));
        image.push((&a * lo + &b, &a * hi + &b));
    }
    let mut mat: Vec<Vec<Rational>>;
    loop {
        mat = (0..n).map(|_| (0..n).map(|_| Rational::from_integer(rng.gen_range(-2..=2).into())).collect()).collect();
        if !linalg::rational_det(&mat).is_zero() {
            break;
        }
    }
    let zeta = (0..n as usize)
        .map(|j| {
            let mut z = PolySuperFunction::zero(m, n);
            for i in 0..n as usize {
                if !mat[j][i].is_zero() {
                    z = z.add(&PolySuperFunction::xi(m, n, i as u32 + 1).scale(&mat[j][i]));
                }
            }
            if n >= 3 {
                let cubic = random_poly(rng, m, n, 2, Some(Parity::Odd));
                let cubic_only = PolySuperFunction::from_terms(
                    m,
                    n,
                    cubic
                        .terms()
                        .iter()
                        .flat_map(|(e, g)| {
                            g.terms()
                                .filter(|(idx, _)| idx.degree() >= 3)
                                .map(|(idx, q)| (e.clone(), idx.ids(), q.clone()))
                                .collect::<Vec<_>>()
                        }),
                )
                .expect("well-formed terms");
                z = z.add(&cubic_only);
            }
            z
        })
        .collect();
    let c = PolyChange::new(m, n, y, zeta).expect("valid change");
    (c, berezin::Box::new(image).expect("ordered intervals"))
}

/// Solves F(u) = 0 for an affine F: Qⁿ → Qᵐ by probing it at 0 and at the
/// unit vectors; `None` if the solution is not unique or does not exist.
pub fn solve_affine<F>(n: usize, mut f: F) -> Result<Option<Vec<Rational>>>
where
    F: FnMut(&[Rational]) -> Result<Vec<Rational>>,
{
    let zero = vec![Rational::zero(); n];
    let f0 = f(&zero)?;
    let rows = f0.len();
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = zero.clone();
        e[i] = Rational::one();
        let fi = f(&e)?;
        cols.push(fi.iter().zip(&f0).map(|(a, b)| a - b).collect::<Vec<_>>());
    }
    // Augmented system C u = −f0.
    let mut m: Vec<Vec<Rational>> =
        (0..rows).map(|r| (0..n).map(|c| cols[c][r].clone()).chain([-f0[r].clone()]).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..n {
        let Some(p) = (row..rows).find(|&r| !m[r][c].is_zero()) else {
            return Ok(None);
        };
        m.swap(p, row);
        let inv = m[row][c].recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][c].is_zero() {
                let k = m[r][c].clone();
                for j in 0..=n {
                    let v = &k * &m[row][j];
                    m[r][j] -= v;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[n].is_zero()) {
        return Ok(None);
    }
    Ok(Some((0..n).map(|i| m[i][n].clone()).collect()))
}

fn components(g: &GE) -> Vec<Rational> {
    (0..(1u64 << g.l())).map(|mask| g.coeff(OddIndex::from_mask(mask))).collect()
}

/// Masks of the given parity: the free rational coordinates of one slot.
fn slot_masks(l: u32, p: Parity) -> Vec<OddIndex> {
    (0..(1u64 << l)).map(OddIndex::from_mask).filter(|i| i.parity() == p).collect()
}

fn assemble(l: u32, masks: &[OddIndex], u: &[Rational]) -> GE {
    let mut g = GE::zero(l);
    for (idx, q) in masks.iter().zip(u) {
        g = &g + &GE::monomial(l, *idx, q.clone());
    }
    g
}

/// Slots are (a_parity, which) pairs; `set` writes the solved GE values into
/// the data and `eqs` evaluates the constraint GEs.
fn solve_slots<D: Clone>(
    base: &D,
    l: u32,
    slot_parities: &[Parity],
    set: impl Fn(&mut D, &[GE]),
    eqs: impl Fn(&D) -> Result<Vec<GE>>,
) -> Result<Option<D>> {
    let masks: Vec<Vec<OddIndex>> = slot_parities.iter().map(|&p| slot_masks(l, p)).collect();
    let n: usize = masks.iter().map(Vec::len).sum();
    let build = |u: &[Rational]| -> D {
        let mut vals = Vec::with_capacity(masks.len());
        let mut off = 0;
        for ms in &masks {
            vals.push(assemble(l, ms, &u[off..off + ms.len()]));
            off += ms.len();
        }
        let mut d = base.clone();
        set(&mut d, &vals);
        d
    };
    let sol = solve_affine(n, |u| Ok(eqs(&build(u))?.iter().flat_map(components).collect()))?;
    Ok(sol.map(|u| build(&u)))
}

fn lead(a: GE, b: GE) -> LocalCoeff {
    LocalCoeff::lead(a, b)
}

fn random_table(rng: &mut FixtureRng, rows: usize, cols: usize, l: u32, a_parity: Parity) -> Table {
    (0..rows)
        .map(|_| (0..cols).map(|_| lead(random_of(rng, l, a_parity), random_of(rng, l, a_parity.flip()))).collect())
        .collect()
}

fn set_a0(c: &mut LocalCoeff, v: GE) {
    let (_, b) = c.leading().expect("lead entry");
    *c = lead(v, b);
}

fn set_b0(c: &mut LocalCoeff, v: GE) {
    let (a, _) = c.leading().expect("lead entry");
    *c = lead(a, v);
}

fn series_of(c: &LocalCoeff) -> Series {
    c.series().expect("lead entry")
}

/// Σ_k res_k(s·h/t) over the points.
fn global_pairing(s: &[LocalCoeff], h: &[LocalCoeff], dens: &[Series]) -> Result<GE> {
    let l = dens[0].l();
    let mut acc = GE::zero(l);
    for k in 0..dens.len() {
        acc = &acc + &pairing(&series_of(&s[k]), &series_of(&h[k]), &dens[k])?;
    }
    Ok(acc)
}

fn ones(l: u32, r: usize) -> Vec<LocalCoeff> {
    vec![lead(GE::one(l), GE::zero(l)); r]
}

/// Random Ramond data whose restriction columns and rows lie in the left
/// kernels of A′ and B′, so that the Mumford scalar is well defined.
pub fn ramond_generic_fixture(rng: &mut FixtureRng, g: i64, n_r: i64, l: u32) -> RamondLocalData {
    loop {
        if let Some(d) = try_ramond_generic(rng, g, n_r, l).ok().flatten() {
            if crate::mumford::mumford_ramond(&d).is_ok() {
                return d;
            }
        }
    }
}

fn try_ramond_generic(rng: &mut FixtureRng, g: i64, n_r: i64, l: u32) -> Result<Option<RamondLocalData>> {
    let r = (n_r / 2 - g + 1) as usize;
    let gu = g as usize;
    if r < gu + 1 || r < 2 {
        return Err(Error::PreconditionViolated("fixture needs r > g and r >= 2".into()));
    }
    let t_series: Vec<Series> = (0..r)
        .map(|_| {
            Series::new(
                l,
                0,
                2,
                [(1, random_even_unit(rng, l), random_odd(rng, l)), (2, random_even(rng, l), random_odd(rng, l))],
            )
            .expect("window")
        })
        .collect();
    let mut d = RamondLocalData {
        g,
        n_r,
        l,
        t_series,
        phi: random_table(rng, gu, r, l, Parity::Odd),
        xi: random_table(rng, r - 1, r, l, Parity::Odd),
        sigma: random_table(rng, r, r, l, Parity::Odd),
        tau: random_table(rng, r - gu, r, l, Parity::Even),
        eta: random_table(rng, r, r, l, Parity::Even),
        psi: random_table(rng, r, r, l, Parity::Odd),
    };
    let one = ones(l, r);

    // ⟨1, 1⟩ = 0 through the θ-coefficient of t at z¹ on the last puncture.
    let Some(nd) = solve_slots(
        &d,
        l,
        &[Parity::Odd],
        |d, v| {
            let t = &d.t_series[r - 1];
            let a1 = t.a(1).expect("window");
            let a2 = t.a(2).expect("window");
            let b2 = t.b(2).expect("window");
            d.t_series[r - 1] = Series::new(l, 0, 2, [(1, a1, v[0].clone()), (2, a2, b2)]).expect("window");
        },
        |d| Ok(vec![global_pairing(&one, &one, &d.t_series)?]),
    )?
    else {
        return Ok(None);
    };
    d = nd;

    // ⟨ξ_j, 1⟩ = 0 and ⟨ξ_j, ξ_i⟩ = 0 for i < j.
    for j in 0..r - 1 {
        let mut parities = vec![Parity::Even];
        parities.extend(std::iter::repeat_n(Parity::Odd, j));
        let Some(nd) = solve_slots(
            &d,
            l,
            &parities,
            |d, v| {
                set_b0(&mut d.xi[j][0], v[0].clone());
                for i in 0..j {
                    set_a0(&mut d.xi[j][i + 1], v[i + 1].clone());
                }
            },
            |d| {
                let mut e = vec![global_pairing(&d.xi[j], &one, &d.t_series)?];
                for i in 0..j {
                    e.push(global_pairing(&d.xi[j], &d.xi[i], &d.t_series)?);
                }
                Ok(e)
            },
        )?
        else {
            return Ok(None);
        };
        d = nd;
    }

    // τ and σ rows annihilate every φ_i.
    for (which, p) in [(0usize, Parity::Even), (1, Parity::Odd)] {
        let count = if which == 0 { r - gu } else { r };
        for j in 0..count {
            let Some(nd) = solve_slots(
                &d,
                l,
                &vec![p; gu],
                |d, v| {
                    let row = if which == 0 { &mut d.tau[j] } else { &mut d.sigma[j] };
                    for (k, x) in v.iter().enumerate() {
                        set_a0(&mut row[k], x.clone());
                    }
                },
                |d| {
                    let row = if which == 0 { &d.tau[j] } else { &d.sigma[j] };
                    d.phi.iter().map(|phi| global_pairing(row, phi, &d.t_series)).collect()
                },
            )?
            else {
                return Ok(None);
            };
            d = nd;
        }
    }
    Ok(Some(d))
}

fn unit_vec(l: u32, n: usize, i: usize) -> Vec<GE> {
    (0..n).map(|k| if k == i { GE::one(l) } else { GE::zero(l) }).collect()
}

fn table_from(rows: Vec<(Vec<GE>, Vec<GE>)>) -> Table {
    rows.into_iter().map(|(a, b)| a.into_iter().zip(b).map(|(x, y)| lead(x, y)).collect()).collect()
}

/// g = 2, n_R = 8 data for which M0, M₋₁/₂ and M₋₁ all have Berezinian 1.
pub fn ramond_identity_fixture(l: u32) -> RamondLocalData {
    let r = 3;
    let z = |n: usize| vec![GE::zero(l); n];
    let e = |i: usize| unit_vec(l, r, i);
    let q = |v: [i64; 3]| v.iter().map(|&x| GE::int(l, x)).collect::<Vec<_>>();
    RamondLocalData {
        g: 2,
        n_r: 8,
        l,
        t_series: vec![Series::z(l); r],
        phi: table_from(vec![(z(r), e(0)), (z(r), e(1))]),
        xi: table_from(vec![(z(r), q([1, 0, -1])), (z(r), q([0, 1, -1]))]),
        sigma: table_from((0..r).map(|j| (z(r), e(j))).collect()),
        tau: table_from(vec![(e(2), z(r))]),
        eta: table_from((0..r).map(|j| (e(j), z(r))).collect()),
        psi: table_from((0..r).map(|j| (z(r), e(j))).collect()),
    }
}

/// NS data for g ∈ {2, 3} with n_NS ∈ {0, 1} whose M1, M2, M3 (and M′)
/// all have Berezinian 1.
pub fn ns_identity_fixture(l: u32, g: i64, n_ns: i64) -> NSLocalData {
    assert!(g == 2 || g == 3, "identity fixtures exist for g = 2, 3");
    assert!(n_ns == 0 || n_ns == 1, "identity fixtures exist for n_NS = 0, 1");
    let m = (g - 1) as usize;
    let z = |n: usize| vec![GE::zero(l); n];
    let e = |i: usize| unit_vec(l, m, i);
    let (psi, rho, dist) = if g == 2 {
        (vec![], vec![], GE::one(l))
    } else {
        (table_from(vec![(z(m), e(0))]), table_from(vec![(e(1), z(m))]), GE::int(l, -1))
    };
    let (alpha, beta, tau) = if n_ns == 1 {
        (
            table_from(vec![(z(1), vec![GE::one(l)])]),
            table_from(vec![(vec![GE::one(l)], z(1))]),
            vec![[GE::one(l), GE::zero(l)]],
        )
    } else {
        (vec![], vec![], vec![])
    };
    NSLocalData {
        g,
        l,
        n_ns,
        nu: None,
        phi: table_from((0..m).map(|j| (z(m), e(j))).collect()),
        chi: table_from((0..m).map(|j| (e(j), z(m))).collect()),
        psi,
        sigma: table_from((0..m).map(|j| (z(m), e(j))).collect()),
        rho,
        xi: vec![],
        m3_distinguished_entry: dist,
        alpha,
        beta,
        tau,
    }
}

/// Random NS data with ⟨φ_i, φ_j⟩ = 0, so that the M1 scalar does not
/// depend on the lift.
pub fn ns_generic_fixture(rng: &mut FixtureRng, g: i64, n_ns: i64, l: u32) -> NSLocalData {
    loop {
        if let Some(d) = try_ns_generic(rng, g, n_ns, l).ok().flatten() {
            let ok = if n_ns > 0 {
                crate::mumford::mumford_ns_punctured(&d).is_ok()
            } else {
                crate::mumford::mumford_ns(&d).is_ok()
            };
            if ok {
                return d;
            }
        }
    }
}

fn try_ns_generic(rng: &mut FixtureRng, g: i64, n_ns: i64, l: u32) -> Result<Option<NSLocalData>> {
    let m = (g - 1) as usize;
    let n = n_ns as usize;
    let nu = if rng.gen_bool(0.5) {
        None
    } else {
        Some(
            (0..m)
                .map(|_| {
                    Series::new(l, 0, 1, [(1, random_even_unit(rng, l), random_odd(rng, l))]).expect("window")
                })
                .collect(),
        )
    };
    let mut d = NSLocalData {
        g,
        l,
        n_ns,
        nu,
        phi: random_table(rng, m, m, l, Parity::Odd),
        chi: random_table(rng, m, m, l, Parity::Even),
        psi: random_table(rng, m - 1, m, l, Parity::Odd),
        sigma: random_table(rng, m, m, l, Parity::Odd),
        rho: random_table(rng, m - 1, m, l, Parity::Even),
        xi: random_table(rng, 1, m, l, Parity::Odd).remove(0),
        m3_distinguished_entry: random_even_unit(rng, l),
        alpha: random_table(rng, n, n, l, Parity::Odd),
        beta: random_table(rng, n, n, l, Parity::Even),
        tau: (0..n).map(|_| [random_even_unit(rng, l), random_odd(rng, l)]).collect(),
    };
    let nus: Vec<Series> = (0..m).map(|k| d.nu.as_ref().map_or_else(|| Series::z(l), |v| v[k].clone())).collect();
    for j in 1..m {
        let Some(nd) = solve_slots(
            &d,
            l,
            &vec![Parity::Odd; j],
            |d, v| {
                for (k, x) in v.iter().enumerate() {
                    set_a0(&mut d.phi[j][k], x.clone());
                }
            },
            |d| (0..j).map(|i| global_pairing(&d.phi[j], &d.phi[i], &nus)).collect(),
        )?
        else {
            return Ok(None);
        };
        d = nd;
    }
    Ok(Some(d))
}

/// Random Y for a Shifted policy, with the parity pattern of a left inverse
/// of a residue matrix whose first `k` rows are even.
pub fn random_shift(rng: &mut FixtureRng, k: usize, n: usize, even_rows: usize, l: u32, col_parity: &[Parity]) -> Mat {
    (0..k)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let row_p = if j < even_rows { Parity::Even } else { Parity::Odd };
                    random_of(rng, l, row_p.add(col_parity[i]))
                })
                .collect()
        })
        .collect()
}

/// Lexicographic list of row subsets with invertible body minor.
pub fn invertible_row_subsets(m: &Mat, k: usize) -> Vec<Vec<usize>> {
    let n = m.len();
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        let sub: Vec<Vec<Rational>> = c.iter().map(|&i| m[i].iter().map(GE::body).collect()).collect();
        if !linalg::rational_det(&sub).is_zero() {
            out.push(c.clone());
        }
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// A policy that differs from lex-first: the last valid subset, shifted by
/// a random Y.
pub fn alternative_policy(rng: &mut FixtureRng, m: &Mat, k: usize, even_rows: usize, l: u32, col_parity: &[Parity]) -> LeftInversePolicy {
    let subsets = invertible_row_subsets(m, k);
    let base = LeftInversePolicy::GivenRows(subsets.last().expect("some subset").clone());
    let y = random_shift(rng, k, m.len(), even_rows, l, col_parity);
    LeftInversePolicy::Shifted { base: Box::new(base), y }
}

fn rescale_entry(c: &LocalCoeff, weight: i64, change: &DiskChange) -> Result<LocalCoeff> {
    let s = transform_section(&BerSection { weight, f: c.series()? }, change)?;
    Ok(match c {
        LocalCoeff::Lead(_) => {
            let (a, b) = s.f.coeff(0)?;
            LocalCoeff::lead(a, b)
        }
        LocalCoeff::Series(_) => LocalCoeff::Series(s.f),
    })
}

/// Re-expresses the data at puncture `k` in the coordinates z' = λ²z,
/// θ' = λθ.
pub fn rescale_ramond_puncture(d: &RamondLocalData, k: usize, lambda: &Rational) -> Result<RamondLocalData> {
    let c = ns_scaling(d.l, lambda);
    let mut out = d.clone();
    out.t_series[k] = transform_section(&BerSection { weight: -1, f: d.t_series[k].clone() }, &c)?.f;
    let tables: [(&mut Table, i64); 6] = [
        (&mut out.phi, 1),
        (&mut out.xi, 0),
        (&mut out.sigma, -1),
        (&mut out.tau, -1),
        (&mut out.eta, -2),
        (&mut out.psi, -2),
    ];
    for (t, w) in tables {
        for row in t.iter_mut() {
            row[k] = rescale_entry(&row[k], w, &c)?;
        }
    }
    Ok(out)
}
