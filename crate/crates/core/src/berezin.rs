//! Polynomial superfunctions on ℝ^{m|n}: Berezin integration over boxes and
//! the Berezinian of a change of variables.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{de_error, Error, Result};
use crate::linalg;
use crate::supernum::{format_rational, parse_rational, OddIndex, Parity, Rational, RingElem, GE};

/// Σ x^e · g_e(ξ), with each g_e a Grassmann element over the ξ's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySuperFunction {
    m: usize,
    n: u32,
    terms: BTreeMap<Vec<u32>, GE>,
}

impl PolySuperFunction {
    pub fn zero(m: usize, n: u32) -> Self {
        PolySuperFunction { m, n, terms: BTreeMap::new() }
    }

    pub fn constant(m: usize, n: u32, q: Rational) -> Self {
        Self::monomial(m, n, vec![0; m], OddIndex::EMPTY, q)
    }

    pub fn one(m: usize, n: u32) -> Self {
        Self::constant(m, n, Rational::one())
    }

    /// The even coordinate x_i (1-based).
    pub fn x(m: usize, n: u32, i: usize) -> Self {
        assert!(i >= 1 && i <= m, "even variable {i} outside 1..={m}");
        let mut e = vec![0; m];
        e[i - 1] = 1;
        Self::monomial(m, n, e, OddIndex::EMPTY, Rational::one())
    }

    /// The odd coordinate ξ_j (1-based).
    pub fn xi(m: usize, n: u32, j: u32) -> Self {
        let mut f = Self::zero(m, n);
        f.insert(vec![0; m], GE::generator(n, j));
        f
    }

    pub fn monomial(m: usize, n: u32, exps: Vec<u32>, odd: OddIndex, q: Rational) -> Self {
        assert_eq!(exps.len(), m, "exponent vector length must equal m");
        let mut f = Self::zero(m, n);
        f.insert(exps, GE::monomial(n, odd, q));
        f
    }

    /// Builds from (exponents, odd ids, coefficient) triples, validating ranges.
    pub fn from_terms<I>(m: usize, n: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Vec<u32>, Rational)>,
    {
        let mut f = Self::zero(m, n);
        for (e, ids, q) in terms {
            if e.len() != m {
                return Err(Error::InvalidInput(format!("exponent vector {e:?} should have length {m}")));
            }
            let idx = OddIndex::from_ids(&ids, n)?;
            f.insert(e, GE::monomial(n, idx, q));
        }
        Ok(f)
    }

    fn insert(&mut self, e: Vec<u32>, g: GE) {
        if g.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(|| GE::zero(self.n));
        *slot = &*slot + &g;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, GE> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_parity(&self, p: Parity) -> bool {
        self.terms.values().all(|g| g.has_parity(p))
    }

    fn same_space(&self, o: &Self) {
        assert!(self.m == o.m && self.n == o.n, "superfunctions on different spaces");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_space(o);
        let mut out = self.clone();
        for (e, g) in &o.terms {
            out.insert(e.clone(), g.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        PolySuperFunction { m: self.m, n: self.n, terms: self.terms.iter().map(|(e, g)| (e.clone(), -g)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let mut out = Self::zero(self.m, self.n);
        for (e, g) in &self.terms {
            out.insert(e.clone(), g.scale(q));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.same_space(o);
        let mut out = Self::zero(self.m, self.n);
        for (e1, g1) in &self.terms {
            for (e2, g2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert(e, g1 * g2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.m, self.n);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// ∂/∂x_i (1-based).
    pub fn d_x(&self, i: usize) -> Self {
        let mut out = Self::zero(self.m, self.n);
        for (e, g) in &self.terms {
            if e[i - 1] > 0 {
                let mut e2 = e.clone();
                e2[i - 1] -= 1;
                out.insert(e2, g.scale(&Rational::from_integer(e[i - 1].into())));
            }
        }
        out
    }

    /// Left derivative ∂/∂ξ_j (1-based).
    pub fn d_xi(&self, j: u32) -> Self {
        let mut out = Self::zero(self.m, self.n);
        for (e, g) in &self.terms {
            out.insert(e.clone(), g.derive(j).expect("odd variable in range"));
        }
        out
    }

    /// Part with no odd variables, as a rational polynomial in x.
    fn reduced(&self) -> BTreeMap<Vec<u32>, Rational> {
        self.terms
            .iter()
            .filter_map(|(e, g)| {
                let b = g.body();
                (!b.is_zero()).then(|| (e.clone(), b))
            })
            .collect()
    }

    /// Multiplicative inverse, defined here when the ξ-free part is a nonzero
    /// constant (the remainder is then nilpotent).
    pub fn inverse(&self) -> Option<Self> {
        let red = self.reduced();
        let zero_exp = vec![0; self.m];
        if red.len() != 1 || !red.contains_key(&zero_exp) {
            return None;
        }
        let c = red[&zero_exp].clone();
        let c_inv = Self::constant(self.m, self.n, c.recip());
        let nil = self.sub(&Self::constant(self.m, self.n, c.clone()));
        let step = nil.scale(&-c.recip());
        let mut term = Self::one(self.m, self.n);
        let mut sum = term.clone();
        loop {
            term = term.mul(&step);
            if term.is_zero() {
                return Some(sum.mul(&c_inv));
            }
            sum = sum.add(&term);
        }
    }

    /// Substitutes the images of `c` for the variables (f ∘ c).
    pub fn compose(&self, c: &PolyChange) -> Result<Self> {
        if c.m != self.m || c.n != self.n {
            return Err(Error::InvalidShape("superfunction and change live on different spaces".into()));
        }
        c.validate()?;
        let mut powers: Vec<Vec<Self>> = c.y.iter().map(|y| vec![Self::one(self.m, self.n), y.clone()]).collect();
        let mut out = Self::zero(self.m, self.n);
        for (e, g) in &self.terms {
            let mut mono = Self::one(self.m, self.n);
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&c.y[i]);
                    powers[i].push(next);
                }
                mono = mono.mul(&powers[i][k as usize]);
            }
            for (idx, q) in g.terms() {
                let mut odd = Self::one(self.m, self.n);
                for j in idx.ids() {
                    odd = odd.mul(&c.zeta[j as usize - 1]);
                }
                out = out.add(&mono.mul(&odd).scale(q));
            }
        }
        Ok(out)
    }

    fn key(e: &[u32], idx: OddIndex) -> String {
        let ev = e.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        format!("{ev}|{}", idx.key())
    }

    fn parse_key(s: &str, m: usize, n: u32) -> Result<(Vec<u32>, OddIndex)> {
        let (ev, od) = s.split_once('|').ok_or_else(|| Error::InvalidInput(format!("term key {s:?} lacks '|'")))?;
        let e: std::result::Result<Vec<u32>, _> = ev.split_whitespace().map(str::parse).collect();
        let e = e.map_err(|_| Error::InvalidInput(format!("bad exponent vector in {s:?}")))?;
        if e.len() != m {
            return Err(Error::InvalidInput(format!("exponent vector in {s:?} should have length {m}")));
        }
        Ok((e, OddIndex::parse_key(od, n)?))
    }
}

impl RingElem for PolySuperFunction {
    fn zero_like(&self) -> Self {
        Self::zero(self.m, self.n)
    }
    fn one_like(&self) -> Self {
        Self::one(self.m, self.n)
    }
    fn r_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn r_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn r_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn r_is_zero(&self) -> bool {
        self.is_zero()
    }
}

#[derive(Serialize, Deserialize)]
struct PsfWire {
    m: usize,
    n: u32,
    terms: BTreeMap<String, String>,
}

impl Serialize for PolySuperFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut terms = BTreeMap::new();
        for (e, g) in &self.terms {
            for (idx, q) in g.terms() {
                terms.insert(Self::key(e, *idx), format_rational(q));
            }
        }
        PsfWire { m: self.m, n: self.n, terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolySuperFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = PsfWire::deserialize(d)?;
        let mut f = PolySuperFunction::zero(w.m, w.n);
        for (k, v) in w.terms {
            let (e, idx) = PolySuperFunction::parse_key(&k, w.m, w.n).map_err(|x| D::Error::custom(x.to_string()))?;
            let q = parse_rational(&v).map_err(|x| D::Error::custom(x.to_string()))?;
            f.insert(e, GE::monomial(w.n, idx, q));
        }
        Ok(f)
    }
}

/// Product of closed rational intervals, one per even variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Box {
    intervals: Vec<(Rational, Rational)>,
}

impl Box {
    pub fn new(intervals: Vec<(Rational, Rational)>) -> Result<Box> {
        if let Some((lo, hi)) = intervals.iter().find(|(lo, hi)| lo > hi) {
            return Err(Error::InvalidInput(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(Box { intervals })
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }
}

impl Serialize for Box {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[String; 2]> =
            self.intervals.iter().map(|(a, b)| [format_rational(a), format_rational(b)]).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Box {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<[String; 2]> = Vec::deserialize(d)?;
        let mut iv = Vec::with_capacity(v.len());
        for [a, b] in v {
            let lo = parse_rational(&a).map_err(|x| D::Error::custom(x.to_string()))?;
            let hi = parse_rational(&b).map_err(|x| D::Error::custom(x.to_string()))?;
            iv.push((lo, hi));
        }
        Box::new(iv).map_err(de_error)
    }
}

/// Change of coordinates (x|ξ) ↦ (y|ζ) with y even and ζ odd.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyChange {
    m: usize,
    n: u32,
    y: Vec<PolySuperFunction>,
    zeta: Vec<PolySuperFunction>,
}

impl PolyChange {
    pub fn new(m: usize, n: u32, y: Vec<PolySuperFunction>, zeta: Vec<PolySuperFunction>) -> Result<PolyChange> {
        let c = PolyChange { m, n, y, zeta };
        c.validate()?;
        Ok(c)
    }

    pub fn identity(m: usize, n: u32) -> PolyChange {
        PolyChange {
            m,
            n,
            y: (1..=m).map(|i| PolySuperFunction::x(m, n, i)).collect(),
            zeta: (1..=n).map(|j| PolySuperFunction::xi(m, n, j)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.y.len() != self.m || self.zeta.len() != self.n as usize {
            return Err(Error::InvalidShape(format!(
                "expected {} even and {} odd images, got {} and {}",
                self.m,
                self.n,
                self.y.len(),
                self.zeta.len()
            )));
        }
        for f in self.y.iter().chain(&self.zeta) {
            if f.m != self.m || f.n != self.n {
                return Err(Error::InvalidShape("image lives on a different space".into()));
            }
        }
        if let Some(i) = self.y.iter().position(|f| !f.has_parity(Parity::Even)) {
            return Err(Error::InvalidOperand(format!("even image y{} is not even", i + 1)));
        }
        if let Some(j) = self.zeta.iter().position(|f| !f.has_parity(Parity::Odd)) {
            return Err(Error::InvalidOperand(format!("odd image ζ{} is not odd", j + 1)));
        }
        Ok(())
    }

    pub fn y(&self) -> &[PolySuperFunction] {
        &self.y
    }

    pub fn zeta(&self) -> &[PolySuperFunction] {
        &self.zeta
    }
}

/// Applies ∂ξ_n ⋯ ∂ξ_1 (ξ_1 first) and integrates the remaining polynomial
/// over the box.
pub fn berezin_integral(f: &PolySuperFunction, bx: &Box) -> Result<Rational> {
    if bx.intervals.len() != f.m {
        return Err(Error::InvalidShape(format!("box has {} intervals for m = {}", bx.intervals.len(), f.m)));
    }
    let mut g = f.clone();
    for j in 1..=f.n {
        g = g.d_xi(j);
    }
    let mut total = Rational::zero();
    for (e, c) in g.reduced() {
        let mut term = c;
        for (k, (lo, hi)) in e.iter().zip(&bx.intervals) {
            let p = *k as i32 + 1;
            term *= (num_traits::pow(hi.clone(), p as usize) - num_traits::pow(lo.clone(), p as usize))
                / Rational::from_integer(p.into());
        }
        total += term;
    }
    Ok(total)
}

/// Berezinian of the super Jacobian of `c`, via det(A − B D⁻¹ C)·det(D)⁻¹.
/// Rows are targets (y, ζ), columns sources (x, ξ); odd derivatives act from
/// the left and the odd-by-even block carries a sign so that the matrix
/// multiplies as a supermatrix.
pub fn jacobian_berezinian(c: &PolyChange) -> Result<PolySuperFunction> {
    c.validate()?;
    let (m, n) = (c.m, c.n);
    let proto = PolySuperFunction::one(m, n);
    let a: Vec<Vec<_>> = c.y.iter().map(|y| (1..=m).map(|i| y.d_x(i)).collect()).collect();
    let b: Vec<Vec<_>> = c.y.iter().map(|y| (1..=n).map(|j| y.d_xi(j)).collect()).collect();
    let cc: Vec<Vec<_>> = c.zeta.iter().map(|z| (1..=m).map(|i| z.d_x(i).neg()).collect()).collect();
    let d: Vec<Vec<_>> = c.zeta.iter().map(|z| (1..=n).map(|j| z.d_xi(j)).collect()).collect();

    let det_d = linalg::det_bird(&d, &proto);
    let det_d_inv = det_d.inverse().ok_or_else(|| {
        Error::NonInvertibleJacobian("odd block determinant is not a unit polynomial superfunction".into())
    })?;
    let adj_d = linalg::adjugate(&d, &proto);
    let mut schur = a;
    for (i, row) in schur.iter_mut().enumerate() {
        for (k, entry) in row.iter_mut().enumerate() {
            let mut corr = PolySuperFunction::zero(m, n);
            for (p, bp) in b[i].iter().enumerate() {
                if bp.is_zero() {
                    continue;
                }
                for (q, cq) in cc.iter().enumerate() {
                    if adj_d[p][q].is_zero() || cq[k].is_zero() {
                        continue;
                    }
                    corr = corr.add(&bp.mul(&adj_d[p][q]).mul(&cq[k]));
                }
            }
            *entry = entry.sub(&corr.mul(&det_d_inv));
        }
    }
    let det_s = linalg::det_bird(&schur, &proto);
    if det_s.reduced().is_empty() {
        return Err(Error::NonInvertibleJacobian("even block determinant vanishes".into()));
    }
    Ok(det_s.mul(&det_d_inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::supernum::{rat, rat_int};

    fn unit_box() -> Box {
        Box::new(vec![(rat_int(0), rat_int(1))]).unwrap()
    }

    #[test]
    fn integral_examples() {
        let f = PolySuperFunction::from_terms(1, 2, [(vec![2], vec![1, 2], rat_int(1))]).unwrap();
        assert_eq!(berezin_integral(&f, &unit_box()).unwrap(), rat(1, 3));
        let g = PolySuperFunction::from_terms(1, 2, [(vec![2], vec![1], rat_int(1))]).unwrap();
        assert_eq!(berezin_integral(&g, &unit_box()).unwrap(), rat_int(0));
        let h = PolySuperFunction::constant(1, 0, rat_int(5));
        let b = Box::new(vec![(rat_int(2), rat_int(3))]).unwrap();
        assert_eq!(berezin_integral(&h, &b).unwrap(), rat_int(5));
    }

    #[test]
    fn reversed_odd_order_flips_sign() {
        let f = PolySuperFunction::xi(1, 2, 2).mul(&PolySuperFunction::xi(1, 2, 1));
        assert_eq!(berezin_integral(&f, &unit_box()).unwrap(), rat_int(-1));
    }

    #[test]
    fn jacobian_examples() {
        assert_eq!(jacobian_berezinian(&PolyChange::identity(2, 3)).unwrap(), PolySuperFunction::one(2, 3));

        let y = PolySuperFunction::x(1, 1, 1).scale(&rat_int(4));
        let z = PolySuperFunction::xi(1, 1, 1).scale(&rat_int(2));
        let c = PolyChange::new(1, 1, vec![y], vec![z]).unwrap();
        assert_eq!(jacobian_berezinian(&c).unwrap(), PolySuperFunction::constant(1, 1, rat_int(2)));

        let xi12 = PolySuperFunction::xi(1, 2, 1).mul(&PolySuperFunction::xi(1, 2, 2));
        let y = PolySuperFunction::x(1, 2, 1).add(&xi12);
        let c = PolyChange::new(1, 2, vec![y], vec![PolySuperFunction::xi(1, 2, 1), PolySuperFunction::xi(1, 2, 2)])
            .unwrap();
        assert_eq!(jacobian_berezinian(&c).unwrap(), PolySuperFunction::one(1, 2));
    }

    #[test]
    fn non_unit_odd_block_is_rejected() {
        let y = PolySuperFunction::x(1, 1, 1);
        let z = PolySuperFunction::xi(1, 1, 1).mul(&PolySuperFunction::x(1, 1, 1));
        let c = PolyChange::new(1, 1, vec![y], vec![z]).unwrap();
        assert_eq!(jacobian_berezinian(&c).unwrap_err().name(), "NonInvertibleJacobian");
    }

    #[test]
    fn json_format() {
        let f = PolySuperFunction::from_terms(1, 2, [(vec![2], vec![1, 2], rat_int(1))]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"m":1,"n":2,"terms":{"2|1 2":"1"}}"#);
        let back: PolySuperFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
