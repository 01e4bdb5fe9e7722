//! Exact arithmetic in the Grassmann algebra Λ(τ₁, …, τ_L) over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Largest supported number of odd generators.
pub const MAX_GENERATORS: u32 = 63;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational: {s:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rational::new(n, d))
    } else {
        let n: BigInt = t.parse().map_err(|_| bad())?;
        Ok(Rational::from_integer(n))
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serde adapter writing a rational as a decimal string such as `"-3/4"`.
pub mod qstr {
    use super::{format_rational, parse_rational, Rational};
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn from_bit(b: usize) -> Parity {
        if b % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn add(self, other: Parity) -> Parity {
        Parity::from_bit(self.bit() + other.bit())
    }
}

/// A sorted, duplicate-free set of generator ids, stored as a bitmask
/// (bit `i - 1` stands for τᵢ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OddIndex(u64);

impl OddIndex {
    pub const EMPTY: OddIndex = OddIndex(0);

    pub fn from_ids(ids: &[u32], l: u32) -> Result<OddIndex> {
        let mut mask = 0u64;
        let mut prev = 0u32;
        for &i in ids {
            if i == 0 || i > l {
                return Err(Error::InvalidOperand(format!("generator {i} outside 1..={l}")));
            }
            if i <= prev {
                return Err(Error::InvalidOperand(format!(
                    "odd index {ids:?} is not strictly increasing"
                )));
            }
            prev = i;
            mask |= 1 << (i - 1);
        }
        Ok(OddIndex(mask))
    }

    pub fn from_mask(mask: u64) -> OddIndex {
        OddIndex(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn parity(self) -> Parity {
        Parity::from_bit(self.degree() as usize)
    }

    pub fn ids(self) -> Vec<u32> {
        (0..64).filter(|b| self.0 >> b & 1 == 1).map(|b| b + 1).collect()
    }

    pub fn contains(self, i: u32) -> bool {
        i >= 1 && i <= 64 && self.0 >> (i - 1) & 1 == 1
    }

    /// Product of two monomials: the merged index and the sign from sorting,
    /// or `None` when a generator repeats.
    pub fn product(self, other: OddIndex) -> Option<(OddIndex, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut swaps = 0u32;
        let mut rest = other.0;
        while rest != 0 {
            let j = rest.trailing_zeros();
            rest &= rest - 1;
            swaps += (self.0 >> j >> 1).count_ones();
        }
        Some((OddIndex(self.0 | other.0), swaps % 2 == 1))
    }

    pub fn key(self) -> String {
        self.ids().iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
    }

    pub fn parse_key(s: &str, l: u32) -> Result<OddIndex> {
        let ids: std::result::Result<Vec<u32>, _> = s.split_whitespace().map(str::parse).collect();
        let ids = ids.map_err(|_| Error::InvalidInput(format!("bad odd index {s:?}")))?;
        OddIndex::from_ids(&ids, l)
    }
}

/// Element of Λ(τ₁, …, τ_L) with rational coefficients. Zero coefficients are
/// never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrassmannElement {
    l: u32,
    terms: BTreeMap<OddIndex, Rational>,
}

pub type GE = GrassmannElement;

impl GrassmannElement {
    pub fn zero(l: u32) -> GE {
        assert!(l <= MAX_GENERATORS, "at most {MAX_GENERATORS} generators");
        GE { l, terms: BTreeMap::new() }
    }

    pub fn one(l: u32) -> GE {
        GE::scalar(l, Rational::one())
    }

    pub fn scalar(l: u32, q: Rational) -> GE {
        let mut e = GE::zero(l);
        if !q.is_zero() {
            e.terms.insert(OddIndex::EMPTY, q);
        }
        e
    }

    pub fn int(l: u32, n: i64) -> GE {
        GE::scalar(l, rat_int(n))
    }

    /// The generator τᵢ.
    pub fn generator(l: u32, i: u32) -> GE {
        assert!(i >= 1 && i <= l, "generator {i} outside 1..={l}");
        GE::monomial(l, OddIndex(1 << (i - 1)), Rational::one())
    }

    pub fn monomial(l: u32, idx: OddIndex, q: Rational) -> GE {
        let mut e = GE::zero(l);
        if !q.is_zero() {
            e.terms.insert(idx, q);
        }
        e
    }

    pub fn from_terms<I>(l: u32, terms: I) -> Result<GE>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        if l > MAX_GENERATORS {
            return Err(Error::InvalidOperand(format!("L = {l} exceeds {MAX_GENERATORS}")));
        }
        let mut e = GE::zero(l);
        for (ids, q) in terms {
            let idx = OddIndex::from_ids(&ids, l)?;
            e.add_term(idx, q);
        }
        Ok(e)
    }

    fn add_term(&mut self, idx: OddIndex, q: Rational) {
        if q.is_zero() {
            return;
        }
        let slot = self.terms.entry(idx).or_insert_with(Rational::zero);
        *slot += q;
        if slot.is_zero() {
            self.terms.remove(&idx);
        }
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OddIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: OddIndex) -> Rational {
        self.terms.get(&idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn body(&self) -> Rational {
        self.coeff(OddIndex::EMPTY)
    }

    pub fn soul(&self) -> GE {
        let mut s = self.clone();
        s.terms.remove(&OddIndex::EMPTY);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.body().is_one()
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|k| k.parity() == Parity::Even)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|k| k.parity() == Parity::Odd)
    }

    pub fn has_parity(&self, p: Parity) -> bool {
        match p {
            Parity::Even => self.is_even(),
            Parity::Odd => self.is_odd(),
        }
    }

    /// Parity of a nonzero homogeneous element; `None` for zero or mixed.
    pub fn parity(&self) -> Option<Parity> {
        if self.is_zero() {
            None
        } else if self.is_even() {
            Some(Parity::Even)
        } else if self.is_odd() {
            Some(Parity::Odd)
        } else {
            None
        }
    }

    pub fn part(&self, p: Parity) -> GE {
        GE {
            l: self.l,
            terms: self.terms.iter().filter(|(k, _)| k.parity() == p).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    pub fn even_part(&self) -> GE {
        self.part(Parity::Even)
    }

    pub fn odd_part(&self) -> GE {
        self.part(Parity::Odd)
    }

    /// Grade involution: negates the odd part.
    pub fn involution(&self) -> GE {
        GE {
            l: self.l,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, if k.parity() == Parity::Odd { -v.clone() } else { v.clone() }))
                .collect(),
        }
    }

    fn check_l(&self, other: &GE) -> Result<()> {
        if self.l != other.l {
            return Err(Error::InvalidOperand(format!(
                "mismatched generator counts L = {} and L = {}",
                self.l, other.l
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &GE) -> Result<GE> {
        self.check_l(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(*k, v.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &GE) -> Result<GE> {
        self.check_l(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(*k, -v.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &GE) -> Result<GE> {
        self.check_l(other)?;
        let mut out = GE::zero(self.l);
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                if let Some((k, neg)) = ka.product(*kb) {
                    let q = va * vb;
                    out.add_term(k, if neg { -q } else { q });
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, q: &Rational) -> GE {
        if q.is_zero() {
            return GE::zero(self.l);
        }
        GE { l: self.l, terms: self.terms.iter().map(|(k, v)| (*k, v * q)).collect() }
    }

    pub fn pow(&self, n: u32) -> GE {
        let mut acc = GE::one(self.l);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Two-sided inverse `body⁻¹ Σ (−soul/body)^k`; the sum stops once the
    /// nilpotent powers vanish.
    pub fn inverse(&self) -> Result<GE> {
        let b = self.body();
        if b.is_zero() {
            return Err(Error::NotInvertible(format!("element {self} has zero body")));
        }
        let binv = b.recip();
        let x = self.soul().scale(&-binv.clone());
        let mut term = GE::one(self.l);
        let mut sum = GE::one(self.l);
        loop {
            term = &term * &x;
            if term.is_zero() {
                break;
            }
            sum = &sum + &term;
        }
        Ok(sum.scale(&binv))
    }

    /// Left derivative ∂/∂τᵢ: move τᵢ to the front of each monomial, then strip it.
    pub fn derive(&self, i: u32) -> Result<GE> {
        if i == 0 || i > self.l {
            return Err(Error::InvalidOperand(format!("generator {i} outside 1..={}", self.l)));
        }
        let bit = 1u64 << (i - 1);
        let mut out = GE::zero(self.l);
        for (k, v) in &self.terms {
            if k.0 & bit != 0 {
                let before = (k.0 & (bit - 1)).count_ones();
                let q = if before % 2 == 1 { -v.clone() } else { v.clone() };
                out.add_term(OddIndex(k.0 & !bit), q);
            }
        }
        Ok(out)
    }

    /// exp of an element with zero body, as a finite sum.
    pub fn exp_nilpotent(&self) -> Result<GE> {
        if !self.body().is_zero() {
            return Err(Error::NotNilpotent(format!("element {self} has nonzero body")));
        }
        let mut term = GE::one(self.l);
        let mut sum = GE::one(self.l);
        let mut k = 1i64;
        loop {
            term = (&term * self).scale(&rat(1, k));
            if term.is_zero() {
                return Ok(sum);
            }
            sum = &sum + &term;
            k += 1;
        }
    }
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, v) in &self.terms {
            let (sign, mag) = if v.is_negative() { ("-", -v.clone()) } else { ("+", v.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mono: String = k.ids().iter().map(|i| format!("t{i}")).collect::<Vec<_>>().join("*");
            if mono.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", format_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GE[L={}]({self})", self.l)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&GE> for &GE {
            type Output = GE;
            fn $m(self, rhs: &GE) -> GE {
                self.$f(rhs).expect("Grassmann operands must share L")
            }
        }
        impl $tr<GE> for GE {
            type Output = GE;
            fn $m(self, rhs: GE) -> GE {
                (&self).$f(&rhs).expect("Grassmann operands must share L")
            }
        }
        impl $tr<&GE> for GE {
            type Output = GE;
            fn $m(self, rhs: &GE) -> GE {
                (&self).$f(rhs).expect("Grassmann operands must share L")
            }
        }
        impl $tr<GE> for &GE {
            type Output = GE;
            fn $m(self, rhs: GE) -> GE {
                self.$f(&rhs).expect("Grassmann operands must share L")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &GE {
    type Output = GE;
    fn neg(self) -> GE {
        self.scale(&-Rational::one())
    }
}

impl Neg for GE {
    type Output = GE;
    fn neg(self) -> GE {
        (&self).neg()
    }
}

/// Which Grassmann operation `g_arith` performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GOp {
    Add,
    Mul,
}

pub fn g_arith(a: &GE, b: &GE, which: GOp) -> Result<GE> {
    match which {
        GOp::Add => a.try_add(b),
        GOp::Mul => a.try_mul(b),
    }
}

pub fn g_inverse(a: &GE) -> Result<GE> {
    a.inverse()
}

pub fn g_derive(a: &GE, i: u32) -> Result<GE> {
    a.derive(i)
}

#[derive(Serialize, Deserialize)]
struct GeWire {
    #[serde(rename = "L")]
    l: u32,
    terms: BTreeMap<String, String>,
}

impl Serialize for GrassmannElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self.terms.iter().map(|(k, v)| (k.key(), format_rational(v))).collect();
        GeWire { l: self.l, terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GrassmannElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = GeWire::deserialize(d)?;
        if w.l > MAX_GENERATORS {
            return Err(D::Error::custom(format!("L = {} exceeds {MAX_GENERATORS}", w.l)));
        }
        let mut e = GE::zero(w.l);
        for (k, v) in w.terms {
            let idx = OddIndex::parse_key(&k, w.l).map_err(|err| D::Error::custom(err.to_string()))?;
            let q = parse_rational(&v).map_err(|err| D::Error::custom(err.to_string()))?;
            e.add_term(idx, q);
        }
        Ok(e)
    }
}

/// Minimal ring interface used by the division-free determinant code, so the
/// same routines serve Grassmann scalars and polynomial superfunctions.
pub trait RingElem: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn r_add(&self, o: &Self) -> Self;
    fn r_sub(&self, o: &Self) -> Self;
    fn r_mul(&self, o: &Self) -> Self;
    fn r_is_zero(&self) -> bool;
    fn r_neg(&self) -> Self {
        self.zero_like().r_sub(self)
    }
}

impl RingElem for GE {
    fn zero_like(&self) -> GE {
        GE::zero(self.l)
    }
    fn one_like(&self) -> GE {
        GE::one(self.l)
    }
    fn r_add(&self, o: &GE) -> GE {
        self + o
    }
    fn r_sub(&self, o: &GE) -> GE {
        self - o
    }
    fn r_mul(&self, o: &GE) -> GE {
        self * o
    }
    fn r_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl RingElem for Rational {
    fn zero_like(&self) -> Rational {
        Rational::zero()
    }
    fn one_like(&self) -> Rational {
        Rational::one()
    }
    fn r_add(&self, o: &Rational) -> Rational {
        self + o
    }
    fn r_sub(&self, o: &Rational) -> Rational {
        self - o
    }
    fn r_mul(&self, o: &Rational) -> Rational {
        self * o
    }
    fn r_is_zero(&self) -> bool {
        self.is_zero()
    }
}
