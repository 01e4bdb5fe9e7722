//! Truncated super Laurent series on a 1|1 disk, superconformal changes of
//! coordinates (NS and Ramond), residues, section pullbacks and the α map.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{de_error, Error, Result};
use crate::supermatrix::{self, BlockShape, MatrixParity, SuperMatrix};
use crate::supernum::{Parity, Rational, GE};

/// Upper window bound standing for "exact": no truncation applies.
pub const EXACT: i64 = 1 << 40;

/// Σ (a_k + b_k θ) z^k, known to be zero below `k_min` and known exactly up
/// to `k_max`; nothing is asserted about exponents above `k_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperLaurentSeries {
    l: u32,
    k_min: i64,
    k_max: i64,
    terms: BTreeMap<i64, (GE, GE)>,
}

pub type Series = SuperLaurentSeries;

fn clamp(k: i64) -> i64 {
    k.min(EXACT)
}

impl SuperLaurentSeries {
    pub fn zero(l: u32, k_min: i64, k_max: i64) -> Series {
        Series { l, k_min, k_max: clamp(k_max), terms: BTreeMap::new() }
    }

    /// Builds a series from explicit (k, a_k, b_k) data on the window.
    pub fn new<I>(l: u32, k_min: i64, k_max: i64, coeffs: I) -> Result<Series>
    where
        I: IntoIterator<Item = (i64, GE, GE)>,
    {
        if k_min > k_max {
            return Err(Error::EmptyWindow(format!("k_min = {k_min} > k_max = {k_max}")));
        }
        let mut s = Series::zero(l, k_min, k_max);
        for (k, a, b) in coeffs {
            if k < k_min || k > k_max {
                return Err(Error::InvalidInput(format!("coefficient z^{k} outside window [{k_min}, {k_max}]")));
            }
            if a.l() != l || b.l() != l {
                return Err(Error::InvalidOperand(format!("coefficient over L = {} in a series over L = {l}", a.l())));
            }
            s.add_at(k, a, b);
        }
        Ok(s)
    }

    /// The exact series c·z^k (+ d·z^k θ).
    pub fn monomial(k: i64, a: GE, b: GE) -> Series {
        let l = a.l();
        let mut s = Series::zero(l, k, EXACT);
        s.add_at(k, a, b);
        s
    }

    pub fn constant(c: GE) -> Series {
        let l = c.l();
        Series::monomial(0, c, GE::zero(l))
    }

    pub fn one(l: u32) -> Series {
        Series::constant(GE::one(l))
    }

    pub fn z(l: u32) -> Series {
        Series::monomial(1, GE::one(l), GE::zero(l))
    }

    pub fn theta(l: u32) -> Series {
        Series::monomial(0, GE::zero(l), GE::one(l))
    }

    /// Even-only series Σ a_k z^k from a coefficient list starting at k_min.
    pub fn from_even(l: u32, k_min: i64, k_max: i64, a: &[GE]) -> Result<Series> {
        Series::new(l, k_min, k_max, a.iter().enumerate().map(|(i, c)| (k_min + i as i64, c.clone(), GE::zero(l))))
    }

    fn add_at(&mut self, k: i64, a: GE, b: GE) {
        if a.is_zero() && b.is_zero() {
            return;
        }
        let l = self.l;
        let slot = self.terms.entry(k).or_insert_with(|| (GE::zero(l), GE::zero(l)));
        slot.0 = &slot.0 + &a;
        slot.1 = &slot.1 + &b;
        if slot.0.is_zero() && slot.1.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    pub fn is_exact(&self) -> bool {
        self.k_max >= EXACT / 2
    }

    pub fn terms(&self) -> &BTreeMap<i64, (GE, GE)> {
        &self.terms
    }

    /// (a_k, b_k); zero below the window, an error above it.
    pub fn coeff(&self, k: i64) -> Result<(GE, GE)> {
        if k > self.k_max {
            return Err(Error::InsufficientPrecision(format!("z^{k} lies above k_max = {}", self.k_max)));
        }
        Ok(self.terms.get(&k).cloned().unwrap_or_else(|| (GE::zero(self.l), GE::zero(self.l))))
    }

    pub fn a(&self, k: i64) -> Result<GE> {
        Ok(self.coeff(k)?.0)
    }

    pub fn b(&self, k: i64) -> Result<GE> {
        Ok(self.coeff(k)?.1)
    }

    /// First exponent with a nonzero coefficient, or k_max + 1.
    pub fn val(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(self.k_max.saturating_add(1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_parity(&self, p: Parity) -> bool {
        self.terms.values().all(|(a, b)| a.has_parity(p) && b.has_parity(p.flip()))
    }

    fn check_l(&self, o: &Series) -> Result<()> {
        if self.l != o.l {
            return Err(Error::InvalidOperand(format!("series over L = {} and L = {}", self.l, o.l)));
        }
        Ok(())
    }

    fn map(&self, k_max: i64, f: impl Fn(i64, &GE, &GE) -> Option<(i64, GE, GE)>) -> Series {
        let mut out = Series::zero(self.l, self.k_min, k_max);
        for (&k, (a, b)) in &self.terms {
            if let Some((k2, a2, b2)) = f(k, a, b) {
                if k2 <= out.k_max {
                    out.k_min = out.k_min.min(k2);
                    out.add_at(k2, a2, b2);
                }
            }
        }
        out
    }

    /// Restricts the window to k ≤ k_max.
    pub fn truncate(&self, k_max: i64) -> Result<Series> {
        if k_max < self.k_min {
            return Err(Error::EmptyWindow(format!("cannot truncate [{}, {}] at {k_max}", self.k_min, self.k_max)));
        }
        let k_max = k_max.min(self.k_max);
        Ok(self.map(k_max, |k, a, b| Some((k, a.clone(), b.clone()))))
    }

    pub fn neg(&self) -> Series {
        self.map(self.k_max, |k, a, b| Some((k, -a, -b)))
    }

    /// Left multiplication by a Grassmann scalar.
    pub fn scale(&self, c: &GE) -> Series {
        self.map(self.k_max, |k, a, b| Some((k, c * a, c * b)))
    }

    pub fn scale_q(&self, q: &Rational) -> Series {
        self.map(self.k_max, |k, a, b| Some((k, a.scale(q), b.scale(q))))
    }

    /// Multiplication by z^n.
    pub fn shift(&self, n: i64) -> Series {
        let mut out = Series::zero(self.l, self.k_min + n, clamp(self.k_max + n));
        for (&k, (a, b)) in &self.terms {
            out.add_at(k + n, a.clone(), b.clone());
        }
        out
    }

    /// The grade involution applied coefficient-wise (θ itself untouched).
    pub fn hat(&self) -> Series {
        self.map(self.k_max, |k, a, b| Some((k, a.involution(), b.involution())))
    }

    /// θ-free part Σ a_k z^k.
    pub fn a_part(&self) -> Series {
        self.map(self.k_max, |k, a, _| Some((k, a.clone(), GE::zero(a.l()))))
    }

    /// θ-coefficient Σ b_k z^k as a θ-free series.
    pub fn b_part(&self) -> Series {
        self.map(self.k_max, |k, _, b| Some((k, b.clone(), GE::zero(b.l()))))
    }

    pub fn try_add(&self, o: &Series) -> Result<Series> {
        self.check_l(o)?;
        let mut out = Series::zero(self.l, self.k_min.min(o.k_min), self.k_max.min(o.k_max));
        for (&k, (a, b)) in self.terms.iter().chain(&o.terms) {
            if k <= out.k_max {
                out.add_at(k, a.clone(), b.clone());
            }
        }
        Ok(out)
    }

    pub fn try_sub(&self, o: &Series) -> Result<Series> {
        self.try_add(&o.neg())
    }

    /// Product with window [k_min_x + k_min_y, min(val_x + k_max_y, val_y + k_max_x)].
    pub fn try_mul(&self, o: &Series) -> Result<Series> {
        self.check_l(o)?;
        let k_max = clamp(self.val().saturating_add(o.k_max).min(o.val().saturating_add(self.k_max)));
        Ok(raw_mul(self, o, self.k_min + o.k_min, k_max))
    }

    pub fn try_div(&self, o: &Series) -> Result<Series> {
        self.check_l(o)?;
        let cap = if self.is_exact() { None } else { Some(self.k_max - self.val() - o.val().min(0)) };
        let inv = o.inverse_to(cap)?;
        self.try_mul(&inv)
    }

    /// Two-sided inverse. The leading body-invertible coefficient (index
    /// `ord`) is factored out; everything below it is nilpotent, which bounds
    /// how far precision is lost.
    pub fn inverse(&self) -> Result<Series> {
        self.inverse_to(None)
    }

    fn inverse_to(&self, cap: Option<i64>) -> Result<Series> {
        let l = self.l;
        let ord = self
            .terms
            .iter()
            .find(|(_, (a, _))| !a.body().is_zero())
            .map(|(&k, _)| k)
            .ok_or_else(|| Error::DivisionByNonUnit("no coefficient with invertible body in the window".into()))?;
        let start = self.val();
        let d = (l as i64 + 1) * (ord - start);
        let mut k_inv = if self.is_exact() { EXACT } else { self.k_max - 2 * ord - d };
        if let Some(c) = cap {
            k_inv = k_inv.min(c);
        }
        let lo = -ord - d;
        if k_inv < lo {
            return Err(Error::EmptyWindow(format!("quotient window [{lo}, {k_inv}] is empty")));
        }
        let work = k_inv + ord + d;
        let c = self.terms[&ord].0.body();
        let c_inv = c.recip();
        // u = z^{-ord}·self = c + w
        let mut w = self.shift(-ord);
        w.add_at(0, GE::scalar(l, -c.clone()), GE::zero(l));
        let step = w.scale_q(&-c_inv.clone());
        if work >= EXACT / 2 && step.terms.keys().any(|&k| k > 0) {
            return Err(Error::InsufficientPrecision("inverse of an exact non-monomial series needs a window".into()));
        }
        let mut term = Series::one(l);
        let mut sum = Series::one(l);
        loop {
            term = raw_mul(&term, &step, term.k_min + step.k_min, work);
            if term.is_zero() {
                break;
            }
            sum = raw_add(&sum, &term, work);
        }
        let inv = sum.scale_q(&c_inv).shift(-ord);
        let mut out = Series::zero(l, lo, k_inv);
        for (&k, (a, b)) in &inv.terms {
            if k <= k_inv {
                out.k_min = out.k_min.min(k);
                out.add_at(k, a.clone(), b.clone());
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: i64) -> Result<Series> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut out = Series::one(self.l);
        for _ in 0..n.unsigned_abs() {
            out = out.try_mul(&base)?;
        }
        Ok(out)
    }

    /// ∂/∂z.
    pub fn d_z(&self) -> Series {
        self.map(clamp(self.k_max - 1), |k, a, b| {
            let q = Rational::from_integer(k.into());
            Some((k - 1, a.scale(&q), b.scale(&q)))
        })
        .with_k_min(self.k_min - 1)
    }

    fn with_k_min(mut self, k_min: i64) -> Series {
        self.k_min = self.k_min.min(k_min);
        self
    }

    /// Left ∂/∂θ: (a + bθ) ↦ b̂.
    pub fn d_theta_left(&self) -> Series {
        self.map(self.k_max, |k, _, b| Some((k, b.involution(), GE::zero(b.l()))))
    }

    /// Right ∂/∂θ: (a + bθ) ↦ b.
    pub fn d_theta_right(&self) -> Series {
        self.b_part()
    }

    /// D_θ = ∂_θ + θ∂_z (NS) or D*_θ = ∂_θ + zθ∂_z (Ramond).
    pub fn d_theta(&self, model: Model) -> Series {
        let da = self.a_part().d_z().hat();
        let da = match model {
            Model::NS => da,
            Model::Ramond => da.shift(1),
        };
        let mut out = Series::zero(self.l, self.k_min.min(da.k_min), self.k_max.min(da.k_max));
        for (&k, (_, b)) in &self.terms {
            if k <= out.k_max {
                out.add_at(k, b.involution(), GE::zero(self.l));
            }
        }
        for (&k, (a, _)) in &da.terms {
            if k <= out.k_max {
                out.add_at(k, GE::zero(self.l), a.clone());
            }
        }
        out
    }

    /// Coefficient-wise equality on the common window.
    pub fn agrees_with(&self, o: &Series) -> bool {
        let top = self.k_max.min(o.k_max);
        let keys: std::collections::BTreeSet<i64> =
            self.terms.keys().chain(o.terms.keys()).copied().filter(|&k| k <= top).collect();
        keys.into_iter().all(|k| self.terms.get(&k) == o.terms.get(&k))
    }
}

fn raw_add(x: &Series, y: &Series, k_max: i64) -> Series {
    let mut out = Series::zero(x.l, x.k_min.min(y.k_min), k_max);
    for (&k, (a, b)) in x.terms.iter().chain(&y.terms) {
        if k <= k_max {
            out.add_at(k, a.clone(), b.clone());
        }
    }
    out
}

/// (a + bθ)(c + dθ) = ac + (ad + b ĉ)θ, keeping exponents ≤ k_max.
fn raw_mul(x: &Series, y: &Series, k_min: i64, k_max: i64) -> Series {
    let l = x.l;
    let mut out = Series::zero(l, k_min, k_max);
    for (&i, (a1, b1)) in &x.terms {
        for (&j, (a2, b2)) in &y.terms {
            let k = i + j;
            if k > k_max {
                continue;
            }
            let a = a1 * a2;
            let b = &(a1 * b2) + &(b1 * &a2.involution());
            out.add_at(k, a, b);
        }
    }
    out
}

macro_rules! series_op {
    ($tr:ident, $m:ident, $f:ident) => {
        impl std::ops::$tr<&Series> for &Series {
            type Output = Series;
            fn $m(self, o: &Series) -> Series {
                self.$f(o).expect("series over the same Grassmann algebra")
            }
        }
    };
}
series_op!(Add, add, try_add);
series_op!(Sub, sub, try_sub);
series_op!(Mul, mul, try_mul);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SOp {
    #[serde(rename = "add")]
    Add,
    #[serde(rename = "mul")]
    Mul,
    #[serde(rename = "div")]
    Div,
}

pub fn s_arith(x: &Series, y: &Series, which: SOp) -> Result<Series> {
    match which {
        SOp::Add => x.try_add(y),
        SOp::Mul => x.try_mul(y),
        SOp::Div => x.try_div(y),
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesWire {
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    l: Option<u32>,
    k_min: i64,
    k_max: i64,
    coeffs: BTreeMap<String, (GE, GE)>,
}

impl Serialize for SuperLaurentSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs = self.terms.iter().map(|(k, ab)| (k.to_string(), ab.clone())).collect();
        let l = self.terms.is_empty().then_some(self.l);
        SeriesWire { l, k_min: self.k_min, k_max: self.k_max, coeffs }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SuperLaurentSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = SeriesWire::deserialize(d)?;
        let l = w.coeffs.values().next().map(|(a, _)| a.l()).or(w.l).unwrap_or(0);
        let mut items = Vec::with_capacity(w.coeffs.len());
        for (k, (a, b)) in w.coeffs {
            let k: i64 = k.trim().parse().map_err(|_| D::Error::custom(format!("bad exponent {k:?}")))?;
            items.push((k, a, b));
        }
        Series::new(l, w.k_min, w.k_max, items).map_err(de_error)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    NS,
    Ramond,
}

/// New coordinates (z', θ') written as series in the old ones (z, θ).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskChange {
    pub z_image: Series,
    pub theta_image: Series,
    pub model: Model,
}

impl DiskChange {
    pub fn new(z_image: Series, theta_image: Series, model: Model) -> Result<DiskChange> {
        let c = DiskChange { z_image, theta_image, model };
        c.validate()?;
        Ok(c)
    }

    pub fn identity(l: u32, model: Model) -> DiskChange {
        DiskChange { z_image: Series::z(l), theta_image: Series::theta(l), model }
    }

    pub fn l(&self) -> u32 {
        self.z_image.l
    }

    pub fn validate(&self) -> Result<()> {
        self.z_image.check_l(&self.theta_image)?;
        if !self.z_image.has_parity(Parity::Even) {
            return Err(Error::InvalidOperand("z image is not even".into()));
        }
        if !self.theta_image.has_parity(Parity::Odd) {
            return Err(Error::InvalidOperand("θ image is not odd".into()));
        }
        let z0 = self.z_image.a(0).unwrap_or_else(|_| GE::zero(self.l()));
        if self.z_image.terms.iter().any(|(&k, (a, _))| k < 0 && !a.body().is_zero()) || !z0.body().is_zero() {
            return Err(Error::InvalidOperand("z image must vanish at the origin".into()));
        }
        Ok(())
    }

    /// The change applied after `inner`: z'' = Z(inner), θ'' = Θ(inner).
    pub fn after(&self, inner: &DiskChange) -> Result<DiskChange> {
        if self.model != inner.model {
            return Err(Error::InvalidOperand("cannot compose NS and Ramond changes".into()));
        }
        DiskChange::new(compose(&self.z_image, inner)?, compose(&self.theta_image, inner)?, self.model)
    }
}

/// f(Z, Θ) for the images (Z, Θ) of `c`.
pub fn compose(f: &Series, c: &DiskChange) -> Result<Series> {
    f.check_l(&c.z_image)?;
    let l = f.l;
    let zi = &c.z_image;
    let ord = zi
        .terms
        .iter()
        .find(|(_, (a, _))| !a.body().is_zero())
        .map(|(&k, _)| k)
        .ok_or_else(|| Error::DivisionByNonUnit("z image has no invertible coefficient".into()))?;
    if ord < 1 {
        return Err(Error::InvalidOperand("z image must vanish at the origin".into()));
    }
    let dz = (l as i64 + 1) * (ord - zi.val().min(ord));
    let vt = c.theta_image.val().min(0);
    let tail = if f.is_exact() { EXACT } else { (f.k_max + 1) * ord - dz + vt - 1 };
    let lowest = f.k_min * ord - dz + vt;
    if tail < lowest.min(f.k_min) {
        return Err(Error::InsufficientPrecision("composition leaves no known coefficients".into()));
    }

    let mut pos = vec![Series::one(l)];
    let mut neg = vec![Series::one(l)];
    let mut acc = Series::zero(l, lowest.min(tail), tail);
    for (&k, (a, b)) in &f.terms {
        let p = if k >= 0 {
            while pos.len() <= k as usize {
                let next = pos.last().unwrap().try_mul(zi)?;
                pos.push(next);
            }
            pos[k as usize].clone()
        } else {
            if neg.len() == 1 {
                let cap = if tail >= EXACT / 2 { None } else { Some(tail + (-f.k_min) * ord + dz + 1) };
                neg.push(zi.inverse_to(cap)?);
            }
            while neg.len() <= (-k) as usize {
                let next = neg.last().unwrap().try_mul(&neg[1])?;
                neg.push(next);
            }
            neg[(-k) as usize].clone()
        };
        let mut t = p.scale(a);
        if !b.is_zero() {
            t = t.try_add(&c.theta_image.try_mul(&p)?.scale(b))?;
        }
        acc = acc.try_add(&t)?;
    }
    if acc.k_max < acc.k_min {
        return Err(Error::InsufficientPrecision("composition window is empty".into()));
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScWitness {
    pub superconformal: bool,
    pub residual: Series,
}

/// NS: D_θZ − Θ·D_θΘ. Ramond: (∂^R_θ Z − ZΘ∂^R_θΘ) + (∂_z Z − ZΘ∂_zΘ)·zθ.
pub fn is_superconformal(c: &DiskChange) -> Result<ScWitness> {
    c.validate()?;
    let (zi, ti) = (&c.z_image, &c.theta_image);
    let residual = match c.model {
        Model::NS => zi.d_theta(Model::NS).try_sub(&ti.try_mul(&ti.d_theta(Model::NS))?)?,
        Model::Ramond => {
            let zt = zi.try_mul(ti)?;
            let odd = zi.d_theta_right().try_sub(&zt.try_mul(&ti.d_theta_right())?)?;
            let even = zi.d_z().try_sub(&zt.try_mul(&ti.d_z())?)?;
            let ztheta = Series::z(c.l()).try_mul(&Series::theta(c.l()))?;
            odd.try_add(&even.try_mul(&ztheta)?)?
        }
    };
    if residual.k_max < residual.k_min {
        return Err(Error::InsufficientPrecision("residual window is empty".into()));
    }
    Ok(ScWitness { superconformal: residual.is_zero(), residual })
}

/// f(z|θ)·[dz|dθ]^weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BerSection {
    pub weight: i64,
    pub f: Series,
}

/// ϖ·w_coeff + dθ·dtheta_coeff with ϖ = dz − θdθ, coefficients on the right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperOneForm {
    pub w_coeff: Series,
    pub dtheta_coeff: Series,
}

pub fn residue(s: &BerSection) -> Result<GE> {
    if s.weight != 1 {
        return Err(Error::WrongWeight(format!("residue needs weight 1, got {}", s.weight)));
    }
    if s.f.k_max < -1 {
        return Err(Error::InsufficientPrecision(format!("z^-1 lies above k_max = {}", s.f.k_max)));
    }
    s.f.b(-1)
}

/// Berezinian of the 1|1 Jacobian [[∂_z Z, ∂_θ Z], [−∂_z Θ, ∂_θ Θ]].
pub fn jacobian_ber(c: &DiskChange) -> Result<Series> {
    let a = c.z_image.d_z();
    let b = c.z_image.d_theta_left();
    let cc = c.theta_image.d_z().neg();
    let d_inv = c.theta_image.d_theta_left().inverse().map_err(|e| match e {
        Error::DivisionByNonUnit(m) => Error::NonInvertibleJacobian(m),
        other => other,
    })?;
    a.try_sub(&b.try_mul(&d_inv)?.try_mul(&cc)?)?.try_mul(&d_inv)
}

/// Pulls f·[dz'|dθ']^j back to (f∘c)·(Ber J_c)^j·[dz|dθ]^j.
pub fn transform_section(s: &BerSection, c: &DiskChange) -> Result<BerSection> {
    let w = is_superconformal(c)?;
    if !w.superconformal {
        return Err(Error::NotSuperconformal(format!("residual {}", w.residual.describe())));
    }
    let f = compose(&s.f, c)?;
    let ber = jacobian_ber(c)?;
    let factor = if s.weight >= 0 {
        ber.pow(s.weight)?
    } else {
        // Cap the inverse at what the product can use.
        ber.inverse_to(if f.is_exact() { None } else { Some((f.k_max - f.val()).max(0)) })?.pow(-s.weight)?
    };
    Ok(BerSection { weight: s.weight, f: f.try_mul(&factor)? })
}

pub fn alpha_map(s: &BerSection) -> Result<SuperOneForm> {
    if s.weight != 1 {
        return Err(Error::WrongWeight(format!("α needs weight 1, got {}", s.weight)));
    }
    Ok(SuperOneForm { w_coeff: s.f.d_theta(Model::NS), dtheta_coeff: s.f.clone() })
}

/// ϖA + dθB = dz·A + dθ·(B − θA); the displayed map sends this to
/// (B − θA) + Âθ = B.
pub fn project_oneform(w: &SuperOneForm) -> BerSection {
    let l = w.w_coeff.l;
    let theta = Series::theta(l);
    let g = &w.dtheta_coeff - &(&theta * &w.w_coeff);
    let f = w.w_coeff.hat();
    BerSection { weight: 1, f: &g + &(&f * &theta) }
}

/// dh = dz·∂_z h + dθ·∂_θ h, rewritten as ϖ·∂_z h + dθ·(θ∂_z h + ∂_θ h).
pub fn exterior_derivative(h: &Series) -> SuperOneForm {
    let dz = h.d_z();
    let theta = Series::theta(h.l);
    SuperOneForm { w_coeff: dz.clone(), dtheta_coeff: &(&theta * &dz) + &h.d_theta_left() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub lambda_equals_fg_psi: bool,
    pub g_squared_identity: bool,
    pub g0_squared_is_one: bool,
    pub lambda1_psi0_vanishes: bool,
    pub matrix_a: SuperMatrix,
    pub ber_a: GE,
    pub ber_a_is_one: bool,
    pub all_pass: bool,
}

/// Checks the Ramond constraints on z' = f + λθ, θ' = ψ + gθ and the
/// Berezinian of the induced 4×4 matrix on (1, z | θ, zθ).
pub fn ramond_change_audit(c: &DiskChange) -> Result<AuditReport> {
    if c.model != Model::Ramond {
        return Err(Error::InvalidOperand("audit applies to Ramond changes".into()));
    }
    let w = is_superconformal(c)?;
    if !w.superconformal {
        return Err(Error::NotSuperconformal(format!("residual {}", w.residual.describe())));
    }
    let l = c.l();
    let f = c.z_image.a_part();
    let lambda = c.z_image.b_part();
    let psi = c.theta_image.a_part();
    let g = c.theta_image.b_part();
    let z = Series::z(l);

    let lambda_eq = lambda.try_sub(&f.try_mul(&g)?.try_mul(&psi)?)?.is_zero();
    let rhs = z.try_mul(&f.d_z())?.try_div(&f)?.try_sub(&z.try_mul(&psi)?.try_mul(&psi.d_z())?)?;
    let g2_identity = g.try_mul(&g)?.try_sub(&rhs)?.is_zero();

    let at = |s: &Series, k: i64| s.a(k);
    let g0 = at(&g, 0)?;
    let g1 = at(&g, 1)?;
    let f1 = at(&f, 1)?;
    let l1 = at(&lambda, 1)?;
    let p0 = at(&psi, 0)?;
    let p1 = at(&psi, 1)?;
    let g0_sq = (&g0 * &g0).is_one();
    let lp = (&l1 * &p0).is_zero();

    let zero = GE::zero(l);
    let entries = vec![
        vec![GE::one(l), zero.clone(), p0.clone(), zero.clone()],
        vec![zero.clone(), f1.clone(), p1, &f1 * &p0],
        vec![zero.clone(), zero.clone(), g0.clone(), zero.clone()],
        vec![zero, l1, g1, &f1 * &g0],
    ];
    let matrix_a = SuperMatrix::new(BlockShape::square(2, 2), MatrixParity::Even, l, entries)?;
    let ber_a = supermatrix::ber(&matrix_a)?;
    let ber_one = ber_a.is_one();
    Ok(AuditReport {
        lambda_equals_fg_psi: lambda_eq,
        g_squared_identity: g2_identity,
        g0_squared_is_one: g0_sq,
        lambda1_psi0_vanishes: lp,
        all_pass: lambda_eq && g2_identity && g0_sq && lp && ber_one,
        matrix_a,
        ber_a,
        ber_a_is_one: ber_one,
    })
}

/// Ber of multiplication by g0 + g1·α on the free module with basis {1 | α}.
pub fn norm_triviality_check(g0: &GE, g1: &GE) -> Result<GE> {
    if g0.l() != g1.l() {
        return Err(Error::InvalidOperand("g0 and g1 over different L".into()));
    }
    if !g0.is_even() || !g1.is_odd() {
        return Err(Error::InvalidOperand("g0 must be even and g1 odd".into()));
    }
    if g0.body().is_zero() {
        return Err(Error::NotInvertible(format!("g0 = {g0} has zero body")));
    }
    let m = SuperMatrix::new(
        BlockShape::square(1, 1),
        MatrixParity::Even,
        g0.l(),
        vec![vec![g0.clone(), GE::zero(g0.l())], vec![g1.clone(), g0.clone()]],
    )?;
    supermatrix::berezinian(&m, supermatrix::Route::Both)
}

impl SuperLaurentSeries {
    /// Short human-readable rendering, used in error details.
    pub fn describe(&self) -> String {
        let body: Vec<String> = self.terms.iter().map(|(k, (a, b))| format!("z^{k}:({a}, {b})")).collect();
        format!("[{}, {}] {}", self.k_min, self.k_max, body.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::supernum::rat_int;

    fn ge(n: i64) -> GE {
        GE::int(2, n)
    }

    fn even(k_min: i64, k_max: i64, a: &[i64]) -> Series {
        Series::from_even(2, k_min, k_max, &a.iter().map(|&n| ge(n)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn theta_squares_to_zero() {
        let t = Series::theta(2);
        assert!((&t * &t).is_zero());
    }

    #[test]
    fn z_inverse_times_z_is_one() {
        let zinv = Series::z(2).inverse().unwrap();
        assert_eq!(zinv.terms().len(), 1);
        assert_eq!((&zinv * &Series::z(2)).terms(), Series::one(2).terms());
    }

    #[test]
    fn geometric_quotient() {
        // z(1 + z) known through z^8
        let y = even(0, 8, &[0, 1, 1]);
        let q = Series::theta(2).try_div(&y).unwrap();
        for (k, sign) in [(-1, 1), (0, -1), (1, 1), (2, -1)] {
            assert_eq!(q.coeff(k).unwrap(), (ge(0), ge(sign)));
        }
    }

    #[test]
    fn division_needs_a_unit() {
        let t1 = GE::generator(2, 1);
        let t2 = GE::generator(2, 2);
        let y = Series::new(2, 0, 3, [(0, &t1 * &t2, GE::zero(2))]).unwrap();
        assert_eq!(Series::one(2).try_div(&y).unwrap_err().name(), "DivisionByNonUnit");
    }

    #[test]
    fn d_theta_basics() {
        assert_eq!(Series::z(2).d_theta(Model::NS).terms(), Series::theta(2).terms());
        assert_eq!(Series::theta(2).d_theta(Model::NS).terms(), Series::one(2).terms());
    }

    #[test]
    fn ns_superconformal_examples() {
        let l = 2;
        let mk = |zc: i64, tc: i64| {
            DiskChange::new(
                Series::z(l).scale_q(&rat_int(zc)),
                Series::theta(l).scale_q(&rat_int(tc)),
                Model::NS,
            )
            .unwrap()
        };
        assert!(is_superconformal(&mk(1, -1)).unwrap().superconformal);
        assert!(!is_superconformal(&mk(1, 2)).unwrap().superconformal);
        assert!(is_superconformal(&mk(4, 2)).unwrap().superconformal);
    }

    #[test]
    fn scaling_transform_doubles() {
        let c = DiskChange::new(
            Series::z(2).scale_q(&rat_int(4)),
            Series::theta(2).scale_q(&rat_int(2)),
            Model::NS,
        )
        .unwrap();
        let s = BerSection { weight: 1, f: Series::one(2) };
        let t = transform_section(&s, &c).unwrap();
        assert_eq!(t.f.terms(), Series::constant(ge(2)).terms());
        let zero = BerSection { weight: -2, f: Series::zero(2, 0, 0) };
        let t = transform_section(&zero, &c).unwrap();
        assert!(t.f.is_zero());
        assert_eq!(t.f.k_max(), 0);
    }

    #[test]
    fn residue_examples() {
        let tau1 = GE::generator(2, 1);
        let f = Series::new(2, -1, 0, [(-1, ge(2), ge(3)), (0, tau1, ge(1))]).unwrap();
        assert_eq!(residue(&BerSection { weight: 1, f: f.clone() }).unwrap(), ge(3));
        assert_eq!(residue(&BerSection { weight: 2, f }).unwrap_err().name(), "WrongWeight");
        let q = Series::theta(2).try_div(&Series::z(2)).unwrap();
        assert_eq!(residue(&BerSection { weight: 1, f: q }).unwrap(), ge(1));
        let q = Series::one(2).try_div(&Series::z(2)).unwrap();
        assert_eq!(residue(&BerSection { weight: 1, f: q }).unwrap(), ge(0));
    }

    #[test]
    fn forms_examples() {
        let s = BerSection { weight: 1, f: Series::theta(2) };
        let a = alpha_map(&s).unwrap();
        assert_eq!(a.w_coeff.terms(), Series::one(2).terms());
        let dz = exterior_derivative(&Series::z(2));
        assert_eq!(dz.w_coeff.terms(), Series::one(2).terms());
        assert_eq!(dz.dtheta_coeff.terms(), Series::theta(2).terms());
        let dt = exterior_derivative(&Series::theta(2));
        assert!(dt.w_coeff.is_zero());
        assert_eq!(dt.dtheta_coeff.terms(), Series::one(2).terms());
        let w = SuperOneForm { w_coeff: Series::one(2), dtheta_coeff: Series::zero(2, 0, EXACT) };
        assert!(project_oneform(&w).f.is_zero());
    }

    #[test]
    fn audit_examples() {
        let l = 2;
        let id = DiskChange::identity(l, Model::Ramond);
        let r = ramond_change_audit(&id).unwrap();
        assert!(r.all_pass);
        let flip = DiskChange::new(Series::z(l), Series::theta(l).neg(), Model::Ramond).unwrap();
        assert!(ramond_change_audit(&flip).unwrap().all_pass);
        let p0 = GE::generator(l, 1);
        let shift = DiskChange::new(
            Series::new(l, 0, EXACT, [(1, ge(1), p0.clone())]).unwrap(),
            Series::new(l, 0, EXACT, [(0, p0, ge(1))]).unwrap(),
            Model::Ramond,
        )
        .unwrap();
        let r = ramond_change_audit(&shift).unwrap();
        assert!(r.all_pass, "{r:?}");
    }

    #[test]
    fn norm_triviality() {
        assert!(norm_triviality_check(&ge(1), &GE::zero(2)).unwrap().is_one());
        assert!(norm_triviality_check(&ge(2), &GE::generator(2, 1)).unwrap().is_one());
        assert_eq!(norm_triviality_check(&GE::zero(2), &GE::zero(2)).unwrap_err().name(), "NotInvertible");
    }

    #[test]
    fn json_round_trip() {
        let f = Series::new(2, -1, 2, [(-1, ge(2), ge(3)), (1, GE::generator(2, 1), GE::zero(2))]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: Series = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
