//! Matrices relating the chosen local bases on a family of SUSY curves, and
//! the super Mumford form scalars built from their Berezinians.
//!
//! Every local expansion is entered as its z⁰ coefficients `[a0, b0]`
//! (meaning a0 + b0·θ) or as a full series. Columns are always ordered by
//! true parity: first the coefficients along the even basis elements of the
//! restriction, then those along the odd ones.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::supermatrix::{ber, supertranspose, BlockShape, MatrixParity, SuperMatrix};
use crate::supernum::{Parity, GE};
use crate::susydisk::Series;

/// One local expansion at one point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LocalCoeff {
    Lead([GE; 2]),
    Series(Series),
}

impl LocalCoeff {
    pub fn lead(a0: GE, b0: GE) -> LocalCoeff {
        LocalCoeff::Lead([a0, b0])
    }

    /// (a0, b0).
    pub fn leading(&self) -> Result<(GE, GE)> {
        match self {
            LocalCoeff::Lead([a, b]) => Ok((a.clone(), b.clone())),
            LocalCoeff::Series(s) => s.coeff(0),
        }
    }

    pub fn series(&self) -> Result<Series> {
        match self {
            LocalCoeff::Lead([a, b]) => Series::new(a.l(), 0, 0, [(0, a.clone(), b.clone())]),
            LocalCoeff::Series(s) => Ok(s.clone()),
        }
    }

    fn l(&self) -> u32 {
        match self {
            LocalCoeff::Lead([a, _]) => a.l(),
            LocalCoeff::Series(s) => s.l(),
        }
    }

    fn check(&self, l: u32, a_parity: Parity, what: &str) -> Result<()> {
        if self.l() != l || matches!(self, LocalCoeff::Lead([_, b]) if b.l() != l) {
            return Err(Error::InvalidOperand(format!("{what}: expected L = {l}")));
        }
        let ok = match self {
            LocalCoeff::Lead([a, b]) => a.has_parity(a_parity) && b.has_parity(a_parity.flip()),
            LocalCoeff::Series(s) => s.k_min() >= 0 && s.has_parity(a_parity),
        };
        if !ok {
            return Err(Error::InvalidInput(format!(
                "{what}: z^0 coefficient must be {a_parity:?} and the θ coefficient of the opposite parity"
            )));
        }
        Ok(())
    }
}

/// Rows are sections, columns are points.
pub type Table = Vec<Vec<LocalCoeff>>;

fn check_table(t: &Table, rows: usize, cols: usize, l: u32, a_parity: Parity, name: &str) -> Result<()> {
    if t.len() != rows || t.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidInput(format!("{name} must be a {rows} x {cols} table")));
    }
    for (j, row) in t.iter().enumerate() {
        for (k, c) in row.iter().enumerate() {
            c.check(l, a_parity, &format!("{name}[{j}][{k}]"))?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamondLocalData {
    pub g: i64,
    #[serde(rename = "n_R")]
    pub n_r: i64,
    #[serde(rename = "L")]
    pub l: u32,
    /// Local coefficient of t′ ~ z·f at each puncture.
    pub t_series: Vec<Series>,
    pub phi: Table,
    pub xi: Table,
    pub sigma: Table,
    pub tau: Table,
    pub eta: Table,
    pub psi: Table,
}

impl RamondLocalData {
    pub fn r(&self) -> i64 {
        self.n_r / 2 - self.g + 1
    }

    /// Structural checks only; the genus bounds of the theorem are enforced
    /// by [`mumford_ramond`].
    pub fn validate(&self) -> Result<()> {
        if self.n_r % 2 != 0 {
            return Err(Error::OddRamondCount(format!("n_R = {}", self.n_r)));
        }
        let r = self.r();
        if r < 1 || self.g < 0 || r < self.g {
            return Err(Error::PreconditionViolated(format!("r = {r} must satisfy 1 <= r and g <= r")));
        }
        let (r, g, l) = (r as usize, self.g as usize, self.l);
        if self.t_series.len() != r {
            return Err(Error::InvalidInput(format!("t_series needs {r} entries")));
        }
        for (k, t) in self.t_series.iter().enumerate() {
            if t.l() != l {
                return Err(Error::InvalidOperand(format!("t_series[{k}]: expected L = {l}")));
            }
            if !t.has_parity(Parity::Even) || t.k_min() < 0 {
                return Err(Error::InvalidInput(format!("t_series[{k}] must be an even series regular at 0")));
            }
            let lead = t.a(1).map_err(|_| Error::InsufficientPrecision(format!("t_series[{k}] must cover z^1")))?;
            if !t.a(0)?.is_zero() || !t.b(0)?.is_zero() || lead.body() == num_traits::Zero::zero() {
                return Err(Error::InvalidInput(format!("t_series[{k}] must be z times a unit")));
            }
        }
        check_table(&self.phi, g, r, l, Parity::Odd, "phi")?;
        check_table(&self.xi, r - 1, r, l, Parity::Odd, "xi")?;
        check_table(&self.sigma, r, r, l, Parity::Odd, "sigma")?;
        check_table(&self.tau, r - g, r, l, Parity::Even, "tau")?;
        check_table(&self.eta, r, r, l, Parity::Even, "eta")?;
        check_table(&self.psi, r, r, l, Parity::Odd, "psi")
    }
}

fn default_xi() -> Vec<LocalCoeff> {
    Vec::new()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NSLocalData {
    pub g: i64,
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "n_NS", default)]
    pub n_ns: i64,
    /// Local coefficient of ν′ at each point; z when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<Series>>,
    pub phi: Table,
    pub chi: Table,
    pub psi: Table,
    pub sigma: Table,
    pub rho: Table,
    #[serde(default = "default_xi", skip_serializing_if = "Vec::is_empty")]
    pub xi: Vec<LocalCoeff>,
    pub m3_distinguished_entry: GE,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alpha: Table,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub beta: Table,
    /// Leading data (a_k, b_k) of τ at each NS puncture.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tau: Vec<[GE; 2]>,
}

impl NSLocalData {
    pub fn validate(&self) -> Result<()> {
        if self.g < 2 {
            return Err(Error::PreconditionViolated(format!("genus {} < 2", self.g)));
        }
        if self.n_ns < 0 {
            return Err(Error::PreconditionViolated(format!("n_NS = {} is negative", self.n_ns)));
        }
        let (m, n, l) = ((self.g - 1) as usize, self.n_ns as usize, self.l);
        if let Some(nu) = &self.nu {
            if nu.len() != m {
                return Err(Error::InvalidInput(format!("nu needs {m} entries")));
            }
            for (k, s) in nu.iter().enumerate() {
                if s.l() != l {
                    return Err(Error::InvalidOperand(format!("nu[{k}]: expected L = {l}")));
                }
                if !s.has_parity(Parity::Even) || s.k_min() < 0 {
                    return Err(Error::InvalidInput(format!("nu[{k}] must be an even series regular at 0")));
                }
            }
        }
        check_table(&self.phi, m, m, l, Parity::Odd, "phi")?;
        check_table(&self.chi, m, m, l, Parity::Even, "chi")?;
        check_table(&self.psi, m - 1, m, l, Parity::Odd, "psi")?;
        check_table(&self.sigma, m, m, l, Parity::Odd, "sigma")?;
        check_table(&self.rho, m - 1, m, l, Parity::Even, "rho")?;
        if !self.xi.is_empty() {
            check_table(&vec![self.xi.clone()], 1, m, l, Parity::Odd, "xi")?;
        }
        let e = &self.m3_distinguished_entry;
        if e.l() != l || !e.is_even() {
            return Err(Error::InvalidInput("m3_distinguished_entry must be even over the same L".into()));
        }
        check_table(&self.alpha, n, n, l, Parity::Odd, "alpha")?;
        check_table(&self.beta, n, n, l, Parity::Even, "beta")?;
        if !self.tau.is_empty() {
            if self.tau.len() != n {
                return Err(Error::InvalidInput(format!("tau needs {n} entries")));
            }
            for (k, [a, b]) in self.tau.iter().enumerate() {
                if a.l() != l || b.l() != l || !a.is_even() || !b.is_odd() || a.body() == num_traits::Zero::zero() {
                    return Err(Error::InvalidInput(format!("tau[{k}] must be (even unit, odd)")));
                }
            }
        }
        Ok(())
    }

    fn nu_at(&self, k: usize) -> Series {
        match &self.nu {
            Some(v) => v[k].clone(),
            None => Series::z(self.l),
        }
    }
}

/// How to choose a left inverse of a tall matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeftInversePolicy {
    /// Lexicographically first row subset with invertible body minor.
    LexFirst,
    /// The caller's row subset.
    GivenRows(Vec<usize>),
    /// L + Y(I − M·L) for the base choice L; still a left inverse for any Y.
    Shifted { base: Box<LeftInversePolicy>, y: Mat },
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn minor_inverse(m: &Mat, rows: &[usize], l: u32) -> Option<Mat> {
    let sub: Mat = rows.iter().map(|&i| m[i].clone()).collect();
    let b = linalg::body(&sub);
    if linalg::rational_det(&b) == num_traits::Zero::zero() {
        return None;
    }
    linalg::grassmann_inverse(&sub, l).ok()
}

/// Left inverse of a tall n×k Grassmann matrix.
pub fn left_inverse_mat(m: &Mat, k: usize, l: u32, policy: &LeftInversePolicy) -> Result<Mat> {
    let n = m.len();
    if n < k || m.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidShape(format!("left inverse needs a tall matrix, got {n} x {k}")));
    }
    let place = |rows: &[usize], inv: Mat| -> Mat {
        let mut out = linalg::zeros(k, n, l);
        for i in 0..k {
            for (c, &r) in rows.iter().enumerate() {
                out[i][r] = inv[i][c].clone();
            }
        }
        out
    };
    match policy {
        LeftInversePolicy::LexFirst => {
            let mut c: Vec<usize> = (0..k).collect();
            loop {
                if let Some(inv) = minor_inverse(m, &c, l) {
                    return Ok(place(&c, inv));
                }
                if k == 0 || !next_combination(&mut c, n) {
                    return Err(Error::NoInvertibleMinor(format!("no {k}-row minor of the {n} x {k} matrix is invertible")));
                }
            }
        }
        LeftInversePolicy::GivenRows(rows) => {
            let mut sorted = rows.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != k || rows.len() != k || sorted.iter().any(|&r| r >= n) {
                return Err(Error::InvalidInput(format!("row subset {rows:?} must list {k} distinct rows below {n}")));
            }
            let inv = minor_inverse(m, rows, l)
                .ok_or_else(|| Error::NoInvertibleMinor(format!("rows {rows:?} have a singular body minor")))?;
            Ok(place(rows, inv))
        }
        LeftInversePolicy::Shifted { base, y } => {
            if y.len() != k || y.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidShape(format!("shift must be {k} x {n}")));
            }
            let base = left_inverse_mat(m, k, l, base)?;
            let proj = linalg::mat_sub(&linalg::identity(n, l), &linalg::mat_mul(m, &base, l));
            Ok(linalg::mat_add(&base, &linalg::mat_mul(y, &proj, l)))
        }
    }
}

pub fn left_inverse(m: &SuperMatrix, policy: &LeftInversePolicy) -> Result<SuperMatrix> {
    let k = m.shape().n_cols();
    let inv = left_inverse_mat(m.entries(), k, m.l(), policy)?;
    SuperMatrix::new(m.shape().transposed(), MatrixParity::None, m.l(), inv)
}

fn plain(rows: usize, cols: usize, l: u32, entries: Mat) -> Result<SuperMatrix> {
    SuperMatrix::new(BlockShape { rows: (rows, 0), cols: (cols, 0) }, MatrixParity::None, l, entries)
}

fn even_square(p: usize, l: u32, entries: Mat) -> Result<SuperMatrix> {
    SuperMatrix::new(BlockShape::square(p, p), MatrixParity::Even, l, entries)
}

/// res_0 of s·h/t: the θ-coefficient of z⁻¹.
pub fn pairing(s: &Series, h: &Series, t: &Series) -> Result<GE> {
    let q = s.try_mul(h)?.try_mul(&t.inverse()?).map_err(|e| match e {
        Error::EmptyWindow(m) => Error::InsufficientPrecision(m),
        other => other,
    })?;
    if q.k_max() < -1 {
        return Err(Error::InsufficientPrecision(format!("residue needs z^-1, window ends at {}", q.k_max())));
    }
    q.b(-1)
}

/// Residue matrix of a family of sections against the points: row k pairs
/// with 1 at point k, row n + k with θ at point k.
fn residue_matrix(sections: &[Vec<Series>], dens: &[Series], l: u32) -> Result<Mat> {
    let n = dens.len();
    let one = Series::one(l);
    let theta = Series::theta(l);
    let mut m = linalg::zeros(2 * n, sections.len(), l);
    for (j, sec) in sections.iter().enumerate() {
        for k in 0..n {
            m[k][j] = pairing(&one, &sec[k], &dens[k])?;
            m[n + k][j] = pairing(&theta, &sec[k], &dens[k])?;
        }
    }
    Ok(m)
}

fn table_series(t: &Table) -> Result<Vec<Vec<Series>>> {
    t.iter().map(|r| r.iter().map(LocalCoeff::series).collect()).collect()
}

/// Row [a0 at each point | b0 at each point].
fn lead_row(row: &[LocalCoeff]) -> Result<Vec<GE>> {
    let pairs: Vec<(GE, GE)> = row.iter().map(LocalCoeff::leading).collect::<Result<_>>()?;
    Ok(pairs.iter().map(|p| p.0.clone()).chain(pairs.iter().map(|p| p.1.clone())).collect())
}

/// Row [b0 at each point | a0 at each point].
fn lead_row_swapped(row: &[LocalCoeff]) -> Result<Vec<GE>> {
    let pairs: Vec<(GE, GE)> = row.iter().map(LocalCoeff::leading).collect::<Result<_>>()?;
    Ok(pairs.iter().map(|p| p.1.clone()).chain(pairs.iter().map(|p| p.0.clone())).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamondPolicies {
    pub a: LeftInversePolicy,
    pub b: LeftInversePolicy,
}

impl Default for RamondPolicies {
    fn default() -> Self {
        RamondPolicies { a: LeftInversePolicy::LexFirst, b: LeftInversePolicy::LexFirst }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamondMatrices {
    pub a_prime: SuperMatrix,
    pub b_prime: SuperMatrix,
    pub a: SuperMatrix,
    pub b: SuperMatrix,
    pub m0: SuperMatrix,
    pub m_half: SuperMatrix,
    pub m_one: SuperMatrix,
}

pub fn build_ramond_matrices(d: &RamondLocalData, policies: &RamondPolicies) -> Result<RamondMatrices> {
    d.validate()?;
    let (r, g, l) = (d.r() as usize, d.g as usize, d.l);
    let t = &d.t_series;

    let mut hs = vec![vec![Series::one(l); r]];
    hs.extend(table_series(&d.xi)?);
    let a_prime = residue_matrix(&hs, t, l)?;
    let a = left_inverse_mat(&a_prime, r, l, &policies.a)?;

    let b_prime = residue_matrix(&table_series(&d.phi)?, t, l)?;
    let b = left_inverse_mat(&b_prime, g, l, &policies.b)?;

    // Vectors 1|_T, lifts of the ξ duals | ξ_j|_T, lift of the dual of 1,
    // written as rows; the column layout is the supertranspose.
    let mut vecs: Mat = Vec::with_capacity(2 * r);
    vecs.push((0..2 * r).map(|i| if i < r { GE::one(l) } else { GE::zero(l) }).collect());
    vecs.extend(a[1..].iter().cloned());
    for row in &d.xi {
        vecs.push(lead_row(row)?);
    }
    vecs.push(a[0].clone());
    let m0 = supertranspose(&even_square(r, l, vecs)?);

    let mut rows: Mat = Vec::with_capacity(2 * r);
    for row in &d.tau {
        rows.push(lead_row(row)?);
    }
    rows.extend(b.iter().cloned());
    for row in &d.sigma {
        rows.push(lead_row(row)?);
    }
    let m_half = rows;

    let mut rows: Mat = Vec::with_capacity(2 * r);
    for row in d.eta.iter().chain(&d.psi) {
        rows.push(lead_row(row)?);
    }

    Ok(RamondMatrices {
        a_prime: plain(2 * r, r, l, a_prime)?,
        b_prime: plain(2 * r, g, l, b_prime)?,
        a: plain(r, 2 * r, l, a)?,
        b: plain(g, 2 * r, l, b)?,
        m0,
        m_half: even_square(r, l, m_half)?,
        m_one: even_square(r, l, rows)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MumfordResult {
    pub scalar: GE,
    pub generator: String,
    pub ber: BTreeMap<String, GE>,
    pub input_sha256: String,
}

fn input_hash<T: Serialize>(d: &T) -> String {
    let bytes = serde_json::to_vec(d).expect("local data serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn named_ber(name: &str, m: &SuperMatrix) -> Result<GE> {
    match ber(m) {
        Ok(v) if v.body() != num_traits::Zero::zero() => Ok(v),
        Ok(_) | Err(Error::NonInvertibleBlock(_)) => {
            Err(Error::DegenerateConfiguration(format!("Ber {name} has zero body")))
        }
        Err(e) => Err(e),
    }
}

pub const RAMOND_GENERATOR: &str = "d_{−1} d_{1/2}^{−5}";
pub const NS_GENERATOR: &str = "d_{3/2} d_{1/2}^{−5}";
pub const NS_PUNCTURED_GENERATOR: &str = "d^N_{3/2} (δ^N_{3/2})^{−1} d_{1/2}^{−5}";

pub fn mumford_ramond(d: &RamondLocalData) -> Result<MumfordResult> {
    mumford_ramond_with(d, &RamondPolicies::default())
}

/// (Ber M0)² / (Ber M₋₁ · Ber M₋₁/₂).
pub fn mumford_ramond_with(d: &RamondLocalData, policies: &RamondPolicies) -> Result<MumfordResult> {
    if d.g < 2 {
        return Err(Error::PreconditionViolated(format!("genus {} < 2", d.g)));
    }
    if d.n_r % 2 != 0 {
        return Err(Error::OddRamondCount(format!("n_R = {}", d.n_r)));
    }
    if d.n_r <= 6 * d.g - 6 {
        return Err(Error::PreconditionViolated(format!("n_R = {} must exceed 6g - 6", d.n_r)));
    }
    let m = build_ramond_matrices(d, policies)?;
    let b0 = named_ber("M0", &m.m0)?;
    let b_half = named_ber("M-1/2", &m.m_half)?;
    let b_one = named_ber("M-1", &m.m_one)?;
    let scalar = &(&b0 * &b0) * &(&b_one * &b_half).inverse()?;
    let ber = BTreeMap::from([("M0".to_string(), b0), ("M-1/2".to_string(), b_half), ("M-1".to_string(), b_one)]);
    Ok(MumfordResult { scalar, generator: RAMOND_GENERATOR.into(), ber, input_sha256: input_hash(d) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NSMatrices {
    /// Residue matrix of the φ_j against the points; B1 is its left inverse.
    pub a1: SuperMatrix,
    pub b1: SuperMatrix,
    pub m1: SuperMatrix,
    pub m2: SuperMatrix,
    pub m3: SuperMatrix,
    pub m_prime: Option<SuperMatrix>,
}

pub fn build_ns_matrices(d: &NSLocalData, policy: &LeftInversePolicy) -> Result<NSMatrices> {
    d.validate()?;
    let (m, n, l) = ((d.g - 1) as usize, d.n_ns as usize, d.l);
    let nus: Vec<Series> = (0..m).map(|k| d.nu_at(k)).collect();
    let a1 = residue_matrix(&table_series(&d.phi)?, &nus, l)?;
    let b1 = left_inverse_mat(&a1, m, l, policy)?;

    let mut m1 = b1.clone();
    for row in &d.phi {
        m1.push(lead_row(row)?);
    }

    let mut m2: Mat = Vec::with_capacity(2 * m);
    for row in d.chi.iter().chain(&d.psi) {
        m2.push(lead_row(row)?);
    }
    let mut last = vec![GE::zero(l); 2 * m];
    last[2 * m - 1] = GE::one(l);
    m2.push(last);

    let mut m3: Mat = Vec::with_capacity(2 * m);
    for row in &d.rho {
        m3.push(lead_row(row)?);
    }
    let mut dist = vec![GE::zero(l); 2 * m];
    dist[0] = d.m3_distinguished_entry.clone();
    m3.push(dist);
    for row in &d.sigma {
        m3.push(lead_row(row)?);
    }

    let m_prime = if n == 0 {
        None
    } else {
        let rows: Mat = d.alpha.iter().chain(&d.beta).map(|r| lead_row_swapped(r)).collect::<Result<_>>()?;
        Some(even_square(n, l, rows)?)
    };

    Ok(NSMatrices {
        a1: plain(2 * m, m, l, a1)?,
        b1: plain(m, 2 * m, l, b1)?,
        m1: even_square(m, l, m1)?,
        m2: even_square(m, l, m2)?,
        m3: even_square(m, l, m3)?,
        m_prime,
    })
}

fn ns_parts(m: &NSMatrices) -> Result<(GE, BTreeMap<String, GE>)> {
    let b1 = named_ber("M1", &m.m1)?;
    let b2 = named_ber("M2", &m.m2)?;
    let b3 = named_ber("M3", &m.m3)?;
    let scalar = &(&b3 * &b2) * &(&b1 * &b1).inverse()?;
    Ok((scalar, BTreeMap::from([("M1".to_string(), b1), ("M2".to_string(), b2), ("M3".to_string(), b3)])))
}

pub fn mumford_ns(d: &NSLocalData) -> Result<MumfordResult> {
    mumford_ns_with(d, &LeftInversePolicy::LexFirst)
}

/// Ber M3 · Ber M2 / (Ber M1)².
pub fn mumford_ns_with(d: &NSLocalData, policy: &LeftInversePolicy) -> Result<MumfordResult> {
    let m = build_ns_matrices(d, policy)?;
    let (scalar, ber) = ns_parts(&m)?;
    Ok(MumfordResult { scalar, generator: NS_GENERATOR.into(), ber, input_sha256: input_hash(d) })
}

pub fn mumford_ns_punctured(d: &NSLocalData) -> Result<MumfordResult> {
    mumford_ns_punctured_with(d, &LeftInversePolicy::LexFirst)
}

/// The NS scalar divided by Ber M′.
pub fn mumford_ns_punctured_with(d: &NSLocalData, policy: &LeftInversePolicy) -> Result<MumfordResult> {
    if d.n_ns == 0 {
        return Err(Error::NoPunctures("n_NS = 0".into()));
    }
    let m = build_ns_matrices(d, policy)?;
    let (scalar, mut ber) = ns_parts(&m)?;
    let mp = m.m_prime.as_ref().expect("n_NS > 0 gives M'");
    let bp = named_ber("M'", mp)?;
    let scalar = &scalar * &bp.inverse()?;
    ber.insert("M'".to_string(), bp);
    Ok(MumfordResult { scalar, generator: NS_PUNCTURED_GENERATOR.into(), ber, input_sha256: input_hash(d) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::supernum::rat;

    fn sm(rows: usize, cols: usize, e: Mat) -> SuperMatrix {
        plain(rows, cols, 2, e).unwrap()
    }

    #[test]
    fn left_inverse_examples() {
        let l = 2;
        let (t1, t2) = (GE::generator(l, 1), GE::generator(l, 2));
        let one = GE::one(l);
        let lex = LeftInversePolicy::LexFirst;
        let m = sm(2, 1, vec![vec![one.clone()], vec![GE::zero(l)]]);
        assert_eq!(left_inverse(&m, &lex).unwrap().entries(), &vec![vec![one.clone(), GE::zero(l)]]);
        let m = sm(2, 1, vec![vec![GE::int(l, 2)], vec![GE::zero(l)]]);
        assert_eq!(left_inverse(&m, &lex).unwrap().entries(), &vec![vec![GE::scalar(l, rat(1, 2)), GE::zero(l)]]);
        let u = &one + &(&t1 * &t2);
        let m = sm(2, 1, vec![vec![u], vec![t1.clone()]]);
        let inv = left_inverse(&m, &lex).unwrap();
        assert_eq!(inv.entries(), &vec![vec![&one - &(&t1 * &t2), GE::zero(l)]]);
        assert_eq!(linalg::mat_mul(inv.entries(), m.entries(), l), linalg::identity(1, l));
        let z = sm(2, 1, vec![vec![t1.clone()], vec![t2.clone()]]);
        assert_eq!(left_inverse(&z, &lex).unwrap_err().name(), "NoInvertibleMinor");
        assert_eq!(left_inverse(&m, &LeftInversePolicy::GivenRows(vec![1])).unwrap_err().name(), "NoInvertibleMinor");
    }

    #[test]
    fn shifted_left_inverse_is_left_inverse() {
        let l = 2;
        let q = |n| GE::int(l, n);
        let m = vec![vec![q(1), q(2)], vec![q(0), q(1)], vec![q(3), q(-1)]];
        let y = vec![vec![q(1), q(0), q(2)], vec![q(-1), q(4), q(0)]];
        let p = LeftInversePolicy::Shifted { base: Box::new(LeftInversePolicy::LexFirst), y };
        let inv = left_inverse_mat(&m, 2, l, &p).unwrap();
        assert_eq!(linalg::mat_mul(&inv, &m, l), linalg::identity(2, l));
        assert_ne!(inv, left_inverse_mat(&m, 2, l, &LeftInversePolicy::LexFirst).unwrap());
    }

    #[test]
    fn minimal_ramond_layout() {
        // r = 1: one puncture, no ξ, one φ, no τ.
        let l = 0;
        let ge = |n| GE::int(l, n);
        let lead = |a, b| LocalCoeff::lead(ge(a), ge(b));
        let d = RamondLocalData {
            g: 1,
            n_r: 2,
            l,
            t_series: vec![Series::z(l)],
            phi: vec![vec![lead(0, 1)]],
            xi: vec![],
            sigma: vec![vec![lead(0, 1)]],
            tau: vec![],
            eta: vec![vec![lead(1, 0)]],
            psi: vec![vec![lead(0, 1)]],
        };
        let m = build_ramond_matrices(&d, &RamondPolicies::default()).unwrap();
        assert_eq!(m.m0.shape(), BlockShape::square(1, 1));
        assert_eq!(m.m0.get(0, 0), &ge(1));
        assert_eq!(m.m0.get(1, 0), &ge(0));
        assert_eq!(mumford_ramond(&d).unwrap_err().name(), "PreconditionViolated");
    }
}
