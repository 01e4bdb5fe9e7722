//! Block supermatrices over Grassmann scalars: supertranspose, supertrace,
//! Berezinian, inverse and nilpotent exponential.

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{de_error, Error, Result};
use crate::linalg::{self, Mat};
use crate::supernum::{rat, Parity, GE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockShape {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
}

impl BlockShape {
    pub fn square(p: usize, q: usize) -> BlockShape {
        BlockShape { rows: (p, q), cols: (p, q) }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.0 + self.rows.1
    }

    pub fn n_cols(&self) -> usize {
        self.cols.0 + self.cols.1
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transposed(&self) -> BlockShape {
        BlockShape { rows: self.cols, cols: self.rows }
    }

    pub fn row_parity(&self, i: usize) -> Parity {
        if i < self.rows.0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn col_parity(&self, j: usize) -> Parity {
        if j < self.cols.0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixParity {
    Even,
    Odd,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperMatrix {
    shape: BlockShape,
    parity: MatrixParity,
    l: u32,
    entries: Mat,
}

impl SuperMatrix {
    pub fn new(shape: BlockShape, parity: MatrixParity, l: u32, entries: Mat) -> Result<SuperMatrix> {
        if entries.len() != shape.n_rows() || entries.iter().any(|r| r.len() != shape.n_cols()) {
            return Err(Error::InvalidShape(format!(
                "entries do not form a {}x{} grid",
                shape.n_rows(),
                shape.n_cols()
            )));
        }
        if let Some(e) = entries.iter().flatten().find(|e| e.l() != l) {
            return Err(Error::InvalidOperand(format!("entry with L = {} in a matrix over L = {l}", e.l())));
        }
        let m = SuperMatrix { shape, parity, l, entries };
        m.check_parity()?;
        Ok(m)
    }

    pub fn identity(p: usize, q: usize, l: u32) -> SuperMatrix {
        SuperMatrix { shape: BlockShape::square(p, q), parity: MatrixParity::Even, l, entries: linalg::identity(p + q, l) }
    }

    /// Parity an entry must have for the matrix to be homogeneous of parity `p`.
    pub fn expected_entry_parity(shape: &BlockShape, p: Parity, i: usize, j: usize) -> Parity {
        shape.row_parity(i).add(shape.col_parity(j)).add(p)
    }

    fn check_parity(&self) -> Result<()> {
        let p = match self.parity {
            MatrixParity::None => return Ok(()),
            MatrixParity::Even => Parity::Even,
            MatrixParity::Odd => Parity::Odd,
        };
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let want = Self::expected_entry_parity(&self.shape, p, i, j);
                if !e.has_parity(want) {
                    let err = format!("entry ({i},{j}) = {e} should be {want:?} for a {:?} matrix", self.parity);
                    return Err(if p == Parity::Even { Error::NotEven(err) } else { Error::InvalidOperand(err) });
                }
            }
        }
        Ok(())
    }

    /// Parity the entries actually realise, if homogeneous.
    pub fn detect_parity(&self) -> MatrixParity {
        for (p, mp) in [(Parity::Even, MatrixParity::Even), (Parity::Odd, MatrixParity::Odd)] {
            let ok = self.entries.iter().enumerate().all(|(i, row)| {
                row.iter()
                    .enumerate()
                    .all(|(j, e)| e.has_parity(Self::expected_entry_parity(&self.shape, p, i, j)))
            });
            if ok {
                return mp;
            }
        }
        MatrixParity::None
    }

    pub fn with_parity(mut self, parity: MatrixParity) -> Result<SuperMatrix> {
        self.parity = parity;
        self.check_parity()?;
        Ok(self)
    }

    pub fn shape(&self) -> BlockShape {
        self.shape
    }

    pub fn parity(&self) -> MatrixParity {
        self.parity
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn entries(&self) -> &Mat {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &GE {
        &self.entries[i][j]
    }

    /// Block (bi, bj) with bi, bj ∈ {0, 1}.
    pub fn block(&self, bi: usize, bj: usize) -> Mat {
        let (r0, r1) = if bi == 0 { (0, self.shape.rows.0) } else { (self.shape.rows.0, self.shape.n_rows()) };
        let (c0, c1) = if bj == 0 { (0, self.shape.cols.0) } else { (self.shape.cols.0, self.shape.n_cols()) };
        self.entries[r0..r1].iter().map(|r| r[c0..c1].to_vec()).collect()
    }

    fn from_blocks(shape: BlockShape, parity: MatrixParity, l: u32, blocks: [[Mat; 2]; 2]) -> SuperMatrix {
        let mut entries = Vec::with_capacity(shape.n_rows());
        for row_blocks in &blocks {
            let n = row_blocks[0].len().max(row_blocks[1].len());
            for i in 0..n {
                let mut row = Vec::with_capacity(shape.n_cols());
                if i < row_blocks[0].len() {
                    row.extend(row_blocks[0][i].iter().cloned());
                }
                if i < row_blocks[1].len() {
                    row.extend(row_blocks[1][i].iter().cloned());
                }
                entries.push(row);
            }
        }
        SuperMatrix { shape, parity, l, entries }
    }
}

pub fn sm_mul(x: &SuperMatrix, y: &SuperMatrix) -> Result<SuperMatrix> {
    if x.shape.cols != y.shape.rows {
        return Err(Error::InvalidShape(format!("cannot multiply {:?} by {:?}", x.shape, y.shape)));
    }
    if x.l != y.l {
        return Err(Error::InvalidOperand(format!("mismatched L = {} and {}", x.l, y.l)));
    }
    let parity = match (x.parity, y.parity) {
        (MatrixParity::Even, MatrixParity::Even) | (MatrixParity::Odd, MatrixParity::Odd) => MatrixParity::Even,
        (MatrixParity::Even, MatrixParity::Odd) | (MatrixParity::Odd, MatrixParity::Even) => MatrixParity::Odd,
        _ => MatrixParity::None,
    };
    Ok(SuperMatrix {
        shape: BlockShape { rows: x.shape.rows, cols: y.shape.cols },
        parity,
        l: x.l,
        entries: linalg::mat_mul(&x.entries, &y.entries, x.l),
    })
}

/// Supertranspose. The matrix is split into its even and odd homogeneous
/// parts; the even part maps to (Aᵗ, Cᵗ; −Bᵗ, Dᵗ) and the odd part to
/// (Aᵗ, −Cᵗ; Bᵗ, Dᵗ).
pub fn supertranspose(x: &SuperMatrix) -> SuperMatrix {
    let shape = x.shape;
    let t = shape.transposed();
    let mut entries = linalg::zeros(t.n_rows(), t.n_cols(), x.l);
    for (i, row) in x.entries.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let ri = shape.row_parity(i);
            let cj = shape.col_parity(j);
            entries[j][i] = if ri == cj {
                e.clone()
            } else {
                // Even part of the matrix lives in the odd part of off-diagonal entries.
                let even_part = e.odd_part();
                let odd_part = e.even_part();
                if ri == Parity::Even {
                    // B block moves to bottom-left.
                    &odd_part - &even_part
                } else {
                    // C block moves to top-right.
                    &even_part - &odd_part
                }
            };
        }
    }
    SuperMatrix { shape: t, parity: x.parity, l: x.l, entries }
}

pub fn supertrace(x: &SuperMatrix) -> Result<GE> {
    if !x.shape.is_square() {
        return Err(Error::InvalidShape(format!("supertrace of non-square {:?}", x.shape)));
    }
    let p = x.shape.rows.0;
    let mut s = GE::zero(x.l);
    for i in 0..x.shape.n_rows() {
        s = if i < p { &s + &x.entries[i][i] } else { &s - &x.entries[i][i] };
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Route {
    #[serde(rename = "viaD")]
    ViaD,
    #[serde(rename = "viaA")]
    ViaA,
    #[serde(rename = "both")]
    Both,
}

impl std::str::FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Route> {
        match s {
            "viaD" => Ok(Route::ViaD),
            "viaA" => Ok(Route::ViaA),
            "both" => Ok(Route::Both),
            _ => Err(Error::InvalidInput(format!("unknown route {s:?}"))),
        }
    }
}

fn check_even_square(x: &SuperMatrix) -> Result<()> {
    if !x.shape.is_square() {
        return Err(Error::InvalidShape(format!("Berezinian needs a square shape, got {:?}", x.shape)));
    }
    if x.parity != MatrixParity::Even {
        return Err(Error::NotEven(format!("declared parity is {:?}", x.parity)));
    }
    Ok(())
}

fn ber_via_d(x: &SuperMatrix) -> Result<GE> {
    let l = x.l;
    let [a, b, c, d] = [x.block(0, 0), x.block(0, 1), x.block(1, 0), x.block(1, 1)];
    let one = GE::one(l);
    let det_d = linalg::det_bird(&d, &one);
    if det_d.body().is_zero() {
        return Err(Error::NonInvertibleBlock("D".into()));
    }
    let d_inv = linalg::grassmann_inverse(&d, l).map_err(|_| Error::NonInvertibleBlock("D".into()))?;
    let s = linalg::mat_sub(&a, &linalg::mat_mul(&linalg::mat_mul(&b, &d_inv, l), &c, l));
    Ok(&linalg::det_bird(&s, &one) * &det_d.inverse()?)
}

fn ber_via_a(x: &SuperMatrix) -> Result<GE> {
    let l = x.l;
    let [a, b, c, d] = [x.block(0, 0), x.block(0, 1), x.block(1, 0), x.block(1, 1)];
    let one = GE::one(l);
    let det_a = linalg::det_bird(&a, &one);
    if det_a.body().is_zero() {
        return Err(Error::NonInvertibleBlock("A".into()));
    }
    let a_inv = linalg::grassmann_inverse(&a, l).map_err(|_| Error::NonInvertibleBlock("A".into()))?;
    let s = linalg::mat_sub(&d, &linalg::mat_mul(&linalg::mat_mul(&c, &a_inv, l), &b, l));
    let det_s = linalg::det_bird(&s, &one);
    if det_s.body().is_zero() {
        return Err(Error::NonInvertibleBlock("D - C A^-1 B".into()));
    }
    Ok(&det_a * &det_s.inverse()?)
}

pub fn berezinian(x: &SuperMatrix, route: Route) -> Result<GE> {
    check_even_square(x)?;
    match route {
        Route::ViaD => ber_via_d(x),
        Route::ViaA => ber_via_a(x),
        Route::Both => {
            let vd = ber_via_d(x)?;
            let va = ber_via_a(x)?;
            if vd != va {
                return Err(Error::RouteMismatch(format!("viaD = {vd}, viaA = {va}")));
            }
            Ok(vd)
        }
    }
}

/// Berezinian by whichever factorisation is defined (viaD first).
pub fn ber(x: &SuperMatrix) -> Result<GE> {
    match berezinian(x, Route::ViaD) {
        Err(Error::NonInvertibleBlock(_)) => berezinian(x, Route::ViaA),
        other => other,
    }
}

pub fn sm_inverse(x: &SuperMatrix) -> Result<SuperMatrix> {
    check_even_square(x)?;
    let l = x.l;
    let [a, b, c, d] = [x.block(0, 0), x.block(0, 1), x.block(1, 0), x.block(1, 1)];
    let d_inv = linalg::grassmann_inverse(&d, l).map_err(|_| Error::NonInvertibleBlock("D".into()))?;
    let bdi = linalg::mat_mul(&b, &d_inv, l);
    let dic = linalg::mat_mul(&d_inv, &c, l);
    let s = linalg::mat_sub(&a, &linalg::mat_mul(&bdi, &c, l));
    let s_inv = linalg::grassmann_inverse(&s, l).map_err(|_| Error::NonInvertibleBlock("A - B D^-1 C".into()))?;
    let tl = s_inv.clone();
    let tr = linalg::mat_neg(&linalg::mat_mul(&s_inv, &bdi, l));
    let bl = linalg::mat_neg(&linalg::mat_mul(&dic, &s_inv, l));
    let br = linalg::mat_add(&d_inv, &linalg::mat_mul(&linalg::mat_mul(&dic, &s_inv, l), &bdi, l));
    Ok(SuperMatrix::from_blocks(x.shape, MatrixParity::Even, l, [[tl, tr], [bl, br]]))
}

pub fn sm_exp_nilpotent(x: &SuperMatrix) -> Result<SuperMatrix> {
    check_even_square(x)?;
    if let Some(e) = x.entries.iter().flatten().find(|e| !e.body().is_zero()) {
        return Err(Error::NotNilpotent(format!("entry {e} has nonzero body")));
    }
    let l = x.l;
    let n = x.shape.n_rows();
    let mut term = linalg::identity(n, l);
    let mut sum = term.clone();
    let mut k = 1i64;
    loop {
        term = linalg::mat_mul(&term, &x.entries, l);
        term = term.iter().map(|r| r.iter().map(|e| e.scale(&rat(1, k))).collect()).collect();
        if linalg::is_zero_mat(&term) {
            break;
        }
        sum = linalg::mat_add(&sum, &term);
        k += 1;
    }
    Ok(SuperMatrix { shape: x.shape, parity: MatrixParity::Even, l, entries: sum })
}

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    shape: BlockShape,
    parity: MatrixParity,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    l: Option<u32>,
    entries: Mat,
}

impl Serialize for SuperMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let l = if self.entries.iter().flatten().next().is_none() { Some(self.l) } else { None };
        MatrixWire { shape: self.shape, parity: self.parity, l, entries: self.entries.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SuperMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = MatrixWire::deserialize(d)?;
        let l = w.entries.iter().flatten().next().map(GE::l).or(w.l).unwrap_or(0);
        SuperMatrix::new(w.shape, w.parity, l, w.entries).map_err(de_error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::supernum::rat_int;

    fn t(i: u32) -> GE {
        GE::generator(2, i)
    }

    fn m11(a: GE, b: GE, c: GE, d: GE) -> SuperMatrix {
        SuperMatrix::new(BlockShape::square(1, 1), MatrixParity::Even, 2, vec![vec![a, b], vec![c, d]]).unwrap()
    }

    #[test]
    fn spec_examples() {
        let x = m11(GE::int(2, 2), t(1), t(2), GE::int(2, 5));
        assert_eq!(supertrace(&x).unwrap(), GE::int(2, -3));

        let diag = m11(GE::int(2, 2), GE::zero(2), GE::zero(2), GE::int(2, 3));
        assert_eq!(berezinian(&diag, Route::Both).unwrap(), GE::scalar(2, rat(2, 3)));

        let y = m11(GE::one(2) + &t(1) * &t(2), t(1), t(2), GE::one(2));
        assert!(berezinian(&y, Route::Both).unwrap().is_one());

        let st = supertranspose(&m11(GE::int(2, 7), t(1), t(2), GE::int(2, 3)));
        assert_eq!(st.entries()[0][1], t(2));
        assert_eq!(st.entries()[1][0], -t(1));
    }

    #[test]
    fn inverse_of_unipotent_example() {
        let x = m11(GE::one(2), t(1), t(2), GE::one(2));
        let inv = sm_inverse(&x).unwrap();
        assert_eq!(sm_mul(&x, &inv).unwrap().entries(), SuperMatrix::identity(1, 1, 2).entries());
        assert_eq!(sm_mul(&inv, &x).unwrap().entries(), SuperMatrix::identity(1, 1, 2).entries());
        let d = m11(GE::int(2, 2), GE::zero(2), GE::zero(2), GE::int(2, 3));
        let dinv = sm_inverse(&d).unwrap();
        assert_eq!(dinv.get(0, 0), &GE::scalar(2, rat(1, 2)));
        assert_eq!(dinv.get(1, 1), &GE::scalar(2, rat(1, 3)));
    }

    #[test]
    fn exp_example() {
        let t12 = &t(1) * &t(2);
        let x = m11(t12.clone(), GE::zero(2), GE::zero(2), GE::zero(2));
        let e = sm_exp_nilpotent(&x).unwrap();
        assert_eq!(e.get(0, 0), &(GE::one(2) + &t12));
        assert_eq!(ber(&e).unwrap(), supertrace(&x).unwrap().exp_nilpotent().unwrap());
        let bad = m11(GE::one(2), GE::zero(2), GE::zero(2), GE::zero(2));
        assert_eq!(sm_exp_nilpotent(&bad).unwrap_err().name(), "NotNilpotent");
    }

    #[test]
    fn parity_is_enforced() {
        let r = SuperMatrix::new(
            BlockShape::square(1, 1),
            MatrixParity::Even,
            2,
            vec![vec![t(1), GE::zero(2)], vec![GE::zero(2), GE::one(2)]],
        );
        assert_eq!(r.unwrap_err().name(), "NotEven");
        let odd = SuperMatrix::new(
            BlockShape::square(1, 1),
            MatrixParity::None,
            2,
            vec![vec![t(1), GE::zero(2)], vec![GE::zero(2), GE::one(2)]],
        )
        .unwrap();
        assert_eq!(berezinian(&odd, Route::ViaD).unwrap_err().name(), "NotEven");
    }

    #[test]
    fn json_round_trip() {
        let x = m11(GE::int(2, 2), t(1), t(2), GE::scalar(2, rat_int(5)));
        let s = serde_json::to_string(&x).unwrap();
        let back: SuperMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}
