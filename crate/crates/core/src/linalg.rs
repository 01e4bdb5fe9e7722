//! Dense matrix helpers over Grassmann scalars and rationals.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::supernum::{Rational, RingElem, GE};

pub type Mat = Vec<Vec<GE>>;

pub fn zeros(rows: usize, cols: usize, l: u32) -> Mat {
    vec![vec![GE::zero(l); cols]; rows]
}

pub fn identity(n: usize, l: u32) -> Mat {
    let mut m = zeros(n, n, l);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = GE::one(l);
    }
    m
}

pub fn mat_mul(a: &Mat, b: &Mat, l: u32) -> Mat {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = zeros(n, m, l);
    for i in 0..n {
        for (t, brow) in b.iter().enumerate() {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                if !brow[j].is_zero() {
                    out[i][j] = &out[i][j] + &(&a[i][t] * &brow[j]);
                }
            }
        }
    }
    out
}

pub fn mat_add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect()
}

pub fn mat_sub(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect()).collect()
}

pub fn mat_neg(a: &Mat) -> Mat {
    a.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>], cols: usize) -> Vec<Vec<T>> {
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn is_zero_mat(a: &Mat) -> bool {
    a.iter().all(|r| r.iter().all(GE::is_zero))
}

pub fn body(a: &Mat) -> Vec<Vec<Rational>> {
    a.iter().map(|r| r.iter().map(GE::body).collect()).collect()
}

/// Determinant over a field by Gaussian elimination.
pub fn rational_det(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let piv = m[c][c].clone();
        det *= &piv;
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &piv;
            for k in c..n {
                let v = &f * &m[c][k];
                m[r][k] -= v;
            }
        }
    }
    det
}

/// Inverse over a field by Gauss–Jordan elimination.
pub fn rational_inverse(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(p, c);
        let piv = m[c][c].recip();
        for v in m[c].iter_mut() {
            *v *= &piv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in 0..2 * n {
                    let v = &f * &m[c][k];
                    m[r][k] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Inverse of a square Grassmann matrix with invertible body: invert the body
/// over the rationals, then apply the terminating Neumann correction for the
/// nilpotent remainder. Works for any parity pattern.
pub fn grassmann_inverse(a: &Mat, l: u32) -> Result<Mat> {
    let n = a.len();
    let b = body(a);
    let binv = rational_inverse(&b)
        .ok_or_else(|| Error::NotInvertible(format!("{n}x{n} matrix has singular body")))?;
    let binv_ge: Mat = binv.iter().map(|r| r.iter().map(|q| GE::scalar(l, q.clone())).collect()).collect();
    let nil: Mat = a.iter().map(|r| r.iter().map(GE::soul).collect()).collect();
    let step = mat_neg(&mat_mul(&binv_ge, &nil, l));
    let mut term = binv_ge.clone();
    let mut sum = binv_ge;
    loop {
        term = mat_mul(&step, &term, l);
        if is_zero_mat(&term) {
            return Ok(sum);
        }
        sum = mat_add(&sum, &term);
    }
}

/// Division-free determinant (Bird's algorithm). Valid over any commutative
/// ring, so it is used for even blocks where zero divisors forbid pivoting.
pub fn det_bird<R: RingElem>(a: &[Vec<R>], proto: &R) -> R {
    let n = a.len();
    if n == 0 {
        return proto.one_like();
    }
    let mut x: Vec<Vec<R>> = a.to_vec();
    for _ in 1..n {
        // mu(X): strictly upper part of X, diagonal -(sum of later diagonal entries).
        let mut mu: Vec<Vec<R>> = vec![vec![proto.zero_like(); n]; n];
        let mut tail = proto.zero_like();
        for i in (0..n).rev() {
            mu[i][i] = tail.r_neg();
            tail = tail.r_add(&x[i][i]);
            for j in i + 1..n {
                mu[i][j] = x[i][j].clone();
            }
        }
        let mut next = vec![vec![proto.zero_like(); n]; n];
        for i in 0..n {
            for k in i..n {
                if mu[i][k].r_is_zero() {
                    continue;
                }
                for j in 0..n {
                    next[i][j] = next[i][j].r_add(&mu[i][k].r_mul(&a[k][j]));
                }
            }
        }
        x = next;
    }
    if n % 2 == 1 {
        x[0][0].clone()
    } else {
        x[0][0].r_neg()
    }
}

/// Laplace expansion along rows with memoisation on the remaining column set.
pub fn det_cofactor<R: RingElem>(a: &[Vec<R>], proto: &R) -> R {
    fn go<R: RingElem>(a: &[Vec<R>], row: usize, cols: u64, proto: &R, memo: &mut HashMap<u64, R>) -> R {
        if row == a.len() {
            return proto.one_like();
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc = proto.zero_like();
        let mut sign_pos = true;
        for j in 0..a.len() {
            if cols >> j & 1 == 0 {
                continue;
            }
            if !a[row][j].r_is_zero() {
                let minor = go(a, row + 1, cols & !(1 << j), proto, memo);
                let t = a[row][j].r_mul(&minor);
                acc = if sign_pos { acc.r_add(&t) } else { acc.r_sub(&t) };
            }
            sign_pos = !sign_pos;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    let n = a.len();
    assert!(n < 64, "cofactor expansion limited to n < 64");
    go(a, 0, (1u64 << n) - 1, proto, &mut HashMap::new())
}

/// Adjugate via cofactors (division-free).
pub fn adjugate<R: RingElem>(a: &[Vec<R>], proto: &R) -> Vec<Vec<R>> {
    let n = a.len();
    let mut adj = vec![vec![proto.zero_like(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<R>> = a
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect())
                .collect();
            let d = det_bird(&minor, proto);
            adj[j][i] = if (i + j) % 2 == 0 { d } else { d.r_neg() };
        }
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::supernum::{rat_int, GE};

    #[test]
    fn bird_matches_cofactor_on_integers() {
        let a: Vec<Vec<Rational>> = vec![
            vec![rat_int(2), rat_int(-1), rat_int(0), rat_int(3)],
            vec![rat_int(1), rat_int(4), rat_int(5), rat_int(-2)],
            vec![rat_int(0), rat_int(7), rat_int(1), rat_int(1)],
            vec![rat_int(3), rat_int(0), rat_int(-6), rat_int(2)],
        ];
        let z = Rational::zero();
        assert_eq!(det_bird(&a, &z), det_cofactor(&a, &z));
        assert_eq!(det_bird(&a, &z), rational_det(&a));
    }

    #[test]
    fn neumann_inverse_of_unipotent() {
        let l = 2;
        let t1 = GE::generator(l, 1);
        let t2 = GE::generator(l, 2);
        let a = vec![vec![GE::one(l), t1.clone()], vec![t2.clone(), GE::one(l)]];
        let inv = grassmann_inverse(&a, l).unwrap();
        assert_eq!(mat_mul(&a, &inv, l), identity(2, l));
        assert_eq!(mat_mul(&inv, &a, l), identity(2, l));
    }
}
