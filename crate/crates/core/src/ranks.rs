//! Riemann–Roch on supercurves, Ramond rank tables and moduli dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SuperDim {
    pub even: i64,
    pub odd: i64,
}

impl SuperDim {
    pub fn new(even: i64, odd: i64) -> SuperDim {
        SuperDim { even, odd }
    }

    /// Super Euler characteristic: even minus odd.
    pub fn s_chi(&self) -> i64 {
        self.even - self.odd
    }
}

/// χ(L) on a 1|1 supercurve with odd ideal of degree `deg_j`.
pub fn rr_supercurve(deg_l: i64, g: i64, deg_j: i64) -> Result<SuperDim> {
    if g < 0 {
        return Err(Error::PreconditionViolated(format!("genus {g} is negative")));
    }
    Ok(SuperDim::new(deg_l - g + 1, deg_l + deg_j - g + 1))
}

/// χ(L) on a SUSY curve, where the odd ideal is a spin structure.
pub fn rr_susy(deg_l: i64, g: i64) -> Result<SuperDim> {
    if g < 2 {
        return Err(Error::PreconditionViolated(format!("genus {g} < 2")));
    }
    rr_supercurve(deg_l, g, g - 1)
}

fn check_ramond(g: i64, n_r: i64) -> Result<()> {
    if g < 2 {
        return Err(Error::PreconditionViolated(format!("genus {g} < 2")));
    }
    if n_r % 2 != 0 {
        return Err(Error::OddRamondCount(format!("n_R = {n_r}")));
    }
    Ok(())
}

/// rank R^i π_* ω^j for a family with `n_r` Ramond punctures.
pub fn ramond_rank_table(g: i64, n_r: i64, i: i64, j: i64) -> Result<SuperDim> {
    check_ramond(g, n_r)?;
    if n_r <= 6 * g - 6 {
        return Err(Error::PreconditionViolated(format!("n_R = {n_r} must exceed 6g - 6 = {}", 6 * g - 6)));
    }
    let h = n_r / 2;
    let d = match (i, j) {
        (0, -2) => SuperDim::new(n_r + 3 - 3 * g, 3 * h + 2 - 2 * g),
        (0, -1) => SuperDim::new(n_r + 1 - g, h + 2 - 2 * g),
        (0, 0) => SuperDim::new(1, h),
        (0, 1) => SuperDim::new(g, 0),
        (1, -2) | (1, -1) => SuperDim::new(0, 0),
        (1, 0) => SuperDim::new(g, 0),
        (1, 1) => SuperDim::new(1, h),
        _ => return Err(Error::InvalidInput(format!("no table entry for i = {i}, j = {j}"))),
    };
    Ok(d)
}

/// Dimension of the moduli space of SUSY curves with NS and Ramond punctures.
pub fn moduli_dim(g: i64, n_ns: i64, n_r: i64) -> Result<SuperDim> {
    if n_ns < 0 || n_r < 0 {
        return Err(Error::PreconditionViolated("puncture counts must be non-negative".into()));
    }
    check_ramond(g, n_r)?;
    Ok(SuperDim::new(3 * g - 3 + n_ns + n_r, 2 * g - 2 + n_ns + n_r / 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riemann_roch_examples() {
        assert_eq!(rr_supercurve(0, 2, 1).unwrap(), SuperDim::new(-1, 0));
        assert_eq!(rr_supercurve(1, 2, 1).unwrap(), SuperDim::new(0, 1));
        assert_eq!(rr_susy(3, 2).unwrap(), SuperDim::new(2, 3));
        assert_eq!(rr_susy(0, 2).unwrap(), SuperDim::new(-1, 0));
        for deg in [0, 7, -3] {
            assert_eq!(rr_supercurve(deg, 3, 5).unwrap().s_chi(), -5);
            assert_eq!(rr_susy(deg, 4).unwrap().s_chi(), -3);
        }
    }

    #[test]
    fn table_examples() {
        assert_eq!(ramond_rank_table(2, 8, 0, -2).unwrap(), SuperDim::new(5, 10));
        assert_eq!(ramond_rank_table(2, 8, 1, 0).unwrap(), SuperDim::new(2, 0));
        assert_eq!(ramond_rank_table(2, 8, 0, -1).unwrap(), SuperDim::new(7, 2));
        assert_eq!(ramond_rank_table(2, 6, 0, 0).unwrap_err().name(), "PreconditionViolated");
        assert_eq!(ramond_rank_table(2, 9, 0, 0).unwrap_err().name(), "OddRamondCount");
    }

    #[test]
    fn moduli_examples() {
        assert_eq!(moduli_dim(2, 0, 0).unwrap(), SuperDim::new(3, 2));
        assert_eq!(moduli_dim(2, 1, 0).unwrap(), SuperDim::new(4, 3));
        assert_eq!(moduli_dim(2, 0, 8).unwrap(), SuperDim::new(11, 6));
        assert_eq!(moduli_dim(2, 0, 3).unwrap_err().name(), "OddRamondCount");
    }
}
