//! Exact arithmetic for supergeometry: Grassmann scalars, supermatrices and
//! Berezinians, super Laurent series on SUSY disks, and the matrices whose
//! Berezinians assemble the super Mumford isomorphism.

pub mod berezin;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod mumford;
pub mod ranks;
pub mod supermatrix;
pub mod supernum;
pub mod susydisk;

pub use error::{Error, Result};
pub use supernum::{GrassmannElement, OddIndex, Parity, Rational, GE};
