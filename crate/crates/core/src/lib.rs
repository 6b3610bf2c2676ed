//! Local Smith forms of polynomial and power-series matrix families at
//! `ε = 0`, computed with exact arithmetic.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod artin;
pub mod check;
pub mod error;
pub mod ginverse;
pub mod laurent;
pub mod mat;
pub mod poly;
pub mod recursion;
pub mod scalar;
pub mod series;
pub mod subspace;
pub mod transform;

pub use error::{Error, Result};
pub use laurent::LaurentSeries;
pub use mat::Mat;
pub use scalar::{Float64, GaussianRational, Rational, Scalar};
pub use series::{MatSeries, SeriesKind};
pub use subspace::{Decomposition, Subspace};
pub use check::CheckEntry;
pub use poly::{oracle_smith_polynomial, OracleSmith, Poly};
pub use recursion::{run_until_stabilized, RecursionState, StabilizationReport};
pub use transform::{diagonalize, DiagonalForm, Diagonalization, DiagonalizeOptions, Transform};
