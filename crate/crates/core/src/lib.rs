//! Order-n contact between holomorphic Hermitian vector bundles.
//!
//! The crate works from Gram-matrix expressions: [`kernelexpr`] turns them
//! into truncated jets ([`jet`]), [`geometry`] computes curvature and its
//! covariant derivatives, and [`contact`] decides point-wise and along-slice
//! contact. [`pascal`] holds the block Pascal algebra, [`wordcalc`] the exact
//! noncommutative identities behind the extension recursion, and [`rkhs`] the
//! finite quotient models of shift operators.

pub mod contact;
pub mod corpus;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod kernelexpr;
pub mod linalg;
pub mod pascal;
pub mod rkhs;
pub mod wordcalc;
pub mod par;

pub use error::{Error, Result};
