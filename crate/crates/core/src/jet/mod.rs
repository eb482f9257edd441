//! Truncated multivariate jets of matrix-valued functions.

mod herm;
mod holo;
mod index;

pub use herm::HermJet;
pub use holo::HoloJet;
pub use index::{factorial, table, IndexTable, MultiIndex};

#[cfg(test)]
mod tests;
