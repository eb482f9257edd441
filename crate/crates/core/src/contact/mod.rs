//! Order-n contact checks, point-wise and along the slice `Z = {z1 = 0}`.
//!
//! Naming: bundle A carries Gram `H`, bundle B carries `Ht`, and a candidate
//! `A0` relates them by `H = A0 Ht A0^*`.

mod checks;
mod problem;
mod verdict;

pub use checks::{
    extend_a_multi, extend_a_sequence, geometric_conditions, holomorphy_conditions, jet_gram,
    pointwise_rank1_decide, pointwise_verify, z1_gram_isometry, JetVars,
};
pub use problem::{alongz_check, pointwise_check, Candidate, ContactProblem, Mode};
pub use verdict::{combine, Condition, ContactReport, PointReport, Route, Verdict};
