//! Exact noncommutative word calculus for the extension recursions.
//!
//! Polynomials live in the free algebra on `F_l, G_l, F~_l, G~_l, Z0, Z0inv`
//! where the only relation is `Z0 Z0inv = Z0inv Z0 = 1`. The recursions below
//! produce sequences indexed from 1; `seq[l - 1]` holds the weight-`l` term.

mod appendix;
mod poly;

pub use appendix::{verify_appendix, verify_appendix_with, AppendixOptions, AppendixReport, CheckKind, IdentityCheck};
pub use poly::{Family, NCPoly, Symbol, Word};

use num::{BigInt, BigRational};

use crate::error::{Error, Result};
use crate::pascal::binomial;

/// Longest sequence `build_sequences` will produce.
pub const DEFAULT_BOUND: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// `H_l = F_l - sum binom(l,i) G_i H_{l-i}`.
    Recur1 { f: Family, g: Family },
    /// `K_l = -G_l - sum binom(l,i) G_{l-i} K_i`.
    Recur19 { g: Family },
    /// `K_l = -G_l - sum binom(l,i) K_i G_{l-i}`.
    Recur199 { g: Family },
    /// `Z_l = G_l Z0 - sum_{i=1}^{l} binom(l,i) Z_{l-i} G~_i` with `Z_0 = Z0`.
    R01,
    /// `I_1 = 1`, `I_l = -sum binom(n-k+l-1,i) I_{l-i} G_i`.
    RuuuI { n: usize, k: usize, g: Family },
    /// Part of `R01` made of words starting with some `G_k Z0`.
    SplitX,
    /// Part of `R01` made of words starting with `Z0 G~_k`.
    SplitY,
}

impl Rule {
    pub fn recur1() -> Self {
        Rule::Recur1 { f: Family::F, g: Family::G }
    }
    pub fn recur19() -> Self {
        Rule::Recur19 { g: Family::G }
    }
    pub fn recur199() -> Self {
        Rule::Recur199 { g: Family::G }
    }
    pub fn ruuu(n: usize, k: usize) -> Self {
        Rule::RuuuI { n, k, g: Family::G }
    }
}

pub(crate) fn binom_q(n: usize, k: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(binomial(n, k)))
}

fn s(f: Family, l: usize) -> NCPoly {
    NCPoly::sym(f, l as u32)
}

/// Sequence terms `1..=length` for `rule`.
pub fn build_sequences(rule: Rule, length: usize) -> Result<Vec<NCPoly>> {
    if length > DEFAULT_BOUND {
        return Err(Error::Range(format!("sequence length {length} exceeds bound {DEFAULT_BOUND}")));
    }
    Ok(build_unbounded(rule, length))
}

pub(crate) fn build_unbounded(rule: Rule, length: usize) -> Vec<NCPoly> {
    // slot 0 is Z0 for R01 and unused otherwise
    let mut seq: Vec<NCPoly> = vec![NCPoly::zero(); length + 1];
    if let Rule::R01 = rule {
        seq[0] = s(Family::Z0, 0);
    }
    let z0 = s(Family::Z0, 0);
    for l in 1..=length {
        let mut t = match rule {
            Rule::Recur1 { f, .. } => s(f, l),
            Rule::Recur19 { g } | Rule::Recur199 { g } => s(g, l).neg(),
            Rule::R01 | Rule::SplitX => s(Family::G, l).mul(&z0),
            Rule::SplitY => z0.mul(&s(Family::Gt, l)).neg(),
            Rule::RuuuI { .. } if l == 1 => NCPoly::one(),
            Rule::RuuuI { .. } => NCPoly::zero(),
        };
        let upper = if rule == Rule::R01 { l } else { l - 1 };
        for i in 1..=upper {
            let term = match rule {
                Rule::Recur1 { g, .. } => s(g, i).mul(&seq[l - i]).scale(&binom_q(l, i)),
                Rule::Recur19 { g } => s(g, l - i).mul(&seq[i]).scale(&binom_q(l, i)),
                Rule::Recur199 { g } => seq[i].mul(&s(g, l - i)).scale(&binom_q(l, i)),
                Rule::R01 => seq[l - i].mul(&s(Family::Gt, i)).scale(&binom_q(l, i)),
                Rule::SplitX | Rule::SplitY => seq[i].mul(&s(Family::Gt, l - i)).scale(&binom_q(l, i)),
                Rule::RuuuI { n, k, g } => seq[l - i].mul(&s(g, i)).scale(&binom_q(n - k + l - 1, i)),
            };
            t = t.sub(&term);
        }
        seq[l] = t;
    }
    seq.remove(0);
    seq
}

/// Closed-form coefficient `(-1)^k l! / (i_1! ... i_k!)` of `G_{i_1}...G_{i_k}` in `K_l`.
pub fn coefficient_of_word(indices: &[usize]) -> Result<BigRational> {
    if indices.is_empty() || indices.contains(&0) {
        return Err(Error::Invalid("word must be non-empty with positive indices".into()));
    }
    let fact = |n: usize| (1..=n).fold(BigInt::from(1), |a, b| a * BigInt::from(b));
    let l: usize = indices.iter().sum();
    let den = indices.iter().fold(BigInt::from(1), |a, &i| a * fact(i));
    let sign = if indices.len().is_multiple_of(2) { 1 } else { -1 };
    Ok(BigRational::new(fact(l) * BigInt::from(sign), den))
}

/// `sum_{k=1}^{n} binom(n,k) Z_{n-k} F~_k Z0inv` given `z = [Z_1, ..]`.
pub(crate) fn conjugated_rhs(z: &[NCPoly], n: usize) -> NCPoly {
    let zinv = s(Family::Z0Inv, 0);
    let mut acc = NCPoly::zero();
    for k in 1..=n {
        let zk = if k == n { s(Family::Z0, 0) } else { z[n - k - 1].clone() };
        acc = acc.add(&NCPoly::product(&[&zk, &s(Family::Ft, k), &zinv]).scale(&binom_q(n, k)));
    }
    acc
}
