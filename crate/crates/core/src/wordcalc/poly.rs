use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    F,
    G,
    /// `F~`
    Ft,
    /// `G~`
    Gt,
    Z0,
    Z0Inv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub family: Family,
    pub index: u32,
}

impl Symbol {
    pub fn new(family: Family, index: u32) -> Self {
        let index = if matches!(family, Family::Z0 | Family::Z0Inv) { 0 } else { index };
        Symbol { family, index }
    }

    fn cancels(self, next: Symbol) -> bool {
        matches!(
            (self.family, next.family),
            (Family::Z0, Family::Z0Inv) | (Family::Z0Inv, Family::Z0)
        )
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::F => write!(f, "F{}", self.index),
            Family::G => write!(f, "G{}", self.index),
            Family::Ft => write!(f, "F~{}", self.index),
            Family::Gt => write!(f, "G~{}", self.index),
            Family::Z0 => write!(f, "Z0"),
            Family::Z0Inv => write!(f, "Z0inv"),
        }
    }
}

pub type Word = Vec<Symbol>;

/// Pushes `s` onto a reduced word, cancelling `Z0 Z0inv` and `Z0inv Z0`.
fn push_reduced(w: &mut Word, s: Symbol) {
    if w.last().is_some_and(|&t| t.cancels(s)) {
        w.pop();
    } else {
        w.push(s);
    }
}

/// Exact noncommutative polynomial; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NCPoly {
    terms: BTreeMap<Word, BigRational>,
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly::default()
    }

    pub fn one() -> Self {
        Self::monomial(Vec::new(), BigRational::one())
    }

    pub fn sym(family: Family, index: u32) -> Self {
        Self::monomial(vec![Symbol::new(family, index)], BigRational::one())
    }

    pub fn monomial(word: Word, c: BigRational) -> Self {
        let mut reduced = Word::with_capacity(word.len());
        for s in word {
            push_reduced(&mut reduced, s);
        }
        let mut p = NCPoly::zero();
        p.add_term(reduced, c);
        p
    }

    fn add_term(&mut self, w: Word, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &[Symbol]) -> BigRational {
        self.terms.get(w).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &NCPoly) -> NCPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NCPoly {
        NCPoly { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c.clone())).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> NCPoly {
        if c.is_zero() {
            return NCPoly::zero();
        }
        NCPoly { terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect() }
    }

    pub fn scale_int(&self, c: u64) -> NCPoly {
        self.scale(&BigRational::from_integer(BigInt::from(c)))
    }

    /// Word concatenation with eager `Z0` cancellation at the junction.
    pub fn mul(&self, other: &NCPoly) -> NCPoly {
        let mut acc: BTreeMap<Word, BigRational> = BTreeMap::new();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut w = wa.clone();
                for &s in wb {
                    push_reduced(&mut w, s);
                }
                *acc.entry(w).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        NCPoly { terms: acc }
    }

    /// Product of several factors, left to right.
    pub fn product(factors: &[&NCPoly]) -> NCPoly {
        factors.iter().fold(NCPoly::one(), |acc, f| acc.mul(f))
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if w.is_empty() {
                write!(f, "*1")?;
            }
            for s in w {
                write!(f, "*{s}")?;
            }
        }
        Ok(())
    }
}
