//! Multi-indices and the cached graded-lexicographic index tables.
//!
//! Indices of total degree `d` come after all indices of degree `< d`; inside
//! one degree they are sorted lexicographically descending, so `z1` powers
//! come first. For `m = 2` the order starts `(0,0), (1,0), (0,1), (2,0), ...`.
//! The table for order `n` is a prefix of the table for any larger order.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn zero(m: usize) -> Self {
        MultiIndex(vec![0; m])
    }

    /// `e_i` with a zero-based direction.
    pub fn unit(m: usize, i: usize) -> Self {
        let mut v = vec![0; m];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&k| factorial(k)).product()
    }

    pub fn dominated_by(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference; caller guarantees `other <= self`.
    pub fn sub(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

/// All multi-indices of dimension `m` and degree `<= order`, with lookup data.
#[derive(Debug)]
pub struct IndexTable {
    pub m: usize,
    pub order: usize,
    pub indices: Vec<MultiIndex>,
    lookup: HashMap<Vec<usize>, usize>,
    /// `fact[p] = indices[p]!`
    pub fact: Vec<f64>,
    /// For position `p`: every `(pos(g), pos(indices[p] - g))` with `g <= indices[p]`.
    pub splits: Vec<Vec<(usize, usize)>>,
    /// `raise[p][i]` is the position of `indices[p] + e_i`, if it is in the table.
    pub raise: Vec<Vec<Option<usize>>>,
    /// `count_upto[d]` = number of indices of degree `<= d`.
    pub count_upto: Vec<usize>,
}

fn compositions(m: usize, d: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
    if prefix.len() + 1 == m {
        prefix.push(d);
        out.push(MultiIndex(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in (0..=d).rev() {
        prefix.push(first);
        compositions(m, d - first, prefix, out);
        prefix.pop();
    }
}

impl IndexTable {
    fn build(m: usize, order: usize) -> Self {
        assert!(m >= 1, "dimension must be positive");
        let mut indices = Vec::new();
        let mut count_upto = Vec::with_capacity(order + 1);
        for d in 0..=order {
            compositions(m, d, &mut Vec::with_capacity(m), &mut indices);
            count_upto.push(indices.len());
        }
        let lookup: HashMap<Vec<usize>, usize> =
            indices.iter().enumerate().map(|(p, a)| (a.0.clone(), p)).collect();
        let fact = indices.iter().map(MultiIndex::factorial).collect();
        let splits = indices
            .iter()
            .map(|a| {
                indices
                    .iter()
                    .enumerate()
                    .take_while(|(_, g)| g.order() <= a.order())
                    .filter(|(_, g)| g.dominated_by(a))
                    .map(|(pg, g)| (pg, lookup[&a.sub(g).0]))
                    .collect()
            })
            .collect();
        let raise = indices
            .iter()
            .map(|a| {
                (0..m)
                    .map(|i| {
                        let mut v = a.0.clone();
                        v[i] += 1;
                        lookup.get(&v).copied()
                    })
                    .collect()
            })
            .collect();
        IndexTable { m, order, indices, lookup, fact, splits, raise, count_upto }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn position(&self, a: &MultiIndex) -> Option<usize> {
        self.lookup.get(&a.0).copied()
    }

    /// Number of indices of degree `<= d` (clamped to the table).
    pub fn count(&self, d: usize) -> usize {
        self.count_upto[d.min(self.order)]
    }
}

type TableCache = Mutex<HashMap<(usize, usize), Arc<IndexTable>>>;

static TABLES: Lazy<TableCache> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Shared table for `(m, order)`.
pub fn table(m: usize, order: usize) -> Arc<IndexTable> {
    let mut cache = TABLES.lock().expect("index table cache poisoned");
    cache
        .entry((m, order))
        .or_insert_with(|| Arc::new(IndexTable::build(m, order)))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order_m2() {
        let t = table(2, 2);
        let got: Vec<Vec<usize>> = t.indices.iter().map(|a| a.0.clone()).collect();
        assert_eq!(
            got,
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
        );
    }

    #[test]
    fn smaller_table_is_prefix() {
        let big = table(3, 5);
        for n in 0..5 {
            let small = table(3, n);
            assert_eq!(small.indices[..], big.indices[..small.len()]);
            assert_eq!(small.len(), big.count(n));
        }
    }

    #[test]
    fn counts_match_binomial() {
        // number of monomials of degree <= n in m variables is C(n+m, m)
        assert_eq!(table(3, 4).len(), 35);
        assert_eq!(table(2, 3).len(), 10);
        assert_eq!(table(1, 6).len(), 7);
    }

    #[test]
    fn splits_cover_every_divisor() {
        let t = table(2, 3);
        let p = t.position(&MultiIndex(vec![1, 2])).unwrap();
        assert_eq!(t.splits[p].len(), 2 * 3);
    }
}
