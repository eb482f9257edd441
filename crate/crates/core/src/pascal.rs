//! Block Pascal algebra: lower-triangular block matrices with `(i, j)` block
//! `binom(i, j) A_{i-j}` (zero-based), the generator `P`, and its commutant.

use num::{BigInt, BigRational, One, Zero};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::{table, HoloJet, MultiIndex};
use crate::linalg::{self, CMat};

pub const MAX_BINOMIAL_N: u64 = 60;

/// Exact `binom(n, k)`; `n <= 60`.
pub fn try_binomial(n: u64, k: u64) -> Result<u64> {
    if n > MAX_BINOMIAL_N {
        return Err(Error::Range(format!("binomial({n}, {k}) exceeds n <= {MAX_BINOMIAL_N}")));
    }
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    Ok(acc)
}

/// Panics beyond the `n <= 60` guard.
pub fn binomial(n: usize, k: usize) -> u64 {
    try_binomial(n as u64, k as u64).expect("binomial argument out of range")
}

/// Product of per-component binomials `binom(I, J)`, zero unless `J <= I`.
pub fn multi_binomial(i: &MultiIndex, j: &MultiIndex) -> u64 {
    i.0.iter().zip(&j.0).map(|(&a, &b)| binomial(a, b)).product()
}

/// `(n+1)l x (n+1)l` generator with sub-diagonal blocks `1 I, 2 I, ..., n I`.
pub fn pascal_generator(n: usize, l: usize) -> CMat {
    let size = (n + 1) * l;
    let mut p = CMat::zeros(size, size);
    for k in 1..=n {
        for d in 0..l {
            p[(k * l + d, (k - 1) * l + d)] = Complex64::new(k as f64, 0.0);
        }
    }
    p
}

/// An element of the Pascal algebra, given by its first block column.
#[derive(Debug, Clone, PartialEq)]
pub struct PascalBlock {
    pub order: usize,
    pub size: usize,
    pub column: Vec<CMat>,
}

impl PascalBlock {
    pub fn new(column: Vec<CMat>) -> Result<Self> {
        let Some(first) = column.first() else {
            return Err(Error::Dimension("empty first column".into()));
        };
        let l = first.nrows();
        if column.iter().any(|b| b.nrows() != l || b.ncols() != l) {
            return Err(Error::Dimension("column blocks must all be l x l".into()));
        }
        Ok(PascalBlock { order: column.len() - 1, size: l, column })
    }

    pub fn identity(n: usize, l: usize) -> Self {
        let mut column = vec![CMat::zeros(l, l); n + 1];
        column[0] = linalg::identity(l);
        PascalBlock { order: n, size: l, column }
    }

    /// Derivatives `d_dir^k A(z0)`, `k = 0..=order`, of a holomorphic jet (`dir` zero-based).
    pub fn from_holo_jet(a: &HoloJet, dir: usize) -> Result<Self> {
        if dir >= a.dim() {
            return Err(Error::Range(format!("direction {dir} in dimension {}", a.dim())));
        }
        let column = (0..=a.order())
            .map(|k| {
                let mut idx = MultiIndex::zero(a.dim());
                idx.0[dir] = k;
                a.extract(&idx)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(column)
    }

    pub fn expand(&self) -> CMat {
        let (n, l) = (self.order, self.size);
        let mut out = CMat::zeros((n + 1) * l, (n + 1) * l);
        for i in 0..=n {
            for j in 0..=i {
                let b = self.column[i - j].scale(binomial(i, j) as f64);
                out.view_mut((i * l, j * l), (l, l)).copy_from(&b);
            }
        }
        out
    }

    /// Product in the algebra: first column is the binomial convolution.
    pub fn product(&self, other: &PascalBlock) -> Result<PascalBlock> {
        if self.order != other.order || self.size != other.size {
            return Err(Error::Dimension("Pascal blocks of different shape".into()));
        }
        let column = (0..=self.order)
            .map(|k| {
                (0..=k).fold(CMat::zeros(self.size, self.size), |acc, j| {
                    acc + (&self.column[k - j] * &other.column[j]).scale(binomial(k, j) as f64)
                })
            })
            .collect();
        Ok(PascalBlock { order: self.order, size: self.size, column })
    }
}

/// Multi-variable transition matrix: block `(I, J)` is `binom(I, J) d^{I-J} A(z0)`
/// over all `|I|, |J| <= n` in graded-lex order.
pub fn multi_expand(a: &HoloJet, n: usize) -> Result<CMat> {
    if a.order() < n {
        return Err(Error::Order(format!("jet of order {} for transition of order {n}", a.order())));
    }
    let t = table(a.dim(), n);
    let l = a.rank();
    let mut out = CMat::zeros(t.len() * l, t.len() * l);
    for (pi, i) in t.indices.iter().enumerate() {
        for &(pj, pd) in &t.splits[pi] {
            let j = &t.indices[pj];
            let d = a.extract(&t.indices[pd])?;
            let w = multi_binomial(i, j) as f64;
            out.view_mut((pi * l, pj * l), (l, l)).copy_from(&d.scale(w));
        }
    }
    Ok(out)
}

/// Generator for direction `dir` on the full multi-index jet of order `n`:
/// row `I` maps to column `I - e_dir` with weight `I_dir`.
pub fn multi_generator(m: usize, n: usize, l: usize, dir: usize) -> CMat {
    let t = table(m, n);
    let mut out = CMat::zeros(t.len() * l, t.len() * l);
    for (pi, i) in t.indices.iter().enumerate() {
        if i.0[dir] == 0 {
            continue;
        }
        let mut lower = i.clone();
        lower.0[dir] -= 1;
        let pj = t.position(&lower).expect("lowered index in table");
        for d in 0..l {
            out[(pi * l + d, pj * l + d)] = Complex64::new(i.0[dir] as f64, 0.0);
        }
    }
    out
}

/// Exact basis of `{Q : P Q = Q P}` for the generator of order `n`, block size `l`.
#[derive(Debug, Clone)]
pub struct CommutantBasis {
    pub order: usize,
    pub size: usize,
    /// Each element is a row-major `(n+1)l x (n+1)l` matrix.
    pub basis: Vec<Vec<BigRational>>,
}

impl CommutantBasis {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    fn side(&self) -> usize {
        (self.order + 1) * self.size
    }

    pub fn matrices(&self) -> Vec<CMat> {
        let s = self.side();
        self.basis
            .iter()
            .map(|v| CMat::from_fn(s, s, |r, c| Complex64::new(rat_to_f64(&v[r * s + c]), 0.0)))
            .collect()
    }

    /// Whether element `k` has the exact block Pascal pattern.
    pub fn is_pascal(&self, k: usize) -> bool {
        let (n, l, s) = (self.order, self.size, self.side());
        let q = &self.basis[k];
        let at = |bi: usize, bj: usize, r: usize, c: usize| &q[(bi * l + r) * s + bj * l + c];
        for bi in 0..=n {
            for bj in 0..=n {
                for r in 0..l {
                    for c in 0..l {
                        let v = at(bi, bj, r, c);
                        let ok = if bj > bi {
                            v.is_zero()
                        } else {
                            let w = BigRational::from_integer(BigInt::from(binomial(bi, bj)));
                            *v == w * at(bi - bj, 0, r, c)
                        };
                        if !ok {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Solves `P Q - Q P = 0` by exact rational row reduction.
pub fn commutant_basis(n: usize, l: usize) -> CommutantBasis {
    let s = (n + 1) * l;
    // sparse integer generator
    let mut p_entries: Vec<(usize, usize, i64)> = Vec::new();
    for k in 1..=n {
        for d in 0..l {
            p_entries.push((k * l + d, (k - 1) * l + d, k as i64));
        }
    }
    let unknowns = s * s;
    let var = |r: usize, c: usize| r * s + c;
    let mut rows: Vec<Vec<(usize, BigRational)>> = Vec::new();
    for r in 0..s {
        for c in 0..s {
            let mut eq: std::collections::BTreeMap<usize, i64> = Default::default();
            // (P Q)_{rc} = sum_k P_{rk} Q_{kc}
            for &(pr, pc, w) in &p_entries {
                if pr == r {
                    *eq.entry(var(pc, c)).or_default() += w;
                }
                if pc == c {
                    *eq.entry(var(r, pr)).or_default() -= w;
                }
            }
            let row: Vec<_> = eq
                .into_iter()
                .filter(|(_, w)| *w != 0)
                .map(|(k, w)| (k, BigRational::from_integer(BigInt::from(w))))
                .collect();
            if !row.is_empty() {
                rows.push(row);
            }
        }
    }
    let basis = sparse_null_space(rows, unknowns);
    CommutantBasis { order: n, size: l, basis }
}

/// Null space of a sparse rational system via reduced row echelon form.
fn sparse_null_space(mut rows: Vec<Vec<(usize, BigRational)>>, unknowns: usize) -> Vec<Vec<BigRational>> {
    use std::collections::BTreeMap;
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigRational>> = BTreeMap::new();
    for row in rows.drain(..) {
        let mut r: BTreeMap<usize, BigRational> = row.into_iter().collect();
        // eliminate existing pivots
        loop {
            let hit = r.keys().find(|k| pivots.contains_key(k)).copied();
            let Some(k) = hit else { break };
            let f = r.remove(&k).expect("present");
            for (c, v) in &pivots[&k] {
                if *c == k {
                    continue;
                }
                let e = r.entry(*c).or_insert_with(BigRational::zero);
                *e -= &f * v;
                if e.is_zero() {
                    r.remove(c);
                }
            }
        }
        let Some((&lead, lv)) = r.iter().next() else { continue };
        let lv = lv.clone();
        for v in r.values_mut() {
            *v /= &lv;
        }
        // back-substitute into existing pivot rows
        for prow in pivots.values_mut() {
            if let Some(f) = prow.remove(&lead) {
                for (c, v) in &r {
                    if *c == lead {
                        continue;
                    }
                    let e = prow.entry(*c).or_insert_with(BigRational::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        prow.remove(c);
                    }
                }
            }
        }
        pivots.insert(lead, r);
    }
    let free: Vec<usize> = (0..unknowns).filter(|k| !pivots.contains_key(k)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); unknowns];
            v[f] = BigRational::one();
            for (&p, row) in &pivots {
                if let Some(c) = row.get(&f) {
                    v[p] = -c.clone();
                }
            }
            v
        })
        .collect()
}

/// Numerical dimension of the commutant from the singular values of the
/// normalized linear system, with relative threshold `1e-10`.
pub fn commutant_dimension_svd(n: usize, l: usize) -> usize {
    let p = pascal_generator(n, l).map(|z| z.re);
    let s = p.nrows();
    let eye = nalgebra::DMatrix::<f64>::identity(s, s);
    // vec(PQ - QP) = (I kron P - P^T kron I) vec(Q)
    let sys = eye.kronecker(&p) - p.transpose().kronecker(&eye);
    let norm = sys.norm().max(1.0);
    let sv = (sys / norm).svd(false, false).singular_values;
    let top = sv.max();
    sv.iter().filter(|&&v| v <= 1e-10 * top.max(1e-300)).count() + (s * s - sv.len())
}

/// `P Lambda - Lambda P` max entry, for checks.
pub fn commutator_defect(p: &CMat, lam: &CMat) -> f64 {
    (p * lam - lam * p).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernelexpr::{eval_holo_jet, parse_kernel};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(60, 30), 118264581564861424);
        assert_eq!(binomial(3, 5), 0);
        assert!(try_binomial(61, 2).is_err());
    }

    #[test]
    fn generator_small_cases() {
        let p = pascal_generator(2, 1);
        let want = CMat::from_row_slice(3, 3, &[c(0.), c(0.), c(0.), c(1.), c(0.), c(0.), c(0.), c(2.), c(0.)]);
        assert_eq!(p, want);
        let p3 = pascal_generator(3, 1);
        assert_eq!((p3[(1, 0)], p3[(2, 1)], p3[(3, 2)]), (c(1.), c(2.), c(3.)));
        for n in 1..=6 {
            for l in 1..=2 {
                let p = pascal_generator(n, l);
                let mut pow = linalg::identity(p.nrows());
                for _ in 0..n {
                    pow = &pow * &p;
                }
                assert!(linalg::frob(&pow) > 0.0);
                assert_eq!(linalg::frob(&(&pow * &p)), 0.0);
            }
        }
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(PascalBlock::identity(3, 2).expand(), linalg::identity(8));
        let b = PascalBlock::new(vec![CMat::from_element(1, 1, c(1.)), CMat::from_element(1, 1, c(1.)), CMat::zeros(1, 1)]).unwrap();
        let want = CMat::from_row_slice(3, 3, &[c(1.), c(0.), c(0.), c(1.), c(1.), c(0.), c(0.), c(2.), c(1.)]);
        assert_eq!(b.expand(), want);
    }

    #[test]
    fn lambda_of_one_plus_z() {
        let a = eval_holo_jet(&parse_kernel("1 + z1").unwrap(), &[c(0.)], 2).unwrap();
        let b = PascalBlock::from_holo_jet(&a, 0).unwrap();
        let col: Vec<f64> = b.column.iter().map(|m| m[(0, 0)].re).collect();
        assert_eq!(col, vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn small_commutants() {
        let b = commutant_basis(2, 1);
        assert_eq!(b.dimension(), 3);
        // span {I, P, P^2}: each element is a combination of those
        let p = pascal_generator(2, 1);
        let gens = [linalg::identity(3), p.clone(), &p * &p];
        for q in b.matrices() {
            let coeffs = [q[(0, 0)], q[(1, 0)], q[(2, 0)] / 2.0];
            let rebuilt = gens.iter().zip(coeffs).fold(CMat::zeros(3, 3), |acc, (g, w)| acc + g * w);
            assert!(linalg::frob(&(rebuilt - q)) < 1e-14);
        }
        assert_eq!(commutant_basis(4, 1).dimension(), 5);
        assert_eq!(commutant_basis(2, 2).dimension(), 12);
        assert_eq!(commutant_dimension_svd(2, 2), 12);
        assert_eq!(commutant_dimension_svd(4, 1), 5);
    }

    #[test]
    fn multi_expand_reduces_to_single_variable() {
        let a = eval_holo_jet(&parse_kernel("exp(z1) + z1*z1").unwrap(), &[c(0.2)], 3).unwrap();
        let single = PascalBlock::from_holo_jet(&a, 0).unwrap().expand();
        assert!(linalg::frob(&(multi_expand(&a, 3).unwrap() - single)) < 1e-14);
        assert_eq!(multi_generator(1, 3, 1, 0), pascal_generator(3, 1));
    }

    fn random_jet(rng: &mut ChaCha8Rng, m: usize, n: usize, l: usize) -> HoloJet {
        let t = table(m, n);
        let coeffs: Vec<CMat> = (0..t.len())
            .map(|_| CMat::from_fn(l, l, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect();
        HoloJet::from_coeffs(&vec![c(0.0); m], n, &coeffs).unwrap()
    }

    proptest! {
        #[test]
        fn product_closure(seed in any::<u64>(), n in 1usize..5, l in 1usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_jet(&mut rng, 1, n, l);
            let b = random_jet(&mut rng, 1, n, l);
            let la = PascalBlock::from_holo_jet(&a, 0).unwrap();
            let lb = PascalBlock::from_holo_jet(&b, 0).unwrap();
            let brute = la.expand() * lb.expand();
            let conv = la.product(&lb).unwrap().expand();
            prop_assert!(linalg::frob(&(&brute - &conv)) < 1e-10 * (1.0 + linalg::frob(&brute)));
            // chain rule: the jet of A B gives the same block
            let ab = PascalBlock::from_holo_jet(&a.mul(&b).unwrap(), 0).unwrap().expand();
            prop_assert!(linalg::frob(&(&ab - &conv)) < 1e-10 * (1.0 + linalg::frob(&conv)));
        }

        #[test]
        fn multi_expand_is_multiplicative(seed in any::<u64>(), n in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_jet(&mut rng, 2, n, 2);
            let b = random_jet(&mut rng, 2, n, 2);
            let lhs = multi_expand(&a.mul(&b).unwrap(), n).unwrap();
            let rhs = multi_expand(&a, n).unwrap() * multi_expand(&b, n).unwrap();
            prop_assert!(linalg::frob(&(&lhs - &rhs)) < 1e-10 * (1.0 + linalg::frob(&rhs)));
            for dir in 0..2 {
                let p = multi_generator(2, n, 2, dir);
                let la = multi_expand(&a, n).unwrap();
                prop_assert!(commutator_defect(&p, &la) < 1e-12);
            }
        }
    }
}
