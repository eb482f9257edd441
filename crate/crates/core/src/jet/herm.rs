use std::sync::Arc;

use num_complex::Complex64;

use super::index::{table, IndexTable, MultiIndex};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};

const ZERO: C64 = Complex64::new(0.0, 0.0);
const ONE: C64 = Complex64::new(1.0, 0.0);

/// Truncated expansion of an `l x l` matrix function in `(z - z0, zbar - zbar0)`.
///
/// `coeff(a, b)` holds `d^a dbar^b H(z0) / (a! b!)`, so products are plain
/// Cauchy convolutions. Storage is flat: block `(pa, pb)` lives at
/// `((pa * n_anti) + pb) * l * l`, row-major.
#[derive(Debug, Clone)]
pub struct HermJet {
    center: Arc<[C64]>,
    holo: usize,
    anti: usize,
    rank: usize,
    ht: Arc<IndexTable>,
    at: Arc<IndexTable>,
    data: Vec<C64>,
}

/// `out += x * y` for row-major `l x l` blocks.
#[inline]
fn mul_acc(out: &mut [C64], x: &[C64], y: &[C64], l: usize) {
    if l == 1 {
        out[0] += x[0] * y[0];
        return;
    }
    for r in 0..l {
        for k in 0..l {
            let xv = x[r * l + k];
            if xv == ZERO {
                continue;
            }
            for c in 0..l {
                out[r * l + c] += xv * y[k * l + c];
            }
        }
    }
}

fn block_to_mat(b: &[C64], l: usize) -> CMat {
    CMat::from_row_slice(l, l, b)
}

fn mat_to_block(m: &CMat) -> Vec<C64> {
    let l = m.nrows();
    (0..l * l).map(|k| m[(k / l, k % l)]).collect()
}

impl HermJet {
    pub fn zeros(center: &[C64], holo: usize, anti: usize, rank: usize) -> Self {
        let m = center.len();
        let ht = table(m, holo);
        let at = table(m, anti);
        let data = vec![ZERO; ht.len() * at.len() * rank * rank];
        HermJet { center: center.into(), holo, anti, rank, ht, at, data }
    }

    /// Jet of a constant matrix.
    pub fn constant(center: &[C64], holo: usize, anti: usize, value: &CMat) -> Self {
        assert_eq!(value.nrows(), value.ncols(), "constant jet needs a square matrix");
        let mut j = Self::zeros(center, holo, anti, value.nrows());
        j.block_mut(0, 0).copy_from_slice(&mat_to_block(value));
        j
    }

    pub fn scalar_constant(center: &[C64], holo: usize, anti: usize, value: C64) -> Self {
        let mut j = Self::zeros(center, holo, anti, 1);
        j.data[0] = value;
        j
    }

    pub fn identity(center: &[C64], holo: usize, anti: usize, rank: usize) -> Self {
        Self::constant(center, holo, anti, &linalg::identity(rank))
    }

    /// Scalar jet of the coordinate `z_i` (zero-based `i`).
    pub fn holo_var(center: &[C64], holo: usize, anti: usize, i: usize) -> Self {
        let mut j = Self::scalar_constant(center, holo, anti, center[i]);
        if holo >= 1 {
            let p = j.ht.position(&MultiIndex::unit(center.len(), i)).expect("unit index");
            let na = j.at.len();
            j.data[p * na] = ONE;
        }
        j
    }

    /// Scalar jet of `conj(z_i)`.
    pub fn anti_var(center: &[C64], holo: usize, anti: usize, i: usize) -> Self {
        let mut j = Self::scalar_constant(center, holo, anti, center[i].conj());
        if anti >= 1 {
            let p = j.at.position(&MultiIndex::unit(center.len(), i)).expect("unit index");
            j.data[p] = ONE;
        }
        j
    }

    /// Assembles an `l x l` matrix jet from scalar jets, row-major.
    pub fn from_entries(entries: &[Vec<HermJet>]) -> Result<Self> {
        let l = entries.len();
        if l == 0 || entries.iter().any(|r| r.len() != l) {
            return Err(Error::Dimension("entry grid must be square and non-empty".into()));
        }
        let first = &entries[0][0];
        let holo = entries.iter().flatten().map(|e| e.holo).min().unwrap_or(0);
        let anti = entries.iter().flatten().map(|e| e.anti).min().unwrap_or(0);
        let mut out = Self::zeros(&first.center, holo, anti, l);
        for (r, row) in entries.iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                if e.rank != 1 || e.center != first.center {
                    return Err(Error::Dimension("entries must be scalar jets at one center".into()));
                }
                for pa in 0..out.ht.len() {
                    for pb in 0..out.at.len() {
                        let v = e.data[pa * e.at.len() + pb];
                        out.block_mut(pa, pb)[r * l + c] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[C64] {
        &self.center
    }

    pub fn holo_order(&self) -> usize {
        self.holo
    }

    pub fn anti_order(&self) -> usize {
        self.anti
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn holo_table(&self) -> &IndexTable {
        &self.ht
    }

    pub fn anti_table(&self) -> &IndexTable {
        &self.at
    }

    #[inline]
    fn block(&self, pa: usize, pb: usize) -> &[C64] {
        let ll = self.rank * self.rank;
        let off = (pa * self.at.len() + pb) * ll;
        &self.data[off..off + ll]
    }

    #[inline]
    fn block_mut(&mut self, pa: usize, pb: usize) -> &mut [C64] {
        let ll = self.rank * self.rank;
        let off = (pa * self.at.len() + pb) * ll;
        &mut self.data[off..off + ll]
    }

    /// Normalized coefficient by table positions.
    pub fn coeff_at(&self, pa: usize, pb: usize) -> CMat {
        block_to_mat(self.block(pa, pb), self.rank)
    }

    /// Normalized coefficient `c_{a,b}`.
    pub fn coeff(&self, a: &MultiIndex, b: &MultiIndex) -> Result<CMat> {
        let (pa, pb) = self.positions(a, b)?;
        Ok(self.coeff_at(pa, pb))
    }

    pub fn set_coeff(&mut self, a: &MultiIndex, b: &MultiIndex, value: &CMat) -> Result<()> {
        let (pa, pb) = self.positions(a, b)?;
        if value.nrows() != self.rank || value.ncols() != self.rank {
            return Err(Error::Dimension("coefficient block has wrong size".into()));
        }
        self.block_mut(pa, pb).copy_from_slice(&mat_to_block(value));
        Ok(())
    }

    fn positions(&self, a: &MultiIndex, b: &MultiIndex) -> Result<(usize, usize)> {
        if a.dim() != self.dim() || b.dim() != self.dim() {
            return Err(Error::Dimension(format!("index dimension differs from jet dimension {}", self.dim())));
        }
        match (self.ht.position(a), self.at.position(b)) {
            (Some(pa), Some(pb)) => Ok((pa, pb)),
            _ => Err(Error::Range(format!(
                "({a}, {b}) exceeds jet orders ({}, {})",
                self.holo, self.anti
            ))),
        }
    }

    /// Derivative value `d^a dbar^b H(z0) = a! b! c_{a,b}`.
    pub fn extract(&self, a: &MultiIndex, b: &MultiIndex) -> Result<CMat> {
        let (pa, pb) = self.positions(a, b)?;
        Ok(self.coeff_at(pa, pb).scale(self.ht.fact[pa] * self.at.fact[pb]))
    }

    /// `d_1^p dbar_j^q H(z0)` with one-based `j`, the common special case.
    pub fn extract_z1(&self, p: usize, j: usize, q: usize) -> Result<CMat> {
        let m = self.dim();
        let mut a = MultiIndex::zero(m);
        a.0[0] = p;
        let mut b = MultiIndex::zero(m);
        b.0[j - 1] = q;
        self.extract(&a, &b)
    }

    pub fn value(&self) -> CMat {
        self.coeff_at(0, 0)
    }

    pub fn scalar_value(&self) -> C64 {
        self.data[0]
    }

    fn check_compatible(&self, other: &HermJet) -> Result<()> {
        if self.center != other.center {
            return Err(Error::Dimension("jets have different centers".into()));
        }
        if self.rank != other.rank {
            return Err(Error::Dimension(format!("rank {} vs {}", self.rank, other.rank)));
        }
        Ok(())
    }

    /// Copy restricted to smaller orders.
    pub fn truncate(&self, holo: usize, anti: usize) -> HermJet {
        let holo = holo.min(self.holo);
        let anti = anti.min(self.anti);
        if holo == self.holo && anti == self.anti {
            return self.clone();
        }
        let mut out = Self::zeros(&self.center, holo, anti, self.rank);
        for pa in 0..out.ht.len() {
            for pb in 0..out.at.len() {
                let src = self.block(pa, pb).to_vec();
                out.block_mut(pa, pb).copy_from_slice(&src);
            }
        }
        out
    }

    /// Same coefficients at larger orders, higher ones zero. Only meaningful
    /// when the true higher coefficients vanish (e.g. holomorphic functions in
    /// the anti-holomorphic direction).
    pub fn pad(&self, holo: usize, anti: usize) -> HermJet {
        let holo = holo.max(self.holo);
        let anti = anti.max(self.anti);
        let mut out = Self::zeros(&self.center, holo, anti, self.rank);
        for pa in 0..self.ht.len() {
            for pb in 0..self.at.len() {
                let src = self.block(pa, pb).to_vec();
                out.block_mut(pa, pb).copy_from_slice(&src);
            }
        }
        out
    }

    fn zip_with(&self, other: &HermJet, f: impl Fn(C64, C64) -> C64) -> Result<HermJet> {
        self.check_compatible(other)?;
        let a = self.truncate(other.holo, other.anti);
        let b = other.truncate(self.holo, self.anti);
        let mut out = a.clone();
        for (o, (x, y)) in out.data.iter_mut().zip(a.data.iter().zip(&b.data)) {
            *o = f(*x, *y);
        }
        Ok(out)
    }

    pub fn add(&self, other: &HermJet) -> Result<HermJet> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &HermJet) -> Result<HermJet> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn scale(&self, s: C64) -> HermJet {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn neg(&self) -> HermJet {
        self.scale(-ONE)
    }

    /// Truncated Cauchy product; orders are the minima of the operands'.
    pub fn mul(&self, other: &HermJet) -> Result<HermJet> {
        self.check_compatible(other)?;
        let holo = self.holo.min(other.holo);
        let anti = self.anti.min(other.anti);
        let l = self.rank;
        let mut out = Self::zeros(&self.center, holo, anti, l);
        let ht = out.ht.clone();
        let at = out.at.clone();
        let (nla, nlb) = (self.at.len(), other.at.len());
        let ll = l * l;
        for pa in 0..ht.len() {
            for pb in 0..at.len() {
                let off = (pa * at.len() + pb) * ll;
                let mut acc = vec![ZERO; ll];
                for &(g, ag) in &ht.splits[pa] {
                    for &(d, bd) in &at.splits[pb] {
                        let xo = (g * nla + d) * ll;
                        let yo = (ag * nlb + bd) * ll;
                        mul_acc(&mut acc, &self.data[xo..xo + ll], &other.data[yo..yo + ll], l);
                    }
                }
                out.data[off..off + ll].copy_from_slice(&acc);
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse by order-by-order recursion.
    pub fn inverse(&self) -> Result<HermJet> {
        let l = self.rank;
        let ll = l * l;
        let c0_inv = linalg::inverse(&self.value(), "constant term of jet")?;
        let c0_inv_b = mat_to_block(&c0_inv);
        let mut out = Self::zeros(&self.center, self.holo, self.anti, l);
        let ht = self.ht.clone();
        let at = self.at.clone();
        let na = at.len();
        for pa in 0..ht.len() {
            for pb in 0..at.len() {
                let mut acc = vec![ZERO; ll];
                if pa == 0 && pb == 0 {
                    acc.copy_from_slice(&c0_inv_b);
                } else {
                    let mut sum = vec![ZERO; ll];
                    for &(g, ag) in &ht.splits[pa] {
                        for &(d, bd) in &at.splits[pb] {
                            if g == 0 && d == 0 {
                                continue;
                            }
                            let xo = (g * na + d) * ll;
                            let yo = (ag * na + bd) * ll;
                            mul_acc(&mut sum, &self.data[xo..xo + ll], &out.data[yo..yo + ll], l);
                        }
                    }
                    let neg: Vec<C64> = sum.iter().map(|v| -v).collect();
                    mul_acc(&mut acc, &c0_inv_b, &neg, l);
                }
                let off = (pa * na + pb) * ll;
                out.data[off..off + ll].copy_from_slice(&acc);
            }
        }
        Ok(out)
    }

    /// `(H^*)`: conjugate-transpose of the function, `c'_{a,b} = c_{b,a}^*`.
    /// Holomorphic and anti-holomorphic orders swap.
    pub fn conj_transpose(&self) -> HermJet {
        let l = self.rank;
        let mut out = Self::zeros(&self.center, self.anti, self.holo, l);
        for pa in 0..out.ht.len() {
            for pb in 0..out.at.len() {
                let src = self.block(pb, pa);
                let mut dst = vec![ZERO; l * l];
                for r in 0..l {
                    for c in 0..l {
                        dst[r * l + c] = src[c * l + r].conj();
                    }
                }
                out.block_mut(pa, pb).copy_from_slice(&dst);
            }
        }
        out
    }

    /// Jet of `d/dz_i` (zero-based `i`); holomorphic order drops by one.
    pub fn d_holo(&self, i: usize) -> Result<HermJet> {
        if self.holo == 0 {
            return Err(Error::Order("holomorphic derivative of an order-0 jet".into()));
        }
        let mut out = Self::zeros(&self.center, self.holo - 1, self.anti, self.rank);
        for pa in 0..out.ht.len() {
            let up = self.ht.raise[pa][i].expect("raised index within table");
            let w = (self.ht.indices[pa].0[i] + 1) as f64;
            for pb in 0..out.at.len() {
                let src: Vec<C64> = self.block(up, pb).iter().map(|v| v * w).collect();
                out.block_mut(pa, pb).copy_from_slice(&src);
            }
        }
        Ok(out)
    }

    /// Jet of `d/dzbar_i` (zero-based `i`); anti-holomorphic order drops by one.
    pub fn d_anti(&self, i: usize) -> Result<HermJet> {
        if self.anti == 0 {
            return Err(Error::Order("anti-holomorphic derivative of an order-0 jet".into()));
        }
        let mut out = Self::zeros(&self.center, self.holo, self.anti - 1, self.rank);
        for pb in 0..out.at.len() {
            let up = self.at.raise[pb][i].expect("raised index within table");
            let w = (self.at.indices[pb].0[i] + 1) as f64;
            for pa in 0..out.ht.len() {
                let src: Vec<C64> = self.block(pa, up).iter().map(|v| v * w).collect();
                out.block_mut(pa, pb).copy_from_slice(&src);
            }
        }
        Ok(out)
    }

    /// `M * self` for a constant matrix `M`.
    pub fn left_mul_const(&self, m: &CMat) -> HermJet {
        self.map_blocks(|b| m * b)
    }

    /// `self * M` for a constant matrix `M`.
    pub fn right_mul_const(&self, m: &CMat) -> HermJet {
        self.map_blocks(|b| b * m)
    }

    fn map_blocks(&self, f: impl Fn(&CMat) -> CMat) -> HermJet {
        let mut out = self.clone();
        let l = self.rank;
        let mut newrank = l;
        let mut blocks = Vec::with_capacity(self.ht.len() * self.at.len());
        for pa in 0..self.ht.len() {
            for pb in 0..self.at.len() {
                let r = f(&self.coeff_at(pa, pb));
                newrank = r.nrows();
                blocks.push(r);
            }
        }
        out.rank = newrank;
        out.data = blocks.iter().flat_map(mat_to_block).collect();
        out
    }

    /// Largest absolute coefficient entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference to another jet on the common orders.
    pub fn max_diff(&self, other: &HermJet) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Applies a scalar analytic function through its Taylor series at the constant term.
    ///
    /// `derivs(a0, k)` must return `f^{(k)}(a0) / k!` for `k = 0..=holo+anti`.
    pub fn compose(&self, derivs: impl Fn(C64, usize) -> C64) -> Result<HermJet> {
        if self.rank != 1 {
            return Err(Error::Dimension("scalar function applied to a matrix jet".into()));
        }
        let a0 = self.data[0];
        let mut d = self.clone();
        d.data[0] = ZERO;
        let kmax = self.holo + self.anti;
        let mut out = Self::scalar_constant(&self.center, self.holo, self.anti, derivs(a0, 0));
        let mut power = Self::scalar_constant(&self.center, self.holo, self.anti, ONE);
        for k in 1..=kmax {
            power = power.mul(&d)?;
            let ck = derivs(a0, k);
            for (o, p) in out.data.iter_mut().zip(&power.data) {
                *o += ck * p;
            }
        }
        Ok(out)
    }

    pub fn exp(&self) -> Result<HermJet> {
        self.compose(|a0, k| a0.exp() / super::index::factorial(k))
    }

    pub fn ln(&self) -> Result<HermJet> {
        let a0 = self.data[0];
        if a0.re <= 0.0 {
            return Err(Error::Singular(format!("log of a jet with constant term {a0}")));
        }
        self.compose(|a0, k| {
            if k == 0 {
                a0.ln()
            } else {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign / (k as f64 * a0.powi(k as i32))
            }
        })
    }

    /// Integer power; negative exponents need an invertible constant term.
    pub fn powi(&self, p: i64) -> Result<HermJet> {
        let base = if p < 0 { self.inverse()? } else { self.clone() };
        let mut e = p.unsigned_abs();
        let mut acc = Self::identity(&self.center, self.holo, self.anti, self.rank);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Real power on the principal branch; integer exponents defer to [`HermJet::powi`].
    pub fn powf(&self, p: f64) -> Result<HermJet> {
        if p.fract() == 0.0 && p.abs() < 1e9 {
            return self.powi(p as i64);
        }
        let a0 = self.data[0];
        if self.rank != 1 || a0.re <= 0.0 {
            return Err(Error::Singular(format!("real power {p} at constant term {a0}")));
        }
        // f^{(k)}(a)/k! = binom(p, k) a^{p-k}
        self.compose(|a0, k| {
            let mut b = 1.0;
            for i in 0..k {
                b *= (p - i as f64) / (i as f64 + 1.0);
            }
            a0.powf(p) * b / a0.powi(k as i32)
        })
    }

    /// Gram check on the constant term.
    pub fn check_positive_definite(&self, tol: f64) -> Result<()> {
        let v = self.value();
        if !linalg::is_hermitian(&v, tol) {
            return Err(Error::NotPositiveDefinite("value at center is not Hermitian".into()));
        }
        let lam = linalg::min_eigenvalue(&v);
        if lam <= 0.0 {
            return Err(Error::NotPositiveDefinite(format!("smallest eigenvalue {lam:.3e} at center")));
        }
        Ok(())
    }

    /// Largest violation of `c_{b,a} = c_{a,b}^*` over indices stored both ways.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.holo.min(self.anti);
        let cnt = self.ht.count(n);
        let mut worst: f64 = 0.0;
        for pa in 0..cnt {
            for pb in 0..cnt {
                let d = self.coeff_at(pb, pa) - self.coeff_at(pa, pb).adjoint();
                worst = worst.max(linalg::frob(&d));
            }
        }
        worst
    }
}
