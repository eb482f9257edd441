//! Canonical-connection geometry of a Gram jet.
//!
//! Direction indices are one-based here (`K_{1 1bar}` is `curvature(h, 1, 1)`).
//! All matrices act on the left of frame coordinates, so a bundle map `Phi`
//! with representing matrix `M` in a frame with Gram `H` has adjoint `H M^* H^{-1}`.

use crate::error::{Error, Result};
use crate::jet::{HermJet, HoloJet, MultiIndex};
use crate::linalg::{self, CMat};
use crate::pascal::binomial;

/// Jet of the representing matrix of a bundle map in the working frame.
#[derive(Debug, Clone)]
pub struct MapJet(pub HermJet);

impl MapJet {
    pub fn value(&self) -> CMat {
        self.0.value()
    }
}

/// `(K_{i jbar})` differentiated covariantly `r` times in `z_i`, then `t` times in `zbar_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurvatureRequest {
    pub i: usize,
    pub j: usize,
    pub r: usize,
    pub t: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Holo(usize),
    Anti(usize),
}

fn zero_based(i: usize, m: usize) -> Result<usize> {
    if i == 0 || i > m {
        Err(Error::Range(format!("direction {i} outside 1..={m}")))
    } else {
        Ok(i - 1)
    }
}

fn need(h: &HermJet, holo: usize, anti: usize, what: &str) -> Result<()> {
    if h.holo_order() < holo || h.anti_order() < anti {
        return Err(Error::Order(format!(
            "{what} needs Gram orders ({holo}, {anti}), jet has ({}, {})",
            h.holo_order(),
            h.anti_order()
        )));
    }
    Ok(())
}

/// Connection matrix `d_i H H^{-1}`.
pub fn connection(h: &HermJet, i: usize) -> Result<HermJet> {
    let k = zero_based(i, h.dim())?;
    need(h, 1, 0, "connection")?;
    h.d_holo(k)?.mul(&h.inverse()?)
}

/// `K_{i jbar} = (d_i dbar_j H - d_i H H^{-1} dbar_j H) H^{-1}`.
pub fn curvature(h: &HermJet, i: usize, j: usize) -> Result<MapJet> {
    let (ki, kj) = (zero_based(i, h.dim())?, zero_based(j, h.dim())?);
    need(h, 1, 1, "curvature")?;
    let hinv = h.inverse()?;
    let di = h.d_holo(ki)?;
    let dj = h.d_anti(kj)?;
    let dij = di.d_anti(kj)?;
    let k = dij.sub(&di.mul(&hinv)?.mul(&dj)?)?.mul(&hinv)?;
    Ok(MapJet(k))
}

/// One covariant derivative of a bundle map.
pub fn cov_deriv(phi: &MapJet, h: &HermJet, dir: Direction) -> Result<MapJet> {
    match dir {
        Direction::Holo(i) => {
            let k = zero_based(i, h.dim())?;
            let theta = connection(h, i)?;
            let d = phi.0.d_holo(k)?;
            let out = d.sub(&theta.mul(&phi.0)?)?.add(&phi.0.mul(&theta)?)?;
            Ok(MapJet(out))
        }
        Direction::Anti(i) => {
            let k = zero_based(i, h.dim())?;
            Ok(MapJet(phi.0.d_anti(k)?))
        }
    }
}

/// Applies covariant derivatives in the given order.
pub fn cov_iterate(phi: &MapJet, h: &HermJet, dirs: &[Direction]) -> Result<MapJet> {
    dirs.iter().try_fold(phi.clone(), |acc, &d| cov_deriv(&acc, h, d))
}

/// Value at the center of `(K_{i jbar})_{z_i^r zbar_j^t}`.
pub fn curvature_derivative(h: &HermJet, req: CurvatureRequest) -> Result<CMat> {
    need(h, req.r + 1, req.t + 1, "curvature derivative")?;
    let h = h.truncate(req.r + 1, req.t + 1);
    let k = curvature(&h, req.i, req.j)?;
    let mut dirs = vec![Direction::Holo(req.i); req.r];
    dirs.extend(std::iter::repeat_n(Direction::Anti(req.j), req.t));
    Ok(cov_iterate(&k, &h, &dirs)?.value())
}

/// Representing matrix of the adjoint map: `H M^* H^{-1}`.
pub fn adjoint_map(m: &CMat, h_value: &CMat) -> Result<CMat> {
    let hinv = linalg::inverse(h_value, "Gram value")?;
    Ok(h_value * m.adjoint() * hinv)
}

/// Jet of the adjoint map, `H Phi^* H^{-1}`.
pub fn adjoint_jet(phi: &MapJet, h: &HermJet) -> Result<MapJet> {
    let star = phi.0.conj_transpose();
    Ok(MapJet(h.mul(&star)?.mul(&h.inverse()?)?))
}

fn z1_index(m: usize, p: usize) -> MultiIndex {
    let mut a = MultiIndex::zero(m);
    a.0[0] = p;
    a
}

fn dir_index(m: usize, j: usize, q: usize) -> MultiIndex {
    let mut a = MultiIndex::zero(m);
    a.0[j] = q;
    a
}

/// `d_1^p dbar_j^q H(z0)` with zero-based `j`.
fn d1_dbar(h: &HermJet, p: usize, j: usize, q: usize) -> Result<CMat> {
    h.extract(&z1_index(h.dim(), p), &dir_index(h.dim(), j, q))
}

/// `dbar_1^p d_j^q H(z0)` with zero-based `j`.
fn dbar1_d(h: &HermJet, p: usize, j: usize, q: usize) -> Result<CMat> {
    h.extract(&dir_index(h.dim(), j, q), &z1_index(h.dim(), p))
}

/// `L_j^l = (d_1^l dbar_j H - d_1^l H H^{-1} dbar_j H) H^{-1}` at the center.
pub fn l_tensor(h: &HermJet, j: usize, l: usize) -> Result<CMat> {
    let kj = zero_based(j, h.dim())?;
    need(h, l, 1, "L tensor")?;
    let hinv = linalg::inverse(&h.value(), "Gram value")?;
    let a = d1_dbar(h, l, kj, 1)?;
    let b = d1_dbar(h, l, kj, 0)?;
    let c = d1_dbar(h, 0, kj, 1)?;
    Ok((a - b * &hinv * c) * hinv)
}

/// `(K_{1 jbar})_{z_1^{n-1}}` at the center through the `J_n` recursion.
pub fn k1j_recursion(h: &HermJet, j: usize, n: usize) -> Result<CMat> {
    if n == 0 {
        return Err(Error::Range("recursion starts at n = 1".into()));
    }
    need(h, n, 1, "K1j recursion")?;
    let hinv = linalg::inverse(&h.value(), "Gram value")?;
    let mut js: Vec<CMat> = Vec::with_capacity(n);
    for k in 1..=n {
        let mut cur = l_tensor(h, j, k)?;
        for i in 1..k {
            let w = binomial(k, i) as f64;
            cur -= (d1_dbar(h, i, 0, 0)? * &hinv * &js[k - i - 1]).scale(w);
        }
        js.push(cur);
    }
    Ok(js.pop().expect("n >= 1"))
}

/// `Q_j^n = (dbar_1^n d_j H - d_j H H^{-1} dbar_1^n H) H^{-1}` at the center.
pub fn q_tensor(h: &HermJet, j: usize, n: usize) -> Result<CMat> {
    let kj = zero_based(j, h.dim())?;
    need(h, 1, n, "Q tensor")?;
    let hinv = linalg::inverse(&h.value(), "Gram value")?;
    let a = dbar1_d(h, n, kj, 1)?;
    let b = dbar1_d(h, 0, kj, 1)?;
    let c = dbar1_d(h, n, kj, 0)?;
    Ok((a - b * &hinv * c) * hinv)
}

/// `dbar_1^n Q_j` at the center, `Q_j = dbar_1(d_j H H^{-1})`, by recursion.
pub fn q_recursion(h: &HermJet, j: usize, n: usize) -> Result<CMat> {
    need(h, 1, n + 1, "Q recursion")?;
    let hinv = linalg::inverse(&h.value(), "Gram value")?;
    let mut ds: Vec<CMat> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut cur = q_tensor(h, j, k + 1)?;
        for i in 1..=k {
            let w = binomial(k + 1, i) as f64;
            cur -= (&ds[k - i] * dbar1_d(h, i, 0, 0)? * &hinv).scale(w);
        }
        ds.push(cur);
    }
    Ok(ds.pop().expect("n >= 0"))
}

/// Relative residual `|a - b| / max(1, |a|, |b|)` in the Frobenius norm.
pub fn relative_residual(a: &CMat, b: &CMat) -> f64 {
    linalg::frob(&(a - b)) / linalg::frob(a).max(linalg::frob(b)).max(1.0)
}

/// Compares each recursion with direct differentiation for `1 <= n <= n_max`
/// and every direction `j`; needs Gram orders `(n_max + 1, n_max + 1)`.
///
/// Names: `k1j-recursion(j=,n=)` against iterated covariant derivatives,
/// `q-recursion(j=,n=)` against repeated `dbar_1` of the `Q_j` jet, and
/// `k1j-q-duality(j=,n=)` for `J_n = H (dbar_1^{n-1} Q_j)^* H^{-1}`.
pub fn recursion_residuals(h: &HermJet, n_max: usize) -> Result<Vec<(String, f64)>> {
    need(h, n_max + 1, n_max + 1, "recursion check")?;
    let mut out = Vec::new();
    for j in 1..=h.dim() {
        let k1j = curvature(h, 1, j)?;
        let q = q_jet(h, j)?;
        let mut qd = q.0.clone();
        for n in 1..=n_max {
            let rec = k1j_recursion(h, j, n)?;
            let direct = cov_iterate(&k1j, h, &vec![Direction::Holo(1); n - 1])?.value();
            out.push((format!("k1j-recursion(j={j},n={n})"), relative_residual(&rec, &direct)));

            qd = qd.d_anti(0)?;
            let qr = q_recursion(h, j, n)?;
            out.push((format!("q-recursion(j={j},n={n})"), relative_residual(&qr, &qd.value())));

            let dual = adjoint_map(&q_recursion(h, j, n - 1)?, &h.value())?;
            out.push((format!("k1j-q-duality(j={j},n={n})"), relative_residual(&dual, &rec)));
        }
    }
    Ok(out)
}

/// Jet of `Q_j = dbar_1(d_j H H^{-1})`.
pub fn q_jet(h: &HermJet, j: usize) -> Result<MapJet> {
    let theta = connection(h, j)?;
    Ok(MapJet(theta.d_anti(0)?))
}

/// Frame change to a normalized frame at the center.
///
/// Returns `A` and `Hn = A H A^*` with `Hn(z0) = I` and no pure holomorphic
/// (or anti-holomorphic) terms up to order `n`.
pub fn normalize_frame(h: &HermJet, n: usize) -> Result<(HoloJet, HermJet)> {
    need(h, n, n, "normalized frame")?;
    let h = h.truncate(n, n);
    let (root, _) = linalg::hermitian_sqrt(&h.value())?;
    let g = HoloJet::holomorphic_part(&h);
    let a = g.inverse()?.left_mul_const(&root);
    let hn = a.to_herm(n).mul(&h)?.mul(&a.adjoint_herm(n))?;
    Ok((a, hn))
}

/// Largest defect of the normalized-frame conditions on `hn`.
pub fn normalization_defect(hn: &HermJet) -> f64 {
    let t = hn.holo_table();
    let l = hn.rank();
    let zero = MultiIndex::zero(hn.dim());
    let mut worst = linalg::frob(&(hn.value() - linalg::identity(l)));
    for a in t.indices.iter().skip(1) {
        if let Ok(c) = hn.coeff(a, &zero) {
            worst = worst.max(linalg::frob(&c));
        }
        if let Ok(c) = hn.coeff(&zero, a) {
            worst = worst.max(linalg::frob(&c));
        }
    }
    worst
}

#[cfg(test)]
mod tests;
