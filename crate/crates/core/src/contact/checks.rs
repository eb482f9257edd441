use super::verdict::{Condition, Route};
use crate::error::{Error, Result};
use crate::geometry::{self, cov_deriv, curvature, normalize_frame, Direction, MapJet};
use crate::jet::{table, HermJet, HoloJet, MultiIndex};
use crate::linalg::{self, CMat};
use crate::pascal::{binomial, multi_binomial, multi_expand, PascalBlock};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetVars {
    /// Every multi-index with `|I| <= n`, graded-lex order.
    All,
    /// Pure `z1` powers `0..=n`.
    Z1Only,
}

fn need(h: &HermJet, n: usize) -> Result<()> {
    if h.holo_order() < n || h.anti_order() < n {
        return Err(Error::Order(format!(
            "order-{n} jet Gram needs Gram orders ({n}, {n}), jet has ({}, {})",
            h.holo_order(),
            h.anti_order()
        )));
    }
    Ok(())
}

fn z1(m: usize, p: usize) -> MultiIndex {
    let mut a = MultiIndex::zero(m);
    a.0[0] = p;
    a
}

/// Block Gram `[d^I dbar^J H(z0)]` of the order-`n` jet frame.
pub fn jet_gram(h: &HermJet, n: usize, vars: JetVars) -> Result<CMat> {
    need(h, n)?;
    let m = h.dim();
    let indices: Vec<MultiIndex> = match vars {
        JetVars::All => table(m, n).indices.clone(),
        JetVars::Z1Only => (0..=n).map(|p| z1(m, p)).collect(),
    };
    let l = h.rank();
    let k = indices.len();
    let mut g = CMat::zeros(k * l, k * l);
    for (r, a) in indices.iter().enumerate() {
        for (c, b) in indices.iter().enumerate() {
            g.view_mut((r * l, c * l), (l, l)).copy_from(&h.extract(a, b)?);
        }
    }
    Ok(g)
}

/// Checks `G_H = Lambda_A G_Ht Lambda_A^*` on the full order-`n` jet.
pub fn pointwise_verify(h: &HermJet, ht: &HermJet, a: &HoloJet, n: usize, tol: f64) -> Result<Condition> {
    if a.order() < n {
        return Err(Error::Order(format!("candidate jet of order {} for contact of order {n}", a.order())));
    }
    if a.rank() != h.rank() || h.rank() != ht.rank() {
        return Err(Error::Dimension("candidate and Grams differ in rank".into()));
    }
    let g = jet_gram(h, n, JetVars::All)?;
    let gt = jet_gram(ht, n, JetVars::All)?;
    let lam = multi_expand(a, n)?;
    let rhs = &lam * gt * lam.adjoint();
    Ok(Condition::compare("jet-gram-isometry", Route::Candidate, &g, &rhs, tol))
}

/// Rank-one decision: compare the full jet Grams of both normalized frames.
pub fn pointwise_rank1_decide(h: &HermJet, ht: &HermJet, n: usize, tol: f64) -> Result<Vec<Condition>> {
    if h.rank() != 1 || ht.rank() != 1 {
        return Err(Error::Dimension("the normalized-frame decision is for line bundles".into()));
    }
    let (_, hn) = normalize_frame(h, n)?;
    let (_, htn) = normalize_frame(ht, n)?;
    let g = jet_gram(&hn, n, JetVars::All)?;
    let gt = jet_gram(&htn, n, JetVars::All)?;
    let mut out = vec![Condition::compare("normalized-jet-gram", Route::Decision, &g, &gt, tol)];
    if n >= 1 {
        let m = h.dim();
        for i in 1..=m {
            for j in 1..=m {
                let k = curvature(&h.truncate(1, 1), i, j)?.value();
                let kt = curvature(&ht.truncate(1, 1), i, j)?.value();
                out.push(Condition::compare(format!("curvature(i={i},j={j})"), Route::Auxiliary, &k, &kt, tol));
            }
        }
    }
    Ok(out)
}

/// `A_1..A_n` along `z1` from `A_0`:
/// `A_l = d_1^l H H^{-1} A_0 - sum_{i=1}^{l} binom(l,i) A_{l-i} d_1^i Ht Ht^{-1}`.
/// The returned vector starts with `A_0`.
pub fn extend_a_sequence(h: &HermJet, ht: &HermJet, a0: &CMat, n: usize) -> Result<Vec<CMat>> {
    if h.holo_order() < n || ht.holo_order() < n {
        return Err(Error::Order(format!("extension to order {n} needs holomorphic order {n}")));
    }
    let m = h.dim();
    let zero = MultiIndex::zero(m);
    let hinv = linalg::inverse(&h.value(), "Gram of bundle A")?;
    let htinv = linalg::inverse(&ht.value(), "Gram of bundle B")?;
    let mut seq = vec![a0.clone()];
    for l in 1..=n {
        let mut cur = h.extract(&z1(m, l), &zero)? * &hinv * a0;
        for i in 1..=l {
            let w = binomial(l, i) as f64;
            cur -= (&seq[l - i] * ht.extract(&z1(m, i), &zero)? * &htinv).scale(w);
        }
        seq.push(cur);
    }
    Ok(seq)
}

/// Multi-index extension of `A_0` to a holomorphic jet of order `n`:
/// `A_I = d^I H H^{-1} A_0 - sum_{0 < K <= I} binom(I,K) A_{I-K} d^K Ht Ht^{-1}`.
pub fn extend_a_multi(h: &HermJet, ht: &HermJet, a0: &CMat, n: usize) -> Result<HoloJet> {
    if h.holo_order() < n || ht.holo_order() < n {
        return Err(Error::Order(format!("extension to order {n} needs holomorphic order {n}")));
    }
    let m = h.dim();
    let zero = MultiIndex::zero(m);
    let hinv = linalg::inverse(&h.value(), "Gram of bundle A")?;
    let htinv = linalg::inverse(&ht.value(), "Gram of bundle B")?;
    let t = table(m, n);
    let mut derivs: Vec<CMat> = Vec::with_capacity(t.len());
    for (p, idx) in t.indices.iter().enumerate() {
        if p == 0 {
            derivs.push(a0.clone());
            continue;
        }
        let mut cur = h.extract(idx, &zero)? * &hinv * a0;
        for &(pk, prest) in &t.splits[p] {
            if pk == 0 {
                continue;
            }
            let k = &t.indices[pk];
            let w = multi_binomial(idx, k) as f64;
            cur -= (&derivs[prest] * ht.extract(k, &zero)? * &htinv).scale(w);
        }
        derivs.push(cur);
    }
    let coeffs: Vec<CMat> = derivs.iter().zip(&t.fact).map(|(d, f)| d.scale(1.0 / f)).collect();
    HoloJet::from_coeffs(h.center(), n, &coeffs)
}

/// `z1`-jet Gram isometry with the Pascal block of the sequence `A_0..A_n`.
pub fn z1_gram_isometry(h: &HermJet, ht: &HermJet, seq: &[CMat], tol: f64) -> Result<Condition> {
    let n = seq.len() - 1;
    let g = jet_gram(h, n, JetVars::Z1Only)?;
    let gt = jet_gram(ht, n, JetVars::Z1Only)?;
    let lam = PascalBlock::new(seq.to_vec())?.expand();
    Ok(Condition::compare("z1-jet-gram-isometry", Route::Analytic, &g, &(&lam * gt * lam.adjoint()), tol))
}

/// Residuals of `L_j^l = sum_{i=1}^{l} binom(l,i) A_{l-i} Lt_j^i A_0^{-1}` for
/// `1 <= l <= n`, `2 <= j <= m`.
pub fn holomorphy_conditions(h: &HermJet, ht: &HermJet, seq: &[CMat], tol: f64) -> Result<Vec<Condition>> {
    let n = seq.len() - 1;
    let a0inv = linalg::inverse(&seq[0], "candidate A_0")?;
    let mut out = Vec::new();
    for j in 2..=h.dim() {
        let lt: Vec<CMat> = (1..=n).map(|i| geometry::l_tensor(ht, j, i)).collect::<Result<_>>()?;
        for l in 1..=n {
            let lhs = geometry::l_tensor(h, j, l)?;
            let mut rhs = CMat::zeros(h.rank(), h.rank());
            for i in 1..=l {
                rhs += (&seq[l - i] * &lt[i - 1] * &a0inv).scale(binomial(l, i) as f64);
            }
            out.push(Condition::compare(format!("holomorphy(j={j},l={l})"), Route::Analytic, &lhs, &rhs, tol));
        }
    }
    Ok(out)
}

/// Covariant derivatives `(K_{1 jbar})_{z_1^r}` for `r = 0..=r_max`, as jets.
fn k1j_chain(h: &HermJet, j: usize, r_max: usize) -> Result<Vec<MapJet>> {
    let mut cur = curvature(h, 1, j)?;
    let mut out = Vec::with_capacity(r_max + 1);
    for r in 0..=r_max {
        if r > 0 {
            cur = cov_deriv(&cur, h, Direction::Holo(1))?;
        }
        out.push(cur.clone());
    }
    Ok(out)
}

/// Intertwining residuals of the curvature and its covariant derivatives with `A_0`,
/// plus the isometry `H = A_0 Ht A_0^*`.
pub fn geometric_conditions(h: &HermJet, ht: &HermJet, a0: &CMat, n: usize, tol: f64) -> Result<Vec<Condition>> {
    if h.holo_order() < n || h.anti_order() < n.max(1) || ht.holo_order() < n || ht.anti_order() < n.max(1) {
        return Err(Error::Order(format!("geometric conditions of order {n} need Gram orders ({n}, {n})")));
    }
    let mut out = vec![psi_isometry(h, ht, a0, tol)];
    if n == 0 {
        return Ok(out);
    }
    let (h11, ht11) = (h.truncate(n, n), ht.truncate(n, n));
    let chain = k1j_chain(&h11, 1, n - 1)?;
    let chain_t = k1j_chain(&ht11, 1, n - 1)?;
    for r in 0..n {
        let mut phi = chain[r].clone();
        let mut phit = chain_t[r].clone();
        for t in 0..n {
            if t > 0 {
                phi = cov_deriv(&phi, &h11, Direction::Anti(1))?;
                phit = cov_deriv(&phit, &ht11, Direction::Anti(1))?;
            }
            out.push(Condition::compare(
                format!("k11-intertwine(r={r},t={t})"),
                Route::Geometric,
                &(phi.value() * a0),
                &(a0 * phit.value()),
                tol,
            ));
        }
    }
    let (h1, ht1) = (h.truncate(n, 1), ht.truncate(n, 1));
    for j in 2..=h.dim() {
        let chain = k1j_chain(&h1, j, n - 1)?;
        let chain_t = k1j_chain(&ht1, j, n - 1)?;
        for r in 0..n {
            out.push(Condition::compare(
                format!("k1j-intertwine(j={j},r={r})"),
                Route::Geometric,
                &(chain[r].value() * a0),
                &(a0 * chain_t[r].value()),
                tol,
            ));
        }
    }
    Ok(out)
}

pub(super) fn psi_isometry(h: &HermJet, ht: &HermJet, a0: &CMat, tol: f64) -> Condition {
    Condition::compare("psi-isometry", Route::Psi, &h.value(), &(a0 * ht.value() * a0.adjoint()), tol)
}

/// `K_{i jbar} = Kt_{i jbar}` for `2 <= i, j <= m` (line bundles on the slice).
pub(super) fn tangential_curvature(h: &HermJet, ht: &HermJet, tol: f64) -> Result<Vec<Condition>> {
    let mut out = Vec::new();
    let (h1, ht1) = (h.truncate(1, 1), ht.truncate(1, 1));
    for i in 2..=h.dim() {
        for j in 2..=h.dim() {
            let k = curvature(&h1, i, j)?.value();
            let kt = curvature(&ht1, i, j)?.value();
            out.push(Condition::compare(format!("tangential-curvature(i={i},j={j})"), Route::Psi, &k, &kt, tol));
        }
    }
    Ok(out)
}

/// Point-wise contact by extending `A_0` over all variables.
pub(super) fn pointwise_from_value(h: &HermJet, ht: &HermJet, a0: &CMat, n: usize, tol: f64) -> Result<Condition> {
    let a = extend_a_multi(h, ht, a0, n)?;
    pointwise_verify(h, ht, &a, n, tol)
}

pub(super) fn rank1_auto_a0(h: &HermJet, ht: &HermJet) -> Result<CMat> {
    let r = h.value()[(0, 0)].re / ht.value()[(0, 0)].re;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::NotPositiveDefinite("Gram values must be positive".into()));
    }
    Ok(CMat::from_element(1, 1, linalg::C64::new(r.sqrt(), 0.0)))
}
