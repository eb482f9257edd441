//! Finite quotient models of adjoint shifts on reproducing kernel spaces.
//!
//! The kernel is entered as the Gram `H_ij = <s_i, s_j>` of the frame
//! `s_i(z) = K(., conj z) e_i`. The quotient by functions vanishing to order
//! `n` at `z0` is spanned by the jet vectors `d^I s_i(z0)`, and `S_j^*` acts
//! there as `z0_j` plus the direction-`j` Pascal map.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::contact::{jet_gram, pointwise_check, Candidate, Condition, ContactProblem, ContactReport, JetVars, Mode, Route, Verdict};
use crate::error::{Error, Result};
use crate::kernelexpr::BundleSpec;
use crate::linalg::{cholesky, frob, hermitian_eigen, inverse, min_eigenvalue, polar_unitary, singular_values, CMat, C64};
use crate::par::Strategy;
use crate::pascal::multi_generator;

/// Largest quotient dimension for which the direct intertwiner search runs.
pub const DIRECT_LIMIT: usize = 64;

#[derive(Debug, Clone)]
pub struct QuotientModel {
    pub kernel: BundleSpec,
    pub z0: Vec<C64>,
    pub order: usize,
    /// Full multi-index jet Gram of the kernel at `z0`, as in the contact checks.
    pub gram: CMat,
    /// `S_j^*` on coefficient columns over the jet basis.
    pub shifts: Vec<CMat>,
}

impl QuotientModel {
    pub fn dim(&self) -> usize {
        self.kernel.dim
    }

    pub fn rank(&self) -> usize {
        self.kernel.rank
    }

    pub fn size(&self) -> usize {
        self.gram.nrows()
    }

    /// Entry `(p, q)` is `<v_q, v_p>`, so `<x, y> = y^* M x`.
    pub fn inner_product(&self) -> CMat {
        self.gram.transpose()
    }

    /// `S_j^* - z0_j` for zero-based `j`.
    pub fn pascal_part(&self, j: usize) -> CMat {
        let d = self.size();
        &self.shifts[j] - CMat::identity(d, d) * self.z0[j]
    }
}

pub fn quotient_model(kernel: &BundleSpec, z0: &[C64], n: usize) -> Result<QuotientModel> {
    let h = kernel.jet(z0, n, n)?;
    let gram = jet_gram(&h, n, JetVars::All)?;
    let lo = min_eigenvalue(&gram);
    if lo <= 0.0 {
        return Err(Error::NotPositiveDefinite(format!(
            "jet Gram of '{}' at order {n} has smallest eigenvalue {lo:.3e}",
            kernel.label
        )));
    }
    let d = gram.nrows();
    let shifts = (0..kernel.dim)
        .map(|j| multi_generator(kernel.dim, n, kernel.rank, j).transpose() + CMat::identity(d, d) * z0[j])
        .collect();
    Ok(QuotientModel { kernel: kernel.clone(), z0: z0.to_vec(), order: n, gram, shifts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectResult {
    pub verdict: Verdict,
    /// Dimension of the solution space of the hermitized intertwining system.
    pub intertwiner_dimension: usize,
    /// `sigma_min / sigma_max` of the chosen intertwiner.
    pub conditioning: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub order: usize,
    pub size: usize,
    pub contact: Verdict,
    pub contact_report: Option<ContactReport>,
    pub direct: Option<DirectResult>,
    pub agree: Option<bool>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone)]
pub struct EquivOptions {
    pub tolerance: f64,
    pub seed: u64,
    /// Needed by the contact route when the rank exceeds one.
    pub candidate: Option<Candidate>,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions { tolerance: 1e-8, seed: 11, candidate: None }
    }
}

pub fn unitary_equiv_check(a: &QuotientModel, b: &QuotientModel) -> Result<EquivalenceReport> {
    unitary_equiv_check_with(a, b, &EquivOptions::default())
}

pub fn unitary_equiv_check_with(a: &QuotientModel, b: &QuotientModel, o: &EquivOptions) -> Result<EquivalenceReport> {
    if a.dim() != b.dim() || a.rank() != b.rank() || a.order != b.order {
        return Err(Error::Dimension("models differ in dimension, rank or order".into()));
    }
    if a.z0.iter().zip(&b.z0).any(|(x, y)| (x - y).norm() > 1e-14) {
        return Err(Error::Dimension("models are based at different points".into()));
    }

    let contact_report = if a.rank() == 1 || o.candidate.is_some() {
        let p = ContactProblem {
            bundle_a: a.kernel.clone(),
            bundle_b: b.kernel.clone(),
            order: a.order,
            mode: Mode::Pointwise,
            points: vec![a.z0.clone()],
            candidate: o.candidate.clone(),
            tolerance: o.tolerance,
            strategy: Strategy::Sequential,
        };
        Some(pointwise_check(&p)?)
    } else {
        None
    };
    let contact = contact_report.as_ref().map_or(Verdict::Inconclusive, |r| r.verdict);

    let direct = if a.size() <= DIRECT_LIMIT { Some(direct_check(a, b, o.tolerance, o.seed)?) } else { None };
    let agree = direct.as_ref().filter(|_| contact_report.is_some()).map(|d| d.verdict == contact);
    let verdict = match (&contact_report, &direct) {
        (Some(_), Some(d)) if d.verdict == contact => contact,
        (Some(_), Some(_)) => Verdict::Inconclusive,
        (Some(_), None) => contact,
        (None, Some(d)) => d.verdict,
        (None, None) => Verdict::Inconclusive,
    };
    Ok(EquivalenceReport { order: a.order, size: a.size(), contact, contact_report, direct, agree, verdict })
}

/// Checks several model pairs, one task per pair.
pub fn check_pairs(
    pairs: &[(QuotientModel, QuotientModel)],
    o: &EquivOptions,
    strategy: Strategy,
) -> Vec<Result<EquivalenceReport>> {
    strategy.map(pairs, |(a, b)| unitary_equiv_check_with(a, b, o))
}

/// Shift matrices in orthonormal coordinates `y = L^* x` where `M = L L^*`.
fn whitened(m: &QuotientModel) -> Result<Vec<CMat>> {
    let l = cholesky(&m.inner_product())?;
    let lh = l.adjoint();
    let lh_inv = inverse(&lh, "whitening factor")?;
    Ok(m.shifts.iter().map(|s| &lh * s * &lh_inv).collect())
}

/// `vec(A Y - Y B)` as a matrix acting on column-major `vec(Y)`.
fn sylvester(a: &CMat, b: &CMat) -> CMat {
    let d = a.nrows();
    let id = CMat::identity(d, d);
    id.kronecker(a) - b.transpose().kronecker(&id)
}

fn direct_check(a: &QuotientModel, b: &QuotientModel, tol: f64, seed: u64) -> Result<DirectResult> {
    let na = whitened(a)?;
    let nb = whitened(b)?;
    let d = a.size();

    // normal matrix of the stacked system, accumulated to bound memory
    let mut normal = CMat::zeros(d * d, d * d);
    for (x, y) in na.iter().zip(&nb) {
        for c in [sylvester(y, x), sylvester(&y.adjoint(), &x.adjoint())] {
            normal += c.adjoint() * &c;
        }
    }
    let (vals, vecs) = hermitian_eigen(&normal);
    let top = vals.last().copied().unwrap_or(0.0).max(1e-300);
    let basis: Vec<usize> = (0..vals.len()).filter(|&k| vals[k].max(0.0).sqrt() <= 1e-6 * top.sqrt()).collect();

    let scale = na.iter().chain(&nb).map(frob).fold(1.0, f64::max);
    let refuted = |dim: usize, conditioning: f64| DirectResult {
        verdict: Verdict::Refuted,
        intertwiner_dimension: dim,
        conditioning,
        residual: f64::INFINITY,
    };
    if basis.is_empty() {
        return Ok(refuted(0, 0.0));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, CMat)> = None;
    for _ in 0..3 {
        let mut y = CMat::zeros(d, d);
        for &k in &basis {
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let v = vecs.column(k);
            y += DMatrix::from_column_slice(d, d, v.as_slice()) * c;
        }
        let sv = singular_values(&y);
        let cond = sv.last().copied().unwrap_or(0.0) / sv[0].max(1e-300);
        if best.as_ref().is_none_or(|(c, _)| cond > *c) {
            best = Some((cond, y));
        }
    }
    let (cond, y) = best.expect("at least one draw");
    if cond < 1e-8 {
        return Ok(refuted(basis.len(), cond));
    }
    let w = polar_unitary(&y);
    let residual = na.iter().zip(&nb).map(|(x, z)| frob(&(&w * x - z * &w))).fold(0.0, f64::max);
    let cond_check = Condition::from_residual("direct-intertwiner", Route::Candidate, residual, scale, tol);
    Ok(DirectResult {
        verdict: cond_check.verdict,
        intertwiner_dimension: basis.len(),
        conditioning: cond,
        residual: residual / scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::jet_gram;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn scalar(label: &str, m: usize, text: &str) -> BundleSpec {
        BundleSpec::scalar(label, m, text).unwrap()
    }

    fn hardy() -> BundleSpec {
        scalar("hardy", 1, "1/(1 - z1*zb1)")
    }
    fn bergman() -> BundleSpec {
        scalar("bergman", 1, "(1 - z1*zb1)^(-2)")
    }
    fn fock() -> BundleSpec {
        scalar("fock", 1, "exp(z1*zb1)")
    }

    fn diag_close(g: &CMat, want: &[f64]) {
        assert_eq!(g.nrows(), want.len());
        for r in 0..g.nrows() {
            for s in 0..g.ncols() {
                let w = if r == s { want[r] } else { 0.0 };
                assert!((g[(r, s)] - c(w, 0.0)).norm() < 1e-12, "entry ({r},{s}) = {}", g[(r, s)]);
            }
        }
    }

    #[test]
    fn model_grams() {
        let z = [c(0.0, 0.0)];
        diag_close(&quotient_model(&hardy(), &z, 1).unwrap().gram, &[1.0, 1.0]);
        diag_close(&quotient_model(&bergman(), &z, 1).unwrap().gram, &[1.0, 2.0]);
        diag_close(&quotient_model(&fock(), &z, 2).unwrap().gram, &[1.0, 1.0, 2.0]);
        // Hardy: (k!)^2, Bergman: (k!)^2 (k+1)
        diag_close(&quotient_model(&hardy(), &z, 3).unwrap().gram, &[1.0, 1.0, 4.0, 36.0]);
        diag_close(&quotient_model(&bergman(), &z, 2).unwrap().gram, &[1.0, 2.0, 12.0]);
    }

    #[test]
    fn hardy_shift_lowers_jets() {
        let q = quotient_model(&hardy(), &[c(0.0, 0.0)], 1).unwrap();
        let s = &q.shifts[0];
        assert_eq!(s[(0, 1)], c(1.0, 0.0));
        assert_eq!(s[(0, 0)], c(0.0, 0.0));
        assert_eq!(s[(1, 0)], c(0.0, 0.0));
        assert_eq!(s[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn shift_minus_base_point_is_pascal() {
        let k = scalar("bidisc", 2, "1/((1 - z1*zb1)*(1 - z2*zb2))");
        let z0 = [c(0.2, 0.1), c(-0.1, 0.3)];
        let q = quotient_model(&k, &z0, 2).unwrap();
        for j in 0..2 {
            let p = multi_generator(2, 2, 1, j).transpose();
            assert_eq!(q.pascal_part(j), p);
        }
        let h = k.jet(&z0, 2, 2).unwrap();
        assert_eq!(q.gram, jet_gram(&h, 2, JetVars::All).unwrap());
    }

    #[test]
    fn model_equivalent_to_itself() {
        let z = [c(0.1, -0.2)];
        let a = quotient_model(&bergman(), &z, 2).unwrap();
        let r = unitary_equiv_check(&a, &a).unwrap();
        assert_eq!(r.verdict, Verdict::Verified);
        assert_eq!(r.agree, Some(true));
    }

    #[test]
    fn hardy_bergman_inequivalent() {
        let z = [c(0.0, 0.0)];
        let a = quotient_model(&hardy(), &z, 1).unwrap();
        let b = quotient_model(&bergman(), &z, 1).unwrap();
        let r = unitary_equiv_check(&a, &b).unwrap();
        assert_eq!(r.contact, Verdict::Refuted);
        assert_eq!(r.direct.as_ref().unwrap().verdict, Verdict::Refuted);
        assert_eq!(r.agree, Some(true));
    }

    #[test]
    fn hardy_fock_flip_with_order() {
        let z = [c(0.0, 0.0)];
        let one = unitary_equiv_check(
            &quotient_model(&hardy(), &z, 1).unwrap(),
            &quotient_model(&fock(), &z, 1).unwrap(),
        )
        .unwrap();
        assert_eq!(one.verdict, Verdict::Verified);
        assert_eq!(one.agree, Some(true));
        let two = unitary_equiv_check(
            &quotient_model(&hardy(), &z, 2).unwrap(),
            &quotient_model(&fock(), &z, 2).unwrap(),
        )
        .unwrap();
        assert_eq!(two.verdict, Verdict::Refuted);
        assert_eq!(two.agree, Some(true));
    }

    #[test]
    fn frame_change_equivalent_off_origin() {
        let z = [c(0.25, -0.15), c(0.1, 0.2)];
        let base = "exp(z1*zb1 + 2*z2*zb2)";
        let a = scalar("a", 2, base);
        let b = scalar("b", 2, &format!("(1 + 0.5*z1 - 0.3*z2)*(1 + 0.5*zb1 - 0.3*zb2)*{base}"));
        for n in 1..=2 {
            let r = unitary_equiv_check(&quotient_model(&a, &z, n).unwrap(), &quotient_model(&b, &z, n).unwrap()).unwrap();
            assert_eq!(r.verdict, Verdict::Verified, "n={n}: {r:?}");
            assert_eq!(r.agree, Some(true));
        }
    }

    #[test]
    fn rank_two_direct_route() {
        let z = [c(0.1, 0.05)];
        let a = BundleSpec::parse(
            "diag",
            1,
            &[vec!["1/(1 - z1*zb1)".into(), "0".into()], vec!["0".into(), "exp(z1*zb1)".into()]],
        )
        .unwrap();
        // A H A^* with A = [[1, 0.5], [0, 2]]
        let b = BundleSpec::parse(
            "mixed",
            1,
            &[
                vec!["1/(1 - z1*zb1) + 0.25*exp(z1*zb1)".into(), "exp(z1*zb1)".into()],
                vec!["exp(z1*zb1)".into(), "4*exp(z1*zb1)".into()],
            ],
        )
        .unwrap();
        let other = BundleSpec::parse(
            "other",
            1,
            &[vec!["1/(1 - z1*zb1)".into(), "0".into()], vec!["0".into(), "(1 - z1*zb1)^(-2)".into()]],
        )
        .unwrap();
        let qa = quotient_model(&a, &z, 2).unwrap();
        let same = unitary_equiv_check(&qa, &quotient_model(&b, &z, 2).unwrap()).unwrap();
        assert_eq!(same.direct.as_ref().unwrap().verdict, Verdict::Verified, "{:?}", same.direct);
        assert_eq!(same.contact, Verdict::Inconclusive);
        let diff = unitary_equiv_check(&qa, &quotient_model(&other, &z, 2).unwrap()).unwrap();
        assert_eq!(diff.direct.unwrap().verdict, Verdict::Refuted);

        let cand = Candidate::constant(&CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(-0.25, 0.0), c(0.0, 0.0), c(0.5, 0.0)]));
        let o = EquivOptions { candidate: Some(cand), ..Default::default() };
        let with = unitary_equiv_check_with(&qa, &quotient_model(&b, &z, 2).unwrap(), &o).unwrap();
        assert_eq!(with.verdict, Verdict::Verified, "{with:?}");
        assert_eq!(with.agree, Some(true));
    }

    #[test]
    fn mismatched_models_rejected() {
        let a = quotient_model(&hardy(), &[c(0.0, 0.0)], 1).unwrap();
        let b = quotient_model(&hardy(), &[c(0.0, 0.0)], 2).unwrap();
        assert!(matches!(unitary_equiv_check(&a, &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn pairs_match_across_strategies() {
        let z = [c(0.0, 0.0)];
        let pairs = vec![
            (quotient_model(&hardy(), &z, 2).unwrap(), quotient_model(&fock(), &z, 2).unwrap()),
            (quotient_model(&hardy(), &z, 1).unwrap(), quotient_model(&fock(), &z, 1).unwrap()),
        ];
        let o = EquivOptions::default();
        let s: Vec<Verdict> = check_pairs(&pairs, &o, Strategy::Sequential).into_iter().map(|r| r.unwrap().verdict).collect();
        let p: Vec<Verdict> = check_pairs(&pairs, &o, Strategy::Parallel).into_iter().map(|r| r.unwrap().verdict).collect();
        assert_eq!(s, p);
        assert_eq!(s, vec![Verdict::Refuted, Verdict::Verified]);
    }
}
