#![allow(clippy::needless_range_loop)]

use approx::assert_abs_diff_eq;
use num_complex::Complex64;

use super::*;
use crate::linalg::{self, CMat, C64};

fn c(re: f64) -> C64 {
    Complex64::new(re, 0.0)
}

fn origin() -> Vec<C64> {
    vec![c(0.0)]
}

fn zzbar(order: usize) -> HermJet {
    let z = HermJet::holo_var(&origin(), order, order, 0);
    let zb = HermJet::anti_var(&origin(), order, order, 0);
    z.mul(&zb).unwrap()
}

fn one(order: usize) -> HermJet {
    HermJet::scalar_constant(&origin(), order, order, c(1.0))
}

fn idx(k: usize) -> MultiIndex {
    MultiIndex(vec![k])
}

fn diag_coeff(j: &HermJet, k: usize) -> C64 {
    j.coeff(&idx(k), &idx(k)).unwrap()[(0, 0)]
}

#[test]
fn constant_identity_is_neutral() {
    let b = zzbar(3).add(&HermJet::holo_var(&origin(), 3, 3, 0)).unwrap();
    let i = HermJet::identity(&origin(), 4, 4, 1);
    let p = i.mul(&b).unwrap();
    assert_eq!(p.max_diff(&b).unwrap(), 0.0);
    assert_eq!(p.holo_order(), 3);
}

#[test]
fn z_times_zbar_has_single_coefficient() {
    let j = zzbar(2);
    for a in 0..=2 {
        for b in 0..=2 {
            let v = j.coeff(&idx(a), &idx(b)).unwrap()[(0, 0)];
            let want = if a == 1 && b == 1 { 1.0 } else { 0.0 };
            assert_eq!(v, c(want));
        }
    }
}

#[test]
fn geometric_series_squared() {
    let n = 5;
    let g = one(n).sub(&zzbar(n)).unwrap().inverse().unwrap();
    let sq = g.mul(&g).unwrap();
    for k in 0..=n {
        assert_abs_diff_eq!(diag_coeff(&sq, k).re, (k + 1) as f64, epsilon = 1e-13);
    }
}

#[test]
fn inverse_of_one_plus_zzbar_alternates() {
    let n = 6;
    let inv = one(n).add(&zzbar(n)).unwrap().inverse().unwrap();
    for k in 0..=n {
        let want = if k % 2 == 0 { 1.0 } else { -1.0 };
        assert_abs_diff_eq!(diag_coeff(&inv, k).re, want, epsilon = 1e-14);
    }
}

#[test]
fn inverse_of_geometric_series_is_polynomial() {
    let n = 4;
    let g = one(n).sub(&zzbar(n)).unwrap().inverse().unwrap();
    let back = g.inverse().unwrap();
    let want = one(n).sub(&zzbar(n)).unwrap();
    assert!(back.max_diff(&want).unwrap() < 1e-14);
}

#[test]
fn constant_matrix_inverse() {
    let m = CMat::from_row_slice(2, 2, &[c(2.0), c(1.0), c(0.0), c(4.0)]);
    let j = HermJet::constant(&[c(0.1), c(0.2)], 2, 2, &m);
    let inv = j.inverse().unwrap();
    let want = linalg::inverse(&m, "m").unwrap();
    assert!(linalg::frob(&(inv.value() - want)) < 1e-15);
    assert!(inv.mul(&j).unwrap().max_diff(&HermJet::identity(&[c(0.1), c(0.2)], 2, 2, 2)).unwrap() < 1e-15);
}

#[test]
fn singular_constant_term_rejected() {
    let j = zzbar(2);
    assert!(matches!(j.inverse(), Err(crate::Error::Singular(_))));
}

#[test]
fn exp_of_zero_is_one() {
    let z = HermJet::zeros(&origin(), 3, 3, 1).exp().unwrap();
    assert!(z.max_diff(&one(3)).unwrap() == 0.0);
}

#[test]
fn power_minus_two_of_one_minus_zzbar() {
    let n = 5;
    let p = one(n).sub(&zzbar(n)).unwrap().powf(-2.0).unwrap();
    for k in 0..=n {
        assert_abs_diff_eq!(diag_coeff(&p, k).re, (k + 1) as f64, epsilon = 1e-12);
    }
    // non-integer path agrees with its integer neighbour in the limit sense
    let half = one(n).sub(&zzbar(n)).unwrap().powf(-0.5).unwrap();
    let sq = half.mul(&half).unwrap();
    let inv = one(n).sub(&zzbar(n)).unwrap().inverse().unwrap();
    assert!(sq.max_diff(&inv).unwrap() < 1e-13);
}

#[test]
fn log_exp_round_trip() {
    let n = 5;
    let j = zzbar(n).exp().unwrap().ln().unwrap();
    assert!(j.max_diff(&zzbar(n)).unwrap() < 1e-14);
}

#[test]
fn log_rejects_branch_point() {
    let j = zzbar(2).scale(c(-1.0));
    assert!(j.ln().is_err());
}

#[test]
fn extract_multiplies_factorials() {
    let n = 4;
    let g = one(n).sub(&zzbar(n)).unwrap().inverse().unwrap();
    let e = zzbar(n).exp().unwrap();
    let f = [1.0, 1.0, 2.0, 6.0, 24.0];
    for k in 0..=n {
        // (1 - z zbar)^-1 has c_kk = 1, so the derivative is (k!)^2
        assert_abs_diff_eq!(g.extract(&idx(k), &idx(k)).unwrap()[(0, 0)].re, f[k] * f[k], epsilon = 1e-10);
        for q in 0..=n {
            let want = if q == k { f[k] } else { 0.0 };
            assert_abs_diff_eq!(e.extract(&idx(k), &idx(q)).unwrap()[(0, 0)].re, want, epsilon = 1e-12);
        }
    }
    let b = one(n).sub(&zzbar(n)).unwrap().powi(-2).unwrap();
    for k in 0..=n {
        assert_abs_diff_eq!(
            b.extract(&idx(k), &idx(k)).unwrap()[(0, 0)].re,
            f[k] * f[k] * (k + 1) as f64,
            epsilon = 1e-9
        );
    }
    assert!(matches!(g.extract(&idx(5), &idx(0)), Err(crate::Error::Range(_))));
}

#[test]
fn derivative_shifts_coefficients() {
    let n = 4;
    let e = zzbar(n).exp().unwrap();
    // d/dz exp(z zbar) = zbar exp(z zbar)
    let d = e.d_holo(0).unwrap();
    let want = HermJet::anti_var(&origin(), n, n, 0).mul(&e).unwrap();
    assert!(d.max_diff(&want).unwrap() < 1e-14);
    assert_eq!(d.holo_order(), n - 1);
}

#[test]
fn conj_transpose_of_gram_is_itself() {
    let cen = [Complex64::new(0.2, -0.1)];
    let z = HermJet::holo_var(&cen, 3, 3, 0);
    let zb = HermJet::anti_var(&cen, 3, 3, 0);
    let h = z.mul(&zb).unwrap().add(&one_at(&cen, 3)).unwrap().exp().unwrap();
    assert!(h.conj_transpose().max_diff(&h).unwrap() < 1e-14);
    assert!(h.hermitian_defect() < 1e-14);
}

fn one_at(cen: &[C64], n: usize) -> HermJet {
    HermJet::scalar_constant(cen, n, n, c(1.0))
}

#[test]
fn holo_jet_examples() {
    let o = origin();
    let z = HoloJet::from_herm(HermJet::holo_var(&o, 3, 0, 0)).unwrap();
    let one_plus = HoloJet::identity(&o, 3, 1).add(&z).unwrap();
    let inv = HoloJet::identity(&o, 3, 1).sub(&z).unwrap().inverse().unwrap();
    for k in 0..=3 {
        assert_abs_diff_eq!(inv.coeff(&idx(k)).unwrap()[(0, 0)].re, 1.0, epsilon = 1e-15);
    }
    assert_eq!(one_plus.coeff(&idx(1)).unwrap()[(0, 0)], c(1.0));
    assert_eq!(one_plus.coeff(&idx(2)).unwrap()[(0, 0)], c(0.0));
    let adj = one_plus.adjoint_herm(2);
    assert_eq!(adj.coeff(&idx(0), &idx(1)).unwrap()[(0, 0)], c(1.0));
    assert_eq!(adj.coeff(&idx(1), &idx(0)).unwrap()[(0, 0)], c(0.0));
    assert!(HoloJet::from_herm(HermJet::anti_var(&o, 1, 1, 0)).is_err());
}
