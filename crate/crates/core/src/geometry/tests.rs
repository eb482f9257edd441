use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::corpus::{random_point, random_polynomial_gram};
use crate::kernelexpr::BundleSpec;

fn origin(m: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); m]
}

fn scalar_jet(text: &str, m: usize, p: usize, q: usize) -> HermJet {
    BundleSpec::scalar("h", m, text).unwrap().jet(&origin(m), p, q).unwrap()
}

fn rel(a: &CMat, b: &CMat) -> f64 {
    linalg::frob(&(a - b)) / (1.0 + linalg::frob(b))
}

#[test]
fn fock_curvature_is_flat_one() {
    let h = scalar_jet("exp(z1*zb1)", 1, 5, 5);
    let k = curvature(&h, 1, 1).unwrap();
    let one = HermJet::scalar_constant(&origin(1), 4, 4, Complex64::new(1.0, 0.0));
    assert!(k.0.max_diff(&one).unwrap() < 1e-13);
}

#[test]
fn bergman_curvature_and_derivatives() {
    for alpha in [1.0, 2.0, 3.0, 1.5] {
        let h = scalar_jet(&format!("pow(1 - z1*zb1, {})", -alpha), 1, 3, 3);
        let at = |r, t| curvature_derivative(&h, CurvatureRequest { i: 1, j: 1, r, t }).unwrap()[(0, 0)];
        assert_abs_diff_eq!(at(0, 0).re, alpha, epsilon = 1e-12);
        assert_abs_diff_eq!(at(1, 0).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(at(1, 1).re, 2.0 * alpha, epsilon = 1e-11);
    }
}

#[test]
fn constant_gram_is_flat() {
    let h = scalar_jet("2", 1, 2, 2);
    assert_eq!(curvature(&h, 1, 1).unwrap().0.max_abs(), 0.0);
    assert_eq!(l_tensor(&h, 1, 2).unwrap()[(0, 0)], Complex64::new(0.0, 0.0));
}

#[test]
fn identity_map_is_parallel() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let spec = random_polynomial_gram(&mut rng, 2, 2, 2).unwrap();
    let h = spec.jet(&random_point(&mut rng, 2, 0.3), 3, 3).unwrap();
    let id = MapJet(HermJet::identity(h.center(), 3, 3, 2));
    for d in [Direction::Holo(1), Direction::Holo(2), Direction::Anti(1), Direction::Anti(2)] {
        assert!(cov_deriv(&id, &h, d).unwrap().0.max_abs() < 1e-13);
    }
}

#[test]
fn adjoint_of_identity_gram() {
    let m = CMat::from_fn(2, 2, |r, c| Complex64::new(r as f64, c as f64 + 1.0));
    assert_eq!(adjoint_map(&m, &linalg::identity(2)).unwrap(), m.adjoint());
}

#[test]
fn l_tensor_examples() {
    let h = scalar_jet("exp(z1*zb1 + z1*zb2)", 2, 3, 3);
    assert_abs_diff_eq!(l_tensor(&h, 2, 1).unwrap()[(0, 0)].re, 1.0, epsilon = 1e-14);
    let k = curvature(&h, 1, 1).unwrap().value();
    assert!(rel(&l_tensor(&h, 1, 1).unwrap(), &k) < 1e-14);
    let f = scalar_jet("exp(z1*zb1)", 1, 3, 3);
    assert!(k1j_recursion(&f, 1, 2).unwrap()[(0, 0)].norm() < 1e-14);
    assert!(rel(&k1j_recursion(&f, 1, 1).unwrap(), &l_tensor(&f, 1, 1).unwrap()) < 1e-15);
}

#[test]
fn recursions_match_direct_iteration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (m, l) in [(1, 1), (2, 2), (3, 2), (2, 3)] {
        let spec = random_polynomial_gram(&mut rng, m, l, 2).unwrap();
        let z0 = random_point(&mut rng, m, 0.4);
        let n_max = 4;
        let h = spec.jet(&z0, n_max + 1, n_max + 1).unwrap();
        for j in 1..=m {
            let k1j = curvature(&h, 1, j).unwrap();
            let q = q_jet(&h, j).unwrap();
            for n in 1..=n_max {
                let rec = k1j_recursion(&h, j, n).unwrap();
                let direct = cov_iterate(&k1j, &h, &vec![Direction::Holo(1); n - 1]).unwrap().value();
                assert!(rel(&rec, &direct) < 1e-9, "m={m} l={l} j={j} n={n}: {}", rel(&rec, &direct));

                let qr = q_recursion(&h, j, n).unwrap();
                let mut qd = q.0.clone();
                for _ in 0..n {
                    qd = qd.d_anti(0).unwrap();
                }
                assert!(rel(&qr, &qd.value()) < 1e-9);

                // J_n = H (dbar_1^{n-1} Q_j)^* H^{-1}
                let dual = adjoint_map(&q_recursion(&h, j, n - 1).unwrap(), &h.value()).unwrap();
                assert!(rel(&dual, &rec) < 1e-9);
            }
        }
    }
}

#[test]
fn adjoint_identities_on_random_grams() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..4 {
        let spec = random_polynomial_gram(&mut rng, 2, 2, 2).unwrap();
        let h = spec.jet(&random_point(&mut rng, 2, 0.4), 3, 3).unwrap();
        for i in 1..=2 {
            for j in 1..=2 {
                let kij = curvature(&h, i, j).unwrap().value();
                let kji = curvature(&h, j, i).unwrap().value();
                assert!(rel(&kij, &adjoint_map(&kji, &h.value()).unwrap()) < 1e-10);
            }
            let phi = curvature(&h, 1, 2).unwrap();
            let lhs = adjoint_jet(&cov_deriv(&phi, &h, Direction::Holo(i)).unwrap(), &h).unwrap();
            let rhs = cov_deriv(&adjoint_jet(&phi, &h).unwrap(), &h, Direction::Anti(i)).unwrap();
            assert!(lhs.0.max_diff(&rhs.0).unwrap() < 1e-10 * (1.0 + lhs.0.max_abs()));
        }
    }
}

#[test]
fn normalized_frame_examples() {
    let h = scalar_jet("pow(1 - z1*zb1, -1)", 1, 4, 4);
    let (a, hn) = normalize_frame(&h, 4).unwrap();
    assert!(a.as_herm().max_diff(&crate::jet::HoloJet::identity(&origin(1), 4, 1).as_herm().clone()).unwrap() < 1e-14);
    assert!(hn.max_diff(&h).unwrap() < 1e-14);

    let g = scalar_jet("exp(z1 + zb1 + z1*zb1)", 1, 4, 4);
    let (a, hn) = normalize_frame(&g, 4).unwrap();
    let want_a = crate::kernelexpr::eval_holo_jet(&crate::kernelexpr::parse_kernel("exp(-z1)").unwrap(), &origin(1), 4).unwrap();
    assert!(a.as_herm().max_diff(want_a.as_herm()).unwrap() < 1e-13);
    assert!(hn.max_diff(&scalar_jet("exp(z1*zb1)", 1, 4, 4)).unwrap() < 1e-13);
}

#[test]
fn normalized_frame_on_random_grams() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (m, l) in [(1, 2), (2, 2), (3, 1)] {
        let spec = random_polynomial_gram(&mut rng, m, l, 2).unwrap();
        let h = spec.jet(&random_point(&mut rng, m, 0.4), 3, 3).unwrap();
        let (_, hn) = normalize_frame(&h, 3).unwrap();
        assert!(normalization_defect(&hn) < 1e-10);
        // curvature at the center is the mixed second derivative there
        for i in 1..=m {
            for j in 1..=m {
                let k = curvature(&hn, i, j).unwrap().value();
                let mut a = MultiIndex::zero(m);
                a.0[i - 1] = 1;
                let mut b = MultiIndex::zero(m);
                b.0[j - 1] = 1;
                assert!(rel(&k, &hn.extract(&a, &b).unwrap()) < 1e-10);
            }
        }
    }
}

#[test]
fn order_errors() {
    let h = scalar_jet("exp(z1*zb1)", 1, 1, 1);
    assert!(matches!(
        curvature_derivative(&h, CurvatureRequest { i: 1, j: 1, r: 1, t: 0 }),
        Err(Error::Order(_))
    ));
    assert!(matches!(k1j_recursion(&h, 1, 2), Err(Error::Order(_))));
    assert!(matches!(curvature(&h, 2, 1), Err(Error::Range(_))));
}

#[test]
fn recursion_residuals_small_on_random_grams() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let spec = random_polynomial_gram(&mut rng, 2, 2, 2).unwrap();
    let h = spec.jet(&random_point(&mut rng, 2, 0.4), 4, 4).unwrap();
    let r = recursion_residuals(&h, 3).unwrap();
    assert_eq!(r.len(), 2 * 3 * 3);
    assert!(r.iter().all(|(_, v)| *v < 1e-9), "{r:?}");
    assert!(matches!(recursion_residuals(&h, 4), Err(Error::Order(_))));
}
