//! Small dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<Complex64>;

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn frob(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Inverse with a relative singularity threshold.
pub fn inverse(m: &CMat, what: &str) -> Result<CMat> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("{what}: {}x{} is not square", m.nrows(), m.ncols())));
    }
    let scale = frob(m).max(f64::MIN_POSITIVE);
    let lu = m.clone().lu();
    let inv = lu
        .try_inverse()
        .ok_or_else(|| Error::Singular(what.to_string()))?;
    if !inv.iter().all(|z| z.is_finite()) || frob(&inv) * scale > 1e14 {
        return Err(Error::Singular(format!("{what} (condition estimate too large)")));
    }
    Ok(inv)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    frob(&(m - m.adjoint())) <= tol * (1.0 + frob(m))
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = CMat::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigen(m).0.first().copied().unwrap_or(f64::NAN)
}

/// Hermitian positive square root and its inverse.
pub fn hermitian_sqrt(m: &CMat) -> Result<(CMat, CMat)> {
    let (vals, vecs) = hermitian_eigen(m);
    if vals.iter().any(|&v| v <= 0.0) {
        return Err(Error::NotPositiveDefinite(format!(
            "smallest eigenvalue {:.3e}",
            vals.first().copied().unwrap_or(f64::NAN)
        )));
    }
    let n = m.nrows();
    let mut root = zeros(n);
    let mut inv_root = zeros(n);
    for (k, &v) in vals.iter().enumerate() {
        let col = vecs.column(k);
        let outer = col * col.adjoint();
        root += outer.scale(v.sqrt());
        inv_root += outer.scale(1.0 / v.sqrt());
    }
    Ok((root, inv_root))
}

/// Lower Cholesky factor `L` with `m = L L^*`.
pub fn cholesky(m: &CMat) -> Result<CMat> {
    let herm = (m + m.adjoint()).scale(0.5);
    herm.cholesky()
        .map(|c| c.unpack())
        .ok_or_else(|| Error::NotPositiveDefinite("cholesky factorization failed".into()))
}

/// Real `2n x 2n` form `[[X, -Y], [Y, X]]` of `X + iY`.
///
/// nalgebra's complex SVD loses accuracy on matrices with clustered singular
/// values, so both helpers below go through the real factorization.
fn real_embedding(m: &CMat) -> DMatrix<f64> {
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Singular values, descending.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut sv: Vec<f64> = real_embedding(m).svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    // each value appears twice in the embedding
    sv.into_iter().step_by(2).collect()
}

/// Unitary factor of the polar decomposition `m = U |m|`, for invertible square `m`.
pub fn polar_unitary(m: &CMat) -> CMat {
    let n = m.nrows();
    let svd = real_embedding(m).svd(true, true);
    let q = svd.u.expect("requested U") * svd.v_t.expect("requested V^T");
    CMat::from_fn(n, n, |i, j| Complex64::new(q[(i, j)], q[(i + n, j)]))
}

/// Orthonormal basis of the numerical null space of `a`, columns of the result.
///
/// Uses the Hermitian eigenproblem of `a^* a`; singular values below
/// `rel_tol * sigma_max` count as zero.
pub fn null_space(a: &CMat, rel_tol: f64) -> CMat {
    let gram = a.adjoint() * a;
    let (vals, vecs) = hermitian_eigen(&gram);
    let top = vals.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let cutoff = rel_tol * top.max(1e-300);
    let keep: Vec<usize> = vals
        .iter()
        .enumerate()
        .filter(|(_, &v)| v.max(0.0).sqrt() <= cutoff)
        .map(|(k, _)| k)
        .collect();
    CMat::from_fn(a.ncols(), keep.len(), |r, c| vecs[(r, keep[c])])
}
