use super::herm::HermJet;
use super::index::{IndexTable, MultiIndex};
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

/// Truncated expansion of a holomorphic `l x l` matrix function: `c_a = d^a A(z0) / a!`.
///
/// Stored as a [`HermJet`] with anti-holomorphic order 0.
#[derive(Debug, Clone)]
pub struct HoloJet {
    inner: HermJet,
}

impl HoloJet {
    pub fn zeros(center: &[C64], order: usize, rank: usize) -> Self {
        HoloJet { inner: HermJet::zeros(center, order, 0, rank) }
    }

    pub fn constant(center: &[C64], order: usize, value: &CMat) -> Self {
        HoloJet { inner: HermJet::constant(center, order, 0, value) }
    }

    pub fn identity(center: &[C64], order: usize, rank: usize) -> Self {
        HoloJet { inner: HermJet::identity(center, order, 0, rank) }
    }

    /// Wraps a jet whose anti-holomorphic order is 0.
    pub fn from_herm(inner: HermJet) -> Result<Self> {
        if inner.anti_order() != 0 {
            return Err(Error::Type("holomorphic jet cannot carry anti-holomorphic terms".into()));
        }
        Ok(HoloJet { inner })
    }

    /// The `c_{a,0}` coefficients of a Hermitian jet, i.e. the restriction to `zbar = zbar0`.
    pub fn holomorphic_part(h: &HermJet) -> Self {
        HoloJet { inner: h.truncate(h.holo_order(), 0) }
    }

    /// Builds from coefficient matrices listed in table order.
    pub fn from_coeffs(center: &[C64], order: usize, coeffs: &[CMat]) -> Result<Self> {
        let rank = coeffs.first().map(|c| c.nrows()).unwrap_or(1);
        let mut out = Self::zeros(center, order, rank);
        let t = super::index::table(center.len(), order);
        if coeffs.len() != t.len() {
            return Err(Error::Dimension(format!("{} coefficients for {} indices", coeffs.len(), t.len())));
        }
        let zero = MultiIndex::zero(center.len());
        for (a, c) in t.indices.iter().zip(coeffs) {
            out.inner.set_coeff(a, &zero, c)?;
        }
        Ok(out)
    }

    pub fn as_herm(&self) -> &HermJet {
        &self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn center(&self) -> &[C64] {
        self.inner.center()
    }

    pub fn order(&self) -> usize {
        self.inner.holo_order()
    }

    pub fn rank(&self) -> usize {
        self.inner.rank()
    }

    pub fn table(&self) -> &IndexTable {
        self.inner.holo_table()
    }

    pub fn coeff(&self, a: &MultiIndex) -> Result<CMat> {
        self.inner.coeff(a, &MultiIndex::zero(self.dim()))
    }

    pub fn coeff_at(&self, p: usize) -> CMat {
        self.inner.coeff_at(p, 0)
    }

    /// `d^a A(z0)`.
    pub fn extract(&self, a: &MultiIndex) -> Result<CMat> {
        self.inner.extract(a, &MultiIndex::zero(self.dim()))
    }

    pub fn value(&self) -> CMat {
        self.inner.value()
    }

    pub fn mul(&self, other: &HoloJet) -> Result<HoloJet> {
        Ok(HoloJet { inner: self.inner.mul(&other.inner)? })
    }

    pub fn inverse(&self) -> Result<HoloJet> {
        Ok(HoloJet { inner: self.inner.inverse()? })
    }

    pub fn add(&self, other: &HoloJet) -> Result<HoloJet> {
        Ok(HoloJet { inner: self.inner.add(&other.inner)? })
    }

    pub fn sub(&self, other: &HoloJet) -> Result<HoloJet> {
        Ok(HoloJet { inner: self.inner.sub(&other.inner)? })
    }

    pub fn left_mul_const(&self, m: &CMat) -> HoloJet {
        HoloJet { inner: self.inner.left_mul_const(m) }
    }

    pub fn truncate(&self, order: usize) -> HoloJet {
        HoloJet { inner: self.inner.truncate(order, 0) }
    }

    pub fn d_holo(&self, i: usize) -> Result<HoloJet> {
        Ok(HoloJet { inner: self.inner.d_holo(i)? })
    }

    /// As a function of `(z, zbar)` with anti-holomorphic order `anti`.
    pub fn to_herm(&self, anti: usize) -> HermJet {
        self.inner.pad(self.order(), anti)
    }

    /// `A(z)^*` as a function of `(z, zbar)`, holomorphic order `holo`.
    pub fn adjoint_herm(&self, holo: usize) -> HermJet {
        self.inner.conj_transpose().pad(holo, self.order())
    }
}
