use super::checks::{
    extend_a_sequence, geometric_conditions, holomorphy_conditions, pointwise_from_value, pointwise_rank1_decide,
    psi_isometry, rank1_auto_a0, tangential_curvature, z1_gram_isometry,
};
use super::verdict::{combine, ContactReport, PointReport, Route};
use crate::error::{Error, Result};
use crate::jet::{HermJet, HoloJet};
use crate::kernelexpr::{eval_holo_jet, BundleSpec, ExprNode};
use crate::linalg::{CMat, C64};
use crate::par::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Pointwise,
    AlongZ,
}

/// Candidate `A_0` as a matrix of holomorphic expressions (constants allowed).
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub entries: Vec<Vec<ExprNode>>,
}

impl Candidate {
    pub fn new(entries: Vec<Vec<ExprNode>>) -> Result<Self> {
        let l = entries.len();
        if l == 0 || entries.iter().any(|r| r.len() != l) {
            return Err(Error::Dimension("candidate must be a non-empty square matrix".into()));
        }
        if let Some(e) = entries.iter().flatten().find(|e| e.has_conj()) {
            return Err(Error::Type(format!("candidate entry {e} is not holomorphic")));
        }
        Ok(Candidate { entries })
    }

    pub fn constant(m: &CMat) -> Self {
        let entries = (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| ExprNode::Literal(m[(r, c)])).collect())
            .collect();
        Candidate { entries }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn jet(&self, center: &[C64], order: usize) -> Result<HoloJet> {
        let grid = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| eval_holo_jet(e, center, order).map(|j| j.as_herm().clone())).collect())
            .collect::<Result<Vec<Vec<HermJet>>>>()?;
        HoloJet::from_herm(HermJet::from_entries(&grid)?)
    }

    pub fn value(&self, center: &[C64]) -> Result<CMat> {
        Ok(self.jet(center, 0)?.value())
    }
}

#[derive(Debug, Clone)]
pub struct ContactProblem {
    pub bundle_a: BundleSpec,
    pub bundle_b: BundleSpec,
    pub order: usize,
    pub mode: Mode,
    pub points: Vec<Vec<C64>>,
    pub candidate: Option<Candidate>,
    pub tolerance: f64,
    pub strategy: Strategy,
}

impl ContactProblem {
    pub fn validate(&self) -> Result<()> {
        let (a, b) = (&self.bundle_a, &self.bundle_b);
        if a.dim != b.dim || a.rank != b.rank {
            return Err(Error::Dimension(format!(
                "bundles differ: '{}' is (m={}, l={}), '{}' is (m={}, l={})",
                a.label, a.dim, a.rank, b.label, b.dim, b.rank
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Invalid(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.points.is_empty() {
            return Err(Error::Invalid("no points to check".into()));
        }
        for p in &self.points {
            if p.len() != a.dim {
                return Err(Error::Dimension(format!("point {p:?} is not in dimension {}", a.dim)));
            }
            if self.mode == Mode::AlongZ && p[0] != C64::new(0.0, 0.0) {
                return Err(Error::Invalid(format!("point {p:?} is not on the slice z1 = 0")));
            }
        }
        match &self.candidate {
            Some(c) if c.rank() != a.rank => {
                return Err(Error::Dimension(format!("candidate is {}x{}, bundles have rank {}", c.rank(), c.rank(), a.rank)))
            }
            None if a.rank > 1 => {
                return Err(Error::Invalid("a candidate A_0 is required for rank >= 2".into()));
            }
            _ => {}
        }
        Ok(())
    }

    fn jets(&self, z: &[C64]) -> Result<(HermJet, HermJet)> {
        let n = self.order;
        let h = self.bundle_a.jet(z, n, n.max(1))?;
        let ht = self.bundle_b.jet(z, n, n.max(1))?;
        Ok((h, ht))
    }

    fn a0(&self, z: &[C64], h: &HermJet, ht: &HermJet) -> Result<CMat> {
        match &self.candidate {
            Some(c) => c.value(z),
            None => rank1_auto_a0(h, ht),
        }
    }
}

fn pointwise_at(p: &ContactProblem, z: &[C64]) -> Result<PointReport> {
    let (n, tol) = (p.order, p.tolerance);
    let (h, ht) = p.jets(z)?;
    let mut conds = Vec::new();
    let rank1 = p.bundle_a.rank == 1;
    if rank1 {
        conds.extend(pointwise_rank1_decide(&h, &ht, n, tol)?);
    }
    if let Some(c) = &p.candidate {
        conds.push(pointwise_from_value(&h, &ht, &c.value(z)?, n, tol)?);
    }
    let mut rep = PointReport::new(z, conds);
    if rank1 && p.candidate.is_some() {
        let d = rep.route_verdict(&[Route::Decision]);
        let c = rep.route_verdict(&[Route::Candidate]);
        rep.route_agreement = Some(d == c);
    }
    Ok(rep)
}

/// Point-wise order-`n` contact at each listed point.
pub fn pointwise_check(p: &ContactProblem) -> Result<ContactReport> {
    p.validate()?;
    let reports = p.strategy.map(&p.points, |z| pointwise_at(p, z));
    let points = reports.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ContactReport::assemble("pointwise", p.order, p.tolerance, points))
}

fn alongz_at(p: &ContactProblem, z: &[C64]) -> Result<PointReport> {
    let (n, tol) = (p.order, p.tolerance);
    let (h, ht) = p.jets(z)?;
    let a0 = p.a0(z, &h, &ht)?;

    let mut conds = Vec::new();
    if p.bundle_a.rank == 1 {
        conds.extend(tangential_curvature(&h, &ht, tol)?);
    }
    // analytic route
    let seq = extend_a_sequence(&h, &ht, &a0, n)?;
    conds.push(z1_gram_isometry(&h, &ht, &seq, tol)?);
    conds.extend(holomorphy_conditions(&h, &ht, &seq, tol)?);
    // geometric route (its first entry is the shared isometry of A_0)
    let geo = geometric_conditions(&h, &ht, &a0, n, tol)?;
    debug_assert_eq!(geo[0].name, psi_isometry(&h, &ht, &a0, tol).name);
    conds.extend(geo);

    let mut rep = PointReport::new(z, conds);
    let analytic = rep.route_verdict(&[Route::Psi, Route::Analytic]);
    let geometric = rep.route_verdict(&[Route::Psi, Route::Geometric]);
    rep.analytic = Some(analytic);
    rep.geometric = Some(geometric);
    rep.route_agreement = Some(analytic == geometric);

    // contact along the slice implies point-wise contact at its points
    let spot = if p.bundle_a.rank == 1 && p.candidate.is_none() {
        let c = pointwise_rank1_decide(&h, &ht, n, tol)?;
        combine(c.iter().filter(|c| c.route != Route::Auxiliary).map(|c| &c.verdict))
    } else {
        pointwise_from_value(&h, &ht, &a0, n, tol)?.verdict
    };
    rep.pointwise = Some(spot);
    Ok(rep)
}

/// Order-`n` contact along `z1 = 0`, by the analytic and the geometric route at every point.
pub fn alongz_check(p: &ContactProblem) -> Result<ContactReport> {
    p.validate()?;
    if p.mode != Mode::AlongZ {
        return Err(Error::Invalid("problem is not in along-slice mode".into()));
    }
    if p.order == 0 {
        return Err(Error::Invalid("contact order must be at least 1".into()));
    }
    let reports = p.strategy.map(&p.points, |z| alongz_at(p, z));
    let points = reports.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ContactReport::assemble("along-z", p.order, p.tolerance, points))
}
