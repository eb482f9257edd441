use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{eval_herm_jet, eval_point, parse_kernel, ExprNode};
use crate::error::{Error, Result};
use crate::jet::HermJet;
use crate::linalg::C64;

/// A Gram matrix in one global holomorphic frame, entered entry by entry.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleSpec {
    pub label: String,
    pub dim: usize,
    pub rank: usize,
    pub entries: Vec<Vec<ExprNode>>,
}

/// Plain-text form used by configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleText {
    #[serde(default)]
    pub label: String,
    pub dim: usize,
    /// Optional in configs; when given it must match the Gram size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    pub gram: Vec<Vec<String>>,
}

impl BundleSpec {
    pub fn new(label: &str, dim: usize, entries: Vec<Vec<ExprNode>>) -> Result<Self> {
        let rank = entries.len();
        if rank == 0 || entries.iter().any(|r| r.len() != rank) {
            return Err(Error::Dimension(format!("gram of '{label}' must be a non-empty square grid")));
        }
        if dim == 0 {
            return Err(Error::Dimension("dimension must be at least 1".into()));
        }
        for e in entries.iter().flatten() {
            if e.min_dim() > dim {
                return Err(Error::Range(format!("'{label}': {e} uses a variable beyond z{dim}")));
            }
        }
        Ok(BundleSpec { label: label.to_string(), dim, rank, entries })
    }

    pub fn parse(label: &str, dim: usize, gram: &[Vec<String>]) -> Result<Self> {
        let entries = gram
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .map(|(c, s)| {
                        parse_kernel(s).map_err(|e| match e {
                            Error::Syntax { pos, msg } => Error::Syntax {
                                pos,
                                msg: format!("{msg} in gram[{r}][{c}] of '{label}'"),
                            },
                            other => other,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let rank = entries.len();
        if let Some(bad) = entries.iter().position(|row| row.len() != rank) {
            return Err(Error::Dimension(format!("'{label}': row {bad} has the wrong length")));
        }
        Self::new(label, dim, entries)
    }

    pub fn from_text(t: &BundleText) -> Result<Self> {
        let spec = Self::parse(&t.label, t.dim, &t.gram)?;
        if let Some(r) = t.rank.filter(|&r| r != spec.rank) {
            return Err(Error::Dimension(format!("'{}': rank {r} but gram is {}x{}", t.label, spec.rank, spec.rank)));
        }
        Ok(spec)
    }

    /// Scalar one-entry bundle.
    pub fn scalar(label: &str, dim: usize, text: &str) -> Result<Self> {
        Self::parse(label, dim, &[vec![text.to_string()]])
    }

    /// Gram jet at `center`, with the positive-definiteness check.
    pub fn jet(&self, center: &[C64], holo: usize, anti: usize) -> Result<HermJet> {
        if center.len() != self.dim {
            return Err(Error::Dimension(format!(
                "'{}' lives in dimension {} but the center has {} coordinates",
                self.label,
                self.dim,
                center.len()
            )));
        }
        let grid = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| eval_herm_jet(e, center, holo, anti)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let h = HermJet::from_entries(&grid)?;
        h.check_positive_definite(1e-10).map_err(|e| match e {
            Error::NotPositiveDefinite(msg) => {
                Error::NotPositiveDefinite(format!("'{}' at {:?}: {msg}", self.label, center))
            }
            other => other,
        })?;
        Ok(h)
    }

    /// Largest violation of `H_rc(z, wbar) = conj(H_cr(w, zbar))` over random
    /// pairs near `center`, within distance `radius`.
    pub fn hermitian_defect(&self, center: &[C64], radius: f64, samples: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut jitter = |c: &C64| {
            let v = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            c + v * (radius / std::f64::consts::SQRT_2)
        };
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let z: Vec<C64> = center.iter().map(&mut jitter).collect();
            let w: Vec<C64> = center.iter().map(&mut jitter).collect();
            let zbar: Vec<C64> = z.iter().map(|v| v.conj()).collect();
            let wbar: Vec<C64> = w.iter().map(|v| v.conj()).collect();
            for r in 0..self.rank {
                for c in 0..self.rank {
                    let lhs = eval_point(&self.entries[r][c], &z, &wbar)?;
                    let rhs = eval_point(&self.entries[c][r], &w, &zbar)?.conj();
                    worst = worst.max((lhs - rhs).norm() / (1.0 + lhs.norm()));
                }
            }
        }
        Ok(worst)
    }

    pub fn to_text(&self) -> BundleText {
        BundleText {
            label: self.label.clone(),
            dim: self.dim,
            rank: Some(self.rank),
            gram: self.entries.iter().map(|r| r.iter().map(|e| e.to_string()).collect()).collect(),
        }
    }
}
