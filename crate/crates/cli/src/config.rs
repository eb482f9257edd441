//! TOML run configuration.

use std::path::PathBuf;

use holocontact::kernelexpr::{parse_kernel, BundleText, ExprNode};
use holocontact::linalg::C64;
use serde::{Deserialize, Serialize};

use crate::InputError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Pointwise,
    AlongZ,
    Curvature,
    VerifyRecursions,
    VerifyAppendix,
    RkhsQuotient,
}

/// A coordinate given either as a number or as a complex literal such as `"0.3-0.1i"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Real(f64),
    Text(String),
}

impl Coord {
    pub fn value(&self) -> Result<C64, InputError> {
        match self {
            Coord::Real(v) => Ok(C64::new(*v, 0.0)),
            Coord::Text(s) => match parse_kernel(s) {
                Ok(ExprNode::Literal(v)) => Ok(v),
                Ok(_) => Err(InputError::new(format!("coordinate '{s}' is not a complex constant"))),
                Err(e) => Err(InputError::new(format!("coordinate '{s}': {e}"))),
            },
        }
    }
}

/// One coordinate axis of a rectangular grid: `count[0]` samples of the real
/// part across `re`, `count[1]` of the imaginary part across `im`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxis {
    pub re: [f64; 2],
    #[serde(default)]
    pub im: [f64; 2],
    #[serde(default = "one_one")]
    pub count: [usize; 2],
}

fn one_one() -> [usize; 2] {
    [1, 1]
}

/// Grid on the slice `z1 = 0`, one axis per coordinate `z2..zm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub axes: Vec<GridAxis>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureSpec {
    pub i: usize,
    pub j: usize,
    #[serde(default)]
    pub r: usize,
    #[serde(default)]
    pub t: usize,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vec<Coord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curvature: Vec<CurvatureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle_a: Option<BundleText>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle_b: Option<BundleText>,
}

fn default_order() -> usize {
    1
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, InputError> {
        toml::from_str(text).map_err(|e| InputError::new(format!("config: {e}")))
    }

    /// Tolerance after defaults; the fallback is `env_default` and then 1e-8.
    pub fn effective_tolerance(&self, env_default: Option<f64>) -> f64 {
        self.tolerance.or(env_default).unwrap_or(DEFAULT_TOLERANCE)
    }

    pub fn explicit_points(&self) -> Result<Vec<Vec<C64>>, InputError> {
        self.points
            .iter()
            .enumerate()
            .map(|(k, p)| {
                p.iter()
                    .map(|c| c.value())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| InputError::new(format!("points[{k}]: {}", e.0)))
            })
            .collect()
    }
}

fn samples(range: [f64; 2], count: usize) -> Result<Vec<f64>, InputError> {
    match count {
        0 => Err(InputError::new("grid count must be at least 1")),
        1 => Ok(vec![range[0]]),
        c => Ok((0..c).map(|k| range[0] + (range[1] - range[0]) * k as f64 / (c - 1) as f64).collect()),
    }
}

impl GridSpec {
    /// Points `(0, z2, .., zm)` over the Cartesian product of the axes.
    pub fn points(&self, m: usize) -> Result<Vec<Vec<C64>>, InputError> {
        if self.axes.len() + 1 != m {
            return Err(InputError::new(format!(
                "grid has {} axes but the slice z1 = 0 in dimension {m} needs {}",
                self.axes.len(),
                m.saturating_sub(1)
            )));
        }
        let mut pts = vec![vec![C64::new(0.0, 0.0)]];
        for (k, axis) in self.axes.iter().enumerate() {
            let re = samples(axis.re, axis.count[0]).map_err(|e| InputError::new(format!("grid.axes[{k}]: {}", e.0)))?;
            let im = samples(axis.im, axis.count[1]).map_err(|e| InputError::new(format!("grid.axes[{k}]: {}", e.0)))?;
            let mut next = Vec::with_capacity(pts.len() * re.len() * im.len());
            for p in &pts {
                for &x in &re {
                    for &y in &im {
                        let mut q = p.clone();
                        q.push(C64::new(x, y));
                        next.push(q);
                    }
                }
            }
            pts = next;
        }
        Ok(pts)
    }
}
