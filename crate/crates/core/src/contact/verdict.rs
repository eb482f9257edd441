use serde::{Deserialize, Serialize};

use crate::linalg::{frob, CMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Verified,
    Refuted,
    Inconclusive,
}

/// Which argument a condition belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Properties of the slice map itself, shared by both along-slice routes.
    Psi,
    /// Extension sequence, block Gram isometry and holomorphy conditions.
    Analytic,
    /// Curvature and covariant-derivative intertwining.
    Geometric,
    /// Normalized-frame comparison (rank one, no candidate).
    Decision,
    /// Explicit candidate transition.
    Candidate,
    /// Diagnostic only; never enters a verdict.
    Auxiliary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub route: Route,
    /// `||lhs - rhs||_F`
    pub residual: f64,
    /// `max(1, ||lhs||_F, ||rhs||_F)`
    pub scale: f64,
    pub verdict: Verdict,
}

impl Condition {
    pub fn compare(name: impl Into<String>, route: Route, lhs: &CMat, rhs: &CMat, tol: f64) -> Self {
        let residual = frob(&(lhs - rhs));
        let scale = 1f64.max(frob(lhs)).max(frob(rhs));
        Self::from_residual(name, route, residual, scale, tol)
    }

    pub fn from_residual(name: impl Into<String>, route: Route, residual: f64, scale: f64, tol: f64) -> Self {
        let verdict = if !residual.is_finite() {
            Verdict::Inconclusive
        } else if residual < tol * scale {
            Verdict::Verified
        } else if residual > 10.0 * tol * scale {
            Verdict::Refuted
        } else {
            Verdict::Inconclusive
        };
        Condition { name: name.into(), route, residual, scale, verdict }
    }

    /// `residual / scale`
    pub fn relative(&self) -> f64 {
        self.residual / self.scale
    }
}

/// Refuted if anything is refuted, verified if everything is, else inconclusive.
pub fn combine<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> Verdict {
    let mut all = true;
    for v in verdicts {
        match v {
            Verdict::Refuted => return Verdict::Refuted,
            Verdict::Inconclusive => all = false,
            Verdict::Verified => {}
        }
    }
    if all {
        Verdict::Verified
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    /// `[re, im]` per coordinate.
    pub point: Vec<[f64; 2]>,
    pub conditions: Vec<Condition>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometric: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route_agreement: Option<bool>,
    /// Point-wise contact at this point of the slice, checked separately.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointwise: Option<Verdict>,
}

impl PointReport {
    pub fn new(point: &[crate::linalg::C64], conditions: Vec<Condition>) -> Self {
        let verdict = combine(conditions.iter().filter(|c| c.route != Route::Auxiliary).map(|c| &c.verdict));
        PointReport {
            point: point.iter().map(|z| [z.re, z.im]).collect(),
            conditions,
            verdict,
            analytic: None,
            geometric: None,
            route_agreement: None,
            pointwise: None,
        }
    }

    pub fn route_verdict(&self, routes: &[Route]) -> Verdict {
        combine(self.conditions.iter().filter(|c| routes.contains(&c.route)).map(|c| &c.verdict))
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.conditions
            .iter()
            .filter(|c| c.route != Route::Auxiliary)
            .map(|c| c.residual)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactReport {
    pub mode: String,
    pub order: usize,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// `None` when the mode has a single route.
    pub routes_agree: Option<bool>,
    pub points: Vec<PointReport>,
}

impl ContactReport {
    pub fn assemble(mode: &str, order: usize, tolerance: f64, points: Vec<PointReport>) -> Self {
        let verdict = combine(points.iter().map(|p| &p.verdict));
        let flags: Vec<bool> = points.iter().filter_map(|p| p.route_agreement).collect();
        let routes_agree = if flags.is_empty() { None } else { Some(flags.iter().all(|&f| f)) };
        ContactReport { mode: mode.to_string(), order, tolerance, verdict, routes_agree, points }
    }
}
