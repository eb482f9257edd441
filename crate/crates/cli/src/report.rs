use holocontact::contact::{ContactReport, Verdict};
use holocontact::rkhs::EquivalenceReport;
use holocontact::wordcalc::AppendixReport;
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, Task};

pub const SCHEMA: &str = "holocontact-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    Refuted,
    Inconclusive,
    /// Computation-only tasks.
    Completed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Verified | Status::Completed => 0,
            Status::Refuted => 1,
            Status::Inconclusive => 2,
        }
    }
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Verified => Status::Verified,
            Verdict::Refuted => Status::Refuted,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub routes_agree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureEntry {
    pub bundle: String,
    pub point: Vec<[f64; 2]>,
    pub name: String,
    /// Row-major `[re, im]` entries.
    pub value: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedResidual {
    pub name: String,
    pub residual: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionEntry {
    pub bundle: String,
    pub point: Vec<[f64; 2]>,
    pub checks: Vec<NamedResidual>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TaskResult {
    Contact(ContactReport),
    Curvature { entries: Vec<CurvatureEntry> },
    Recursions { entries: Vec<RecursionEntry> },
    Appendix(AppendixReport),
    Rkhs(EquivalenceReport),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub tool_version: String,
    pub task: Task,
    /// Effective configuration after command-line overrides and defaults.
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub summary: Summary,
    pub result: TaskResult,
}

impl ReportDocument {
    pub fn exit_code(&self) -> i32 {
        self.summary.status.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
