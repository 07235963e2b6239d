use std::fmt::Display;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::padic::QqNum;

pub const SCHEMA_VERSION: u32 = 1;

/// One checked instance of an identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub params: Value,
    #[serde(rename = "lhsText")]
    pub lhs_text: String,
    #[serde(rename = "rhsText")]
    pub rhs_text: String,
    pub equal: bool,
}

impl Case {
    pub fn new(params: Value, lhs: impl Display, rhs: impl Display, equal: bool) -> Case {
        Case { params, lhs_text: lhs.to_string(), rhs_text: rhs.to_string(), equal }
    }

    /// Compares two p-adic values modulo `p^n`; both sides are printed
    /// truncated to that precision.
    pub fn congruence(params: Value, lhs: &QqNum, rhs: &QqNum, n: i64) -> Result<Case> {
        let equal = lhs.congruent(rhs, n)?;
        Ok(Case::new(params, lhs.truncate(n), rhs.truncate(n), equal))
    }
}

/// A case that was not run, with the reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skip {
    pub params: Value,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub p: u32,
    pub r: u32,
    pub q: u32,
    pub modulus: Vec<u32>,
    pub generator: Vec<u32>,
    #[serde(rename = "N_req")]
    pub n_req: u32,
    #[serde(rename = "N_work")]
    pub n_work: u32,
    pub suite: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub header: ReportHeader,
    pub cases: Vec<Case>,
    pub skipped: Vec<Skip>,
    pub passed: usize,
    pub failed: usize,
    #[serde(rename = "wallMillis")]
    pub wall_millis: u64,
}

impl Report {
    pub fn new(header: ReportHeader, cases: Vec<Case>, skipped: Vec<Skip>, wall_millis: u64) -> Report {
        let passed = cases.iter().filter(|c| c.equal).count();
        let failed = cases.len() - passed;
        Report { schema_version: SCHEMA_VERSION, header, cases, skipped, passed, failed, wall_millis }
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.equal)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
