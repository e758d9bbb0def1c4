//! Named pass/fail results shared by every verification routine.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

/// One verified property; serializes as `{check, status, witness?}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub status: CheckStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckReport {
    pub fn pass(check: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            status: CheckStatus::Pass,
            witness: None,
        }
    }

    pub fn fail(check: impl Into<String>, witness: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            status: CheckStatus::Fail,
            witness: Some(witness.into()),
        }
    }

    /// `Ok` passes; `Err` carries the witness of the failure.
    pub fn from_outcome(check: impl Into<String>, outcome: Result<(), String>) -> Self {
        match outcome {
            Ok(()) => CheckReport::pass(check),
            Err(w) => CheckReport::fail(check, w),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}
