//! Verification reports.
//!
//! Verifiers never panic on bad objects; they return a report that either
//! confirms every axiom (with counts, so a passing report still says what
//! was checked) or pinpoints the lexicographically first violation.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    /// What was verified, e.g. "spread-set" or "orthogonal spread".
    pub subject: String,
    pub ok: bool,
    /// Human-readable summaries of the checks that ran.
    pub checks: Vec<String>,
    /// First violation, when `ok` is false.
    pub violation: Option<String>,
}

impl VerifyReport {
    pub fn new(subject: impl Into<String>) -> Self {
        VerifyReport { subject: subject.into(), ok: true, checks: Vec::new(), violation: None }
    }

    pub fn check(&mut self, summary: impl Into<String>) {
        self.checks.push(summary.into());
    }

    pub fn fail(mut self, violation: impl Into<String>) -> Self {
        self.ok = false;
        self.violation = Some(violation.into());
        self
    }

    pub fn expect_ok(&self) -> &Self {
        assert!(self.ok, "{} verification failed: {}", self.subject, self.violation.as_deref().unwrap_or("?"));
        self
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.ok {
            write!(f, "{}: ok ({} checks)", self.subject, self.checks.len())
        } else {
            write!(f, "{}: FAIL — {}", self.subject, self.violation.as_deref().unwrap_or("?"))
        }
    }
}
