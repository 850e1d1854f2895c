//! Simulation studies that exercise `ceda` end to end.
//!
//! Each study in [`criteria`] reruns one of the worked examples and reports
//! an [`Outcome`]; [`reference`] compares analytic and simulated values with
//! published figures. The `acceptance` test target runs them all.

use std::fmt;
use std::time::Duration;

pub mod criteria;
pub mod reference;

/// Result of one study.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: String,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn new(id: impl Into<String>, title: &'static str, passed: bool, detail: String) -> Self {
        Self {
            id: id.into(),
            title,
            passed,
            detail,
            elapsed: Duration::ZERO,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {} ({:.1}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Runs `study` and records its wall time.
pub fn timed(study: impl FnOnce() -> Outcome) -> Outcome {
    let start = std::time::Instant::now();
    let mut out = study();
    out.elapsed = start.elapsed();
    out
}
