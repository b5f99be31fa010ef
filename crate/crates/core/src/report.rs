//! The uniform result record of every check.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    /// A hypothesis of a conditional statement failed; no conclusion is drawn.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub label: String,
    pub measured: f64,
    pub threshold: f64,
    pub satisfied: bool,
}

/// An intermediate inequality or identity that must hold whenever the
/// hypotheses do.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCheck {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Note {
    pub label: String,
    pub value: f64,
}

impl Note {
    pub fn new(label: impl Into<String>, value: f64) -> Self {
        Note {
            label: label.into(),
            value,
        }
    }
}

/// Outcome of one check: `lhs ≤ rhs` up to `tolerance`, subject to the
/// recorded hypotheses.
///
/// Identity checks are encoded as `lhs = error`, `rhs = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub realization: Option<String>,
    pub verdict: Verdict,
    pub passed: bool,
    pub hypotheses: Vec<HypothesisCheck>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub steps: Vec<StepCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<Note>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub messages: Vec<String>,
}

impl InequalityReport {
    /// `lhs ≤ rhs` with slack allowance `rel · max(1, |rhs|)`.
    pub fn inequality(name: impl Into<String>, lhs: f64, rhs: f64, rel: f64) -> Self {
        Self::raw(name, lhs, rhs, rel * rhs.abs().max(1.0))
    }

    /// `error ≤ tol`.
    pub fn identity(name: impl Into<String>, error: f64, tol: f64) -> Self {
        Self::raw(name, error, 0.0, tol)
    }

    fn raw(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        InequalityReport {
            name: name.into(),
            realization: None,
            verdict: Verdict::Holds,
            passed: true,
            hypotheses: Vec::new(),
            lhs,
            rhs,
            slack: rhs - lhs,
            tolerance,
            steps: Vec::new(),
            notes: Vec::new(),
            messages: Vec::new(),
        }
    }

    /// A report for a check whose precondition failed.
    pub fn not_applicable(name: impl Into<String>, label: impl Into<String>, measured: f64, threshold: f64) -> Self {
        let mut r = Self::raw(name, f64::NAN, f64::NAN, 0.0);
        r.push_hypothesis(label, measured, threshold, false);
        r.finish()
    }

    pub fn with_realization(mut self, tag: impl Into<String>) -> Self {
        self.realization = Some(tag.into());
        self
    }

    pub fn push_hypothesis(&mut self, label: impl Into<String>, measured: f64, threshold: f64, satisfied: bool) {
        self.hypotheses.push(HypothesisCheck {
            label: label.into(),
            measured,
            threshold,
            satisfied,
        });
    }

    /// Records `measured ≤ threshold` allowing `rel · max(1, |threshold|)`.
    pub fn hypothesis_le(&mut self, label: impl Into<String>, measured: f64, threshold: f64, rel: f64) {
        let ok = measured <= threshold + rel * threshold.abs().max(1.0);
        self.push_hypothesis(label, measured, threshold, ok);
    }

    /// Records `measured ≥ threshold` allowing `rel · max(1, |threshold|)`.
    pub fn hypothesis_ge(&mut self, label: impl Into<String>, measured: f64, threshold: f64, rel: f64) {
        let ok = measured >= threshold - rel * threshold.abs().max(1.0);
        self.push_hypothesis(label, measured, threshold, ok);
    }

    pub fn push_step(&mut self, label: impl Into<String>, lhs: f64, rhs: f64, holds: bool) {
        self.steps.push(StepCheck {
            label: label.into(),
            lhs,
            rhs,
            holds,
        });
    }

    /// Records `lhs ≤ rhs` allowing `rel · max(1, |rhs|)`.
    pub fn step_le(&mut self, label: impl Into<String>, lhs: f64, rhs: f64, rel: f64) {
        let holds = lhs <= rhs + rel * rhs.abs().max(1.0);
        self.push_step(label, lhs, rhs, holds);
    }

    pub fn note(&self, label: &str) -> Option<f64> {
        self.notes.iter().find(|n| n.label == label).map(|n| n.value)
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.satisfied)
    }

    /// Settle the verdict from hypotheses, slack and steps.
    pub fn finish(mut self) -> Self {
        self.slack = self.rhs - self.lhs;
        self.verdict = if !self.hypotheses_hold() {
            Verdict::NotApplicable
        } else if self.slack >= -self.tolerance && self.steps.iter().all(|s| s.holds) {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        self.passed = self.verdict == Verdict::Holds;
        self
    }

    /// True unless the conclusion was actually contradicted.
    pub fn is_acceptable(&self) -> bool {
        self.verdict != Verdict::Violated
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        let r = InequalityReport::inequality("a", 1.0, 2.0, 1e-9).finish();
        assert_eq!((r.verdict, r.passed, r.slack), (Verdict::Holds, true, 1.0));

        let r = InequalityReport::inequality("a", 2.0 + 1e-12, 2.0, 1e-9).finish();
        assert!(r.passed);
        let r = InequalityReport::inequality("a", 2.1, 2.0, 1e-9).finish();
        assert_eq!(r.verdict, Verdict::Violated);

        let mut r = InequalityReport::inequality("a", 5.0, 1.0, 1e-9);
        r.hypothesis_le("h", 2.0, 1.0, 1e-9);
        let r = r.finish();
        assert_eq!(r.verdict, Verdict::NotApplicable);
        assert!(!r.passed && r.is_acceptable());

        let mut r = InequalityReport::inequality("a", 1.0, 2.0, 1e-9);
        r.step_le("s", 3.0, 1.0, 1e-9);
        assert_eq!(r.finish().verdict, Verdict::Violated);

        let r = InequalityReport::identity("i", 1e-13, 1e-12).finish();
        assert!(r.passed);
        let r = InequalityReport::identity("i", 1e-11, 1e-12).finish();
        assert!(!r.passed);
    }

    #[test]
    fn serializes_flat_record() {
        let r = InequalityReport::inequality("trace_jensen", 0.0, 1.0, 1e-9).finish();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["name", "hypotheses", "lhs", "rhs", "slack", "passed", "verdict"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["verdict"], "holds");
    }
}
