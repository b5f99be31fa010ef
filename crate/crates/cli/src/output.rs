//! Report records and their writers.

use std::collections::BTreeMap;
use std::io::{self, Write};

use clap::ValueEnum;
use ncvar::montecarlo::MonteCarloReport;
use ncvar::{InequalityReport, Verdict};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One JSON object per report.
    Ndjson,
    /// Per-check counts of holds / not applicable / violated.
    CsvSummary,
}

/// A check that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub name: String,
    pub verdict: &'static str,
    pub passed: bool,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Body {
    Check(InequalityReport),
    MonteCarlo(MonteCarloReport),
    Failure(Failure),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    NotApplicable,
    Violated,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub scenario: String,
    #[serde(flatten)]
    pub body: Body,
}

impl Record {
    pub fn check(scenario: impl Into<String>, report: InequalityReport) -> Self {
        Record {
            scenario: scenario.into(),
            body: Body::Check(report),
        }
    }

    pub fn monte_carlo(scenario: impl Into<String>, report: MonteCarloReport) -> Self {
        Record {
            scenario: scenario.into(),
            body: Body::MonteCarlo(report),
        }
    }

    pub fn failure(scenario: impl Into<String>, name: impl Into<String>, error: impl ToString) -> Self {
        Record {
            scenario: scenario.into(),
            body: Body::Failure(Failure {
                name: name.into(),
                verdict: "error",
                passed: false,
                error: error.to_string(),
            }),
        }
    }

    /// `Ok` becomes a check record, `Err` a failure record.
    pub fn from_result(scenario: &str, name: &str, r: ncvar::Result<InequalityReport>) -> Self {
        match r {
            Ok(rep) => Record::check(scenario, rep),
            Err(e) => Record::failure(scenario, name, e),
        }
    }

    pub fn report(&self) -> Option<&InequalityReport> {
        match &self.body {
            Body::Check(r) => Some(r),
            Body::MonteCarlo(m) => Some(&m.report),
            Body::Failure(_) => None,
        }
    }

    pub fn name(&self) -> &str {
        match &self.body {
            Body::Failure(f) => &f.name,
            _ => &self.report().expect("report").name,
        }
    }

    pub fn outcome(&self) -> Outcome {
        match self.report().map(|r| r.verdict) {
            Some(Verdict::Holds) => Outcome::Holds,
            Some(Verdict::NotApplicable) => Outcome::NotApplicable,
            Some(Verdict::Violated) => Outcome::Violated,
            None => Outcome::Error,
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self.outcome(), Outcome::Holds | Outcome::NotApplicable)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub total: usize,
    pub holds: usize,
    pub not_applicable: usize,
    pub violated: usize,
    pub errors: usize,
}

impl Counts {
    fn add(&mut self, o: Outcome) {
        self.total += 1;
        match o {
            Outcome::Holds => self.holds += 1,
            Outcome::NotApplicable => self.not_applicable += 1,
            Outcome::Violated => self.violated += 1,
            Outcome::Error => self.errors += 1,
        }
    }

    pub fn all_ok(&self) -> bool {
        self.violated == 0 && self.errors == 0
    }
}

/// Totals and per-check-name counts, ordered by name.
pub fn summarize(records: &[Record]) -> (Counts, BTreeMap<String, Counts>) {
    let mut total = Counts::default();
    let mut by_name: BTreeMap<String, Counts> = BTreeMap::new();
    for r in records {
        let o = r.outcome();
        total.add(o);
        by_name.entry(r.name().to_string()).or_default().add(o);
    }
    (total, by_name)
}

pub fn write_records(records: &[Record], format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Ndjson => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                out.write_all(b"\n")?;
            }
        }
        Format::CsvSummary => {
            let (_, by_name) = summarize(records);
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["name", "total", "holds", "not_applicable", "violated", "errors"])?;
            for (name, c) in &by_name {
                w.write_record([
                    name.clone(),
                    c.total.to_string(),
                    c.holds.to_string(),
                    c.not_applicable.to_string(),
                    c.violated.to_string(),
                    c.errors.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ndjson_lines_are_flat_objects() {
        let r = InequalityReport::inequality("trace_jensen", 0.0, 1.0, 1e-9).finish();
        let recs = vec![Record::check("hand/a", r), Record::failure("fuzz/1", "steele", "boom")];
        let mut buf = Vec::new();
        write_records(&recs, Format::Ndjson, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0]["scenario"], "hand/a");
        assert_eq!(lines[0]["name"], "trace_jensen");
        assert_eq!(lines[0]["verdict"], "holds");
        assert_eq!(lines[1]["verdict"], "error");
        assert_eq!(lines[1]["passed"], false);
    }

    #[test]
    fn csv_summary_counts_by_name() {
        let ok = InequalityReport::inequality("lemma", 0.0, 1.0, 1e-9).finish();
        let bad = InequalityReport::inequality("lemma", 2.0, 1.0, 1e-9).finish();
        let recs = vec![Record::check("a", ok), Record::check("b", bad)];
        let mut buf = Vec::new();
        write_records(&recs, Format::CsvSummary, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "name,total,holds,not_applicable,violated,errors\nlemma,2,1,0,1,0\n"
        );
        assert!(!summarize(&recs).0.all_ok());
    }
}
