//! Verification reports: nested JSON for archival, flat CSV for diffing.
//!
//! Each [`MethodEntry`] stores the raw numbers behind its verdict, and
//! [`MethodEntry::recompute_verdict`] rederives the verdict from them, so a
//! report can be checked for self-consistency after the fact.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use pushmatch::io::{format_real, Real};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "n/a",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Expected status of an entry that was not checked.
pub const NOT_CHECKED: &str = "n/a";

/// One method run on one scenario.
///
/// The entry passes when `status == expected`, `objective - predicted` lies
/// in `[gap_min, gap_max]` (each bound only if present) and `mismatch <=
/// mismatch_tol` (if a tolerance is present). `mismatch` is a distance
/// between the computed and the predicted minimizer, or another secondary
/// residual named in `note`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodEntry {
    pub method: String,
    pub target: String,
    pub status: String,
    pub expected: String,
    pub objective: Option<Real>,
    pub predicted: Option<Real>,
    pub value_gap: Option<Real>,
    pub gap_min: Option<Real>,
    pub gap_max: Option<Real>,
    pub mismatch: Option<Real>,
    pub mismatch_tol: Option<Real>,
    pub iterations: Option<usize>,
    pub verdict: Verdict,
    pub note: String,
    pub wall_time_ms: Real,
}

impl MethodEntry {
    pub fn new(method: &str, target: impl Into<String>) -> Self {
        MethodEntry {
            method: method.to_string(),
            target: target.into(),
            status: String::new(),
            expected: "converged".to_string(),
            objective: None,
            predicted: None,
            value_gap: None,
            gap_min: None,
            gap_max: None,
            mismatch: None,
            mismatch_tol: None,
            iterations: None,
            verdict: Verdict::NotApplicable,
            note: String::new(),
            wall_time_ms: Real(0.0),
        }
    }

    pub fn values(mut self, objective: f64, predicted: f64) -> Self {
        self.objective = Some(Real(objective));
        self.predicted = Some(Real(predicted));
        self.value_gap = Some(Real(objective - predicted));
        self
    }

    pub fn gap_bounds(mut self, min: Option<f64>, max: Option<f64>) -> Self {
        self.gap_min = min.map(Real);
        self.gap_max = max.map(Real);
        self
    }

    pub fn symmetric_gap(self, tol: f64) -> Self {
        self.gap_bounds(Some(-tol), Some(tol))
    }

    pub fn mismatch(mut self, value: f64, tol: Option<f64>) -> Self {
        self.mismatch = Some(Real(value));
        self.mismatch_tol = tol.map(Real);
        self
    }

    pub fn status(mut self, status: &str) -> Self {
        self.status = status.to_string();
        self
    }

    pub fn expect(mut self, expected: &str) -> Self {
        self.expected = expected.to_string();
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn skipped(method: &str, target: impl Into<String>, why: &str) -> Self {
        MethodEntry::new(method, target).status("skipped").expect(NOT_CHECKED).note(why)
    }

    pub fn failed(method: &str, target: impl Into<String>, err: impl fmt::Display) -> Self {
        MethodEntry::new(method, target).status("error").note(err.to_string())
    }

    /// Verdict implied by the stored numbers.
    pub fn recompute_verdict(&self) -> Verdict {
        if self.expected == NOT_CHECKED {
            return Verdict::NotApplicable;
        }
        if self.status != self.expected {
            return Verdict::Fail;
        }
        if self.gap_min.is_some() || self.gap_max.is_some() {
            let (Some(o), Some(p)) = (self.objective, self.predicted) else {
                return Verdict::Fail;
            };
            let gap = o.0 - p.0;
            let above = self.gap_min.is_none_or(|m| gap >= m.0);
            let below = self.gap_max.is_none_or(|m| gap <= m.0);
            if !(above && below) {
                return Verdict::Fail;
            }
        }
        if let Some(tol) = self.mismatch_tol {
            if !self.mismatch.is_some_and(|m| m.0 <= tol.0) {
                return Verdict::Fail;
            }
        }
        Verdict::Pass
    }

    /// Sets the verdict from the stored numbers.
    pub fn finish(mut self) -> Self {
        self.verdict = self.recompute_verdict();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub scenario: String,
    pub kind: String,
    pub seed: u64,
    pub range_size: usize,
    pub support_size: usize,
    pub nu1: Option<Real>,
    pub nu0: Option<Real>,
    pub entries: Vec<MethodEntry>,
}

impl ScenarioRecord {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.verdict != Verdict::Fail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub records: Vec<ScenarioRecord>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub not_applicable: usize,
}

impl Report {
    pub fn sort(&mut self) {
        self.records.sort_by(|a, b| a.scenario.cmp(&b.scenario));
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ScenarioRecord, &MethodEntry)> {
        self.records.iter().flat_map(|r| r.entries.iter().map(move |e| (r, e)))
    }

    pub fn tally(&self) -> Tally {
        let mut t = Tally::default();
        for (_, e) in self.entries() {
            match e.verdict {
                Verdict::Pass => t.pass += 1,
                Verdict::Fail => t.fail += 1,
                Verdict::NotApplicable => t.not_applicable += 1,
            }
        }
        t
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(ScenarioRecord::passed)
    }

    /// Entries whose stored verdict disagrees with the stored numbers.
    pub fn inconsistencies(&self) -> Vec<(&str, &MethodEntry)> {
        self.entries()
            .filter(|(_, e)| e.verdict != e.recompute_verdict())
            .map(|(r, e)| (r.scenario.as_str(), e))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(HarnessError::ConfigParse(format!("unknown format `{other}`"))),
        }
    }
}

pub const CSV_COLUMNS: [&str; 20] = [
    "scenario",
    "kind",
    "seed",
    "range_size",
    "support_size",
    "nu1",
    "nu0",
    "method",
    "target",
    "status",
    "expected",
    "objective",
    "predicted",
    "value_gap",
    "gap_min",
    "gap_max",
    "mismatch",
    "mismatch_tol",
    "iterations",
    "verdict",
];

fn cell(x: Option<Real>) -> String {
    x.map(|r| format_real(r.0)).unwrap_or_default()
}

/// One row per (scenario, method, target). Timings are left out so equal
/// runs give byte-identical files.
pub fn render_csv(report: &Report) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = CSV_COLUMNS.to_vec();
    header.push("note");
    w.write_record(&header)?;
    for (r, e) in report.entries() {
        w.write_record([
            r.scenario.clone(),
            r.kind.clone(),
            r.seed.to_string(),
            r.range_size.to_string(),
            r.support_size.to_string(),
            cell(r.nu1),
            cell(r.nu0),
            e.method.clone(),
            e.target.clone(),
            e.status.clone(),
            e.expected.clone(),
            cell(e.objective),
            cell(e.predicted),
            cell(e.value_gap),
            cell(e.gap_min),
            cell(e.gap_max),
            cell(e.mismatch),
            cell(e.mismatch_tol),
            e.iterations.map(|i| i.to_string()).unwrap_or_default(),
            e.verdict.name().to_string(),
            e.note.clone(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render_json(report: &Report) -> Result<String> {
    Ok(pushmatch::io::to_json(report)? + "\n")
}

pub fn render(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => render_json(report),
        Format::Csv => render_csv(report),
    }
}

/// Writes the report to `out`, or to stdout when `out` is `None`.
pub fn emit_report(report: &Report, format: Format, out: Option<&Path>) -> Result<()> {
    let text = render(report, format)?;
    write_output(&text, out)
}

pub fn write_output(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| HarnessError::io(path, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| HarnessError::io("<stdout>", e)),
    }
}

pub fn load_report(path: &Path) -> Result<Report> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    pushmatch::io::from_json(&text).map_err(|e| HarnessError::ConfigParse(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let entry = MethodEntry::new("phi_iterative", "kl")
            .status("converged")
            .values(0.5108256237659907, 0.5108256237659907)
            .symmetric_gap(1e-8)
            .mismatch(3e-9, Some(1e-6))
            .finish();
        let skipped = MethodEntry::skipped("phi_iterative", "tv", "non-smooth generator").finish();
        Report {
            seed: 42,
            records: vec![ScenarioRecord {
                scenario: "reference-canonical".into(),
                kind: "reference".into(),
                seed: 0,
                range_size: 2,
                support_size: 3,
                nu1: Some(Real(0.6)),
                nu0: Some(Real(0.4)),
                entries: vec![entry, skipped],
            }],
        }
    }

    #[test]
    fn empty_report_renders_header_only() {
        let csv = render_csv(&Report::default()).unwrap();
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("scenario,kind,seed"));
        let json = render_json(&Report::default()).unwrap();
        let back: Report = pushmatch::io::from_json(&json).unwrap();
        assert!(back.records.is_empty());
    }

    #[test]
    fn one_row_per_method() {
        let csv = render_csv(&sample()).unwrap();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 3);
        assert!(rows[1].contains("5.1082562376599072e-1"));
        assert!(rows[2].ends_with("n/a,non-smooth generator"));
    }

    #[test]
    fn json_round_trips() {
        let report = sample();
        let back: Report = pushmatch::io::from_json(&render_json(&report).unwrap()).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn verdicts_follow_the_numbers() {
        let base = MethodEntry::new("m", "t").status("converged").values(1.0, 0.9);
        assert_eq!(base.clone().symmetric_gap(0.2).finish().verdict, Verdict::Pass);
        assert_eq!(base.clone().symmetric_gap(0.05).finish().verdict, Verdict::Fail);
        assert_eq!(base.clone().gap_bounds(Some(-1e-9), None).finish().verdict, Verdict::Pass);
        assert_eq!(base.clone().gap_bounds(None, Some(0.0)).finish().verdict, Verdict::Fail);
        assert_eq!(base.clone().mismatch(1e-3, Some(0.0)).finish().verdict, Verdict::Fail);
        assert_eq!(base.clone().mismatch(0.0, Some(0.0)).finish().verdict, Verdict::Pass);
        assert_eq!(base.clone().status("max_iters").finish().verdict, Verdict::Fail);
        let infeasible = MethodEntry::new("m", "t").status("infeasible").expect("infeasible");
        assert_eq!(infeasible.finish().verdict, Verdict::Pass);
        let inf = MethodEntry::new("m", "t").status("converged").values(f64::INFINITY, 0.0).symmetric_gap(1.0);
        assert_eq!(inf.finish().verdict, Verdict::Fail);
    }

    #[test]
    fn tampered_verdicts_are_detected() {
        let mut report = sample();
        assert!(report.inconsistencies().is_empty());
        report.records[0].entries[0].objective = Some(Real(1.0));
        assert_eq!(report.inconsistencies().len(), 1);
    }
}
