//! The structured report document every command emits.
//!
//! Reports are plain text with a single line grammar so they stay easy to
//! parse and byte-stable across runs:
//!
//! ```text
//! [report]
//! format = spatial-decay/1
//! version = 0.1.0
//! command = mc-study
//!
//! [config]
//! key = value
//!
//! [table cv]
//! columns = bandwidth,cv_score,n_valid
//! row = 2,0.0101,5000
//! ```
//!
//! Every line inside a section is `key = value`; tables use the reserved
//! keys `columns` and `row` with comma-separated cells. Missing values are
//! written as `none`. Reports never contain timestamps, so identical
//! configurations produce identical bytes.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::Path;

use spatial_decay_core::{BoundaryKind, BoundaryResult, CvResult, MethodSummary, ReferenceMode};

use crate::error::CliError;

pub struct Report {
    out: String,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Report { out: String::new() };
        r.section("report");
        r.kv("format", "spatial-decay/1");
        r.kv("version", env!("CARGO_PKG_VERSION"));
        r.kv("command", command);
        r
    }

    pub fn section(&mut self, name: &str) {
        if !self.out.is_empty() {
            self.out.push('\n');
        }
        self.out.push('[');
        self.out.push_str(name);
        self.out.push_str("]\n");
    }

    pub fn kv(&mut self, key: &str, value: impl Display) {
        self.out.push_str(key);
        self.out.push_str(" = ");
        self.out.push_str(&value.to_string());
        self.out.push('\n');
    }

    pub fn kv_opt(&mut self, key: &str, value: Option<impl Display>) {
        match value {
            Some(v) => self.kv(key, v),
            None => self.kv(key, "none"),
        }
    }

    pub fn table(&mut self, name: &str, columns: &[&str]) {
        self.section(&format!("table {name}"));
        self.kv("columns", columns.join(","));
    }

    pub fn row(&mut self, cells: &[String]) {
        self.kv("row", cells.join(","));
    }

    pub fn finish(self) -> String {
        self.out
    }
}

pub fn reference_mode_name(mode: ReferenceMode) -> String {
    match mode {
        ReferenceMode::AtOrigin => "at-origin".to_string(),
        ReferenceMode::AtMaximum => "at-maximum".to_string(),
        ReferenceMode::AtDistance(d) => format!("at-distance:{d}"),
    }
}

/// Standard `[boundary]`-style section for a boundary verdict.
pub fn boundary_section(report: &mut Report, name: &str, boundary: &BoundaryResult) {
    report.section(name);
    match boundary.kind {
        BoundaryKind::Finite(d) => {
            report.kv("kind", "finite");
            report.kv("d_star", d);
        }
        BoundaryKind::NoBoundary => {
            report.kv("kind", "no-boundary");
            report.kv("d_star", "none");
        }
    }
    report.kv("reference_level", boundary.reference_level);
    report.kv("threshold_level", boundary.threshold_level);
    report.kv("reference_mode", reference_mode_name(boundary.reference_mode));
    report.kv("decay_threshold", boundary.decay_threshold);
}

/// Cross-validation score table plus the selected bandwidth.
pub fn cv_section(report: &mut Report, cv: &CvResult) {
    report.table("cv", &["bandwidth", "cv_score", "n_valid"]);
    for s in &cv.scores {
        report.row(&[
            s.bandwidth.to_string(),
            s.cv_score.to_string(),
            s.n_valid.to_string(),
        ]);
    }
    report.section("bandwidth");
    report.kv("selected", cv.selected.get());
}

/// Study summary for one estimation method.
pub fn method_section(report: &mut Report, study: &str, summary: &MethodSummary) {
    report.section(&format!("method {study} {}", summary.method.name()));
    report.kv_opt("bias", summary.bias);
    report.kv_opt("rmse", summary.rmse);
    report.kv_opt("mean_estimate", summary.mean_estimate);
    report.kv("no_boundary_rate", summary.no_boundary_rate);
    report.kv_opt("false_positive_rate", summary.false_positive_rate);
    report.kv_opt("mean_false_boundary", summary.mean_false_boundary);
    report.kv("n_finite", summary.n_finite);
    report.kv("n_no_boundary", summary.n_no_boundary);
    report.kv("n_failed", summary.n_failed);
    report.kv_opt("mean_selected_bandwidth", summary.mean_selected_bandwidth);
}

/// Write to the given path, or stdout when no path is set.
pub fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| CliError::io(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}
