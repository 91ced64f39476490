//! Run reports: counts, stage timings, warnings and the conservation
//! residual, as JSON and human-readable text.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use super::IoError;

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct RunReport {
    pub nodes: usize,
    pub edges: usize,
    pub seeds: usize,
    pub sections: usize,
    /// Footprint area not assigned to any section, relative to the
    /// footprint area. Reported even when zero.
    pub conservation_residual_rel: f64,
    /// Wall time per stage in milliseconds.
    pub stage_ms: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        out.push_str("run report\n");
        out.push_str(&format!(
            "  nodes: {}  edges: {}  seeds: {}  sections: {}\n",
            self.nodes, self.edges, self.seeds, self.sections
        ));
        out.push_str(&format!(
            "  conservation residual (relative): {:.3e}\n",
            self.conservation_residual_rel
        ));
        out.push_str("  stages:\n");
        for (stage, ms) in &self.stage_ms {
            out.push_str(&format!("    {stage}: {ms:.1} ms\n"));
        }
        if self.warnings.is_empty() {
            out.push_str("  warnings: none\n");
        } else {
            out.push_str(&format!("  warnings ({}):\n", self.warnings.len()));
            for w in &self.warnings {
                out.push_str(&format!("    - {w}\n"));
            }
        }
        out
    }

    pub fn write_json(&self, path: &Path) -> Result<(), IoError> {
        let json = serde_json::to_string_pretty(self).expect("report serializes");
        std::fs::write(path, json + "\n").map_err(|source| IoError::Write {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn read_json(path: &Path) -> Result<RunReport, IoError> {
        let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| IoError::Malformed {
            path: path.display().to_string(),
            detail: e.to_string(),
        })
    }
}

/// Validation report file: the regression summary plus per-pair rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pairs: usize,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub bucket_5: f64,
    pub bucket_10: f64,
    pub bucket_15: f64,
    pub unmatched_reference: Vec<String>,
}

impl ValidationReport {
    pub fn from_match(report: &crate::evaluate::MatchReport) -> Self {
        ValidationReport {
            pairs: report.pairs.len(),
            slope: report.slope,
            intercept: report.intercept,
            r_squared: report.r_squared,
            bucket_5: report.bucket_5,
            bucket_10: report.bucket_10,
            bucket_15: report.bucket_15,
            unmatched_reference: report
                .unmatched_reference
                .iter()
                .map(|e| e.0.clone())
                .collect(),
        }
    }

    pub fn text(&self, pairs: &[crate::evaluate::PairReport]) -> String {
        let mut out = String::new();
        out.push_str("validation report\n");
        out.push_str(&format!(
            "  pairs: {}  slope: {:.6}  intercept: {:.3}  r_squared: {:.6}\n",
            self.pairs, self.slope, self.intercept, self.r_squared
        ));
        out.push_str(&format!(
            "  deviation buckets: <5% {:.1}%  <10% {:.1}%  <15% {:.1}%\n",
            self.bucket_5 * 100.0,
            self.bucket_10 * 100.0,
            self.bucket_15 * 100.0
        ));
        if !self.unmatched_reference.is_empty() {
            out.push_str(&format!(
                "  unmatched reference ids: {}\n",
                self.unmatched_reference.join(", ")
            ));
        }
        out.push_str("  edge_id\tmodeled_m2\treference_m2\tdeviation_pct\n");
        for p in pairs {
            out.push_str(&format!(
                "  {}\t{:.3}\t{:.3}\t{:.3}\n",
                p.edge, p.modeled, p.reference, p.deviation_pct
            ));
        }
        out
    }

    pub fn write_json(&self, path: &Path) -> Result<(), IoError> {
        let json = serde_json::to_string_pretty(self).expect("report serializes");
        std::fs::write(path, json + "\n").map_err(|source| IoError::Write {
            path: path.display().to_string(),
            source,
        })
    }
}
