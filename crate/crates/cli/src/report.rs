//! Report files: JSON document, CSV table and the run summary.

use std::fmt;

use serde::{Deserialize, Serialize};
use tetrad_audit::{AuditReport, Step, Variant};

use crate::config::AuditRunConfig;
use crate::CliError;

/// `|trace_q - 4|` allowed for the trace check to pass.
pub const TRACE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConventions {
    pub signature: String,
    pub frame_metric: String,
    pub tetrad_layout: String,
    pub variants: Vec<VariantNote>,
    pub step: Step,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantNote {
    pub variant: Variant,
    pub definition: String,
}

impl RunConventions {
    pub fn for_config(config: &AuditRunConfig) -> Self {
        let base = tetrad_audit::audit::Conventions::new(Variant::RaiseOutside, config.step);
        Self {
            signature: base.signature,
            frame_metric: base.frame_metric,
            tetrad_layout: base.tetrad_layout,
            variants: config
                .variant
                .variants()
                .iter()
                .map(|v| VariantNote {
                    variant: *v,
                    definition: v.note().to_string(),
                })
                .collect(),
            step: config.step,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub reports: usize,
    pub min_spread_rel: f64,
    pub max_spread_rel: f64,
    pub min_best_fit_residual: f64,
    pub max_best_fit_residual: f64,
    pub trace_check: Check,
    pub unreliable: usize,
}

impl Summary {
    pub fn of(reports: &[AuditReport]) -> Self {
        let min_max = |f: fn(&AuditReport) -> f64| {
            reports
                .iter()
                .map(f)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        let (min_spread_rel, max_spread_rel) = min_max(|r| r.spread_rel);
        let (min_best_fit_residual, max_best_fit_residual) = min_max(|r| r.best_fit_residual);
        let trace_ok = reports.iter().all(|r| (r.trace_q - 4.0).abs() < TRACE_TOL);
        Self {
            reports: reports.len(),
            min_spread_rel,
            max_spread_rel,
            min_best_fit_residual,
            max_best_fit_residual,
            trace_check: if trace_ok { Check::Pass } else { Check::Fail },
            unreliable: reports.iter().filter(|r| !r.reliable).count(),
        }
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "reports {}; spread_rel min {} max {}; best_fit_residual min {} max {}; trace_q = 4 {}",
            self.reports,
            self.min_spread_rel,
            self.max_spread_rel,
            self.min_best_fit_residual,
            self.max_best_fit_residual,
            match self.trace_check {
                Check::Pass => "pass",
                Check::Fail => "FAIL",
            }
        )?;
        if self.unreliable > 0 {
            write!(f, "; {} unreliable", self.unreliable)?;
        }
        Ok(())
    }
}

/// A complete audit run as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub config: AuditRunConfig,
    pub conventions: RunConventions,
    pub reports: Vec<AuditReport>,
    pub summary: Summary,
}

impl RunOutput {
    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(csv_header())?;
        for (i, r) in self.reports.iter().enumerate() {
            w.write_record(csv_row(i / self.config.variant.variants().len(), r))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// Decodes a JSON report written by [`RunOutput::to_json`].
pub fn decode_json(text: &str) -> Result<RunOutput, CliError> {
    Ok(serde_json::from_str(text)?)
}

const SCALAR_COLUMNS: [&str; 15] = [
    "point_index",
    "variant",
    "x0",
    "x1",
    "x2",
    "x3",
    "lhs_rhs_defect",
    "spread_abs",
    "spread_rel",
    "best_fit_R",
    "best_fit_residual",
    "trace_q",
    "evans_trace_R",
    "evans_trace_R_normalized",
    "reliable",
];

pub fn csv_header() -> Vec<String> {
    let mut h: Vec<String> = SCALAR_COLUMNS.iter().map(|s| s.to_string()).collect();
    for prefix in ["R", "defined"] {
        for a in 0..4 {
            for l in 0..4 {
                h.push(format!("{prefix}_a{a}l{l}"));
            }
        }
    }
    h
}

fn csv_row(point_index: usize, r: &AuditReport) -> Vec<String> {
    let mut row = vec![point_index.to_string(), r.variant.name().to_string()];
    row.extend(r.point.x.iter().map(f64::to_string));
    row.extend(
        [
            r.lhs_rhs_defect,
            r.spread_abs,
            r.spread_rel,
            r.best_fit_r,
            r.best_fit_residual,
            r.trace_q,
            r.evans_trace_r,
            r.evans_trace_r_normalized,
        ]
        .iter()
        .map(f64::to_string),
    );
    row.push(r.reliable.to_string());
    let mut values = vec![String::new(); 16];
    let mut defined = vec![false.to_string(); 16];
    for c in &r.candidates {
        let k = 4 * c.a + c.lambda;
        if c.a >= 4 || c.lambda >= 4 {
            continue;
        }
        if let Some(v) = c.value.filter(|_| c.defined) {
            values[k] = v.to_string();
            defined[k] = true.to_string();
        }
    }
    row.extend(values);
    row.extend(defined);
    row
}
