//! Library behind the `tetrad-audit` command: audit runs over point grids,
//! report encoding and corpus linting.

pub mod config;
pub mod report;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tetrad_audit::{audit, AuditOptions, AuditReport, MetricSpec};

pub use config::{AuditRunConfig, Format, GridSpec, PointSource, TetradSpec, VariantChoice, MAX_POINTS};
pub use report::{decode_json, RunOutput, Summary};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "TETRAD_AUDIT_THREADS";

pub mod exit {
    pub const OK: i32 = 0;
    pub const LINT_ERRORS: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const UNRELIABLE: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] tetrad_audit::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        exit::USAGE
    }
}

/// Worker count from `TETRAD_AUDIT_THREADS`, or `None` for the rayon default.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n >= 1)
            .map(Some)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
    }
}

/// Validates `config` and audits every (point, variant) pair. Reports are
/// ordered by point, then variant, whatever the thread count.
pub fn run_audit(config: &AuditRunConfig, threads: Option<usize>) -> Result<RunOutput, CliError> {
    let points = config.validate()?;
    let tetrad = config.tetrad.build(&config.metric)?;
    let jobs: Vec<_> = points
        .iter()
        .flat_map(|p| config.variant.variants().iter().map(move |v| (p, *v)))
        .collect();
    let work = || -> Result<Vec<AuditReport>, tetrad_audit::Error> {
        jobs.par_iter()
            .map(|(p, variant)| {
                audit(
                    &tetrad,
                    p,
                    AuditOptions {
                        variant: *variant,
                        step: config.step,
                    },
                )
            })
            .collect()
    };
    let reports = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?
            .install(work),
        None => work(),
    }
    .map_err(|e| match e {
        // the stencil around an in-domain point can still cross the boundary
        tetrad_audit::Error::OutsideDomain { .. } => CliError::Usage(format!(
            "{e}; a finite-difference stencil left the domain, move the point inward or reduce --step"
        )),
        e => e.into(),
    })?;
    Ok(RunOutput {
        config: config.clone(),
        conventions: report::RunConventions::for_config(config),
        summary: Summary::of(&reports),
        reports,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub chart: String,
    pub coordinates: Vec<String>,
    pub domain: String,
}

pub fn catalog() -> Vec<CatalogEntry> {
    MetricSpec::catalog()
        .iter()
        .map(|m| CatalogEntry {
            name: m.name().to_string(),
            params: m.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            chart: m.chart().name().to_string(),
            coordinates: m.chart().coordinate_names().iter().map(|s| s.to_string()).collect(),
            domain: m.domain_description(),
        })
        .collect()
}

pub fn catalog_text() -> String {
    let mut out = String::new();
    for e in catalog() {
        let params = if e.params.is_empty() {
            "-".to_string()
        } else {
            e.params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(
            out,
            "{:<14} params: {:<6} chart: {} ({})  domain: {}",
            e.name,
            params,
            e.chart,
            e.coordinates.join(", "),
            e.domain
        );
    }
    out
}

/// Result of linting a set of corpus files.
#[derive(Debug, Clone, Default)]
pub struct LintOutcome {
    pub text: String,
    pub errors: usize,
    pub warnings: usize,
    pub unreadable: usize,
}

impl LintOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.unreadable > 0 {
            exit::USAGE
        } else if self.errors > 0 {
            exit::LINT_ERRORS
        } else {
            exit::OK
        }
    }
}

/// Lints each file. With more than one file every group of diagnostics is
/// preceded by a `==> path <==` header.
pub fn lint_files<P: AsRef<Path>>(paths: &[P]) -> LintOutcome {
    let mut out = LintOutcome::default();
    for path in paths {
        let path = path.as_ref();
        if paths.len() > 1 {
            let _ = writeln!(out.text, "==> {} <==", path.display());
        }
        match std::fs::read_to_string(path) {
            Ok(src) => {
                let report = index_lint::lint_corpus(&src);
                for d in &report.diagnostics {
                    let _ = writeln!(out.text, "{d}");
                }
                out.errors += report.errors();
                out.warnings += report.warnings();
            }
            Err(e) => {
                let _ = writeln!(out.text, "cannot read {}: {e}", path.display());
                out.unreadable += 1;
            }
        }
    }
    out
}
