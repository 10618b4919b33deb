use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tetrad_audit::{catalog_lookup, Step};
use tetrad_audit_cli::{
    catalog, catalog_text, exit, lint_files, run_audit, threads_from_env, AuditRunConfig, CliError, Format, GridSpec,
    PointSource, TetradSpec, VariantChoice,
};

#[derive(Parser)]
#[command(
    name = "tetrad-audit",
    version,
    about = "Audit wave-operator identities for tetrad fields and lint index expressions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CatalogFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    RaiseOutside,
    RaiseInside,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// List the catalog metrics
    Catalog {
        #[arg(long, value_enum, default_value = "text")]
        format: CatalogFormat,
    },
    /// Audit the scalar R candidates at one or more points
    Audit {
        #[arg(long)]
        metric: String,
        /// Schwarzschild mass
        #[arg(long = "M", value_name = "M")]
        mass: Option<f64>,
        /// `diag` or `boost:<ab>:<coeff>[:<coord>]`, rapidity coeff*x_coord
        #[arg(long, default_value = "diag")]
        tetrad: String,
        /// Point as c0,c1,c2,c3 (repeatable)
        #[arg(long, allow_hyphen_values = true, conflicts_with = "grid")]
        point: Vec<String>,
        /// Grid as name=start:stop:count,... (inclusive; other coordinates 0)
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long, value_enum, default_value = "raise-outside")]
        variant: VariantArg,
        /// Relative finite-difference step: h * max(1, |x_mu|)
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: ReportFormat,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lint corpus files of index expressions
    Lint {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Catalog { format } => match format {
            CatalogFormat::Text => {
                emit(&catalog_text());
                exit::OK
            }
            CatalogFormat::Json => match serde_json::to_string_pretty(&catalog()) {
                Ok(s) => {
                    emit(&format!("{s}\n"));
                    exit::OK
                }
                Err(e) => fail(e.into()),
            },
        },
        Command::Audit {
            metric,
            mass,
            tetrad,
            point,
            grid,
            variant,
            step,
            format,
            out,
        } => match audit_cmd(metric, mass, tetrad, point, grid, variant, step, format, out) {
            Ok(code) => code,
            Err(e) => fail(e),
        },
        Command::Lint { files } => {
            let outcome = lint_files(&files);
            emit(&outcome.text);
            if outcome.errors == 0 && outcome.warnings > 0 && outcome.unreadable == 0 {
                eprintln!("note: {} warning(s), no errors", outcome.warnings);
            }
            outcome.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn fail(e: CliError) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}

#[allow(clippy::too_many_arguments)]
fn audit_cmd(
    metric: String,
    mass: Option<f64>,
    tetrad: String,
    point: Vec<String>,
    grid: Option<String>,
    variant: VariantArg,
    step: f64,
    format: ReportFormat,
    out: Option<PathBuf>,
) -> Result<i32, CliError> {
    let params: Vec<f64> = mass.into_iter().collect();
    let metric = catalog_lookup(&metric, &params)?;
    let tetrad: TetradSpec = tetrad.parse()?;
    let points = match grid {
        Some(g) => PointSource::Grid(GridSpec::parse(&g, metric.chart())?),
        None => PointSource::Explicit(
            point
                .iter()
                .map(|p| tetrad_audit_cli::config::parse_point(p))
                .collect::<Result<_, _>>()?,
        ),
    };
    let config = AuditRunConfig {
        metric,
        tetrad,
        points,
        variant: match variant {
            VariantArg::RaiseOutside => VariantChoice::RaiseOutside,
            VariantArg::RaiseInside => VariantChoice::RaiseInside,
            VariantArg::Both => VariantChoice::Both,
        },
        step: Step::Relative(step),
        format: match format {
            ReportFormat::Json => Format::Json,
            ReportFormat::Csv => Format::Csv,
        },
    };
    let output = run_audit(&config, threads_from_env()?)?;
    let text = match config.format {
        Format::Json => output.to_json()?,
        Format::Csv => output.to_csv()?,
    };
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => emit(&text),
    }
    eprintln!("{}", output.summary);
    Ok(if output.summary.unreliable > 0 {
        exit::UNRELIABLE
    } else {
        exit::OK
    })
}
