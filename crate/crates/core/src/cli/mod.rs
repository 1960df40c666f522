//! Command implementations behind the `telewit` binary.
//!
//! Each `cmd_*` function writes results to `out`, diagnostics to `log`, and
//! returns the process exit code:
//!
//! | command    | 0            | 1               | 2             | 3             |
//! |------------|--------------|-----------------|---------------|---------------|
//! | `scan`     | success      |                 | bad arguments | write failure |
//! | `classify` | not-detected | useful-detected | invalid input |               |
//! | `verify`   | all passed   | some failed     | bad arguments |               |

pub mod scan;
pub mod state_file;
pub mod verify;

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::fef::{FefEstimate, OptimizerConfig};
use crate::states::ValidationFailure;
use crate::witness::{self, Verdict};

pub use scan::{Family, OutputFormat, ScanRequest, ScanRow};
pub use state_file::{load_state, StateFile};
pub use verify::Suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DETECTED: i32 = 1;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_WRITE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid state ({}): {message}", kind.as_str())]
    InvalidState {
        kind: ValidationFailure,
        message: String,
    },
    #[error("write failed: {0}")]
    Write(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Write(_) => EXIT_WRITE,
            _ => EXIT_USAGE,
        }
    }
}

/// Rounds to 12 significant decimal digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// `scan`: writes one row per grid point to `out_path`.
pub fn cmd_scan(req: &ScanRequest, format: OutputFormat, out_path: &Path, log: &mut dyn Write) -> i32 {
    let rows = match scan::scan(req) {
        Ok(rows) => rows,
        Err(e) => {
            let _ = writeln!(log, "error: {e}");
            return e.exit_code();
        }
    };
    let written = std::fs::File::create(out_path)
        .and_then(|f| scan::write_rows(&rows, format, std::io::BufWriter::new(f)));
    if let Err(e) = written {
        let _ = writeln!(log, "error: cannot write {}: {e}", out_path.display());
        return EXIT_WRITE;
    }
    let _ = write!(
        log,
        "{}: {} rows for d = {} written to {}",
        req.family.as_str(),
        rows.len(),
        req.d,
        out_path.display()
    );
    if req.with_fef {
        let _ = write!(log, " (restarts = {}, seed = {})", req.config.restarts, req.config.seed);
    }
    let _ = writeln!(log);
    EXIT_OK
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    Json,
    #[default]
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Self::Json),
            "text" => Ok(Self::Text),
            other => Err(CliError::Usage(format!("unknown format '{other}' (json or text)"))),
        }
    }
}

#[derive(Serialize)]
struct FefJson {
    value: f64,
    method: &'static str,
    restarts_used: usize,
    iterations: usize,
    converged: bool,
    best_unitary: Vec<Vec<[f64; 2]>>,
}

impl From<&FefEstimate> for FefJson {
    fn from(f: &FefEstimate) -> Self {
        let u = &f.best_unitary;
        Self {
            value: f.value,
            method: f.method.as_str(),
            restarts_used: f.restarts_used,
            iterations: f.iterations,
            converged: f.converged,
            best_unitary: (0..u.rows())
                .map(|i| (0..u.cols()).map(|j| [u.get(i, j).re, u.get(i, j).im]).collect())
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct ReportJson {
    d: usize,
    expectation: f64,
    verdict: Verdict,
    fef: Option<FefJson>,
    restarts: usize,
    seed: u64,
}

/// `classify`: evaluates the witness on a state file.
pub fn cmd_classify(
    in_path: &Path,
    with_fef: bool,
    config: &OptimizerConfig,
    format: ReportFormat,
    out: &mut dyn Write,
    log: &mut dyn Write,
) -> i32 {
    let rho = match load_state(in_path) {
        Ok(rho) => rho,
        Err(e) => {
            let _ = writeln!(log, "error: {e}");
            return e.exit_code();
        }
    };
    let report = match witness::classify(&rho, with_fef, config) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(log, "error: {e}");
            return EXIT_USAGE;
        }
    };
    match format {
        ReportFormat::Json => {
            let json = ReportJson {
                d: report.d,
                expectation: report.expectation,
                verdict: report.verdict,
                fef: report.fef_hint.as_ref().map(FefJson::from),
                restarts: config.restarts,
                seed: config.seed,
            };
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&json).expect("plain data"));
        }
        ReportFormat::Text => {
            let _ = writeln!(out, "# restarts = {}, seed = {}", config.restarts, config.seed);
            let _ = writeln!(out, "d            {}", report.d);
            let _ = writeln!(out, "expectation  {}", sig12(report.expectation));
            let _ = writeln!(out, "verdict      {}", report.verdict);
            if let Some(f) = &report.fef_hint {
                let _ = writeln!(out, "fef          {}", sig12(f.value));
                let _ = writeln!(out, "fef method   {}", f.method.as_str());
                let _ = writeln!(out, "useful       {}", f.is_useful(report.d));
                if f.method != crate::fef::FefMethod::Exact2x2 {
                    let _ = writeln!(
                        out,
                        "converged    {} ({} iterations over {} restarts; lower bound)",
                        f.converged, f.iterations, f.restarts_used
                    );
                }
            }
        }
    }
    match report.verdict {
        Verdict::UsefulDetected => EXIT_DETECTED,
        Verdict::NotDetected => EXIT_OK,
    }
}

/// `verify`: runs invariant suites and prints one line per check.
pub fn cmd_verify(suite: Suite, samples: usize, seed: u64, out: &mut dyn Write, log: &mut dyn Write) -> i32 {
    if samples == 0 {
        let _ = writeln!(log, "error: samples must be at least 1");
        return EXIT_USAGE;
    }
    let reports = match verify::run_suite(suite, samples, seed) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(log, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let _ = writeln!(out, "# suite = {}, samples = {samples}, seed = {seed}", suite.as_str());
    for r in &reports {
        let _ = writeln!(out, "{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let _ = writeln!(out, "{} checks passed, {failed} failed", reports.len() - failed);
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}
