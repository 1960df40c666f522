use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use teleport_witness::cli::{self, Family, OutputFormat, ReportFormat, ScanRequest, Suite};
use teleport_witness::OptimizerConfig;

#[derive(Parser)]
#[command(name = "telewit", version, about = "Teleportation witness and fully entangled fraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a state family parameter and tabulate the witness expectation.
    Scan {
        /// isotropic | werner | mems | discord
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        step: f64,
        /// Also compute the fully entangled fraction at every grid point.
        #[arg(long)]
        fef: bool,
        #[arg(long, default_value = "csv")]
        format: OutputFormat,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Classify the state stored in a JSON state file.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        fef: bool,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
    },
    /// Run randomized invariant suites.
    Verify {
        /// convexity | lipschitz | separable-nonneg | decompositions | oracle-agreement | all
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn config(restarts: usize, seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        restarts,
        seed,
        ..OptimizerConfig::default()
    }
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cli::EXIT_USAGE as u8 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut err = std::io::stderr();
    let code = match args.command {
        Command::Scan {
            family,
            d,
            from,
            to,
            step,
            fef,
            format,
            out: out_path,
            restarts,
            seed,
        } => {
            let req = ScanRequest {
                family,
                d,
                from,
                to,
                step,
                with_fef: fef,
                config: config(restarts, seed),
            };
            cli::cmd_scan(&req, format, &out_path, &mut err)
        }
        Command::Classify {
            input,
            fef,
            restarts,
            seed,
            format,
        } => cli::cmd_classify(&input, fef, &config(restarts, seed), format, &mut out, &mut err),
        Command::Verify {
            suite,
            samples,
            seed,
        } => cli::cmd_verify(suite, samples, seed, &mut out, &mut err),
    };
    let _ = out.flush();
    ExitCode::from(code as u8)
}
