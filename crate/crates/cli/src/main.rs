use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qip::input::{parse_method, parse_state_spec};
use qip::{cmd_measures, cmd_project, cmd_sweep, cmd_validate, CliError, ConfigOverrides, RunOptions, SweepSpec, SymmetryChoice};
use qip_core::Method;

/// Information projections onto k-party exponential families.
///
/// States are JSON, inline or as a file path: {"type":"dicke","n":4,"e":2},
/// {"type":"ghz","n":3}, {"type":"raw","matrix":[[[re,im],...],...]} or
/// {"type":"mix","p":0.5,"base":{...}}.
#[derive(Parser)]
#[command(name = "qip", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Project a state onto the k-party family and print the result as JSON.
    Project {
        #[arg(long)]
        state: String,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print D_k for every k and C_k in three forms as JSON.
    Measures {
        #[arg(long)]
        state: String,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mix a state with white noise over a grid of p and write a CSV table.
    Sweep {
        /// Base state; if it is a mixture its outermost weight is swept.
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 0.0)]
        p_start: f64,
        #[arg(long, default_value_t = 1.0)]
        p_stop: f64,
        #[arg(long, default_value_t = 11)]
        p_count: usize,
        /// Weight bounds, comma separated (default 1..n-1).
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a state (and optionally a claimed symmetry).
    Validate {
        #[arg(long)]
        state: String,
        #[arg(long, default_value = "none")]
        symmetry: String,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Underrelaxation factor in (0, 1] (default 0.5 for n <= 4, else 0.1).
    #[arg(long)]
    omega: Option<f64>,
    /// Sweep limit (default 100 for n <= 4, else 500).
    #[arg(long)]
    max_sweeps: Option<usize>,
    /// Moment residual at which a projection counts as converged.
    #[arg(long)]
    tol: Option<f64>,
    /// iterative, dual or both.
    #[arg(long, default_value = "iterative", value_parser = parse_method_arg)]
    method: Method,
    /// none, auto-permutation, or JSON {"permutations": [[2,1,3]] | "all", "pauli": ["ZZI"]}.
    #[arg(long, default_value = "none")]
    symmetry: String,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

fn parse_method_arg(s: &str) -> Result<Method, String> {
    parse_method(s).map_err(|e| e.to_string())
}

impl RunArgs {
    fn options(&self) -> Result<RunOptions, CliError> {
        Ok(RunOptions {
            overrides: ConfigOverrides { omega: self.omega, max_sweeps: self.max_sweeps, tol: self.tol },
            method: self.method,
            symmetry: SymmetryChoice::parse(&self.symmetry)?,
            jobs: self.jobs,
        })
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<qip::Status, CliError> {
    match cli.command {
        Command::Project { state, k, run, out } => cmd_project(&state, k, &run.options()?, &mut *sink(&out)?),
        Command::Measures { state, run, out } => cmd_measures(&state, &run.options()?, &mut *sink(&out)?),
        Command::Sweep { state, p_start, p_stop, p_count, k, run, out } => {
            let spec = SweepSpec::new(parse_state_spec(&state)?, p_start, p_stop, p_count)
                .with_ks(k)
                .with_options(run.options()?);
            let mut w = sink(&out)?;
            let status = cmd_sweep(&spec, &mut *w)?;
            w.flush()?;
            Ok(status)
        }
        Command::Validate { state, symmetry } => {
            cmd_validate(&state, &SymmetryChoice::parse(&symmetry)?, &mut std::io::stdout().lock())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => {
            if status == qip::Status::Diverged {
                eprintln!("warning: a projection diverged; the best finite iterate was reported");
            }
            ExitCode::from(status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
