use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use epfield::connection::FLAT_TOL;
use epfield::harmonic::{Preset, SolverConfig, SweepOrder};
use epfield::mesh::Mesh;
use epfield::par::Execution;
use epfield_cli::commands::{
    cmd_check, cmd_reconstruct, cmd_reduce, cmd_solve, BoundarySource, CheckSettings, CliError, Result, SolveArgs,
    EXIT_MALFORMED,
};

/// Discrete harmonic maps into SO(n) on a rectangular mesh.
///
/// Exit codes: 0 ok, 1 check failed, 2 no convergence, 3 malformed input,
/// 4 connection not flat.
#[derive(Parser)]
#[command(name = "epfield", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the boundary-value problem and report residual checks.
    Solve(SolveCmd),
    /// Convert a field file into its connection file.
    Reduce {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild a field from a flat connection file.
    Reconstruct {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Value at vertex (0,0): n² comma-separated numbers, row-major.
        /// Defaults to the identity.
        #[arg(long = "base-g0", allow_hyphen_values = true)]
        base_g0: Option<String>,
        #[arg(long, default_value_t = FLAT_TOL)]
        flat_tol: f64,
    },
    /// Verify a field or connection file; exit 1 if any residual is too large.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        checks: CheckFlags,
    },
}

#[derive(Args)]
struct SolveCmd {
    /// Boundary data from a field file (its boundary values are used).
    #[arg(long = "in", conflicts_with_all = ["preset", "width", "height", "n"])]
    input: Option<PathBuf>,
    #[arg(long, default_value = "random-smooth")]
    preset: Preset,
    /// Number of turns for the twist preset.
    #[arg(long, default_value_t = 1.0)]
    turns: f64,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 16)]
    width: usize,
    #[arg(long, default_value_t = 16)]
    height: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop once the field-equation residual is at most this.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_sweeps: usize,
    /// `row-major` or `red-black`.
    #[arg(long, default_value = "row-major")]
    order: SweepOrder,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    checks: CheckFlags,
}

#[derive(Args)]
struct CheckFlags {
    /// Threshold for the reported residuals.
    #[arg(long, default_value_t = 1e-8)]
    check_tol: f64,
    #[arg(long = "check-flat-tol", default_value_t = FLAT_TOL)]
    check_flat_tol: f64,
    /// Finite-difference step for the covector residuals.
    #[arg(long, default_value_t = 1e-5)]
    fd_step: f64,
    /// Run sequentially even when built with parallel support.
    #[arg(long)]
    sequential: bool,
}

impl CheckFlags {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn settings(&self) -> Result<CheckSettings> {
        if self.fd_step.is_nan() || self.fd_step <= 0.0 {
            return Err(CliError::Argument { flag: "fd-step", reason: "must be positive".into() });
        }
        Ok(CheckSettings {
            residual_tol: self.check_tol,
            flat_tol: self.check_flat_tol,
            fd_step: self.fd_step,
            execution: self.execution(),
        })
    }
}

fn run(command: Command) -> Result<epfield_cli::commands::Report> {
    match command {
        Command::Solve(s) => {
            let boundary = match s.input {
                Some(path) => BoundarySource::File(path),
                None => {
                    let preset = match s.preset {
                        Preset::Twist { .. } => Preset::Twist { turns: s.turns },
                        p => p,
                    };
                    BoundarySource::Preset { preset, mesh: Mesh::new(s.width, s.height)?, n: s.n, seed: s.seed }
                }
            };
            let solver = SolverConfig { tol: s.tol, max_sweeps: s.max_sweeps, order: s.order, execution: s.checks.execution() };
            cmd_solve(&SolveArgs { boundary, solver, checks: s.checks.settings()?, out: s.out })
        }
        Command::Reduce { input, out } => cmd_reduce(&input, &out),
        Command::Reconstruct { input, out, base_g0, flat_tol } => cmd_reconstruct(&input, base_g0.as_deref(), flat_tol, &out),
        Command::Check { input, checks } => cmd_check(&input, &checks.settings()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_MALFORMED as u8),
            };
        }
    };
    match run(cli.command) {
        Ok(report) => {
            print!("{report}");
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
