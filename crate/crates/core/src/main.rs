use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use boole::cli::{
    cmd_parse, cmd_prove, cmd_run, cmd_vcs, ProveOptions, RunOptions, VcFormat, VcsOptions,
};

/// Deductive verifier and interpreter for the Boole language.
#[derive(Parser)]
#[command(name = "boole", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Pretty,
    Smt2,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and type-check a file, printing the canonical form.
    Parse {
        file: PathBuf,
    },
    /// Print verification conditions, or write them as .smt2 files.
    Vcs {
        file: PathBuf,
        /// Restrict to one procedure (default: all).
        #[arg(long = "proc")]
        procedure: Option<String>,
        #[arg(long, value_enum, default_value = "pretty")]
        format: FormatArg,
        /// Output directory for --format smt2 (default: current directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate and discharge verification conditions with an SMT solver.
    Prove {
        file: PathBuf,
        /// Restrict to one procedure (default: all).
        #[arg(long = "proc")]
        procedure: Option<String>,
        /// Solver command template reading SMT-LIB on stdin
        /// (default: $BOOLE_SOLVER, then z3/cvc5 from PATH).
        #[arg(long)]
        solver: Option<String>,
        /// Per-condition wall-clock timeout in seconds.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        timeout: u64,
        /// Concurrent solver processes.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: u64,
        /// Suppress elapsed times (for reproducible output).
        #[arg(long)]
        no_timing: bool,
    },
    /// Execute a procedure concretely and print returns and tick cost.
    Run {
        file: PathBuf,
        #[arg(long = "proc")]
        procedure: String,
        /// Argument bindings, e.g. "n=5,flag=true".
        #[arg(long)]
        args: Option<String>,
        /// Also evaluate loop invariants at entry and per iteration.
        #[arg(long)]
        check_invariants: bool,
        /// Seed for havocked (uninitialized) locals.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Loop iteration budget before the run counts as non-terminating.
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match cli.command {
        Command::Parse { file } => cmd_parse(&file),
        Command::Vcs { file, procedure, format, out } => {
            let format = match format {
                FormatArg::Pretty => VcFormat::Pretty,
                FormatArg::Smt2 => VcFormat::Smt2,
            };
            cmd_vcs(&file, &VcsOptions { procedure, format, out_dir: out })
        }
        Command::Prove { file, procedure, solver, timeout, jobs, no_timing } => cmd_prove(
            &file,
            &ProveOptions { procedure, solver, timeout_secs: timeout, jobs: jobs as usize, no_timing },
        ),
        Command::Run { file, procedure, args, check_invariants, seed, max_steps } => cmd_run(
            &file,
            &RunOptions { procedure, args, check_invariants, seed, max_steps },
        ),
    };
    ExitCode::from(status.code() as u8)
}
