use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mreg_cli::commands::{self, Common};
use mreg_cli::error::exit;

#[derive(Parser)]
#[command(name = "mreg", version, about = "Maximal regularity verification, solves and sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the randomized property checks.
    Verify(Opts),
    /// Solve one initial value problem.
    Solve(Opts),
    /// Sweep the time regularity of a rough coefficient.
    Sweep(Opts),
    /// Plot and summarize an earlier output directory.
    Report(Opts),
}

#[derive(Args)]
struct Opts {
    /// JSON configuration (optional for verify).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(short, long)]
    verbose: bool,
}

impl From<Opts> for Common {
    fn from(o: Opts) -> Self {
        Common {
            config: o.config,
            out: o.out,
            seed: o.seed,
            jobs: o.jobs,
            verbose: o.verbose,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::CONFIG as u8 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Verify(o) => commands::verify(&o.into()).and_then(|rows| {
            commands::print_checks(&rows);
            commands::check_verdict(&rows)
        }),
        Command::Solve(o) => commands::solve(&o.into()).map(|s| {
            println!(
                "solved: dimension {}, residual {:.3e}, ‖u′‖ {:.6e}, ‖u‖_H1/2(V) {:.6e}",
                s.problem.dim(),
                s.solution.residual,
                s.solution.norms.du,
                s.solution.norms.half_v
            );
        }),
        Command::Sweep(o) => commands::sweep(&o.into()).and_then(|out| {
            out.print();
            out.verdict()
        }),
        Command::Report(o) => commands::report(&o.into()),
    };
    match result {
        Ok(()) => ExitCode::from(exit::PASS as u8),
        Err(e) => {
            eprintln!("mreg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
