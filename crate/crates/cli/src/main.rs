use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qfcs_cli::config::EstimationMode;
use qfcs_cli::{load_config, run_to_output, Command, Overrides};

#[derive(Parser)]
#[command(name = "qfcs", version, about = "Full-counting statistics experiments on a simulated Ising chain")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// TOML experiment configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output CSV path (stdout when neither this nor `[output] path` is set).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,

    /// Shots per circuit in shot mode.
    #[arg(long, global = true)]
    shots: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Reconstructed distribution vs exact diagonalization, per grid size.
    Distribution,
    /// Sector filtering followed by reconstruction.
    Filter,
    /// Finite-difference cumulants over a step sweep.
    Cumulants,
    /// Raw characteristic-function samples.
    Charfunc,
}

#[derive(ValueEnum, Clone, Copy)]
enum Mode {
    Exact,
    Shots,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Distribution => Command::Distribution,
        Cmd::Filter => Command::Filter,
        Cmd::Cumulants => Command::Cumulants,
        Cmd::Charfunc => Command::Charfunc,
    };
    let overrides = Overrides {
        seed: cli.seed,
        out: cli.out,
        mode: cli.mode.map(|m| match m {
            Mode::Exact => EstimationMode::Exact,
            Mode::Shots => EstimationMode::Shots,
        }),
        shots: cli.shots,
    };
    let result = load_config(cli.config.as_deref(), &overrides).and_then(|c| run_to_output(command, &c));
    match result {
        Ok(Some(csv)) => {
            print!("{csv}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qfcs: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
