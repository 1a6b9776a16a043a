use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nvgz::Velocity;
use nvgz_cli::{
    cmd_asymptotics, cmd_eval, cmd_residual, cmd_solve_velocity, cmd_validate, cmd_velocity, exit,
    parse_complex, parse_times, CmdResult, Failure, GridSpec,
};

/// Grinevich-Zakharov solutions of the Novikov-Veselov equation.
///
/// Exit codes: 0 success, 1 validation failure, 2 parse error,
/// 3 solver non-convergence, 4 evaluation diagnostic, 5 internal error.
#[derive(Parser)]
#[command(name = "nvgz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a parameter file against every constraint.
    Validate { file: PathBuf },
    /// Evaluate v and w on a grid and write CSV.
    Eval {
        file: PathBuf,
        /// x1min:x1max:n1,x2min:x2max:n2
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the velocity of every block as JSON.
    Velocity { file: PathBuf },
    /// Recover the block lambdas for a velocity, or report it forbidden.
    SolveVelocity {
        #[arg(long = "E", allow_hyphen_values = true)]
        energy: f64,
        /// RE,IM
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        c: Velocity,
    },
    /// Residuals of the equation at seeded random points.
    Residual {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Large-time comparison of one block with its soliton profile.
    Asymptotics {
        file: PathBuf,
        #[arg(long)]
        block: usize,
        /// T1,T2,... positive and increasing; both signs are evaluated.
        #[arg(long, default_value = "10,100,1000")]
        times: String,
        #[arg(long, default_value_t = 3.0)]
        window: f64,
        /// Probe velocity RE,IM for the decay table.
        #[arg(long, default_value = "0,0", allow_hyphen_values = true, value_parser = parse_complex)]
        probe: Velocity,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn print(text: CmdResult<String>) -> CmdResult {
    text.map(|s| print!("{s}"))
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Validate { file } => print(cmd_validate(&file)),
        Command::Eval { file, grid, t, out } => {
            let grid = GridSpec::parse(&grid, t)
                .map_err(|e| Failure::new(exit::PARSE, format!("--grid: {e}")))?;
            cmd_eval(&file, &grid, out.as_ref())
        }
        Command::Velocity { file } => print(cmd_velocity(&file)),
        Command::SolveVelocity { energy, c } => print(cmd_solve_velocity(energy, c)),
        Command::Residual { file, points, seed } => print(cmd_residual(&file, points, seed)),
        Command::Asymptotics {
            file,
            block,
            times,
            window,
            probe,
            out,
        } => {
            let times = parse_times(&times)
                .map_err(|e| Failure::new(exit::PARSE, format!("--times: {e}")))?;
            cmd_asymptotics(&file, block, &times, window, probe, out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code)
        }
    }
}
