use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use leakgame::cli::{self, SolveMethod, SolveOptions};

#[derive(Parser)]
#[command(
    name = "leakgame",
    about = "Solve and audit zero-sum information-leakage games",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the defender's equilibrium strategy for a game file.
    Solve {
        game: PathBuf,
        /// Target accuracy of the gap bound.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Iteration cap for the subgradient method.
        #[arg(long = "max-iter")]
        max_iter: Option<usize>,
        #[arg(long, value_enum, default_value_t = MethodArg::Subgradient)]
        method: MethodArg,
        /// Write per-iteration diagnostics to this CSV file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Print the pure-strategy utility table.
    Table { game: PathBuf },
    /// Audit a defender strategy for epsilon-optimality.
    Verify {
        game: PathBuf,
        /// Defender strategy as a JSON array, e.g. '[0.5, 0.5]'.
        #[arg(long)]
        delta: String,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Brute-force verification oracles.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Crowds-network tooling.
    Crowds {
        #[command(subcommand)]
        command: CrowdsCommand,
    },
    /// Bundled example games and topologies.
    Examples {
        #[command(subcommand)]
        command: ExamplesCommand,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Subgradient,
    Lp,
    Both,
}

impl From<MethodArg> for SolveMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Subgradient => SolveMethod::Subgradient,
            MethodArg::Lp => SolveMethod::Lp,
            MethodArg::Both => SolveMethod::Both,
        }
    }
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exhaustive minimax over a simplex grid.
    Grid {
        game: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        resolution: f64,
    },
}

#[derive(Subcommand)]
enum CrowdsCommand {
    /// Turn a topology file into a placement game file.
    Build {
        topology: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum ExamplesCommand {
    /// List the bundled fixtures.
    List,
    /// Write a bundled fixture to a file or stdout.
    Emit {
        name: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve {
            game,
            epsilon,
            max_iter,
            method,
            trace,
        } => cli::cmd_solve(
            &game,
            &SolveOptions {
                epsilon,
                max_iterations: max_iter,
                method: method.into(),
                trace,
            },
        ),
        Command::Table { game } => cli::cmd_table(&game),
        Command::Verify {
            game,
            delta,
            epsilon,
        } => cli::cmd_verify(&game, &delta, epsilon),
        Command::Oracle {
            command: OracleCommand::Grid { game, resolution },
        } => cli::cmd_oracle_grid(&game, resolution),
        Command::Crowds {
            command: CrowdsCommand::Build { topology, out },
        } => cli::cmd_crowds_build(&topology, &out),
        Command::Examples { command } => match command {
            ExamplesCommand::List => cli::cmd_examples_list(),
            ExamplesCommand::Emit { name, out } => cli::cmd_examples_emit(&name, out.as_deref()),
        },
    };
    println!("{}", cli::render_payload(&outcome.payload));
    if let Some(notes) = &outcome.notes {
        eprint!("{notes}");
    }
    ExitCode::from(u8::try_from(outcome.exit_code).unwrap_or(1))
}
