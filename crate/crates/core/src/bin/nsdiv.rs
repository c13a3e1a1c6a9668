use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use nsdiv::cli::{
    self, compute, inequalities, load_problem, verify, CliError, ComputeOptions, InequalityOptions, RankPolicy,
    RouteChoice, VerifyOptions, EXIT_OK, EXIT_VIOLATION,
};

#[derive(Parser)]
#[command(name = "nsdiv", version, about = "Quantum f-divergences by two independent routes")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Ns,
    Direct,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ranks {
    Full,
    Mixed,
}

#[derive(Subcommand)]
enum Command {
    /// Divergences between the two states of a problem file.
    Compute {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated divergence names.
        #[arg(long = "f", value_delimiter = ',', default_value = "relative-entropy")]
        divergences: Vec<String>,
        /// Exponent for the power family.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_enum, default_value = "both")]
        route: Route,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value = "table")]
        output: Output,
        /// Include the Nussbaum-Szkoła atom table.
        #[arg(long)]
        atoms: bool,
        /// Petz-Rényi divergence of order ALPHA in (1, 2].
        #[arg(long)]
        renyi: Option<f64>,
    },
    /// Randomized agreement check of the two routes.
    Verify {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_dim: usize,
        #[arg(long, default_value_t = 3)]
        max_blocks: usize,
        /// LO:HI
        #[arg(long, default_value = "0.5:2.0")]
        weight_range: String,
        #[arg(long, value_enum, default_value = "mixed")]
        ranks: Ranks,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value = "table")]
        output: Output,
    },
    /// Randomized check of D ≤ ln(1+χ²) and D ≤ (TV+χ²)/2.
    Inequalities {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_dim: usize,
        #[arg(long, default_value_t = 3)]
        max_blocks: usize,
        #[arg(long, default_value = "0.5:2.0")]
        weight_range: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value = "table")]
        output: Output,
    },
}

fn weight_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("--weight-range expects LO:HI, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

fn emit<T: serde::Serialize>(output: Output, report: &T, table: impl FnOnce() -> String, start: Instant) {
    match output {
        Output::Json => print!("{}", cli::to_json(report)),
        Output::Table => {
            print!("{}", table());
            eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
        }
    }
}

fn status(passed: bool) -> i32 {
    if passed {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn run(args: Args) -> Result<i32, CliError> {
    let start = Instant::now();
    match args.command {
        Command::Compute { input, divergences, alpha, route, tol, output, atoms, renyi } => {
            let problem = load_problem(&input)?;
            let route = match route {
                Route::Ns => RouteChoice::Ns,
                Route::Direct => RouteChoice::Direct,
                Route::Both => RouteChoice::Both,
            };
            let opts = ComputeOptions { divergences, alpha, route, tol, atoms, renyi };
            let report = compute(&problem, &opts)?;
            emit(output, &report, || report.render_table(), start);
            Ok(status(report.passed))
        }
        Command::Verify { trials, seed, max_dim, max_blocks, weight_range: wr, ranks, tol, output } => {
            let ranks = match ranks {
                Ranks::Full => RankPolicy::Full,
                Ranks::Mixed => RankPolicy::Mixed,
            };
            let opts =
                VerifyOptions { trials, seed, max_blocks, max_dim, weight_range: weight_range(&wr)?, ranks, tol };
            let report = verify(&opts)?;
            emit(output, &report, || report.render_table(), start);
            Ok(status(report.passed))
        }
        Command::Inequalities { trials, seed, max_dim, max_blocks, weight_range: wr, tol, output } => {
            let opts = InequalityOptions { trials, seed, max_blocks, max_dim, weight_range: weight_range(&wr)?, tol };
            let report = inequalities(&opts)?;
            emit(output, &report, || report.render_table(), start);
            Ok(status(report.passed))
        }
    }
}

fn main() -> ExitCode {
    let code = match run(Args::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
