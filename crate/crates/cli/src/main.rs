mod commands;
mod failure;
mod reference;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::failure::{Failure, POSTCONDITION};

/// Interpolation index selection and DEIM model reduction experiments.
#[derive(Parser)]
#[command(name = "deimkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select interpolation indices for a basis read from a file.
    Select(commands::select::SelectArgs),
    /// Condition numbers of DEIM and Q-DEIM on random orthonormal bases.
    BenchmarkRandom(commands::benchmark::BenchmarkArgs),
    /// FitzHugh-Nagumo reduction with DEIM and Q-DEIM.
    FnDemo(commands::fn_demo::FnDemoArgs),
    /// Nonlinear RC ladder reduction with DEIM and Q-DEIM.
    RcDemo(commands::rc_demo::RcDemoArgs),
    /// DEIM approximation of parametrized functions.
    ParamfunDemo(commands::paramfun::ParamfunArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Select(a) => commands::select::run(a),
        Command::BenchmarkRandom(a) => commands::benchmark::run(a),
        Command::FnDemo(a) => commands::fn_demo::run(a),
        Command::RcDemo(a) => commands::rc_demo::run(a),
        Command::ParamfunDemo(a) => commands::paramfun::run(a),
    };
    match outcome.and_then(|report| report.finish()) {
        Ok((text, passed)) => {
            print!("{text}");
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("deimkit: one or more checks failed");
                ExitCode::from(POSTCONDITION)
            }
        }
        Err(Failure { code, message }) => {
            eprintln!("deimkit: {message}");
            ExitCode::from(code)
        }
    }
}
