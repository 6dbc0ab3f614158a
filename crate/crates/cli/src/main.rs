use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ctkit_core::commands::{error_exit_code, run, Command, RunOptions};
use ctkit_core::io::{emit_report, Format};
use ctkit_core::principles::Principle;
use ctkit_core::KitError;

/// Decide possible and impossible tasks on finite classical and quantum
/// models, and check the information theory built on them.
#[derive(Parser)]
#[command(name = "ctkit", version)]
struct Cli {
    /// Seed for the randomised search, overriding the model file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Emit the report as JSON.
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Emit the report as text (the default).
    #[arg(long, global = true)]
    text: bool,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall time per check. Reports are then not reproducible.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct VarArgs {
    model: PathBuf,
    /// Only this declared variable.
    #[arg(long)]
    variable: Option<String>,
}

#[derive(Subcommand)]
enum Verb {
    /// Is there a task telling the attributes of a variable apart?
    Distinguish {
        #[command(flatten)]
        var: VarArgs,
        /// Named attributes forming the variable, comma separated.
        #[arg(long, value_delimiter = ',')]
        attributes: Vec<String>,
    },
    /// Can the variable be cloned?
    CloneCheck(VarArgs),
    /// Is the variable an information variable?
    InfoVar(VarArgs),
    /// Is every attribute of the variable equal to its double bar?
    Observable(VarArgs),
    /// Build the copy measurer of a variable and optionally test it on another.
    Measure {
        model: PathBuf,
        #[arg(long)]
        variable: String,
        #[arg(long)]
        target: Option<String>,
    },
    /// Search the model for a superinformation medium.
    Superinfo { model: PathBuf },
    /// Check the superinformation theorems.
    Theorems {
        model: PathBuf,
        /// One of 8.1 to 8.7 or 8.9; all when omitted.
        #[arg(long)]
        section: Option<String>,
    },
    /// Check principles II to IX on the model.
    Check {
        model: PathBuf,
        #[arg(long, value_parser = parse_principle)]
        principle: Option<Principle>,
    },
    /// Search every classical model up to a size for counterexamples.
    Falsify {
        #[arg(long)]
        max_states: usize,
        /// Largest size searched without complaint.
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long, value_delimiter = ',', value_parser = parse_principle)]
        principles: Vec<Principle>,
    },
    /// Information capacity of the model's substrates, in bits.
    Capacity {
        model: PathBuf,
        #[arg(long)]
        substrate: Option<String>,
    },
}

fn parse_principle(s: &str) -> Result<Principle, String> {
    s.parse().map_err(|e: KitError| e.to_string())
}

impl Verb {
    fn into_command(self) -> Command {
        match self {
            Verb::Distinguish { var, attributes } => Command::Distinguish {
                model: var.model,
                variable: var.variable,
                attributes,
            },
            Verb::CloneCheck(v) => Command::CloneCheck { model: v.model, variable: v.variable },
            Verb::InfoVar(v) => Command::InfoVar { model: v.model, variable: v.variable },
            Verb::Observable(v) => Command::Observable { model: v.model, variable: v.variable },
            Verb::Measure { model, variable, target } => Command::Measure { model, variable, target },
            Verb::Superinfo { model } => Command::Superinfo { model },
            Verb::Theorems { model, section } => Command::Theorems { model, section },
            Verb::Check { model, principle } => Command::Check { model, principle },
            Verb::Falsify { max_states, bound, principles } => Command::Falsify { max_states, bound, principles },
            Verb::Capacity { model, substrate } => Command::Capacity { model, substrate },
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let format = if cli.json { Format::Json } else { Format::Text };
    let opts = RunOptions {
        seed: cli.seed,
        timings: cli.timings,
        argv,
    };
    let report = match run(&cli.verb.into_command(), &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(error_exit_code(&e) as u8);
        }
    };
    let bytes = match emit_report(&report, format) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &bytes),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.exit_code() as u8)
}
