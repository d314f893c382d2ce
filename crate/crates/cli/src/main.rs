mod commands;
mod input;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fqcf::FieldSpec;

use crate::output::Format;

#[derive(Parser)]
#[command(name = "fqcf", version, about = "Continued fractions and metric theory over F_q((1/z))")]
struct Cli {
    /// Field size (prime)
    #[arg(long, global = true, default_value_t = 2)]
    q: u64,

    /// Emit JSON
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,

    /// Emit CSV
    #[arg(long, global = true)]
    csv: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continued fraction expansion of a rational function or truncated series
    Expand(commands::expand::ExpandArgs),
    /// Haar measure of a degree-sum event or of a tail
    Measure(commands::measure::MeasureArgs),
    /// Number of k-blocks of partial quotients with a given degree sum
    Count(commands::measure::CountArgs),
    /// Hausdorff dimension of the F- or G-set of a growth function
    Dimension(commands::dimension::DimensionArgs),
    /// Cantor-set construction diagnostics
    Cantor(commands::cantor::CantorArgs),
    /// Monte Carlo checks under Haar measure
    Mc(commands::mc::McArgs),
    /// Dirichlet improvability criterion and witnesses
    Dirichlet(commands::dirichlet::DirichletArgs),
}

impl Cli {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            Format::Human
        }
    }
}

/// Settings shared by every subcommand.
pub struct RunConfig {
    pub field: FieldSpec,
    pub format: Format,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flag value; exit code 2.
    Usage { flag: &'static str, message: String },
    Run(anyhow::Error),
}

impl CliError {
    pub fn usage(flag: &'static str, message: impl std::fmt::Display) -> Self {
        CliError::Usage {
            flag,
            message: message.to_string(),
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Run(e.into())
    }
}

/// `map_err` helper attributing an error to a flag.
pub fn flag<E: std::fmt::Display>(name: &'static str) -> impl FnOnce(E) -> CliError {
    move |e| CliError::usage(name, e)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let field = FieldSpec::new(cli.q).map_err(flag("--q"))?;
    let cfg = RunConfig {
        field,
        format: cli.format(),
    };
    let out = match cli.command {
        Command::Expand(a) => commands::expand::run(&cfg, a),
        Command::Measure(a) => commands::measure::run_measure(&cfg, a),
        Command::Count(a) => commands::measure::run_count(&cfg, a),
        Command::Dimension(a) => commands::dimension::run(&cfg, a),
        Command::Cantor(a) => commands::cantor::run(&cfg, a),
        Command::Mc(a) => commands::mc::run(&cfg, a),
        Command::Dirichlet(a) => commands::dirichlet::run(&cfg, a),
    }?;
    match out.write(cfg.format, &mut std::io::stdout().lock()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage { flag, message }) => {
            eprintln!("error: invalid value for {flag}: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
