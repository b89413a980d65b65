use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use laborcast::{write_outputs, AppError, Command, Session, SessionOptions};

#[derive(Parser)]
#[command(name = "laborcast", version, about = "Labour-force based inflation and unemployment models")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the Monte Carlo seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Replaces a catalog series file: `--series cpi=path/to/cpi.csv`.
    #[arg(long = "series", global = true, value_name = "ID=PATH")]
    series: Vec<String>,
    /// Loads `<name>.toml` model files from this directory instead of calibrating.
    #[arg(long, global = true)]
    models: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Unit-root test table.
    Urtest,
    /// Residual unit-root battery and Johansen trace test.
    Coint,
    /// Calibrate every configured model and write model files.
    Calibrate,
    /// R², RMSFE and naive benchmark for each evaluation entry.
    Evaluate,
    /// Project inflation and unemployment under each scenario.
    Forecast,
    /// Long-format tables for plotting.
    Plotdata,
    /// Seeded size, power and rank-selection experiments.
    Montecarlo,
    /// Everything the config has a section for.
    Run,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Command {
        match c {
            Cmd::Urtest => Command::Urtest,
            Cmd::Coint => Command::Coint,
            Cmd::Calibrate => Command::Calibrate,
            Cmd::Evaluate => Command::Evaluate,
            Cmd::Forecast => Command::Forecast,
            Cmd::Plotdata => Command::Plotdata,
            Cmd::Montecarlo => Command::Montecarlo,
            Cmd::Run => Command::Run,
        }
    }
}

fn run(cli: Cli) -> Result<Vec<String>, AppError> {
    let config = cli.config.ok_or_else(|| AppError::config("--config is required"))?;
    let series = cli
        .series
        .iter()
        .map(|s| match s.split_once('=') {
            Some((id, path)) if !id.is_empty() && !path.is_empty() => Ok((id.to_string(), PathBuf::from(path))),
            _ => Err(AppError::config(format!("--series expects ID=PATH, got `{s}`"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let opts = SessionOptions { config, seed: cli.seed, series, models: cli.models };
    let mut session = Session::open(&opts)?;
    let outputs = session.execute(cli.command.into())?;
    write_outputs(&cli.out, &outputs)?;
    Ok(outputs.into_iter().map(|o| o.path).collect())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{p}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
