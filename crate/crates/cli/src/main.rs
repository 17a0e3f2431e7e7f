use std::process::ExitCode;

use clap::Parser;
use ogc_cli::{jobs, Args, CliError, JobConfig, OutputFormat};

fn run(args: Args) -> Result<bool, CliError> {
    let cfg = JobConfig::from_args(args)?;
    let (record, hit) = jobs::run(&cfg)?;
    if hit {
        eprintln!("cache hit");
    }
    match cfg.output {
        OutputFormat::Json => println!("{}", record.to_json()),
        OutputFormat::Csv => print!("{}", record.to_csv()),
    }
    Ok(!cfg.command.is_check() || record.passed())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("ogc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
