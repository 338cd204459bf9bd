//! `hzlab` command line: field data, Cassels statistics, the random model, the limit and
//! denseness experiments, and the Beurling–Selberg inequality suite.

mod args;
mod bs;
mod config;
mod experiments;
mod field;
mod output;

use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};

use args::{Cli, Cmd};
use output::{CliError, Report};

fn run() -> Result<bool, CliError> {
    let matches = Cli::command().try_get_matches().map_err(CliError::Clap)?;
    let cli = Cli::from_arg_matches(&matches).map_err(CliError::Clap)?;
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let file = cli.globals.config.as_deref().map(config::load).transpose()?;
    let globals = config::merge_globals(cli.globals, &matches, sub, file.as_ref())?;
    let cmd = config::merge_command(cli.cmd, name, sub, file.as_ref())?;
    if let Some(k) = globals.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let report: Report = match &cmd {
        Cmd::Field(a) => field::field(a)?,
        Cmd::Cassels(a) => field::cassels(a)?,
        Cmd::Model(a) => experiments::model(a, &globals)?,
        Cmd::Limit(a) => experiments::limit(a, &globals)?,
        Cmd::Dense(a) => experiments::dense(a)?,
        Cmd::Bs(a) => bs::bs(a, &globals)?,
    };
    output::emit(name, &report, &globals)?;
    Ok(report.pass || !globals.assert)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("assertion failed");
            ExitCode::from(1)
        }
        Err(CliError::Clap(e)) => {
            let code = e.exit_code();
            let _ = e.print();
            ExitCode::from(code.clamp(0, 255) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
