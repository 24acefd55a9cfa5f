mod commands;
mod config;
mod grid;
mod report;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use config::{merge, Cli, Command, Common};
use report::{destination, emit, render, Envelope, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("missing required option {0}")]
    Missing(&'static str),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] borelcalc_core::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Missing(_) | CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            CliError::Missing(_) => "missing-option",
            CliError::Usage(_) => "usage",
            CliError::Domain(e) => e.code(),
        }
    }
}

/// Merges the config file, runs the command and writes its report.
fn execute<A>(name: &str, flags: &A, common: impl Fn(&A) -> &Common, run: impl Fn(&A) -> Result<Report, CliError>) -> Result<(), CliError>
where
    A: Serialize + serde::de::DeserializeOwned,
{
    let args: A = merge(flags, common(flags).config.as_deref())?;
    let c = common(&args);
    let (path, format) = destination(c.out.as_deref(), c.format);
    let report = run(&args)?;
    let mut config = serde_json::to_value(&args).expect("argument structs serialize");
    if let serde_json::Value::Object(m) = &mut config {
        m.insert("command".into(), json!(name));
    }
    let envelope = Envelope::new(config, &report);
    emit(&render(&envelope, &report.table, format)?, path.as_deref())
}

fn dispatch(command: &Command) -> Result<(), CliError> {
    let name = command.name();
    match command {
        Command::Borel(a) => execute(name, a, |a| &a.common, |a| commands::borel(a, &a.common.quadrature()?)),
        Command::Apply(a) => execute(name, a, |a| &a.common, |a| commands::apply(a, &a.common.quadrature()?)),
        Command::Solve(a) => execute(name, a, |a| &a.common, |a| commands::solve(a, &a.common.quadrature()?)),
        Command::Zeros(a) => execute(name, a, |a| &a.common, commands::zeros),
        Command::ZetaSolve(a) => {
            execute(name, a, |a| &a.common, |a| commands::zeta_solve(a, &a.common.quadrature()?))
        }
        Command::Recover(a) => execute(name, a, |a| &a.common, |a| commands::recover(a, &a.common.quadrature()?)),
        Command::Catalog(a) => execute(name, a, |a| &a.common, commands::catalog),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = err.exit_code();
            if code == 2 {
                let mut cmd = Cli::command();
                cmd.build();
                let sub = cmd.find_subcommand_mut(cli.command.name()).map(|s| s.render_usage().to_string());
                eprintln!("error: {err}\n\n{}", sub.unwrap_or_default());
            }
            eprintln!("{}", json!({"error": {"code": err.code(), "message": err.to_string()}}));
            ExitCode::from(code)
        }
    }
}
