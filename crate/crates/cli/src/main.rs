//! `robcert` command-line entry point.
//!
//! Exit codes: 0 success, 2 configuration error, 3 contract violation,
//! 4 internal invariant failure.

mod args;
mod ops;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use sha2::{Digest, Sha256};

use args::{Cli, Command, Format};
use report::{ExperimentConfig, Status};
use robcert::task::Task;

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Lib(robcert::Error),
}

impl From<robcert::Error> for Failure {
    fn from(e: robcert::Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Lib(e) if e.is_contract_violation() => 3,
            Failure::Lib(e) if e.is_internal() => 4,
            Failure::Lib(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Config(m) => format!("config: {m}"),
            Failure::Lib(e) => format!("{}: {e}", e.code()),
        }
    }
}

fn load_task(cli: &Cli) -> Result<(Task, String, String), Failure> {
    let path = cli.task.as_ref().ok_or_else(|| Failure::Config("--task is required for this subcommand".into()))?;
    let bytes = std::fs::read(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Failure::Config("task file is not UTF-8".into()))?;
    let task = Task::from_json(&text)?;
    Ok((task, path.display().to_string(), hex::encode(Sha256::digest(&bytes))))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => ops::write_file(p, text),
        None => {
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Config(e.to_string()))?;
            Ok(())
        }
    }
}

fn convert(cli: &Cli, input: &PathBuf) -> Result<(), Failure> {
    let text = std::fs::read_to_string(input).map_err(|e| Failure::Config(format!("{}: {e}", input.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Failure::Config(e.to_string()))?;
    let rows = report::rows_of(&value)?;
    match cli.format {
        Format::Csv => {
            let mut buf = Vec::new();
            report::write_csv(&rows, &mut buf)?;
            emit(cli.out.as_ref(), &String::from_utf8_lossy(&buf))
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows).map_err(|e| Failure::Config(e.to_string()))?;
            s.push('\n');
            emit(cli.out.as_ref(), &s)
        }
    }
}

fn run(cli: &Cli) -> Result<Status, Failure> {
    if let Command::Report(a) = &cli.command {
        convert(cli, &a.input)?;
        return Ok(Status::Ok);
    }
    if cli.trials == 0 {
        return Err(Failure::Config("--trials must be positive".into()));
    }
    let started = chrono::Utc::now();
    let clock = Instant::now();
    let mut config = ExperimentConfig {
        command: cli.command.clone(),
        task: None,
        task_sha256: None,
        seed: cli.seed,
        trials: Some(cli.trials),
    };
    let report = match &cli.command {
        Command::Certify(_) | Command::Attack(_) | Command::Learn(_) => {
            let (task, path, digest) = load_task(cli)?;
            config.task = Some(path);
            config.task_sha256 = Some(digest);
            match &cli.command {
                Command::Certify(a) => ops::certify(&task, a, cli.seed, cli.trials)?,
                Command::Attack(a) => ops::attack(&task, a, cli.seed, cli.trials)?,
                Command::Learn(a) => ops::learn(&task, a, cli.seed, cli.trials)?,
                _ => unreachable!(),
            }
        }
        Command::Game(a) => {
            let (rep, n) = ops::game(a, cli.seed, cli.trials)?;
            config.trials = Some(n);
            rep
        }
        Command::VerifyConstructions(a) => {
            config.trials = None;
            ops::verify_constructions(a)?
        }
        Command::Report(_) => unreachable!(),
    };
    let text = report::envelope_json(&config, &report, started, clock.elapsed().as_millis());
    match (cli.format, &cli.out) {
        (Format::Json, out) => emit(out.as_ref(), &text)?,
        (Format::Csv, out) => {
            let mut buf = Vec::new();
            report::write_csv(&report.rows, &mut buf)?;
            let rows = String::from_utf8_lossy(&buf);
            match out {
                Some(p) => {
                    ops::write_file(p, &text)?;
                    ops::write_file(&p.with_extension("csv"), &rows)?;
                }
                None => emit(None, &rows)?,
            }
        }
    }
    Ok(report.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::ContractViolation) => {
            eprintln!("robcert: contract violation, see report");
            ExitCode::from(3)
        }
        Ok(Status::InternalFailure) => {
            eprintln!("robcert: internal invariant failure, see report");
            ExitCode::from(4)
        }
        Err(f) => {
            eprintln!("robcert: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
