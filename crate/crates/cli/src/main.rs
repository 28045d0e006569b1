mod args;
mod commands;
mod error;

use std::collections::BTreeMap;
use std::time::Instant;

use clap::Parser;
use serde::Serialize;

use args::{Cli, Command};
use commands::Context;
use error::CliError;

/// Written as one JSON line on standard error after every run.
#[derive(Serialize)]
struct RunManifest<'a> {
    subcommand: &'static str,
    tool_version: &'static str,
    args: &'a Cli,
    resolved_config: Option<serde_json::Value>,
    inputs: &'a BTreeMap<String, String>,
    seeds: &'a [u64],
    duration_ms: u128,
    exit_code: i32,
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Compress(_) => "compress",
        Command::Convert(_) => "convert",
        Command::Stats(_) => "stats",
        Command::Coverage(_) => "coverage",
        Command::Train(_) => "train",
        Command::Disambiguate(_) => "disambiguate",
        Command::Evaluate(_) => "evaluate",
    }
}

fn run(cli: &Cli, ctx: &mut Context) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::usage("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::internal(e.to_string()))?;
    }
    match &cli.command {
        Command::Compress(a) => commands::compress(ctx, a),
        Command::Convert(a) => commands::convert(ctx, a),
        Command::Stats(a) => commands::stats(ctx, a),
        Command::Coverage(a) => commands::coverage_cmd(ctx, a),
        Command::Train(a) => commands::train(ctx, a),
        Command::Disambiguate(a) => commands::disambiguate(ctx, a),
        Command::Evaluate(a) => commands::evaluate(ctx, a),
    }?;
    commands::flush_stdout()
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SENSEFOLD_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let start = Instant::now();
    let mut ctx = Context::default();
    let result = run(&cli, &mut ctx);
    let exit_code = result.as_ref().err().map_or(0, |e| e.code);
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    let resolved_config = match &cli.command {
        Command::Train(a) => serde_json::to_value(a.hyper.config(ctx.seeds.first().copied().unwrap_or(0))).ok(),
        _ => None,
    };
    let manifest = RunManifest {
        subcommand: subcommand_name(&cli.command),
        tool_version: env!("CARGO_PKG_VERSION"),
        args: &cli,
        resolved_config,
        inputs: &ctx.inputs,
        seeds: &ctx.seeds,
        duration_ms: start.elapsed().as_millis(),
        exit_code,
    };
    match serde_json::to_string(&manifest) {
        Ok(json) => eprintln!("{json}"),
        Err(e) => log::error!("could not serialize run manifest: {e}"),
    }
    std::process::exit(exit_code);
}
