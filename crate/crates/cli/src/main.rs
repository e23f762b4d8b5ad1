mod config;
mod plotdata;
mod run;

use std::fs::File;
use std::io::{self, BufReader, BufWriter};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use serde::Serialize;

use config::{Cli, Experiment, ExperimentConfig};

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    threads: usize,
    files: &'a [String],
    exponent_violations: &'a [String],
}

fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var("QSINE_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!(
                "QSINE_THREADS must be a positive integer, got '{v}'"
            )),
        },
        Err(_) => Ok(None),
    }
}

fn plotdata(cli: &Cli) -> Result<()> {
    let path = cli.opts.input.as_ref().expect("validated");
    let input = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let x = cli.opts.x.as_deref();
    if cli.opts.out.as_os_str() == "-" {
        plotdata::melt(
            BufReader::new(input),
            io::stdout().lock(),
            x,
            &cli.opts.group,
        )
    } else {
        std::fs::create_dir_all(&cli.opts.out)?;
        let out = File::create(cli.opts.out.join("plotdata.csv"))?;
        plotdata::melt(
            BufReader::new(input),
            BufWriter::new(out),
            x,
            &cli.opts.group,
        )
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let usage = |msg: String| -> ! { Cli::command().error(ErrorKind::ValueValidation, msg).exit() };
    let cfg = ExperimentConfig::resolve(cli.experiment, &cli.opts).unwrap_or_else(|e| usage(e));
    let threads = threads_from_env().unwrap_or_else(|e| usage(e));
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };

    let result = pool.install(|| -> Result<ExitCode> {
        if cli.experiment == Experiment::Plotdata {
            plotdata(&cli)?;
            return Ok(ExitCode::SUCCESS);
        }
        let outcome = run::run(&cfg)?;
        let manifest = Manifest {
            tool: "qsine",
            version: env!("CARGO_PKG_VERSION"),
            config: &cfg,
            threads: rayon::current_num_threads(),
            files: &outcome.files,
            exponent_violations: &outcome.exponent_violations,
        };
        let path = cfg.out.join("manifest.json");
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(BufWriter::new(file), &manifest)?;
        for v in &outcome.exponent_violations {
            eprintln!("exponent bound violated: {v}");
        }
        Ok(if outcome.exponent_violations.is_empty() {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(3)
        })
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
