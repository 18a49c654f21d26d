//! Thin command-line front end: `run <config>` executes an experiment
//! described by a key-value config file, `verify <suite>` runs a canned
//! verification suite. Exit codes: 0 all verdicts pass, 2 any fail,
//! 3 inconclusive, 1 usage or config error.

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use sobolev_lab::config::{parse_config, OutputFormat};
use sobolev_lab::estimate::Verdict;
use sobolev_lab::experiment::{canned_verify_config, emit, run_experiment, Report};

#[derive(Parser)]
#[command(name = "sobolev-lab", version, about = "Anisotropic seminorm and level-set laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (results never depend on this; wall time does).
    /// Defaults to SOBOLEV_LAB_THREADS or the machine's core count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the config sample budget.
    #[arg(long, global = true)]
    samples: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        /// Path to a key-value config file.
        config: std::path::PathBuf,
        /// Output format override: csv, json, or plot-data.
        #[arg(long)]
        format: Option<String>,
    },
    /// Run a canned verification suite: bp, prop21, prop22, or claims.
    Verify {
        suite: String,
        /// Output format override: csv, json, or plot-data.
        #[arg(long)]
        format: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match execute(cli) {
        Ok(verdict) => match verdict {
            Verdict::Pass => ExitCode::from(0),
            Verdict::Fail => ExitCode::from(2),
            Verdict::Inconclusive => ExitCode::from(3),
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(cli: Cli) -> sobolev_lab::Result<Verdict> {
    let threads = cli.threads.or_else(|| {
        std::env::var("SOBOLEV_LAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });

    let (mut cfg, format_override) = match &cli.command {
        Command::Run { config, format } => {
            let text = std::fs::read_to_string(config)?;
            (parse_config(&text)?, format.clone())
        }
        Command::Verify { suite, format } => (
            canned_verify_config(
                suite,
                cli.seed.unwrap_or(1),
                cli.samples.unwrap_or(100_000),
            )?,
            format.clone(),
        ),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = cli.samples {
        cfg.samples = samples;
    }
    if let Some(fmt) = format_override {
        cfg.output_format = fmt
            .parse::<OutputFormat>()
            .map_err(sobolev_lab::Error::InvalidArgument)?;
    }

    let start = Instant::now();
    let report = match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| sobolev_lab::Error::InvalidArgument(e.to_string()))?;
            pool.install(|| run_experiment(&cfg))?
        }
        None => run_experiment(&cfg)?,
    };
    let elapsed = start.elapsed();

    write_report(&report, &cli)?;
    eprintln!(
        "{}: verdict {:?} ({} rows) in {:.1} ms",
        cfg.experiment,
        report.verdict,
        report.rows.len(),
        elapsed.as_secs_f64() * 1e3
    );
    Ok(report.verdict)
}

fn write_report(report: &Report, cli: &Cli) -> sobolev_lab::Result<()> {
    let out_path = cli
        .out
        .clone()
        .or_else(|| report.config.output_path.as_ref().map(Into::into));
    let output = emit(report, report.config.output_format);
    match out_path {
        Some(path) => {
            std::fs::write(&path, &output.main)?;
            if let Some((suffix, bytes)) = &output.sidecar {
                let mut sidecar_path = path.clone().into_os_string();
                sidecar_path.push(suffix);
                std::fs::write(sidecar_path, bytes)?;
            }
        }
        None => {
            std::io::stdout().write_all(&output.main)?;
            if let Some((_, bytes)) = &output.sidecar {
                std::io::stdout().write_all(bytes)?;
            }
        }
    }
    Ok(())
}
