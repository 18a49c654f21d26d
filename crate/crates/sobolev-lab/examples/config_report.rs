//! Library-level use of the config grammar and report emission: parse a
//! config from text, run it, and emit CSV plus JSON. Equivalent to
//! `sobolev-lab run <file>`.
//!
//! ```bash
//! cargo run --release --example config_report
//! ```

use sobolev_lab::config::{parse_config, OutputFormat};
use sobolev_lab::experiment::{emit, run_experiment};

const CONFIG: &str = "\
# Small-threshold limit for the unit step against 2|K| ||f||_1 = 4.
experiment = small-lambda
seed = 42
samples = 50000
n = 1
p = 1
body.shape = box
body.half_widths = 1
fn.kind = indicator
fn.center = 0.5
fn.region.shape = box
fn.region.half_widths = 0.5
lambda.list = 0.5, 0.1, 0.01, 0.004
";

fn main() -> sobolev_lab::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let report = run_experiment(&cfg)?;

    println!("--- csv ---");
    print!("{}", String::from_utf8_lossy(&emit(&report, OutputFormat::Csv).main));

    println!("--- json ---");
    print!("{}", String::from_utf8_lossy(&emit(&report, OutputFormat::Json).main));

    println!("--- verdict: {:?} ---", report.verdict);
    Ok(())
}
