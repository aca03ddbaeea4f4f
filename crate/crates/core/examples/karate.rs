// Scores Zachary's karate club labeled with the two factions that formed
// after the split, averaging over 100 Louvain runs.
//
// Run with `cargo run --release --example karate`.

use polarimeter::cli::karate;
use polarimeter::metric::{analyze, AnalyzeOptions};
use polarimeter::report::{render, ReportFormat};
use polarimeter::LouvainConfig;

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let g = karate()?;
    let opts = AnalyzeOptions {
        louvain: LouvainConfig::with_seed(7),
        ..Default::default()
    };
    let report = analyze(&g, &opts)?;
    Ok(render(&report, ReportFormat::Json))
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{}", run_example()?);
    Ok(())
}
