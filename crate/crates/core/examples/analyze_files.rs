// Loads a graph from an edge list and a label file, then writes the
// report as CSV. Pass your own files as arguments or use the bundled
// karate club data.
//
// Run with `cargo run --release --example analyze_files -- EDGES LABELS`.

use std::path::{Path, PathBuf};

use polarimeter::graph::InputFormat;
use polarimeter::metric::{analyze, AnalyzeOptions};
use polarimeter::report::{render, ReportFormat};
use polarimeter::{load_graph, LouvainConfig};

pub fn run_example_on(edges: &Path, labels: &Path) -> Result<String, Box<dyn std::error::Error>> {
    let loaded = load_graph(edges, labels, InputFormat::TsvEdgeList)?;
    let opts = AnalyzeOptions {
        louvain: LouvainConfig::with_seed(7),
        runs: 20,
        threads: None,
    };
    let report = analyze(&loaded.graph, &opts)?;
    Ok(render(&report, ReportFormat::Csv))
}

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    run_example_on(&data.join("karate.tsv"), &data.join("karate_factions.tsv"))
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<PathBuf> = std::env::args_os().skip(1).map(PathBuf::from).collect();
    let text = match &args[..] {
        [edges, labels] => run_example_on(edges, labels)?,
        [] => run_example()?,
        _ => return Err("usage: analyze_files [EDGES LABELS]".into()),
    };
    print!("{text}");
    Ok(())
}
