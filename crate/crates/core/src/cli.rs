//! Command-line front end shared by the `polarimeter` binary and tests.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::community::{louvain, CommunityError, LouvainConfig};
use crate::graph::{load_graph, GraphBuilder, GraphError, InputFormat, LabeledGraph, Opinion};
use crate::metric::{analyze, AnalyzeOptions, MetricError};
use crate::report::{render, ReportFormat};
use crate::stance::{build_retweet_network, write_network, StanceError, StanceRecordSet};
use crate::synthetic::{generate_sbm, reference_deviation, sweep, SbmConfig, SweepGrid, SyntheticError};

/// Seed used when none is given outside CI.
pub const DEFAULT_SEED: u64 = 7;

pub const KARATE_EDGES: &str = include_str!("../data/karate.tsv");
pub const KARATE_FACTIONS: &str = include_str!("../data/karate_factions.tsv");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Stance(#[from] StanceError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Synthetic(#[from] SyntheticError),
}

impl CliError {
    /// 1 for bad input or flags, 2 for a broken internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Metric(e) | CliError::Synthetic(SyntheticError::Metric(e)) => metric_exit_code(e),
            _ => 1,
        }
    }
}

fn metric_exit_code(e: &MetricError) -> i32 {
    match e {
        MetricError::NoEdgeMass | MetricError::NoRuns | MetricError::Community(CommunityError::ZeroWeight) => 1,
        MetricError::Community(CommunityError::Config(_)) => 1,
        _ => 2,
    }
}

#[derive(Debug, Parser)]
#[command(name = "polarimeter", version, about = "Multi-opinion polarization scores for opinion-labeled networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a labeled graph over repeated community-detection runs.
    Analyze(AnalyzeArgs),
    /// Relabel a graph over a dom_ratio x num_opinions grid and score every cell.
    Sweep(SweepArgs),
    /// Build a tri-opinion retweet network from archived stance records.
    BuildNetwork(BuildNetworkArgs),
    /// Score the bundled karate club graph with its two factions.
    DemoKarate(DemoArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Debug, Args, Clone)]
pub struct RunArgs {
    /// Community-detection runs to average over.
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    /// Master seed; run r uses seed + r. Required when CI is set.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "POLARIMETER_THREADS")]
    pub threads: Option<usize>,
    /// Louvain resolution.
    #[arg(long, default_value_t = 1.0)]
    pub resolution: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Edge list: `u v [w]` rows, tab or comma separated.
    #[arg(long)]
    pub graph: PathBuf,
    /// Label file: `u opinion_index` rows.
    #[arg(long)]
    pub labels: PathBuf,
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    /// Also write the partition of the first run as `node<TAB>community`.
    #[arg(long)]
    pub partition_out: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Block model surrogate as BLOCKSxNODES, e.g. 20x250.
    #[arg(long, conflicts_with = "graph")]
    pub sbm: Option<String>,
    /// Within-block edge probability for --sbm.
    #[arg(long, default_value_t = 0.05)]
    pub p_in: f64,
    /// Cross-block edge probability for --sbm.
    #[arg(long, default_value_t = 0.001)]
    pub p_out: f64,
    /// Edge list of a real network to relabel (communities come from Louvain).
    #[arg(long, requires = "labels")]
    pub graph: Option<PathBuf>,
    /// Label file for --graph; its labels are replaced.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// dom_ratio values as START:END:STEP or a comma list.
    #[arg(long, default_value = "0.3:1.0:0.1")]
    pub dom_ratios: String,
    /// num_opinions values as START:END or a comma list.
    #[arg(long, default_value = "2:10")]
    pub num_opinions: String,
    /// Print |mean - reference| per cell to stderr (for the political retweet network).
    #[arg(long)]
    pub compare_reference: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct BuildNetworkArgs {
    /// JSON-lines stance records.
    #[arg(long)]
    pub records: PathBuf,
    /// Output prefix for .edges.tsv, .labels.tsv and .names.tsv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    #[command(flatten)]
    pub run: RunArgs,
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match execute(&cli.command, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command. Results go to `out` unless an output file is
/// named; diagnostics go to `log`.
pub fn execute(cmd: &Command, out: &mut dyn Write, log: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Analyze(a) => {
            let loaded = load_graph(&a.graph, &a.labels, InputFormat::TsvEdgeList)?;
            if loaded.self_loops_dropped > 0 {
                let _ = writeln!(log, "warning: dropped {} self-loop rows", loaded.self_loops_dropped);
            }
            analyze_graph(&loaded.graph, &a.run, a.format, out)?;
            if let Some(path) = &a.partition_out {
                let cfg = louvain_config(&a.run)?;
                let p = louvain(&loaded.graph, &cfg).map_err(MetricError::from)?;
                let file = create(path)?;
                p.write_tsv(&loaded.graph, file).map_err(|source| io_err(path, source))?;
            }
            Ok(())
        }
        Command::DemoKarate(d) => {
            let g = karate()?;
            analyze_graph(&g, &d.run, d.format, out)?;
            Ok(())
        }
        Command::Sweep(s) => run_sweep(s, out, log),
        Command::BuildNetwork(b) => {
            let records = StanceRecordSet::load(&b.records)?;
            let net = build_retweet_network(&records)?;
            write_network(&net, &b.out).map_err(|source| io_err(&b.out, source))?;
            let _ = writeln!(
                log,
                "users: {}, edges: {}, retweet events: {}, self-retweets dropped: {}, empty retweeter ids skipped: {}, users without stance items: {}",
                net.graph.node_count(),
                net.graph.edge_count(),
                records.retweet_events(),
                net.self_retweets_dropped,
                net.empty_retweeters_skipped,
                net.scores.unscored,
            );
            Ok(())
        }
    }
}

fn resolve_seed(run: &RunArgs) -> Result<u64, CliError> {
    match run.seed {
        Some(s) => Ok(s),
        None if std::env::var_os("CI").is_some() => Err(CliError::Usage("--seed is required when CI is set".into())),
        None => Ok(DEFAULT_SEED),
    }
}

fn louvain_config(run: &RunArgs) -> Result<LouvainConfig, CliError> {
    Ok(LouvainConfig {
        seed: resolve_seed(run)?,
        resolution: run.resolution,
        ..Default::default()
    })
}

fn analyze_graph(g: &LabeledGraph, run: &RunArgs, format: FormatArg, out: &mut dyn Write) -> Result<(), CliError> {
    let opts = AnalyzeOptions {
        louvain: louvain_config(run)?,
        runs: run.runs,
        threads: run.threads,
    };
    let report = analyze(g, &opts)?;
    emit(&render(&report, format.into()), run.out.as_deref(), out)
}

fn run_sweep(s: &SweepArgs, out: &mut dyn Write, log: &mut dyn Write) -> Result<(), CliError> {
    let seed = resolve_seed(&s.run)?;
    let grid = SweepGrid {
        dom_ratios: parse_real_grid(&s.dom_ratios)?,
        num_opinions: parse_int_grid(&s.num_opinions)?,
    };
    let (g, communities) = match (&s.sbm, &s.graph, &s.labels) {
        (Some(spec), None, _) => {
            let (blocks, nodes_per_block) = parse_sbm(spec)?;
            generate_sbm(&SbmConfig {
                blocks,
                nodes_per_block,
                p_in: s.p_in,
                p_out: s.p_out,
                seed,
            })?
        }
        (None, Some(graph), Some(labels)) => {
            let g = load_graph(graph, labels, InputFormat::TsvEdgeList)?.graph;
            let p = louvain(&g, &louvain_config(&s.run)?).map_err(MetricError::from)?;
            (g, p)
        }
        _ => return Err(CliError::Usage("sweep needs either --sbm or --graph with --labels".into())),
    };
    let table = sweep(&g, &communities, &grid, s.run.runs, seed, s.run.threads)?;
    if s.compare_reference {
        for (k, d, dev) in reference_deviation(&table) {
            let flag = if dev <= 0.10 { "ok" } else { "off" };
            let _ = writeln!(log, "num_opinions={k} dom_ratio={d:.1} |mean-reference|={dev:.6} {flag}");
        }
    }
    emit(&table.to_csv(), s.run.out.as_deref(), out)
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| io_err(p, source)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|source| io_err(Path::new("<stdout>"), source)),
    }
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, CliError> {
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|source| io_err(path, source))
}

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_owned(),
        source,
    }
}

/// The bundled karate club graph labeled with the two post-split factions.
pub fn karate() -> Result<LabeledGraph, GraphError> {
    let mut b = GraphBuilder::new();
    for line in KARATE_FACTIONS.lines().filter(|l| !l.starts_with('#')) {
        let (node, faction) = line.split_once('\t').expect("bundled label rows are tab separated");
        b.set_label(node, Opinion(faction.parse().expect("bundled faction is an integer")))?;
    }
    for line in KARATE_EDGES.lines().filter(|l| !l.starts_with('#')) {
        let mut f = line.split('\t');
        let (u, v) = (f.next().unwrap(), f.next().unwrap());
        b.add_edge(u, v, 1.0)?;
    }
    b.build(Some(2))
}

/// `20x250` -> (20, 250).
pub fn parse_sbm(spec: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("--sbm expects BLOCKSxNODES, got `{spec}`"));
    let (b, n) = spec.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((b.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?))
}

/// `START:END:STEP` (inclusive) or `a,b,c`.
pub fn parse_real_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("expected START:END:STEP or a comma list, got `{spec}`"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = spec.split(':').collect();
    match parts[..] {
        [start, end, step] => {
            let (start, end, step) = (num(start)?, num(end)?, num(step)?);
            if !(step > 0.0) || end < start {
                return Err(bad());
            }
            let n = ((end - start) / step + 1e-9).floor() as usize;
            // Rounded to ten decimals so 0.3 + 4 * 0.1 prints and compares as 0.7.
            Ok((0..=n).map(|i| ((start + i as f64 * step) * 1e10).round() / 1e10).collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(bad()),
    }
}

/// `START:END` (inclusive) or `a,b,c`.
pub fn parse_int_grid(spec: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Usage(format!("expected START:END or a comma list, got `{spec}`"));
    let num = |s: &str| s.trim().parse::<u32>().map_err(|_| bad());
    match spec.split(':').collect::<Vec<_>>()[..] {
        [start, end] => {
            let (start, end) = (num(start)?, num(end)?);
            if end < start {
                return Err(bad());
            }
            Ok((start..=end).collect())
        }
        [list] => list.split(',').map(num).collect(),
        _ => Err(bad()),
    }
}
