//! Multi-opinion polarization score.
//!
//! Edge weights are first scaled by how common the endpoint opinions are,
//! then tallied into two opinion-by-opinion matrices: one for edges inside a
//! community and one for edges between communities. Each matrix yields a
//! component score from its share of cross-opinion mass, and the final score
//! is their mass-weighted average.

use rayon::prelude::*;
use thiserror::Error;

use crate::community::{louvain, CommunityError, LouvainConfig, Partition};
use crate::graph::{census, LabeledGraph, OpinionCensus};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error(transparent)]
    Community(#[from] CommunityError),
    #[error("frequency matrix entry ({row}, {col}) is negative: {value}")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("frequency matrices are both empty; the graph has no weighted edges")]
    NoEdgeMass,
    #[error("component score {0} is outside [0, 1]")]
    ComponentOutOfRange(f64),
    #[error("at least one run is required")]
    NoRuns,
    #[error("cannot build a thread pool: {0}")]
    ThreadPool(String),
}

/// Scaled weight of every edge, aligned with [`LabeledGraph::edges`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledWeights(pub Vec<f64>);

impl ScaledWeights {
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Each edge weight times the mean population share of its two endpoint
/// opinions.
pub fn scale_weights(g: &LabeledGraph, census: &OpinionCensus) -> ScaledWeights {
    ScaledWeights(
        g.edges()
            .iter()
            .map(|e| {
                let a = census.fraction(g.opinion(e.source));
                let b = census.fraction(g.opinion(e.target));
                (a + b) / 2.0 * e.weight
            })
            .collect(),
    )
}

/// Square symmetric matrix indexed by opinion.
#[derive(Clone, Debug, PartialEq)]
pub struct OpinionMatrix {
    size: usize,
    cells: Vec<f64>,
}

impl OpinionMatrix {
    pub fn zeros(size: usize) -> Self {
        OpinionMatrix {
            size,
            cells: vec![0.0; size * size],
        }
    }

    /// Builds a matrix from rows; used to evaluate hand-made tallies.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let size = rows.len();
        assert!(rows.iter().all(|r| r.len() == size), "matrix must be square");
        OpinionMatrix {
            size,
            cells: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.cells[row * self.size + col]
    }

    fn set(&mut self, row: usize, col: usize, value: f64) {
        self.cells[row * self.size + col] = value;
    }

    /// Adds `w` to the `(a, b)` tally, keeping `(b, a)` equal to it.
    pub fn add(&mut self, a: usize, b: usize, w: f64) {
        let v = self.get(a, b) + w;
        self.set(a, b, v);
        if a != b {
            self.set(b, a, v);
        }
    }

    /// Sum over the strict upper triangle: cross-opinion mass.
    pub fn cross(&self) -> f64 {
        (0..self.size)
            .flat_map(|m| (m + 1..self.size).map(move |n| (m, n)))
            .map(|(m, n)| self.get(m, n))
            .sum()
    }

    /// Sum over the diagonal: same-opinion mass.
    pub fn same(&self) -> f64 {
        (0..self.size).map(|m| self.get(m, m)).sum()
    }

    /// Sum over the upper triangle including the diagonal.
    pub fn total(&self) -> f64 {
        self.same() + self.cross()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyMatrices {
    pub within: OpinionMatrix,
    pub between: OpinionMatrix,
}

/// Tallies scaled edge weights by endpoint opinions, separately for edges
/// inside a community and edges that cross communities.
pub fn accumulate(g: &LabeledGraph, scaled: &ScaledWeights, p: &Partition) -> Result<FrequencyMatrices, MetricError> {
    p.covers(g)?;
    let k = g.num_opinions() as usize;
    let mut fm = FrequencyMatrices {
        within: OpinionMatrix::zeros(k),
        between: OpinionMatrix::zeros(k),
    };
    for (e, &w) in g.edges().iter().zip(&scaled.0) {
        let target = if p.community(e.source) == p.community(e.target) {
            &mut fm.within
        } else {
            &mut fm.between
        };
        target.add(g.opinion(e.source).index(), g.opinion(e.target).index(), w);
    }
    Ok(fm)
}

/// `1 - 2 * cap(cross / total)` where `cap` clamps at one half. An empty
/// matrix scores 0.
pub fn polarization_component(f: &OpinionMatrix) -> Result<f64, MetricError> {
    for row in 0..f.size() {
        for col in 0..f.size() {
            let value = f.get(row, col);
            if value < 0.0 {
                return Err(MetricError::NegativeEntry { row, col, value });
            }
        }
    }
    let total = f.total();
    if total == 0.0 {
        return Ok(0.0);
    }
    let ratio = f.cross() / total;
    let capped = if ratio < 0.5 { ratio } else { 0.5 };
    Ok(1.0 - 2.0 * capped)
}

/// Mass-weighted average of the within and between scores.
pub fn combine(fm: &FrequencyMatrices, p_within: f64, p_between: f64) -> Result<f64, MetricError> {
    for p in [p_within, p_between] {
        if !(0.0..=1.0).contains(&p) {
            return Err(MetricError::ComponentOutOfRange(p));
        }
    }
    let (sw, sb) = (fm.within.total(), fm.between.total());
    if sw + sb == 0.0 {
        return Err(MetricError::NoEdgeMass);
    }
    if sb == 0.0 {
        return Ok(p_within);
    }
    if sw == 0.0 {
        return Ok(p_between);
    }
    Ok((sw * p_within + sb * p_between) / (sw + sb))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scores {
    pub p_within: f64,
    pub p_between: f64,
    pub polarization: f64,
}

/// Polarization of a labeled graph under a fixed community structure.
pub fn score(g: &LabeledGraph, p: &Partition) -> Result<Scores, MetricError> {
    let scaled = scale_weights(g, &census(g));
    let fm = accumulate(g, &scaled, p)?;
    score_matrices(&fm)
}

pub fn score_matrices(fm: &FrequencyMatrices) -> Result<Scores, MetricError> {
    let p_within = polarization_component(&fm.within)?;
    let p_between = polarization_component(&fm.between)?;
    let polarization = combine(fm, p_within, p_between)?;
    Ok(Scores {
        p_within,
        p_between,
        polarization,
    })
}

/// One community-detection run and its scores.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub seed: u64,
    pub scores: Scores,
    pub communities: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let mean = stable_sum(values) / values.len() as f64;
        let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let std = (stable_sum(&sq) / values.len() as f64).sqrt();
        Summary {
            mean,
            std,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

// Sorting first makes the result independent of the order runs finished in.
fn stable_sum(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolarizationReport {
    pub nodes: usize,
    pub edges: usize,
    pub num_opinions: u32,
    pub seed: u64,
    pub runs: Vec<RunResult>,
    pub p_within: Summary,
    pub p_between: Summary,
    pub polarization: Summary,
    pub communities: Summary,
}

impl PolarizationReport {
    pub fn from_runs(g: &LabeledGraph, seed: u64, runs: Vec<RunResult>) -> Result<Self, MetricError> {
        if runs.is_empty() {
            return Err(MetricError::NoRuns);
        }
        let collect = |f: fn(&RunResult) -> f64| runs.iter().map(f).collect::<Vec<_>>();
        Ok(PolarizationReport {
            nodes: g.node_count(),
            edges: g.edge_count(),
            num_opinions: g.num_opinions(),
            seed,
            p_within: Summary::of(&collect(|r| r.scores.p_within)),
            p_between: Summary::of(&collect(|r| r.scores.p_between)),
            polarization: Summary::of(&collect(|r| r.scores.polarization)),
            communities: Summary::of(&collect(|r| r.communities as f64)),
            runs,
        })
    }
}

/// Options for the multi-run protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyzeOptions {
    pub louvain: LouvainConfig,
    pub runs: usize,
    /// Worker cap; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            louvain: LouvainConfig::default(),
            runs: 100,
            threads: None,
        }
    }
}

/// Runs community detection `runs` times with seeds `seed, seed + 1, ...`
/// and scores every resulting partition.
pub fn analyze(g: &LabeledGraph, opts: &AnalyzeOptions) -> Result<PolarizationReport, MetricError> {
    if opts.runs == 0 {
        return Err(MetricError::NoRuns);
    }
    let scaled = scale_weights(g, &census(g));
    let one_run = |r: usize| -> Result<RunResult, MetricError> {
        let seed = opts.louvain.seed.wrapping_add(r as u64);
        let cfg = LouvainConfig { seed, ..opts.louvain };
        let p = louvain(g, &cfg)?;
        let scores = score_matrices(&accumulate(g, &scaled, &p)?)?;
        Ok(RunResult {
            seed,
            scores,
            communities: p.count(),
        })
    };
    let runs = run_indexed(opts.runs, opts.threads, one_run)?;
    PolarizationReport::from_runs(g, opts.louvain.seed, runs)
}

/// Evaluates `f(0..n)` in parallel, returning results in index order.
pub(crate) fn run_indexed<T, F>(n: usize, threads: Option<usize>, f: F) -> Result<Vec<T>, MetricError>
where
    T: Send,
    F: Fn(usize) -> Result<T, MetricError> + Sync,
{
    let work = || (0..n).into_par_iter().map(&f).collect::<Result<Vec<_>, _>>();
    match threads {
        None => work(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| MetricError::ThreadPool(e.to_string()))?
            .install(work),
    }
}
