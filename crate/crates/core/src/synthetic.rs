//! Synthetic opinion labelings with a controlled dominant-opinion share per
//! community, stochastic block model graphs to put them on, and the
//! `dom_ratio x num_opinions` sweep.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::community::{LouvainConfig, Partition};
use crate::graph::{GraphBuilder, GraphError, LabeledGraph, Opinion};
use crate::metric::{analyze, AnalyzeOptions, MetricError};

#[derive(Debug, Error)]
pub enum SyntheticError {
    #[error("num_opinions must be at least 2, got {0}")]
    TooFewOpinions(u32),
    #[error("dom_ratio must lie in (0, 1], got {0}")]
    DomRatio(f64),
    #[error("block model needs at least one block of at least one node")]
    EmptyBlock,
    #[error("block model needs 0 <= p_out < p_in <= 1, got p_in={p_in}, p_out={p_out}")]
    Probabilities { p_in: f64, p_out: f64 },
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticLabelConfig {
    pub dom_ratio: f64,
    pub num_opinions: u32,
    pub seed: u64,
}

/// Members of a community of `size` that receive its dominant opinion:
/// `dom_ratio * size` rounded half up, and always the sole member of a
/// singleton community.
pub fn dominant_count(dom_ratio: f64, size: usize) -> usize {
    if size == 1 {
        return 1;
    }
    // The epsilon keeps products like 0.3 * 5 on the rounding boundary.
    ((dom_ratio * size as f64 + 0.5 + 1e-9).floor() as usize).min(size)
}

/// Replaces every label: per community a uniformly drawn dominant opinion
/// goes to `dominant_count` uniformly chosen members, and every other member
/// draws uniformly from the remaining opinions.
pub fn relabel(g: &LabeledGraph, p: &Partition, cfg: &SyntheticLabelConfig) -> Result<LabeledGraph, SyntheticError> {
    if cfg.num_opinions < 2 {
        return Err(SyntheticError::TooFewOpinions(cfg.num_opinions));
    }
    if !(cfg.dom_ratio > 0.0 && cfg.dom_ratio <= 1.0) {
        return Err(SyntheticError::DomRatio(cfg.dom_ratio));
    }
    p.covers(g).map_err(MetricError::from)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut opinions = vec![Opinion(0); g.node_count()];
    for members in p.members() {
        let dominant = rng.gen_range(0..cfg.num_opinions);
        let n_dom = dominant_count(cfg.dom_ratio, members.len());
        let mut is_dominant = vec![false; members.len()];
        for i in sample(&mut rng, members.len(), n_dom) {
            is_dominant[i] = true;
        }
        for (&node, dom) in members.iter().zip(is_dominant) {
            opinions[node] = if dom {
                Opinion(dominant)
            } else {
                let o = rng.gen_range(0..cfg.num_opinions - 1);
                Opinion(if o >= dominant { o + 1 } else { o })
            };
        }
    }
    Ok(g.with_opinions(opinions, cfg.num_opinions)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SbmConfig {
    pub blocks: usize,
    pub nodes_per_block: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub seed: u64,
}

/// Planted-partition block model with unit weights. Nodes are named
/// `0..blocks * nodes_per_block`, block `b` holding a contiguous id range;
/// every label starts as opinion 0.
pub fn generate_sbm(cfg: &SbmConfig) -> Result<(LabeledGraph, Partition), SyntheticError> {
    if cfg.blocks == 0 || cfg.nodes_per_block == 0 {
        return Err(SyntheticError::EmptyBlock);
    }
    if !(0.0 <= cfg.p_out && cfg.p_out < cfg.p_in && cfg.p_in <= 1.0) {
        return Err(SyntheticError::Probabilities {
            p_in: cfg.p_in,
            p_out: cfg.p_out,
        });
    }
    let n = cfg.blocks * cfg.nodes_per_block;
    let block = |i: usize| i / cfg.nodes_per_block;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.set_label(i.to_string(), Opinion(0))?;
    }
    for a in 0..cfg.blocks {
        for c in a..cfg.blocks {
            let p = if a == c { cfg.p_in } else { cfg.p_out };
            let (base_a, base_c, size) = (a * cfg.nodes_per_block, c * cfg.nodes_per_block, cfg.nodes_per_block);
            let pairs = if a == c { size * (size - 1) / 2 } else { size * size };
            for k in bernoulli_hits(pairs, p, &mut rng) {
                let (u, v) = if a == c {
                    let (i, j) = triangle_pair(k);
                    (base_a + i, base_a + j)
                } else {
                    (base_a + k / size, base_c + k % size)
                };
                b.add_edge(u.to_string(), v.to_string(), 1.0)?;
            }
        }
    }
    let g = b.build(Some(2))?;
    let planted = Partition::from_dense((0..n).map(block).collect()).expect("blocks are non-empty");
    Ok((g, planted))
}

/// Indices in `0..count` that succeed in independent Bernoulli(p) trials,
/// drawn by geometric skipping.
fn bernoulli_hits(count: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut hits = Vec::new();
    if p <= 0.0 {
        return hits;
    }
    if p >= 1.0 {
        return (0..count).collect();
    }
    let log_q = (1.0 - p).ln();
    let mut next = 0usize;
    loop {
        let u: f64 = 1.0 - rng.gen::<f64>();
        let skip = (u.ln() / log_q).floor();
        if skip >= (count - next) as f64 {
            return hits;
        }
        next += skip as usize;
        hits.push(next);
        next += 1;
        if next >= count {
            return hits;
        }
    }
}

/// The `k`-th pair `(i, j)` with `i < j` in the order (0,1), (0,2), (1,2), (0,3), ...
fn triangle_pair(k: usize) -> (usize, usize) {
    let mut j = ((((8 * k + 1) as f64).sqrt() + 1.0) / 2.0).floor() as usize;
    while j * (j - 1) / 2 > k {
        j -= 1;
    }
    while (j + 1) * j / 2 <= k {
        j += 1;
    }
    (k - j * (j - 1) / 2, j)
}

/// Seed for grid cell `index` derived from a master seed (SplitMix64 step).
pub fn cell_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub dom_ratios: Vec<f64>,
    pub num_opinions: Vec<u32>,
}

impl SweepGrid {
    /// `dom_ratio` 0.3..=1.0 by 0.1 and `num_opinions` 2..=10.
    pub fn full() -> Self {
        SweepGrid {
            dom_ratios: (3..=10).map(|i| i as f64 / 10.0).collect(),
            num_opinions: (2..=10).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub num_opinions: u32,
    pub dom_ratio: f64,
    pub mean_p: f64,
    pub std_p: f64,
    pub runs: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub cells: Vec<SweepCell>,
}

pub const SWEEP_CSV_HEADER: &str = "num_opinions,dom_ratio,mean_p,std_p,runs";

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            out.push_str(&format!(
                "{},{:.6},{:.6},{:.6},{}\n",
                c.num_opinions, c.dom_ratio, c.mean_p, c.std_p, c.runs
            ));
        }
        out
    }

    /// Cells of one `num_opinions` row in grid order.
    pub fn row(&self, num_opinions: u32) -> Vec<&SweepCell> {
        self.cells.iter().filter(|c| c.num_opinions == num_opinions).collect()
    }

    /// Spearman correlation between `dom_ratio` and mean score in one row.
    pub fn row_spearman(&self, num_opinions: u32) -> f64 {
        let row = self.row(num_opinions);
        let x: Vec<f64> = row.iter().map(|c| c.dom_ratio).collect();
        let y: Vec<f64> = row.iter().map(|c| c.mean_p).collect();
        spearman(&x, &y)
    }

    pub fn cell(&self, num_opinions: u32, dom_ratio: f64) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.num_opinions == num_opinions && (c.dom_ratio - dom_ratio).abs() < 1e-9)
    }
}

/// Relabels `g` over `communities` for every grid cell and runs the
/// multi-run protocol on each labeling. Cell `i` (row-major over
/// `num_opinions`, then `dom_ratio`) uses `cell_seed(seed, i)` for both the
/// labeling and the community-detection seeds.
pub fn sweep(
    g: &LabeledGraph,
    communities: &Partition,
    grid: &SweepGrid,
    runs: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<SweepTable, SyntheticError> {
    if grid.dom_ratios.is_empty() || grid.num_opinions.is_empty() {
        return Err(SyntheticError::EmptyGrid);
    }
    let body = || -> Result<SweepTable, SyntheticError> {
        let mut cells = Vec::new();
        let pairs = grid
            .num_opinions
            .iter()
            .flat_map(|&k| grid.dom_ratios.iter().map(move |&d| (k, d)));
        for (index, (num_opinions, dom_ratio)) in pairs.enumerate() {
            let seed = cell_seed(seed, index as u64);
            let labeled = relabel(
                g,
                communities,
                &SyntheticLabelConfig {
                    dom_ratio,
                    num_opinions,
                    seed,
                },
            )?;
            let report = analyze(
                &labeled,
                &AnalyzeOptions {
                    louvain: LouvainConfig::with_seed(seed),
                    runs,
                    threads: None,
                },
            )?;
            cells.push(SweepCell {
                num_opinions,
                dom_ratio,
                mean_p: report.polarization.mean,
                std_p: report.polarization.std,
                runs,
            });
        }
        Ok(SweepTable { cells })
    };
    match threads {
        None => body(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| MetricError::ThreadPool(e.to_string()))?
            .install(body),
    }
}

/// Mean P reported for the relabeled political retweet network, rows
/// `num_opinions` 2..=10, columns `dom_ratio` 0.3..=1.0.
pub const REFERENCE_TABLE: [[f64; 8]; 9] = [
    [0.22, 0.36, 0.45, 0.53, 0.70, 0.76, 0.74, 0.78],
    [0.15, 0.30, 0.44, 0.53, 0.58, 0.79, 0.74, 0.80],
    [0.15, 0.35, 0.45, 0.51, 0.60, 0.70, 0.73, 0.87],
    [0.15, 0.31, 0.49, 0.52, 0.60, 0.71, 0.82, 0.77],
    [0.14, 0.31, 0.43, 0.52, 0.60, 0.72, 0.80, 0.78],
    [0.16, 0.39, 0.46, 0.54, 0.62, 0.68, 0.73, 0.77],
    [0.18, 0.34, 0.47, 0.54, 0.64, 0.69, 0.72, 0.80],
    [0.18, 0.44, 0.46, 0.56, 0.62, 0.70, 0.75, 0.81],
    [0.18, 0.36, 0.48, 0.59, 0.64, 0.70, 0.75, 0.79],
];

pub fn reference_value(num_opinions: u32, dom_ratio: f64) -> Option<f64> {
    let row = num_opinions.checked_sub(2)? as usize;
    let col = (dom_ratio * 10.0).round() as i64 - 3;
    if (dom_ratio * 10.0 - (col + 3) as f64).abs() > 1e-9 || !(0..8).contains(&col) {
        return None;
    }
    REFERENCE_TABLE.get(row).map(|r| r[col as usize])
}

/// `(num_opinions, dom_ratio, |mean_p - reference|)` for every cell the
/// reference table covers.
pub fn reference_deviation(table: &SweepTable) -> Vec<(u32, f64, f64)> {
    table
        .cells
        .iter()
        .filter_map(|c| reference_value(c.num_opinions, c.dom_ratio).map(|r| (c.num_opinions, c.dom_ratio, (c.mean_p - r).abs())))
        .collect()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sbm(blocks: usize, size: usize, p_in: f64, p_out: f64, seed: u64) -> (LabeledGraph, Partition) {
        generate_sbm(&SbmConfig {
            blocks,
            nodes_per_block: size,
            p_in,
            p_out,
            seed,
        })
        .unwrap()
    }

    #[test]
    fn rounding_is_half_up() {
        assert_eq!(dominant_count(0.7, 10), 7);
        assert_eq!(dominant_count(0.3, 5), 2);
        assert_eq!(dominant_count(0.5, 3), 2);
        assert_eq!(dominant_count(0.3, 1), 1);
        assert_eq!(dominant_count(1.0, 4), 4);
    }

    #[test]
    fn full_dominance_makes_communities_uniform() {
        let (g, p) = sbm(4, 10, 0.5, 0.05, 1);
        let l = relabel(&g, &p, &SyntheticLabelConfig { dom_ratio: 1.0, num_opinions: 5, seed: 3 }).unwrap();
        for e in l.edges() {
            if p.community(e.source) == p.community(e.target) {
                assert_eq!(l.opinion(e.source), l.opinion(e.target));
            }
        }
    }

    #[test]
    fn dominant_share_is_exact() {
        let (g, p) = sbm(1, 10, 0.5, 0.0, 2);
        for seed in 0..50 {
            let l = relabel(&g, &p, &SyntheticLabelConfig { dom_ratio: 0.7, num_opinions: 4, seed }).unwrap();
            let mut counts = [0usize; 4];
            for o in l.opinions() {
                counts[o.index()] += 1;
            }
            // 7 share the dominant opinion; the other 3 may by chance not
            // pile onto a single opinion above 7.
            assert_eq!(*counts.iter().max().unwrap(), 7, "seed {seed}: {counts:?}");
        }
    }

    #[test]
    fn relabel_keeps_structure() {
        let (g, p) = sbm(3, 8, 0.6, 0.1, 4);
        let l = relabel(&g, &p, &SyntheticLabelConfig { dom_ratio: 0.4, num_opinions: 3, seed: 9 }).unwrap();
        assert_eq!(l.nodes(), g.nodes());
        assert_eq!(l.edges(), g.edges());
        assert_eq!(l.num_opinions(), 3);
    }

    #[test]
    fn relabel_rejects_bad_config() {
        let (g, p) = sbm(2, 3, 1.0, 0.0, 0);
        assert!(relabel(&g, &p, &SyntheticLabelConfig { dom_ratio: 0.5, num_opinions: 1, seed: 0 }).is_err());
        assert!(relabel(&g, &p, &SyntheticLabelConfig { dom_ratio: 0.0, num_opinions: 2, seed: 0 }).is_err());
    }

    #[test]
    fn disconnected_blocks_without_cross_probability() {
        let (g, p) = sbm(2, 6, 0.7, 0.0, 5);
        assert!(g.edges().iter().all(|e| p.community(e.source) == p.community(e.target)));
    }

    #[test]
    fn certain_blocks_are_cliques() {
        let (g, _) = sbm(2, 5, 1.0, 0.0, 5);
        assert_eq!(g.edge_count(), 20);
    }

    #[test]
    fn sbm_rejects_bad_inputs() {
        let bad = |blocks, size, p_in, p_out| {
            generate_sbm(&SbmConfig { blocks, nodes_per_block: size, p_in, p_out, seed: 0 }).is_err()
        };
        assert!(bad(0, 5, 0.5, 0.1));
        assert!(bad(2, 0, 0.5, 0.1));
        assert!(bad(2, 5, 0.1, 0.5));
        assert!(bad(2, 5, 1.5, 0.1));
    }

    #[test]
    fn triangle_pairs_enumerate_in_order() {
        let mut expected = Vec::new();
        for j in 1..40 {
            for i in 0..j {
                expected.push((i, j));
            }
        }
        let got: Vec<_> = (0..expected.len()).map(triangle_pair).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn bernoulli_hits_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(bernoulli_hits(100, 0.0, &mut rng).is_empty());
        assert_eq!(bernoulli_hits(5, 1.0, &mut rng), vec![0, 1, 2, 3, 4]);
        let hits = bernoulli_hits(200_000, 0.1, &mut rng);
        assert!(hits.windows(2).all(|w| w[0] < w[1]));
        assert!((hits.len() as f64 - 20_000.0).abs() < 600.0, "{}", hits.len());
    }

    #[test]
    fn spearman_basics() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), -1.0);
        assert_eq!(ranks(&[5.0, 1.0, 5.0]), vec![2.5, 1.0, 2.5]);
    }

    #[test]
    fn reference_lookup() {
        assert_eq!(reference_value(2, 0.3), Some(0.22));
        assert_eq!(reference_value(2, 1.0), Some(0.78));
        assert_eq!(reference_value(10, 1.0), Some(0.79));
        assert_eq!(reference_value(11, 1.0), None);
        assert_eq!(reference_value(2, 0.25), None);
    }

    #[test]
    fn cell_seeds_differ() {
        let seeds: std::collections::HashSet<_> = (0..100).map(|i| cell_seed(7, i)).collect();
        assert_eq!(seeds.len(), 100);
    }

    #[test]
    fn full_grid_matches_reference_shape() {
        let grid = SweepGrid::full();
        assert_eq!(grid.dom_ratios.len(), 8);
        assert_eq!(grid.num_opinions.len(), 9);
        assert!(grid.dom_ratios.iter().all(|&d| reference_value(2, d).is_some()));
    }
}
