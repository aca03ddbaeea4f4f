//! Louvain modularity optimization on weighted undirected graphs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::LabeledGraph;

#[derive(Debug, Error, PartialEq)]
pub enum CommunityError {
    #[error("modularity is undefined for a graph with zero total edge weight")]
    ZeroWeight,
    #[error("partition covers {partition} nodes but the graph has {graph}")]
    SizeMismatch { partition: usize, graph: usize },
    #[error("invalid Louvain configuration: {0}")]
    Config(&'static str),
    #[error("community ids must be contiguous from 0; id {0} is empty")]
    EmptyCommunity(usize),
}

/// Node index to community id, ids dense in `0..k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Builds a partition from arbitrary labels, renumbering them densely in
    /// order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Partition {
        let mut remap = std::collections::HashMap::new();
        let assignment = labels
            .iter()
            .map(|&l| {
                let next = remap.len();
                *remap.entry(l).or_insert(next)
            })
            .collect();
        Partition {
            assignment,
            k: remap.len(),
        }
    }

    /// Takes an assignment that must already use every id in `0..k`.
    pub fn from_dense(assignment: Vec<usize>) -> Result<Partition, CommunityError> {
        let k = assignment.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut seen = vec![false; k];
        for &c in &assignment {
            seen[c] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(CommunityError::EmptyCommunity(empty));
        }
        Ok(Partition { assignment, k })
    }

    pub fn singletons(n: usize) -> Partition {
        Partition {
            assignment: (0..n).collect(),
            k: n,
        }
    }

    pub fn whole(n: usize) -> Partition {
        Partition {
            assignment: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    pub fn community(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Number of communities.
    pub fn count(&self) -> usize {
        self.k
    }

    /// Members of each community, in node index order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }

    pub fn covers(&self, g: &LabeledGraph) -> Result<(), CommunityError> {
        if self.len() == g.node_count() {
            Ok(())
        } else {
            Err(CommunityError::SizeMismatch {
                partition: self.len(),
                graph: g.node_count(),
            })
        }
    }

    /// Writes `node\tcommunity` rows.
    pub fn write_tsv<W: std::io::Write>(&self, g: &LabeledGraph, mut out: W) -> std::io::Result<()> {
        for (id, c) in g.nodes().iter().zip(&self.assignment) {
            writeln!(out, "{id}\t{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LouvainConfig {
    pub seed: u64,
    pub resolution: f64,
    /// A level whose sweeps raise modularity by less than this ends the run.
    pub min_modularity_gain: f64,
}

impl Default for LouvainConfig {
    fn default() -> Self {
        LouvainConfig {
            seed: 0,
            resolution: 1.0,
            min_modularity_gain: 1e-7,
        }
    }
}

impl LouvainConfig {
    pub fn with_seed(seed: u64) -> Self {
        LouvainConfig {
            seed,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<(), CommunityError> {
        if !(self.resolution > 0.0) {
            return Err(CommunityError::Config("resolution must be positive"));
        }
        if !(self.min_modularity_gain > 0.0) {
            return Err(CommunityError::Config("min_modularity_gain must be positive"));
        }
        Ok(())
    }
}

/// Weighted Newman-Girvan modularity with a resolution parameter.
pub fn modularity(g: &LabeledGraph, p: &Partition, resolution: f64) -> Result<f64, CommunityError> {
    p.covers(g)?;
    let m = g.total_weight();
    if m <= 0.0 {
        return Err(CommunityError::ZeroWeight);
    }
    let mut internal = vec![0.0; p.count()];
    let mut total = vec![0.0; p.count()];
    for e in g.edges() {
        let (cu, cv) = (p.community(e.source), p.community(e.target));
        if cu == cv {
            internal[cu] += 2.0 * e.weight;
        }
        total[cu] += e.weight;
        total[cv] += e.weight;
    }
    let two_m = 2.0 * m;
    Ok(internal
        .iter()
        .zip(&total)
        .map(|(i, t)| i / two_m - resolution * (t / two_m) * (t / two_m))
        .sum())
}

/// Result of a Louvain run with the modularity recorded after every sweep.
#[derive(Clone, Debug)]
pub struct LouvainTrace {
    pub partition: Partition,
    /// Modularity of the initial singleton partition followed by the value
    /// after each local-move sweep, across all levels.
    pub modularity: Vec<f64>,
    pub levels: usize,
    /// Original nodes grouped into the super-nodes of the last level that
    /// ran local moves; the result cannot gain by moving any one of them.
    pub final_level_nodes: Partition,
}

pub fn louvain(g: &LabeledGraph, cfg: &LouvainConfig) -> Result<Partition, CommunityError> {
    louvain_traced(g, cfg).map(|t| t.partition)
}

pub fn louvain_traced(g: &LabeledGraph, cfg: &LouvainConfig) -> Result<LouvainTrace, CommunityError> {
    cfg.validate()?;
    if g.total_weight() <= 0.0 {
        return Err(CommunityError::ZeroWeight);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut level = LevelGraph::from_graph(g);
    // Community of every original node in terms of current super-nodes.
    let mut membership: Vec<usize> = (0..g.node_count()).collect();
    let mut trace = vec![level.modularity(&(0..level.len()).collect::<Vec<_>>(), cfg.resolution)];
    let mut levels = 0;
    let mut final_level_nodes = membership.clone();

    loop {
        final_level_nodes.clone_from(&membership);
        let start = *trace.last().unwrap();
        let (community, moved) = level.local_moves(cfg.resolution, &mut rng, &mut trace);
        levels += 1;
        let gain = trace.last().unwrap() - start;
        if !moved {
            break;
        }
        let community = Partition::from_labels(&community);
        for m in membership.iter_mut() {
            *m = community.community(*m);
        }
        if gain < cfg.min_modularity_gain || community.count() == level.len() {
            break;
        }
        level = level.aggregate(&community);
    }

    Ok(LouvainTrace {
        partition: Partition::from_labels(&membership),
        modularity: trace,
        levels,
        final_level_nodes: Partition::from_labels(&final_level_nodes),
    })
}

/// Graph at one aggregation level: adjacency without self-loops plus the
/// self-loop weight each super-node carries.
struct LevelGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    degree: Vec<f64>,
    two_m: f64,
}

impl LevelGraph {
    fn from_graph(g: &LabeledGraph) -> LevelGraph {
        let mut adjacency = vec![Vec::new(); g.node_count()];
        for e in g.edges() {
            adjacency[e.source].push((e.target, e.weight));
            adjacency[e.target].push((e.source, e.weight));
        }
        LevelGraph::new(adjacency, vec![0.0; g.node_count()])
    }

    fn new(adjacency: Vec<Vec<(usize, f64)>>, self_loops: Vec<f64>) -> LevelGraph {
        let degree: Vec<f64> = adjacency
            .iter()
            .zip(&self_loops)
            .map(|(adj, s)| adj.iter().map(|(_, w)| w).sum::<f64>() + 2.0 * s)
            .collect();
        let two_m = degree.iter().sum();
        LevelGraph {
            adjacency,
            self_loops,
            degree,
            two_m,
        }
    }

    fn len(&self) -> usize {
        self.adjacency.len()
    }

    fn modularity(&self, community: &[usize], resolution: f64) -> f64 {
        let n = self.len();
        let mut internal = vec![0.0; n];
        let mut total = vec![0.0; n];
        for (u, adj) in self.adjacency.iter().enumerate() {
            let cu = community[u];
            total[cu] += self.degree[u];
            internal[cu] += 2.0 * self.self_loops[u];
            for &(v, w) in adj {
                if community[v] == cu {
                    internal[cu] += w;
                }
            }
        }
        internal
            .iter()
            .zip(&total)
            .map(|(i, t)| i / self.two_m - resolution * (t / self.two_m).powi(2))
            .sum()
    }

    /// Repeats shuffled single-node sweeps until no node moves. Returns the
    /// community of every node and whether anything moved at all.
    fn local_moves(&self, resolution: f64, rng: &mut ChaCha8Rng, trace: &mut Vec<f64>) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut community: Vec<usize> = (0..n).collect();
        let mut total = self.degree.clone();
        // Per-community link weight from the current node; `touched` lists the
        // entries to reset.
        let mut links = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        let mut moved_any = false;

        loop {
            order.shuffle(rng);
            let mut moved = false;
            for &u in &order {
                let k_u = self.degree[u];
                if k_u == 0.0 {
                    continue;
                }
                let own = community[u];
                for &(v, w) in &self.adjacency[u] {
                    let c = community[v];
                    if links[c] == 0.0 {
                        touched.push(c);
                    }
                    links[c] += w;
                }
                total[own] -= k_u;

                // Gain of inserting u into c, up to the constant factor 1/m.
                let scale = resolution * k_u / self.two_m;
                let gain = |c: usize, links: &[f64]| links[c] - scale * total[c];
                let own_gain = gain(own, &links);
                let mut best = own;
                let mut best_gain = own_gain;
                for &c in &touched {
                    let g = gain(c, &links);
                    if g > best_gain || (g == best_gain && c < best) {
                        best = c;
                        best_gain = g;
                    }
                }
                // Only strict improvements move a node, which guarantees termination.
                if best != own && best_gain - own_gain <= 1e-12 * k_u.max(1.0) {
                    best = own;
                }

                total[best] += k_u;
                if best != own {
                    community[u] = best;
                    moved = true;
                }
                for c in touched.drain(..) {
                    links[c] = 0.0;
                }
            }
            if !moved {
                break;
            }
            moved_any = true;
            trace.push(self.modularity(&community, resolution));
        }
        (community, moved_any)
    }

    fn aggregate(&self, p: &Partition) -> LevelGraph {
        let k = p.count();
        let mut self_loops = vec![0.0; k];
        let mut merged: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        for (u, adj) in self.adjacency.iter().enumerate() {
            let cu = p.community(u);
            self_loops[cu] += self.self_loops[u];
            for &(v, w) in adj {
                let cv = p.community(v);
                if cu == cv {
                    // Each internal edge is seen from both ends.
                    self_loops[cu] += w / 2.0;
                } else {
                    *merged[cu].entry(cv).or_insert(0.0) += w;
                }
            }
        }
        let adjacency = merged.into_iter().map(|m| m.into_iter().collect()).collect();
        LevelGraph::new(adjacency, self_loops)
    }
}
