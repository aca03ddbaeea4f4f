//! Opinion-labeled weighted graphs and their text formats.
//!
//! A [`LabeledGraph`] is undirected, has no self-loops, stores at most one
//! edge per unordered node pair and carries exactly one opinion per node.
//! Nodes are kept in a canonical order (numeric ids numerically, everything
//! else lexicographically) so that the order of rows in an input file never
//! changes the graph that comes out.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("node `{0}` appears in the edge list but has no opinion label")]
    MissingLabel(String),
    #[error("edge ({u}, {v}) has non-positive weight {weight}")]
    NonPositiveWeight { u: String, v: String, weight: f64 },
    #[error("edge list {0} contains no edges")]
    EmptyEdgeSet(PathBuf),
    #[error("node `{node}` has opinion {opinion} but the graph only has {num_opinions} opinions")]
    OpinionOutOfRange {
        node: String,
        opinion: u32,
        num_opinions: u32,
    },
    #[error("a graph needs at least two opinions, got {0}")]
    TooFewOpinions(u32),
    #[error("node `{0}` is labeled twice with different opinions")]
    ConflictingLabel(String),
}

/// Identifier of a node as it appears in input files.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl Ord for NodeId {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0.parse::<i64>(), other.0.parse::<i64>()) {
            (Ok(a), Ok(b)) => a.cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Ok(_), Err(_)) => Ordering::Less,
            (Err(_), Ok(_)) => Ordering::Greater,
            (Err(_), Err(_)) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for NodeId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Index into the opinion universe of a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Opinion(pub u32);

impl Opinion {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct LabeledGraph {
    nodes: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    edges: Vec<Edge>,
    opinions: Vec<Opinion>,
    num_opinions: u32,
}

impl LabeledGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn num_opinions(&self) -> u32 {
        self.num_opinions
    }

    /// Nodes in canonical order; a node's position is its dense index.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Edges with `source < target`, sorted by `(source, target)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn opinions(&self) -> &[Opinion] {
        &self.opinions
    }

    pub fn opinion(&self, node: usize) -> Opinion {
        self.opinions[node]
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(&NodeId::from(id)).copied()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Weight of the edge between two node ids, if any.
    pub fn weight_between(&self, u: &str, v: &str) -> Option<f64> {
        let (a, b) = (self.node_index(u)?, self.node_index(v)?);
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.edges
            .binary_search_by(|e| (e.source, e.target).cmp(&(a, b)))
            .ok()
            .map(|i| self.edges[i].weight)
    }

    /// Copy of this graph with the same structure and new labels.
    pub fn with_opinions(
        &self,
        opinions: Vec<Opinion>,
        num_opinions: u32,
    ) -> Result<LabeledGraph, GraphError> {
        assert_eq!(opinions.len(), self.nodes.len(), "one opinion per node");
        check_opinions(&self.nodes, &opinions, num_opinions)?;
        Ok(LabeledGraph {
            opinions,
            num_opinions,
            ..self.clone()
        })
    }

    /// Writes `u\tv\tw` rows in canonical edge order.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.edges {
            writeln!(
                out,
                "{}\t{}\t{}",
                self.nodes[e.source], self.nodes[e.target], e.weight
            )?;
        }
        Ok(())
    }

    /// Writes `u\topinion_index` rows for every node, isolated ones included.
    pub fn write_labels<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (id, o) in self.nodes.iter().zip(&self.opinions) {
            writeln!(out, "{}\t{}", id, o.0)?;
        }
        Ok(())
    }
}

fn check_opinions(nodes: &[NodeId], opinions: &[Opinion], num_opinions: u32) -> Result<(), GraphError> {
    if num_opinions < 2 {
        return Err(GraphError::TooFewOpinions(num_opinions));
    }
    for (id, o) in nodes.iter().zip(opinions) {
        if o.0 >= num_opinions {
            return Err(GraphError::OpinionOutOfRange {
                node: id.0.clone(),
                opinion: o.0,
                num_opinions,
            });
        }
    }
    Ok(())
}

/// Accumulates edges and labels and produces a canonical [`LabeledGraph`].
///
/// Parallel edges (in either direction) are merged by summing weights and
/// self-loops are dropped and counted.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    edges: BTreeMap<(NodeId, NodeId), f64>,
    labels: BTreeMap<NodeId, Opinion>,
    self_loops: usize,
    merged: usize,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_edge(&mut self, u: impl Into<NodeId>, v: impl Into<NodeId>, weight: f64) -> Result<(), GraphError> {
        let (u, v) = (u.into(), v.into());
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(GraphError::NonPositiveWeight {
                u: u.0,
                v: v.0,
                weight,
            });
        }
        if u == v {
            self.self_loops += 1;
            return Ok(());
        }
        let key = if u < v { (u, v) } else { (v, u) };
        match self.edges.get_mut(&key) {
            Some(w) => {
                *w += weight;
                self.merged += 1;
            }
            None => {
                self.edges.insert(key, weight);
            }
        }
        Ok(())
    }

    pub fn set_label(&mut self, node: impl Into<NodeId>, opinion: Opinion) -> Result<(), GraphError> {
        let node = node.into();
        match self.labels.insert(node.clone(), opinion) {
            Some(prev) if prev != opinion => Err(GraphError::ConflictingLabel(node.0)),
            _ => Ok(()),
        }
    }

    pub fn self_loops_dropped(&self) -> usize {
        self.self_loops
    }

    pub fn rows_merged(&self) -> usize {
        self.merged
    }

    /// Builds the graph. With `num_opinions = None` the universe is
    /// `max(label) + 1`, but never fewer than two.
    pub fn build(self, num_opinions: Option<u32>) -> Result<LabeledGraph, GraphError> {
        for (u, v) in self.edges.keys() {
            for n in [u, v] {
                if !self.labels.contains_key(n) {
                    return Err(GraphError::MissingLabel(n.0.clone()));
                }
            }
        }
        let nodes: Vec<NodeId> = self.labels.keys().cloned().collect();
        let opinions: Vec<Opinion> = self.labels.values().copied().collect();
        let num_opinions = num_opinions
            .unwrap_or_else(|| opinions.iter().map(|o| o.0 + 1).max().unwrap_or(0).max(2));
        check_opinions(&nodes, &opinions, num_opinions)?;

        let index: HashMap<NodeId, usize> = nodes.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        // BTreeMap order on (min, max) ids equals (source, target) index order.
        let edges = self
            .edges
            .into_iter()
            .map(|((u, v), weight)| Edge {
                source: index[&u],
                target: index[&v],
                weight,
            })
            .collect();
        Ok(LabeledGraph {
            nodes,
            index,
            edges,
            opinions,
            num_opinions,
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InputFormat {
    /// `u <sep> v [<sep> w]` edge rows plus `u <sep> opinion` label rows.
    #[default]
    TsvEdgeList,
}

/// A graph read from disk together with the warnings raised while reading it.
#[derive(Debug)]
pub struct Loaded {
    pub graph: LabeledGraph,
    pub self_loops_dropped: usize,
    pub rows_merged: usize,
}

/// Reads an edge list and a label file.
pub fn load_graph(edge_file: &Path, label_file: &Path, format: InputFormat) -> Result<Loaded, GraphError> {
    let InputFormat::TsvEdgeList = format;
    let mut builder = GraphBuilder::new();

    let labels = read_to_string(label_file)?;
    for (line, fields) in data_rows(&labels) {
        let err = |message: String| GraphError::Parse {
            path: label_file.to_owned(),
            line,
            message,
        };
        let [node, opinion] = fields[..] else {
            return Err(err(format!("expected `node<sep>opinion`, found {} fields", fields.len())));
        };
        let opinion: u32 = opinion
            .parse()
            .map_err(|_| err(format!("opinion `{opinion}` is not a non-negative integer")))?;
        builder.set_label(node, Opinion(opinion)).map_err(|e| err(e.to_string()))?;
    }

    let edges = read_to_string(edge_file)?;
    let mut rows = 0usize;
    for (line, fields) in data_rows(&edges) {
        let err = |message: String| GraphError::Parse {
            path: edge_file.to_owned(),
            line,
            message,
        };
        let (u, v, w) = match fields[..] {
            [u, v] => (u, v, 1.0),
            [u, v, w] => (u, v, w.parse::<f64>().map_err(|_| err(format!("weight `{w}` is not a number")))?),
            _ => return Err(err(format!("expected `u<sep>v[<sep>w]`, found {} fields", fields.len()))),
        };
        builder.add_edge(u, v, w).map_err(|e| err(e.to_string()))?;
        rows += 1;
    }
    if rows == builder.self_loops_dropped() {
        return Err(GraphError::EmptyEdgeSet(edge_file.to_owned()));
    }

    let self_loops_dropped = builder.self_loops_dropped();
    let rows_merged = builder.rows_merged();
    let graph = builder.build(None)?;
    Ok(Loaded {
        graph,
        self_loops_dropped,
        rows_merged,
    })
}

fn read_to_string(path: &Path) -> Result<String, GraphError> {
    fs::read_to_string(path).map_err(|source| GraphError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Non-comment, non-blank rows with 1-based line numbers, split on the
/// separator detected from the first data row (tab wins over comma).
fn data_rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    let mut sep = None;
    text.lines().enumerate().filter_map(move |(i, raw)| {
        let row = raw.trim();
        if row.is_empty() || row.starts_with('#') {
            return None;
        }
        let sep = *sep.get_or_insert(if row.contains('\t') { '\t' } else { ',' });
        let fields = row.split(sep).map(str::trim).collect();
        Some((i + 1, fields))
    })
}

/// Node counts per opinion.
#[derive(Clone, Debug, PartialEq)]
pub struct OpinionCensus {
    counts: Vec<usize>,
    total: usize,
}

impl OpinionCensus {
    pub fn count(&self, o: Opinion) -> usize {
        self.counts.get(o.index()).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// Share of all nodes holding opinion `o`.
    pub fn fraction(&self, o: Opinion) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(o) as f64 / self.total as f64
        }
    }

    /// Opinions held by at least one node, with their counts.
    pub fn present(&self) -> impl Iterator<Item = (Opinion, usize)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(o, &c)| (Opinion(o as u32), c))
    }
}

pub fn census(g: &LabeledGraph) -> OpinionCensus {
    let mut counts = vec![0; g.num_opinions as usize];
    for o in &g.opinions {
        counts[o.index()] += 1;
    }
    OpinionCensus {
        counts,
        total: g.node_count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(edges: &[(&str, &str, f64)], labels: &[(&str, u32)]) -> GraphBuilder {
        let mut b = GraphBuilder::new();
        for &(u, v, w) in edges {
            b.add_edge(u, v, w).unwrap();
        }
        for &(n, o) in labels {
            b.set_label(n, Opinion(o)).unwrap();
        }
        b
    }

    #[test]
    fn reversed_rows_merge_by_summing() {
        let g = build(&[("a", "b", 1.0), ("b", "a", 2.0)], &[("a", 0), ("b", 1)])
            .build(None)
            .unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight_between("a", "b"), Some(3.0));
        assert_eq!(g.weight_between("b", "a"), Some(3.0));
    }

    #[test]
    fn self_loops_are_dropped_and_counted() {
        let b = build(&[("a", "a", 1.0), ("a", "b", 1.0)], &[("a", 0), ("b", 0)]);
        assert_eq!(b.self_loops_dropped(), 1);
        let g = b.build(None).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight_between("a", "b"), Some(1.0));
    }

    #[test]
    fn label_only_nodes_become_isolated() {
        let g = build(&[("a", "b", 1.0)], &[("a", 0), ("b", 1), ("c", 1)])
            .build(None)
            .unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(census(&g).total(), 3);
    }

    #[test]
    fn missing_label_names_the_node() {
        let err = build(&[("a", "zed", 1.0)], &[("a", 0)]).build(None).unwrap_err();
        assert!(matches!(err, GraphError::MissingLabel(ref n) if n == "zed"), "{err}");
    }

    #[test]
    fn non_positive_weight_is_rejected() {
        let mut b = GraphBuilder::new();
        assert!(b.add_edge("a", "b", 0.0).is_err());
        assert!(b.add_edge("a", "b", -1.0).is_err());
        assert!(b.add_edge("a", "b", f64::NAN).is_err());
    }

    #[test]
    fn numeric_ids_sort_numerically() {
        let g = build(&[("10", "2", 1.0), ("2", "1", 1.0)], &[("10", 0), ("2", 0), ("1", 1)])
            .build(None)
            .unwrap();
        let ids: Vec<&str> = g.nodes().iter().map(NodeId::as_str).collect();
        assert_eq!(ids, ["1", "2", "10"]);
    }

    #[test]
    fn census_counts() {
        let g = build(
            &[("a", "b", 1.0), ("c", "d", 1.0)],
            &[("a", 0), ("b", 0), ("c", 1), ("d", 1)],
        )
        .build(None)
        .unwrap();
        let c = census(&g);
        assert_eq!(c.count(Opinion(0)), 2);
        assert_eq!(c.count(Opinion(1)), 2);
        assert_eq!(c.total(), 4);
    }

    #[test]
    fn census_of_the_worked_example_population() {
        let mut b = GraphBuilder::new();
        for i in 0..22 {
            b.set_label(format!("n{i}"), Opinion(u32::from(i >= 13))).unwrap();
        }
        b.add_edge("n0", "n1", 1.0).unwrap();
        let c = census(&b.build(None).unwrap());
        assert_eq!(c.fraction(Opinion(0)), 13.0 / 22.0);
        assert_eq!(c.fraction(Opinion(1)), 9.0 / 22.0);
    }

    #[test]
    fn degenerate_census_leaves_unused_opinions_absent() {
        let g = build(&[("a", "b", 1.0), ("b", "c", 1.0)], &[("a", 0), ("b", 0), ("c", 0)])
            .build(Some(3))
            .unwrap();
        let c = census(&g);
        assert_eq!(c.count(Opinion(0)), 3);
        assert_eq!(c.fraction(Opinion(0)), 1.0);
        assert_eq!(c.present().collect::<Vec<_>>(), vec![(Opinion(0), 3)]);
    }

    #[test]
    fn opinion_outside_universe_is_rejected() {
        let err = build(&[("a", "b", 1.0)], &[("a", 0), ("b", 3)]).build(Some(2)).unwrap_err();
        assert!(matches!(err, GraphError::OpinionOutOfRange { .. }));
    }

    #[test]
    fn separators_are_detected_per_file() {
        let rows: Vec<_> = data_rows("# c\n\na,b,2\nb,c\n").collect();
        assert_eq!(rows, vec![(3, vec!["a", "b", "2"]), (4, vec!["b", "c"])]);
        let rows: Vec<_> = data_rows("a\tb\n").collect();
        assert_eq!(rows, vec![(1, vec!["a", "b"])]);
    }
}
