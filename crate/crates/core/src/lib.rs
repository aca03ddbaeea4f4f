//! Multi-opinion polarization scores for weighted, opinion-labeled networks.
//!
//! The score splits edges into those inside a community and those between
//! communities, measures the share of scaled edge weight joining different
//! opinions on each side, and averages the two by mass. Any number of
//! opinions is supported.
//!
//! ```
//! use polarimeter::graph::{GraphBuilder, Opinion};
//! use polarimeter::community::Partition;
//! use polarimeter::metric::score;
//!
//! let mut b = GraphBuilder::new();
//! for (node, opinion) in [("a", 0), ("b", 0), ("c", 1), ("d", 1)] {
//!     b.set_label(node, Opinion(opinion)).unwrap();
//! }
//! b.add_edge("a", "b", 1.0).unwrap();
//! b.add_edge("c", "d", 1.0).unwrap();
//! b.add_edge("b", "c", 1.0).unwrap();
//! let g = b.build(None).unwrap();
//!
//! let s = score(&g, &Partition::from_labels(&[0, 0, 1, 1])).unwrap();
//! assert_eq!(s.p_within, 1.0);
//! assert_eq!(s.p_between, 0.0);
//! assert!((s.polarization - 2.0 / 3.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod community;
pub mod graph;
pub mod metric;
pub mod report;
pub mod stance;
pub mod synthetic;

pub use community::{louvain, modularity, LouvainConfig, Partition};
pub use graph::{census, load_graph, GraphBuilder, LabeledGraph, NodeId, Opinion, OpinionCensus};
pub use metric::{analyze, score, AnalyzeOptions, PolarizationReport, Scores};
