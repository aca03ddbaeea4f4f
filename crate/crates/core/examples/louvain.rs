// Community detection on two 6-cliques joined by a bridge: the seeded
// Louvain run recovers the cliques, and the trace shows modularity after
// every sweep.
//
// Run with `cargo run --example louvain`.

use polarimeter::community::louvain_traced;
use polarimeter::{modularity, GraphBuilder, LouvainConfig, Opinion, Partition};

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let mut b = GraphBuilder::new();
    for i in 0..12 {
        b.set_label(i.to_string(), Opinion(0))?;
    }
    for base in [0, 6] {
        for u in 0..6 {
            for v in u + 1..6 {
                b.add_edge((base + u).to_string(), (base + v).to_string(), 1.0)?;
            }
        }
    }
    b.add_edge("5", "6", 1.0)?;
    let g = b.build(Some(2))?;

    let trace = louvain_traced(&g, &LouvainConfig::with_seed(1))?;
    let mut out = format!(
        "{} communities after {} levels: {:?}\n",
        trace.partition.count(),
        trace.levels,
        trace.partition.members()
    );
    let sweeps: Vec<String> = trace.modularity.iter().map(|q| format!("{q:.4}")).collect();
    out.push_str(&format!("modularity per sweep: {}\n", sweeps.join(" ")));
    out.push_str(&format!(
        "whole graph {:.4}, singletons {:.4}\n",
        modularity(&g, &Partition::whole(12), 1.0)?,
        modularity(&g, &Partition::singletons(12), 1.0)?
    ));
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{}", run_example()?);
    Ok(())
}
