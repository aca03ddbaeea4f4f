// Walks through the score by hand on a small graph: scaled weights, the
// within/between opinion matrices, the two capped components and their
// mass-weighted average.
//
// Run with `cargo run --example worked_example`.

use polarimeter::metric::{accumulate, combine, polarization_component, scale_weights};
use polarimeter::{census, GraphBuilder, Opinion, Partition};

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    // Two like-minded triangles joined by one cross-opinion edge.
    let mut b = GraphBuilder::new();
    for (node, opinion) in [("a", 0), ("b", 0), ("c", 0), ("d", 1), ("e", 1), ("f", 1)] {
        b.set_label(node, Opinion(opinion))?;
    }
    for (u, v) in [("a", "b"), ("b", "c"), ("a", "c"), ("d", "e"), ("e", "f"), ("d", "f"), ("c", "d")] {
        b.add_edge(u, v, 1.0)?;
    }
    let g = b.build(None)?;
    let communities = Partition::from_labels(&[0, 0, 0, 1, 1, 1]);

    let scaled = scale_weights(&g, &census(&g));
    let fm = accumulate(&g, &scaled, &communities)?;
    let p_within = polarization_component(&fm.within)?;
    let p_between = polarization_component(&fm.between)?;
    let p = combine(&fm, p_within, p_between)?;

    let mut out = String::new();
    for (e, w) in g.edges().iter().zip(&scaled.0) {
        out.push_str(&format!("{} - {}: scaled weight {w:.4}\n", g.nodes()[e.source], g.nodes()[e.target]));
    }
    out.push_str(&format!(
        "within: cross {:.4} of {:.4} -> P_W {p_within:.4}\n",
        fm.within.cross(),
        fm.within.total()
    ));
    out.push_str(&format!(
        "between: cross {:.4} of {:.4} -> P_B {p_between:.4}\n",
        fm.between.cross(),
        fm.between.total()
    ));
    out.push_str(&format!("P = {p:.4}\n"));
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{}", run_example()?);
    Ok(())
}
