// Plants a block model, relabels it so each block holds a chosen share of
// one dominant opinion, and scores a small dom_ratio x num_opinions grid.
//
// Run with `cargo run --release --example synthetic_sweep`.

use polarimeter::synthetic::{generate_sbm, sweep, SbmConfig, SweepGrid};

pub fn run_example() -> Result<String, Box<dyn std::error::Error>> {
    let (g, planted) = generate_sbm(&SbmConfig {
        blocks: 6,
        nodes_per_block: 40,
        p_in: 0.3,
        p_out: 0.01,
        seed: 11,
    })?;
    let grid = SweepGrid {
        dom_ratios: vec![0.5, 0.7, 0.9, 1.0],
        num_opinions: vec![2, 4],
    };
    let table = sweep(&g, &planted, &grid, 5, 11, None)?;
    Ok(table.to_csv())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    print!("{}", run_example()?);
    Ok(())
}
