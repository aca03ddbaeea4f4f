//! Independent reference computations used only by tests. Nothing here
//! calls into the production metric or modularity code.

#![allow(dead_code)]

use polarimeter::graph::{GraphBuilder, LabeledGraph, Opinion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense weight matrix and labels of a graph, node order as in `g`.
pub fn dense(g: &LabeledGraph) -> (Vec<Vec<f64>>, Vec<usize>) {
    let n = g.node_count();
    let mut w = vec![vec![0.0; n]; n];
    for e in g.edges() {
        w[e.source][e.target] = e.weight;
        w[e.target][e.source] = e.weight;
    }
    let o = g.opinions().iter().map(|o| o.index()).collect();
    (w, o)
}

/// Scores `(P_W, P_B, P)` by a literal reading of the algorithm over a
/// dense weight matrix: scale, tally both matrices with mirroring, cap,
/// combine.
pub fn naive_polarization(w: &[Vec<f64>], opinion: &[usize], community: &[usize], num_opinions: usize) -> (f64, f64, f64) {
    let n = w.len();
    let mut holders = vec![0usize; num_opinions];
    for &o in opinion {
        holders[o] += 1;
    }
    let mut fw = vec![vec![0.0; num_opinions]; num_opinions];
    let mut fb = vec![vec![0.0; num_opinions]; num_opinions];
    for i in 0..n {
        for j in i + 1..n {
            if w[i][j] == 0.0 {
                continue;
            }
            let (oi, oj) = (opinion[i], opinion[j]);
            let ws = (holders[oi] as f64 / n as f64 + holders[oj] as f64 / n as f64) / 2.0 * w[i][j];
            let f = if community[i] == community[j] { &mut fw } else { &mut fb };
            f[oi][oj] += ws;
            if oi != oj {
                f[oj][oi] = f[oi][oj];
            }
        }
    }
    let sums = |f: &Vec<Vec<f64>>| {
        let mut cross = 0.0;
        let mut total = 0.0;
        for m in 0..num_opinions {
            for k in m..num_opinions {
                total += f[m][k];
                if m < k {
                    cross += f[m][k];
                }
            }
        }
        (cross, total)
    };
    let component = |f: &Vec<Vec<f64>>| {
        let (cross, total) = sums(f);
        if total == 0.0 {
            return 0.0;
        }
        let x = cross / total;
        1.0 - 2.0 * if x < 0.5 { x } else { 0.5 }
    };
    let (pw, pb) = (component(&fw), component(&fb));
    let (sw, sb) = (sums(&fw).1, sums(&fb).1);
    (pw, pb, (sw * pw + sb * pb) / (sw + sb))
}

/// Newman-Girvan modularity straight from its double-sum definition.
pub fn brute_modularity(w: &[Vec<f64>], community: &[usize], resolution: f64) -> f64 {
    let n = w.len();
    let k: Vec<f64> = w.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if community[i] == community[j] {
                q += w[i][j] - resolution * k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `0..n` as restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for c in 0..=max + 1 {
            prefix.push(c);
            grow(prefix, max.max(c), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return vec![vec![]];
    }
    grow(&mut vec![0], 0, n, &mut out);
    out
}

/// Random connected-or-not graph with at least one edge, `nodes` nodes,
/// opinions below `num_opinions` and weights in `[0.5, 3)`.
pub fn random_graph(rng: &mut ChaCha8Rng, nodes: usize, num_opinions: u32, density: f64) -> LabeledGraph {
    loop {
        let mut b = GraphBuilder::new();
        for i in 0..nodes {
            b.set_label(i.to_string(), Opinion(rng.gen_range(0..num_opinions))).unwrap();
        }
        let mut any = false;
        for u in 0..nodes {
            for v in u + 1..nodes {
                if rng.gen_bool(density) {
                    b.add_edge(u.to_string(), v.to_string(), rng.gen_range(0.5..3.0)).unwrap();
                    any = true;
                }
            }
        }
        if any {
            return b.build(Some(num_opinions)).unwrap();
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two `size`-cliques joined by a single bridge edge.
pub fn bridged_cliques(size: usize) -> LabeledGraph {
    let mut b = GraphBuilder::new();
    for i in 0..2 * size {
        b.set_label(i.to_string(), Opinion(0)).unwrap();
    }
    for block in 0..2 {
        let base = block * size;
        for u in 0..size {
            for v in u + 1..size {
                b.add_edge((base + u).to_string(), (base + v).to_string(), 1.0).unwrap();
            }
        }
    }
    b.add_edge((size - 1).to_string(), size.to_string(), 1.0).unwrap();
    b.build(Some(2)).unwrap()
}
