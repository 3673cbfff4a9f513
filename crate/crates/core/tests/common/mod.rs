//! Independent reference computations for integration tests. Nothing here
//! uses the library's orientation, intersection or partition code.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trigraph::{Graph, NodeId};

/// Dense adjacency matrix built from the edge list.
pub fn matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[u as usize][v as usize] = true;
        a[v as usize][u as usize] = true;
    }
    a
}

/// All triangles `u < v < w`, by triple enumeration.
pub fn brute_triangles(g: &Graph) -> Vec<[NodeId; 3]> {
    let a = matrix(g);
    let n = g.node_count();
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if !a[u][v] {
                continue;
            }
            for w in v + 1..n {
                if a[u][w] && a[v][w] {
                    out.push([u as NodeId, v as NodeId, w as NodeId]);
                }
            }
        }
    }
    out
}

pub fn brute_count(g: &Graph) -> u64 {
    brute_triangles(g).len() as u64
}

/// `T_v` by counting edges among each node's neighbors.
pub fn brute_node_counts(g: &Graph) -> Vec<u64> {
    let a = matrix(g);
    (0..g.node_count())
        .map(|v| {
            let nb: Vec<usize> = (0..g.node_count()).filter(|&u| a[v][u]).collect();
            let mut t = 0;
            for (i, &x) in nb.iter().enumerate() {
                for &y in &nb[i + 1..] {
                    if a[x][y] {
                        t += 1;
                    }
                }
            }
            t
        })
        .collect()
}

/// Clustering coefficient as the realized fraction of neighbor pairs.
pub fn brute_clustering(g: &Graph) -> Vec<f64> {
    brute_node_counts(g)
        .into_iter()
        .enumerate()
        .map(|(v, t)| {
            let d = g.degree(v as NodeId) as f64;
            if d < 2.0 {
                0.0
            } else {
                t as f64 / (d * (d - 1.0) / 2.0)
            }
        })
        .collect()
}

/// `G(n, q)` by flipping a coin for every pair.
pub fn coin_graph(n: usize, q: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as NodeId {
        for v in u + 1..n as NodeId {
            if rng.gen_bool(q) {
                edges.push((u, v));
            }
        }
    }
    Graph::with_nodes(n, edges).unwrap()
}

/// The oracle suite: `count` seeded graphs with `n ≤ 100`, densities from
/// sparse to near-complete, plus a few planted structures.
pub fn oracle_suite(count: usize) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let densities = [0.02, 0.05, 0.1, 0.2, 0.35, 0.5, 0.7, 0.9, 0.97];
    (0..count)
        .map(|i| {
            let n = rng.gen_range(1..=100);
            let q = densities[i % densities.len()];
            coin_graph(n, q, &mut rng)
        })
        .collect()
}

/// Data messages the surrogate engine must send: one per (core node,
/// foreign owner of one of its effective neighbors). Recomputed from scratch
/// with a degree order and explicit owners.
pub fn expected_surrogate_messages(g: &Graph, boundaries: &[usize]) -> u64 {
    let owner = |v: NodeId| boundaries.iter().rposition(|&x| x <= v as usize).unwrap();
    let before = |a: NodeId, b: NodeId| (g.degree(a), a) < (g.degree(b), b);
    let mut total = 0;
    for v in g.nodes() {
        let mut dests: Vec<usize> = g
            .neighbors(v)
            .iter()
            .filter(|&&u| before(v, u) && owner(u) != owner(v))
            .map(|&u| owner(u))
            .collect();
        dests.sort_unstable();
        dests.dedup();
        total += dests.len() as u64;
    }
    total
}

/// Data messages of the direct engine: a request and a reply per oriented
/// cut edge.
pub fn expected_direct_messages(g: &Graph, boundaries: &[usize]) -> u64 {
    let owner = |v: NodeId| boundaries.iter().rposition(|&x| x <= v as usize).unwrap();
    2 * g.edges().filter(|&(u, v)| owner(u) != owner(v)).count() as u64
}

/// Wheel with hub 0 and rim `1..=rim`.
pub fn wheel(rim: u32) -> Graph {
    let spokes = (1..=rim).map(|v| (0, v));
    let ring = (1..=rim).map(|v| (v, if v == rim { 1 } else { v + 1 }));
    Graph::from_edges(spokes.chain(ring))
}

pub fn complete(n: u32) -> Graph {
    Graph::with_nodes(n as usize, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
}

/// Complete bipartite `K_{a,b}`.
pub fn complete_bipartite(a: u32, b: u32) -> Graph {
    Graph::with_nodes((a + b) as usize, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v)))).unwrap()
}

/// A random bipartite graph: edges only between even and odd IDs.
pub fn random_bipartite(n: usize, q: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as NodeId {
        for v in u + 1..n as NodeId {
            if (u + v) % 2 == 1 && rng.gen_bool(q) {
                edges.push((u, v));
            }
        }
    }
    Graph::with_nodes(n, edges).unwrap()
}

pub fn g5() -> Graph {
    Graph::from_edges([(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)])
}

/// Mean, unbiased variance and fourth central moment of a sample.
pub fn moments(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    (mean, var, m4)
}

/// Standard error of the sample variance, `√((μ₄ − σ⁴)/N)`.
pub fn variance_se(xs: &[f64]) -> f64 {
    let (_, var, m4) = moments(xs);
    ((m4 - var * var) / xs.len() as f64).sqrt()
}
