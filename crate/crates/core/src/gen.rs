//! Random graph generators: Erdős-Rényi `G(n, q)` and preferential attachment.
//!
//! Both use `ChaCha8Rng::seed_from_u64(seed)`, so a `(parameters, seed)` pair
//! always yields the same graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// `G(n, q)` with `q = d / (n - 1)`, so each node has expected degree `d`.
///
/// Pairs are visited with geometric skipping, so the cost is proportional to
/// the number of edges produced rather than to `n²`.
pub fn gen_gnp(n: usize, d: f64, seed: u64) -> Result<Graph> {
    if !(d >= 0.0) {
        return Err(Error::invalid(format!("average degree must be >= 0, got {d}")));
    }
    if n < 2 {
        if d > 0.0 {
            return Err(Error::invalid("average degree must be 0 when n < 2"));
        }
        return Graph::with_nodes(n, []);
    }
    let max = (n - 1) as f64;
    if d > max {
        return Err(Error::invalid(format!("average degree {d} exceeds n - 1 = {max}")));
    }
    let q = d / max;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = GnpEdges::new(n, q, &mut rng);
    Graph::with_nodes(n, edges)
}

/// Streams the pairs `(w, v)`, `w < v`, of a `G(n, q)` sample.
struct GnpEdges<'a> {
    n: i64,
    v: i64,
    w: i64,
    log_miss: f64,
    q: f64,
    rng: &'a mut ChaCha8Rng,
}

impl<'a> GnpEdges<'a> {
    fn new(n: usize, q: f64, rng: &'a mut ChaCha8Rng) -> Self {
        GnpEdges {
            n: n as i64,
            v: 1,
            w: -1,
            log_miss: (1.0 - q).ln(),
            q,
            rng,
        }
    }
}

impl Iterator for GnpEdges<'_> {
    type Item = (NodeId, NodeId);

    fn next(&mut self) -> Option<Self::Item> {
        if self.q <= 0.0 {
            return None;
        }
        loop {
            if self.v >= self.n {
                return None;
            }
            let skip = if self.q >= 1.0 {
                0
            } else {
                let r: f64 = self.rng.gen();
                ((1.0 - r).ln() / self.log_miss).floor() as i64
            };
            self.w += 1 + skip;
            while self.w >= self.v && self.v < self.n {
                self.w -= self.v;
                self.v += 1;
            }
            if self.v < self.n {
                return Some((self.w as NodeId, self.v as NodeId));
            }
        }
    }
}

/// Preferential attachment with average degree about `d`.
///
/// Starts from a clique on `d/2 + 1` nodes; every later node attaches `d/2`
/// edges to distinct existing nodes, each drawn with probability proportional
/// to its current degree (resampling until distinct). The result has
/// `C(d/2 + 1, 2) + (n - d/2 - 1) · d/2` edges and is connected.
pub fn gen_pa(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d < 2 || d % 2 != 0 {
        return Err(Error::invalid(format!("PA degree must be even and >= 2, got {d}")));
    }
    let k = d / 2;
    if n <= k {
        return Err(Error::invalid(format!("PA needs n > d/2, got n = {n}, d = {d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seed_nodes = (k + 1).min(n);
    let m = seed_nodes * (seed_nodes - 1) / 2 + (n - seed_nodes) * k;

    // every edge contributes both endpoints, so uniform draws are degree-proportional
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(2 * m);
    for u in 0..seed_nodes as NodeId {
        for v in u + 1..seed_nodes as NodeId {
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut targets: Vec<NodeId> = Vec::with_capacity(k);
    for v in seed_nodes as NodeId..n as NodeId {
        targets.clear();
        while targets.len() < k {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    Graph::with_nodes(n, endpoints.chunks_exact(2).map(|e| (e[0], e[1])))
}
