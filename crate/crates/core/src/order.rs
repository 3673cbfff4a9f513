//! Total orders over nodes and the oriented ("effective") adjacency they induce.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Which quantity ranks the nodes. Ties are always broken by node ID.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderKind {
    ById,
    /// `u ≺ v` iff `d_u < d_v`, or `d_u = d_v` and `u < v`.
    ByDegree,
    /// A uniformly random permutation. The permutation is a Fisher-Yates
    /// shuffle (`rand`'s `SliceRandom::shuffle`) driven by `ChaCha8Rng`
    /// seeded with `seed_from_u64(seed)`.
    ByRandom(u64),
    /// By (core number, degree, ID).
    ByCoreness,
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderKind::ById => f.write_str("id"),
            OrderKind::ByDegree => f.write_str("degree"),
            OrderKind::ByRandom(seed) => write!(f, "random:{seed}"),
            OrderKind::ByCoreness => f.write_str("coreness"),
        }
    }
}

/// Parses `id`, `degree`, `coreness`, `random` (seed 0) or `random:SEED`.
impl FromStr for OrderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.split_once(':') {
            Some(("random", seed)) => seed
                .parse()
                .map(OrderKind::ByRandom)
                .map_err(|_| Error::invalid(format!("bad random-order seed {seed:?}"))),
            None => match s.as_str() {
                "id" => Ok(OrderKind::ById),
                "degree" => Ok(OrderKind::ByDegree),
                "random" => Ok(OrderKind::ByRandom(0)),
                "coreness" => Ok(OrderKind::ByCoreness),
                _ => Err(Error::invalid(format!("unknown ordering {s:?}"))),
            },
            Some(_) => Err(Error::invalid(format!("unknown ordering {s:?}"))),
        }
    }
}

/// A total order realized as a rank array: `u ≺ v` iff `rank[u] < rank[v]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderRank {
    rank: Vec<u32>,
}

impl OrderRank {
    pub fn compute(graph: &Graph, kind: OrderKind) -> Self {
        let n = graph.node_count();
        let mut nodes: Vec<NodeId> = graph.nodes().collect();
        match kind {
            OrderKind::ById => {}
            OrderKind::ByDegree => nodes.sort_by_key(|&v| (graph.degree(v), v)),
            OrderKind::ByRandom(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                nodes.shuffle(&mut rng);
            }
            OrderKind::ByCoreness => {
                let core = coreness(graph);
                nodes.sort_by_key(|&v| (core[v as usize], graph.degree(v), v));
            }
        }
        let mut rank = vec![0u32; n];
        for (r, &v) in nodes.iter().enumerate() {
            rank[v as usize] = r as u32;
        }
        OrderRank { rank }
    }

    /// Wraps an explicit permutation. Returns `None` unless `rank` is a
    /// bijection onto `[0, rank.len())`.
    pub fn from_ranks(rank: Vec<u32>) -> Option<Self> {
        let mut seen = vec![false; rank.len()];
        for &r in &rank {
            let slot = seen.get_mut(r as usize)?;
            if *slot {
                return None;
            }
            *slot = true;
        }
        Some(OrderRank { rank })
    }

    #[inline]
    pub fn rank(&self, v: NodeId) -> u32 {
        self.rank[v as usize]
    }

    /// `u ≺ v`.
    #[inline]
    pub fn precedes(&self, u: NodeId, v: NodeId) -> bool {
        self.rank[u as usize] < self.rank[v as usize]
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn ranks(&self) -> &[u32] {
        &self.rank
    }

    /// Nodes listed from ≺-smallest to ≺-largest.
    pub fn sequence(&self) -> Vec<NodeId> {
        let mut seq = vec![0; self.rank.len()];
        for (v, &r) in self.rank.iter().enumerate() {
            seq[r as usize] = v as NodeId;
        }
        seq
    }

    /// The ≺-smallest of three nodes.
    #[inline]
    pub fn min_of(&self, a: NodeId, b: NodeId, c: NodeId) -> NodeId {
        let ab = if self.precedes(a, b) { a } else { b };
        if self.precedes(ab, c) {
            ab
        } else {
            c
        }
    }
}

/// Core numbers by bucket peeling (Batagelj-Zaversnik), `O(n + m)`.
pub fn coreness(graph: &Graph) -> Vec<usize> {
    let n = graph.node_count();
    let mut deg = graph.degrees();
    let max_deg = deg.iter().copied().max().unwrap_or(0);

    // bin[d] = start of the degree-d block in `vert`
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = vert[i];
        for &u in graph.neighbors(v as NodeId) {
            let u = u as usize;
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    vert.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg
}

/// The oriented adjacency `N_v = {u ∈ 𝒩_v : v ≺ u}`, each row sorted by node ID.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveAdjacency {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl EffectiveAdjacency {
    pub fn build(graph: &Graph, order: &OrderRank) -> Self {
        assert_eq!(
            graph.node_count(),
            order.len(),
            "order does not cover the graph"
        );
        let mut offsets = Vec::with_capacity(graph.node_count() + 1);
        let mut targets = Vec::with_capacity(graph.edge_count());
        offsets.push(0);
        for v in graph.nodes() {
            // adjacency rows are already ID-sorted, so filtering keeps the order
            targets.extend(
                graph
                    .neighbors(v)
                    .iter()
                    .copied()
                    .filter(|&u| order.precedes(v, u)),
            );
            offsets.push(targets.len());
        }
        EffectiveAdjacency { offsets, targets }
    }

    /// Builds from explicit rows; each row is sorted and deduplicated.
    pub fn from_rows(rows: Vec<Vec<NodeId>>) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for mut row in rows {
            row.sort_unstable();
            row.dedup();
            targets.extend_from_slice(&row);
            offsets.push(targets.len());
        }
        EffectiveAdjacency { offsets, targets }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    #[inline]
    pub fn row(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Effective degree `d̂_v`.
    #[inline]
    pub fn eff_degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn eff_degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Total stored entries; equals `m` for a full orientation.
    pub fn entry_count(&self) -> usize {
        self.targets.len()
    }

    /// Keeps entry `(v, u)` iff `keep(v, u)`.
    pub fn filtered(&self, mut keep: impl FnMut(NodeId, NodeId) -> bool) -> Self {
        let mut offsets = Vec::with_capacity(self.offsets.len());
        let mut targets = Vec::with_capacity(self.targets.len());
        offsets.push(0);
        for v in 0..self.node_count() as NodeId {
            targets.extend(self.row(v).iter().copied().filter(|&u| keep(v, u)));
            offsets.push(targets.len());
        }
        EffectiveAdjacency { offsets, targets }
    }
}
