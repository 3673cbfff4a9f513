//! Immutable undirected simple graphs in compressed sparse row form.

use crate::error::{Error, Result};

/// Node identifier, contiguous in `[0, n)`.
pub type NodeId = u32;

/// An undirected simple graph. Every adjacency row is sorted by node ID and
/// free of duplicates and self-loops; `u` appears in row `v` iff `v` appears
/// in row `u`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl Graph {
    /// Builds a graph from an edge stream. Self-loops are dropped and
    /// duplicate or reversed edges merged. The node count is one more than
    /// the largest ID seen.
    pub fn from_edges<I>(edges: I) -> Self
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut rows: Vec<Vec<NodeId>> = Vec::new();
        for (u, v) in edges {
            let hi = u.max(v) as usize;
            if rows.len() <= hi {
                rows.resize_with(hi + 1, Vec::new);
            }
            if u == v {
                continue;
            }
            rows[u as usize].push(v);
            rows[v as usize].push(u);
        }
        Self::from_rows(rows)
    }

    /// Like [`Graph::from_edges`] but with an explicit node count, so that
    /// trailing isolated nodes are kept. Fails if an edge names a node `>= n`.
    pub fn with_nodes<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut rows: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x as usize >= n {
                    return Err(Error::NodeOutOfRange { node: x, nodes: n });
                }
            }
            if u != v {
                rows[u as usize].push(v);
                rows[v as usize].push(u);
            }
        }
        Ok(Self::from_rows(rows))
    }

    fn from_rows(mut rows: Vec<Vec<NodeId>>) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let mut total = 0;
        for row in rows.iter_mut() {
            row.sort_unstable();
            row.dedup();
            total += row.len();
            offsets.push(total);
        }
        let mut targets = Vec::with_capacity(total);
        for row in rows {
            targets.extend_from_slice(&row);
        }
        Graph { offsets, targets }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Neighbors of `v`, ascending by ID.
    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).map(|v| v as NodeId)
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn max_degree(&self) -> usize {
        self.offsets.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }
}
