//! Consumers of discovered triangles.

use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};

use crate::graph::NodeId;

/// Receives each discovered triangle exactly once.
pub trait TriangleSink {
    fn triangle(&mut self, a: NodeId, b: NodeId, c: NodeId);
}

impl<S: TriangleSink + ?Sized> TriangleSink for &mut S {
    #[inline]
    fn triangle(&mut self, a: NodeId, b: NodeId, c: NodeId) {
        (**self).triangle(a, b, c)
    }
}

/// Counts triangles and nothing else.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TriangleCounter {
    pub total: u64,
}

impl TriangleSink for TriangleCounter {
    #[inline]
    fn triangle(&mut self, _: NodeId, _: NodeId, _: NodeId) {
        self.total += 1;
    }
}

/// Dense per-node tally `T_v` over a whole graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeTally {
    pub counts: Vec<u64>,
}

impl NodeTally {
    pub fn new(n: usize) -> Self {
        NodeTally { counts: vec![0; n] }
    }
}

impl TriangleSink for NodeTally {
    #[inline]
    fn triangle(&mut self, a: NodeId, b: NodeId, c: NodeId) {
        self.counts[a as usize] += 1;
        self.counts[b as usize] += 1;
        self.counts[c as usize] += 1;
    }
}

/// Sparse per-node tally `T_v^i` kept by one rank: only nodes that occur in
/// a triangle the rank discovered get an entry.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalTally {
    pub counts: BTreeMap<NodeId, u64>,
}

impl TriangleSink for LocalTally {
    #[inline]
    fn triangle(&mut self, a: NodeId, b: NodeId, c: NodeId) {
        for v in [a, b, c] {
            *self.counts.entry(v).or_insert(0) += 1;
        }
    }
}

/// Per-edge tally `t_e`, keyed by `(min, max)` node ID.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeTally {
    pub counts: HashMap<(NodeId, NodeId), u64>,
}

impl EdgeTally {
    pub fn get(&self, u: NodeId, v: NodeId) -> u64 {
        self.counts.get(&(u.min(v), u.max(v))).copied().unwrap_or(0)
    }
}

impl TriangleSink for EdgeTally {
    #[inline]
    fn triangle(&mut self, a: NodeId, b: NodeId, c: NodeId) {
        for (u, v) in [(a, b), (a, c), (b, c)] {
            *self.counts.entry((u.min(v), u.max(v))).or_insert(0) += 1;
        }
    }
}

/// Collects triangles as ID-sorted triples.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TriangleList {
    pub triangles: Vec<[NodeId; 3]>,
}

impl TriangleSink for TriangleList {
    #[inline]
    fn triangle(&mut self, a: NodeId, b: NodeId, c: NodeId) {
        self.triangles.push(sorted_triple(a, b, c));
    }
}

/// Writes each triangle as a `u v w` line with `u < v < w`.
///
/// Write errors are latched; the first one is returned by [`ListWriter::finish`].
pub struct ListWriter<W: Write> {
    out: W,
    written: u64,
    error: Option<io::Error>,
}

impl<W: Write> ListWriter<W> {
    pub fn new(out: W) -> Self {
        ListWriter {
            out,
            written: 0,
            error: None,
        }
    }

    pub fn written(&self) -> u64 {
        self.written
    }

    pub fn finish(mut self) -> io::Result<W> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

impl<W: Write> TriangleSink for ListWriter<W> {
    fn triangle(&mut self, a: NodeId, b: NodeId, c: NodeId) {
        if self.error.is_some() {
            return;
        }
        let [u, v, w] = sorted_triple(a, b, c);
        match writeln!(self.out, "{u} {v} {w}") {
            Ok(()) => self.written += 1,
            Err(e) => self.error = Some(e),
        }
    }
}

#[inline]
pub fn sorted_triple(a: NodeId, b: NodeId, c: NodeId) -> [NodeId; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}
