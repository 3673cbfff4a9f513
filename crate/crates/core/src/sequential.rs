//! Sequential triangle counting: NodeIterator++ and NodeIteratorN.

use std::collections::BTreeMap;

use crate::graph::{Graph, NodeId};
use crate::order::{EffectiveAdjacency, OrderRank};
use crate::sink::{EdgeTally, NodeTally, TriangleSink};

/// Merge-style intersection of two strictly ascending sequences.
pub fn intersect_sorted(a: &[NodeId], b: &[NodeId]) -> Vec<NodeId> {
    let mut out = Vec::new();
    for_each_common(a, b, |w| out.push(w));
    out
}

/// Calls `emit` for each common element of two strictly ascending
/// sequences and returns the number of element comparisons performed
/// (at most `a.len() + b.len()`).
#[inline]
pub fn for_each_common(a: &[NodeId], b: &[NodeId], mut emit: impl FnMut(NodeId)) -> u64 {
    let (mut i, mut j) = (0, 0);
    let mut steps = 0u64;
    while i < a.len() && j < b.len() {
        steps += 1;
        let (x, y) = (a[i], b[j]);
        if x < y {
            i += 1;
        } else if y < x {
            j += 1;
        } else {
            emit(x);
            i += 1;
            j += 1;
        }
    }
    steps
}

/// How NodeIterator++ decides whether a neighbor pair closes a triangle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PlusPlusVariant {
    /// Binary search for `(u, w)` in the sorted adjacency of `u`.
    #[default]
    BinarySearch,
    /// Intersect the full neighbor sets `𝒩_v ∩ 𝒩_u` and keep `w` with `u ≺ w`.
    Intersection,
}

/// NodeIterator++: for each `v` and each pair of neighbors `v ≺ u ≺ w`,
/// count the pair if `(u, w)` is an edge.
pub fn count_node_iterator_pp(graph: &Graph, order: &OrderRank, variant: PlusPlusVariant) -> u64 {
    let mut total = 0u64;
    for v in graph.nodes() {
        let nv = graph.neighbors(v);
        for &u in nv.iter().filter(|&&u| order.precedes(v, u)) {
            match variant {
                PlusPlusVariant::BinarySearch => {
                    let nu = graph.neighbors(u);
                    for &w in nv.iter().filter(|&&w| order.precedes(u, w)) {
                        if nu.binary_search(&w).is_ok() {
                            total += 1;
                        }
                    }
                }
                PlusPlusVariant::Intersection => {
                    for_each_common(nv, graph.neighbors(u), |w| {
                        if order.precedes(u, w) {
                            total += 1;
                        }
                    });
                }
            }
        }
    }
    total
}

/// NodeIteratorN: for each `v` and `u ∈ N_v`, every `w ∈ N_v ∩ N_u` closes
/// a triangle `v ≺ u ≺ w`, reported to `sink` as `(v, u, w)`.
pub fn count_node_iterator_n<S: TriangleSink>(eff: &EffectiveAdjacency, mut sink: S) -> u64 {
    let mut total = 0u64;
    for v in 0..eff.node_count() as NodeId {
        let nv = eff.row(v);
        for &u in nv {
            for_each_common(nv, eff.row(u), |w| {
                total += 1;
                sink.triangle(v, u, w);
            });
        }
    }
    total
}

/// Triangle count without a sink.
pub fn count_triangles(eff: &EffectiveAdjacency) -> u64 {
    let mut total = 0u64;
    for v in 0..eff.node_count() as NodeId {
        let nv = eff.row(v);
        for &u in nv {
            for_each_common(nv, eff.row(u), |_| total += 1);
        }
    }
    total
}

/// `Σ_v d_v · d̂_v`, the NodeIteratorN work under `order`.
pub fn ordering_cost(graph: &Graph, order: &OrderRank) -> u64 {
    graph
        .nodes()
        .map(|v| {
            let nv = graph.neighbors(v);
            let eff = nv.iter().filter(|&&u| order.precedes(v, u)).count();
            (nv.len() * eff) as u64
        })
        .sum()
}

/// Number of triangles through each node.
pub fn node_triangle_counts(eff: &EffectiveAdjacency) -> Vec<u64> {
    let mut tally = NodeTally::new(eff.node_count());
    count_node_iterator_n(eff, &mut tally);
    tally.counts
}

/// Number of triangles through each edge, keyed `(min, max)`. Every edge of
/// the orientation has an entry, zero included.
pub fn per_edge_triangle_counts(eff: &EffectiveAdjacency) -> BTreeMap<(NodeId, NodeId), u64> {
    let mut tally = EdgeTally::default();
    count_node_iterator_n(eff, &mut tally);
    let mut out = BTreeMap::new();
    for v in 0..eff.node_count() as NodeId {
        for &u in eff.row(v) {
            let key = (v.min(u), v.max(u));
            out.insert(key, tally.counts.get(&key).copied().unwrap_or(0));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::order::OrderKind;
    use crate::sink::TriangleList;

    fn degree_eff(g: &Graph) -> EffectiveAdjacency {
        EffectiveAdjacency::build(g, &OrderRank::compute(g, OrderKind::ByDegree))
    }

    #[test]
    fn intersections() {
        assert_eq!(intersect_sorted(&[1, 2], &[2, 3]), vec![2]);
        assert_eq!(intersect_sorted(&[], &[1, 2]), Vec::<NodeId>::new());
        assert_eq!(intersect_sorted(&[1, 3, 5, 7], &[2, 3, 4, 7]), vec![3, 7]);
        assert!(for_each_common(&[1, 3, 5, 7], &[2, 3, 4, 7], |_| {}) <= 8);
    }

    #[test]
    fn plus_plus_counts() {
        for variant in [PlusPlusVariant::BinarySearch, PlusPlusVariant::Intersection] {
            let k4 = complete(4);
            for kind in [OrderKind::ById, OrderKind::ByDegree, OrderKind::ByRandom(3)] {
                assert_eq!(count_node_iterator_pp(&k4, &OrderRank::compute(&k4, kind), variant), 4);
            }
            let g = g5();
            assert_eq!(count_node_iterator_pp(&g, &OrderRank::compute(&g, OrderKind::ByDegree), variant), 2);
            let p = path(4);
            assert_eq!(count_node_iterator_pp(&p, &OrderRank::compute(&p, OrderKind::ById), variant), 0);
        }
    }

    #[test]
    fn node_iterator_n_trace_on_g5() {
        let mut list = TriangleList::default();
        let t = count_node_iterator_n(&degree_eff(&g5()), &mut list);
        assert_eq!(t, 2);
        assert_eq!(list.triangles, vec![[0, 1, 2], [1, 2, 3]]);
    }

    #[test]
    fn complete_graphs() {
        for n in 3..=8u32 {
            let expected = (n * (n - 1) * (n - 2) / 6) as u64;
            assert_eq!(count_triangles(&degree_eff(&complete(n))), expected);
        }
    }

    #[test]
    fn ordering_costs_on_g5() {
        let g = g5();
        assert_eq!(ordering_cost(&g, &OrderRank::compute(&g, OrderKind::ByDegree)), 14);
        assert_eq!(ordering_cost(&g, &OrderRank::compute(&g, OrderKind::ById)), 16);
    }

    #[test]
    fn edge_counts() {
        let e = per_edge_triangle_counts(&degree_eff(&g5()));
        assert_eq!(e[&(1, 2)], 2);
        for key in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            assert_eq!(e[&key], 1);
        }
        assert_eq!(e[&(3, 4)], 0);
        assert_eq!(e.values().sum::<u64>(), 6);

        let k4 = per_edge_triangle_counts(&degree_eff(&complete(4)));
        assert_eq!(k4.len(), 6);
        assert!(k4.values().all(|&t| t == 2));

        let star = per_edge_triangle_counts(&degree_eff(&star(5)));
        assert!(star.values().all(|&t| t == 0));
    }

    #[test]
    fn node_counts_on_g5() {
        assert_eq!(node_triangle_counts(&degree_eff(&g5())), vec![1, 2, 2, 1, 0]);
    }
}
