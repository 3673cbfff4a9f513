//! Load-balancing cost functions, prefix-sum boundaries and per-rank partitions.
//!
//! Core sets are contiguous node-ID ranges `[x_i, x_{i+1})`. Boundaries are
//! placed on the cumulative cost `F(x) = Σ_{v < x} f(v)` so that each rank
//! receives roughly `α = F(n) / p`.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::order::EffectiveAdjacency;

/// Per-node cost estimate `f(v)` used to balance counting work.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CostKind {
    /// `1`: equal node counts.
    N,
    /// `d_v`: equal edge counts.
    D,
    /// `d̂_v`
    DH,
    /// `d_v · d̂_v`
    DDH,
    /// `d̂_v²`
    DH2,
    /// `Σ_{u ∈ N_v} (d̂_v + d̂_u)`
    DPD,
    /// `Σ_{u ∈ 𝒩_v} (d̂_v + d̂_u)`, the all-neighbor form of DPD.
    #[serde(rename = "DPD-ALL")]
    DPDAll,
    /// `Σ_{u ∈ 𝒩_v − N_v} (d̂_v + d̂_u)`, the non-overlapping engine's cost.
    NOV,
}

impl CostKind {
    pub const ALL: [CostKind; 8] = [
        CostKind::N,
        CostKind::D,
        CostKind::DH,
        CostKind::DDH,
        CostKind::DH2,
        CostKind::DPD,
        CostKind::DPDAll,
        CostKind::NOV,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CostKind::N => "N",
            CostKind::D => "D",
            CostKind::DH => "DH",
            CostKind::DDH => "DDH",
            CostKind::DH2 => "DH2",
            CostKind::DPD => "DPD",
            CostKind::DPDAll => "DPD-ALL",
            CostKind::NOV => "NOV",
        }
    }
}

impl fmt::Display for CostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CostKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CostKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown cost kind {s:?}")))
    }
}

/// Node costs `f` and their prefix sums `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostVector {
    costs: Vec<u64>,
    prefix: Vec<u64>,
}

impl CostVector {
    pub fn new(costs: Vec<u64>) -> Self {
        let prefix = std::iter::once(0)
            .chain(costs.iter().scan(0u64, |acc, &c| {
                *acc += c;
                Some(*acc)
            }))
            .collect();
        CostVector { costs, prefix }
    }

    pub fn costs(&self) -> &[u64] {
        &self.costs
    }

    /// `F(x) = Σ_{v < x} f(v)` for `x` in `0..=n`.
    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn total(&self) -> u64 {
        self.prefix[self.costs.len()]
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    /// `Σ_{v ∈ range} f(v)`.
    pub fn range_sum(&self, range: Range<NodeId>) -> u64 {
        let (s, e) = (range.start as usize, range.end as usize);
        if s >= e {
            return 0;
        }
        self.prefix[e] - self.prefix[s]
    }
}

/// Evaluates `f(v)` for every node. `eff` should come from the same order
/// the engines count with.
pub fn node_costs(graph: &Graph, eff: &EffectiveAdjacency, kind: CostKind) -> CostVector {
    let dh = eff.eff_degrees();
    let costs = graph
        .nodes()
        .map(|v| {
            let vi = v as usize;
            let d = graph.degree(v) as u64;
            let h = dh[vi] as u64;
            match kind {
                CostKind::N => 1,
                CostKind::D => d,
                CostKind::DH => h,
                CostKind::DDH => d * h,
                CostKind::DH2 => h * h,
                CostKind::DPD => eff.row(v).iter().map(|&u| h + dh[u as usize] as u64).sum(),
                CostKind::DPDAll => graph
                    .neighbors(v)
                    .iter()
                    .map(|&u| h + dh[u as usize] as u64)
                    .sum(),
                CostKind::NOV => {
                    // 𝒩_v − N_v: both rows are ID-sorted, so a merge skips N_v
                    let mine = eff.row(v);
                    let mut k = 0;
                    let mut sum = 0;
                    for &u in graph.neighbors(v) {
                        while k < mine.len() && mine[k] < u {
                            k += 1;
                        }
                        if k < mine.len() && mine[k] == u {
                            continue;
                        }
                        sum += h + dh[u as usize] as u64;
                    }
                    sum
                }
            }
        })
        .collect();
    CostVector::new(costs)
}

/// Boundaries `0 = x_0 ≤ x_1 ≤ … ≤ x_p = n`; rank `i` owns `[x_i, x_{i+1})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartitionPlan {
    boundaries: Vec<usize>,
}

impl PartitionPlan {
    pub fn from_boundaries(boundaries: Vec<usize>) -> Result<Self> {
        if boundaries.len() < 2 {
            return Err(Error::invalid("a plan needs at least two boundaries"));
        }
        if boundaries[0] != 0 {
            return Err(Error::invalid("first boundary must be 0"));
        }
        if boundaries.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("boundaries must be non-decreasing"));
        }
        Ok(PartitionPlan { boundaries })
    }

    /// A single rank owning every node.
    pub fn single(n: usize) -> Self {
        PartitionPlan {
            boundaries: vec![0, n],
        }
    }

    pub fn ranks(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn node_count(&self) -> usize {
        *self.boundaries.last().unwrap()
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    /// Core set `V_i^c`.
    pub fn core(&self, rank: usize) -> Range<NodeId> {
        self.boundaries[rank] as NodeId..self.boundaries[rank + 1] as NodeId
    }

    /// The rank whose core set contains `v`.
    #[inline]
    pub fn owner(&self, v: NodeId) -> usize {
        debug_assert!((v as usize) < self.node_count());
        self.boundaries.partition_point(|&x| x <= v as usize) - 1
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("boundaries serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let boundaries: Vec<usize> = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("bad plan JSON: {e}")))?;
        Self::from_boundaries(boundaries)
    }
}

/// Places boundary `x_j` at the first `x` with `F(x) ≥ j·α`, where
/// `F(x) = Σ_{v<x} f(v)` and `α = F(n)/p`, so `F(x_j − 1) < j·α ≤ F(x_j)`
/// for `0 < j < p`. Comparisons are done as `p·F(x) ≥ j·F(n)` in integers.
///
/// When every cost is zero there is nothing to balance on, and unit costs
/// are used instead.
pub fn compute_boundaries(costs: &CostVector, p: usize) -> Result<PartitionPlan> {
    if p == 0 {
        return Err(Error::invalid("rank count must be at least 1"));
    }
    let n = costs.len();
    if costs.total() == 0 && n > 0 {
        return compute_boundaries(&CostVector::new(vec![1; n]), p);
    }
    let total = costs.total() as u128;
    let prefix = costs.prefix();
    let mut boundaries = Vec::with_capacity(p + 1);
    boundaries.push(0);
    for j in 1..p {
        let target = j as u128 * total;
        let x = prefix.partition_point(|&f| (p as u128) * (f as u128) < target);
        boundaries.push(x);
    }
    boundaries.push(n);
    Ok(PartitionPlan { boundaries })
}

/// Overlapping partition for rank `i`: `N_v` for every `v ∈ V_i = V_i^c ∪ ⋃ N_v`,
/// with rows of non-core nodes trimmed to `V_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapPartition {
    rank: usize,
    core: Range<NodeId>,
    nodes: Vec<NodeId>,
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl OverlapPartition {
    pub fn build(eff: &EffectiveAdjacency, plan: &PartitionPlan, rank: usize) -> Self {
        let core = plan.core(rank);
        let mut nodes: Vec<NodeId> = core.clone().collect();
        for v in core.clone() {
            nodes.extend_from_slice(eff.row(v));
        }
        nodes.sort_unstable();
        nodes.dedup();

        let mut offsets = Vec::with_capacity(nodes.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for &w in &nodes {
            if core.contains(&w) {
                targets.extend_from_slice(eff.row(w));
            } else {
                targets.extend(
                    eff.row(w)
                        .iter()
                        .copied()
                        .filter(|x| nodes.binary_search(x).is_ok()),
                );
            }
            offsets.push(targets.len());
        }
        OverlapPartition {
            rank,
            core,
            nodes,
            offsets,
            targets,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn core(&self) -> Range<NodeId> {
        self.core.clone()
    }

    /// `V_i`, ascending.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Stored `N_v`, or `None` if `v ∉ V_i`.
    #[inline]
    pub fn row(&self, v: NodeId) -> Option<&[NodeId]> {
        let k = self.nodes.binary_search(&v).ok()?;
        Some(&self.targets[self.offsets[k]..self.offsets[k + 1]])
    }

    pub fn entry_count(&self) -> usize {
        self.targets.len()
    }

    /// Copy keeping only entries `(v, u)` with `keep(v, u)`.
    pub fn filtered(&self, mut keep: impl FnMut(NodeId, NodeId) -> bool) -> Self {
        let mut offsets = Vec::with_capacity(self.offsets.len());
        let mut targets = Vec::with_capacity(self.targets.len());
        offsets.push(0);
        for (k, &v) in self.nodes.iter().enumerate() {
            let row = &self.targets[self.offsets[k]..self.offsets[k + 1]];
            targets.extend(row.iter().copied().filter(|&u| keep(v, u)));
            offsets.push(targets.len());
        }
        OverlapPartition {
            rank: self.rank,
            core: self.core.clone(),
            nodes: self.nodes.clone(),
            offsets,
            targets,
        }
    }
}

/// Non-overlapping partition for rank `i`: `N_v` for core nodes only, so
/// every edge is stored by exactly one rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonOverlapPartition {
    rank: usize,
    core: Range<NodeId>,
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
}

impl NonOverlapPartition {
    pub fn build(eff: &EffectiveAdjacency, plan: &PartitionPlan, rank: usize) -> Self {
        let core = plan.core(rank);
        let mut offsets = Vec::with_capacity(core.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for v in core.clone() {
            targets.extend_from_slice(eff.row(v));
            offsets.push(targets.len());
        }
        NonOverlapPartition {
            rank,
            core,
            offsets,
            targets,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn core(&self) -> Range<NodeId> {
        self.core.clone()
    }

    #[inline]
    pub fn is_core(&self, v: NodeId) -> bool {
        self.core.contains(&v)
    }

    /// `N_v` for a core node. Panics if `v` is not a core node.
    #[inline]
    pub fn row(&self, v: NodeId) -> &[NodeId] {
        let k = (v - self.core.start) as usize;
        &self.targets[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn entry_count(&self) -> usize {
        self.targets.len()
    }

    pub fn filtered(&self, mut keep: impl FnMut(NodeId, NodeId) -> bool) -> Self {
        let mut offsets = Vec::with_capacity(self.offsets.len());
        let mut targets = Vec::with_capacity(self.targets.len());
        offsets.push(0);
        for v in self.core.clone() {
            targets.extend(self.row(v).iter().copied().filter(|&u| keep(v, u)));
            offsets.push(targets.len());
        }
        NonOverlapPartition {
            rank: self.rank,
            core: self.core.clone(),
            offsets,
            targets,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::order::{OrderKind, OrderRank};
    use proptest::prelude::*;

    fn degree_eff(g: &Graph) -> EffectiveAdjacency {
        EffectiveAdjacency::build(g, &OrderRank::compute(g, OrderKind::ByDegree))
    }

    fn g5_plan() -> PartitionPlan {
        PartitionPlan::from_boundaries(vec![0, 2, 5]).unwrap()
    }

    #[test]
    fn g5_costs() {
        let g = g5();
        let eff = degree_eff(&g);
        let n = node_costs(&g, &eff, CostKind::N);
        assert_eq!(n.costs(), &[1, 1, 1, 1, 1]);
        assert_eq!(n.total(), 5);
        assert_eq!(node_costs(&g, &eff, CostKind::D).costs(), &[2, 3, 3, 3, 1]);
        assert_eq!(node_costs(&g, &eff, CostKind::DH).costs(), &[2, 2, 1, 0, 1]);
        assert_eq!(node_costs(&g, &eff, CostKind::DDH).costs(), &[4, 6, 3, 0, 1]);
        assert_eq!(node_costs(&g, &eff, CostKind::DH2).costs(), &[4, 4, 1, 0, 1]);
        assert_eq!(node_costs(&g, &eff, CostKind::DPD).costs(), &[7, 5, 1, 0, 1]);
        assert_eq!(node_costs(&g, &eff, CostKind::NOV).costs(), &[0, 4, 6, 4, 0]);
        // DPD-ALL: f(0)=(2+2)+(2+1); f(1)=(2+2)+(2+1)+(2+0); f(2)=(1+2)+(1+2)+(1+0);
        // f(3)=(0+2)+(0+1)+(0+1); f(4)=(1+0)
        assert_eq!(node_costs(&g, &eff, CostKind::DPDAll).costs(), &[7, 9, 7, 4, 1]);
    }

    #[test]
    fn cost_kind_names_round_trip() {
        for k in CostKind::ALL {
            assert_eq!(k.name().parse::<CostKind>().unwrap(), k);
        }
        assert_eq!("dpd".parse::<CostKind>().unwrap(), CostKind::DPD);
        assert!("XYZ".parse::<CostKind>().is_err());
    }

    #[test]
    fn boundary_examples() {
        let plan = compute_boundaries(&CostVector::new(vec![1, 1, 1, 1]), 2).unwrap();
        assert_eq!(plan.boundaries(), &[0, 2, 4]);
        assert_eq!(plan.core(0), 0..2);
        let plan = compute_boundaries(&CostVector::new(vec![10, 1, 1]), 2).unwrap();
        assert_eq!(plan.boundaries(), &[0, 1, 3]);
        let plan = compute_boundaries(&CostVector::new(vec![3, 0, 5, 2]), 1).unwrap();
        assert_eq!(plan.boundaries(), &[0, 4]);
        assert!(compute_boundaries(&CostVector::new(vec![1]), 0).is_err());
    }

    #[test]
    fn concentrated_costs_leave_empty_cores() {
        let plan = compute_boundaries(&CostVector::new(vec![0, 100, 0, 0]), 3).unwrap();
        assert_eq!(plan.boundaries(), &[0, 2, 2, 4]);
        assert!(plan.core(1).is_empty());
        assert_eq!(plan.owner(1), 0);
        assert_eq!(plan.owner(2), 2);
    }

    #[test]
    fn zero_costs_fall_back_to_unit() {
        let plan = compute_boundaries(&CostVector::new(vec![0; 6]), 3).unwrap();
        assert_eq!(plan.boundaries(), &[0, 2, 4, 6]);
        let empty = compute_boundaries(&CostVector::new(vec![]), 3).unwrap();
        assert_eq!(empty.boundaries(), &[0, 0, 0, 0]);
    }

    #[test]
    fn plan_json() {
        let plan = g5_plan();
        assert_eq!(plan.to_json(), "[0,2,5]");
        assert_eq!(PartitionPlan::from_json("[0,2,5]").unwrap(), plan);
        assert!(PartitionPlan::from_json("[1,2]").is_err());
        assert!(PartitionPlan::from_json("[0,3,2]").is_err());
    }

    #[test]
    fn g5_overlap_partition() {
        let eff = degree_eff(&g5());
        let part = OverlapPartition::build(&eff, &g5_plan(), 0);
        assert_eq!(part.core(), 0..2);
        assert_eq!(part.nodes(), &[0, 1, 2, 3]);
        assert_eq!(part.row(2), Some(&[3][..]));
        assert_eq!(part.row(3), Some(&[][..]));
        assert_eq!(part.row(4), None);

        let whole = OverlapPartition::build(&eff, &PartitionPlan::single(5), 0);
        for v in 0..5 {
            assert_eq!(whole.row(v), Some(eff.row(v)));
        }

        let idle = PartitionPlan::from_boundaries(vec![0, 0, 5]).unwrap();
        let empty = OverlapPartition::build(&eff, &idle, 0);
        assert!(empty.nodes().is_empty());
        assert_eq!(empty.entry_count(), 0);
    }

    #[test]
    fn g5_nonoverlap_partition() {
        let eff = degree_eff(&g5());
        let plan = g5_plan();
        let p1 = NonOverlapPartition::build(&eff, &plan, 1);
        assert_eq!(p1.row(2), &[3]);
        assert_eq!(p1.row(3), &[] as &[NodeId]);
        assert_eq!(p1.row(4), &[3]);
        assert_eq!(p1.entry_count(), 2);
        let p0 = NonOverlapPartition::build(&eff, &plan, 0);
        assert_eq!(p0.entry_count() + p1.entry_count(), 6);

        let per_node = PartitionPlan::from_boundaries((0..=5).collect()).unwrap();
        for i in 0..5 {
            let part = NonOverlapPartition::build(&eff, &per_node, i);
            assert_eq!(part.core(), i as u32..i as u32 + 1);
            assert_eq!(part.row(i as u32), eff.row(i as u32));
        }
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1u32..60, prop::collection::vec((0u32..60, 0u32..60), 0..300)).prop_map(|(n, edges)| {
            Graph::with_nodes(n as usize, edges.into_iter().map(|(u, v)| (u % n, v % n))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn boundaries_satisfy_prefix_inequality(
            costs in prop::collection::vec(0u64..50, 1..80),
            p in 1usize..20,
        ) {
            let cv = CostVector::new(costs);
            let plan = compute_boundaries(&cv, p).unwrap();
            prop_assert_eq!(plan.ranks(), p);
            prop_assert_eq!(plan.boundaries()[0], 0);
            prop_assert_eq!(plan.node_count(), cv.len());
            let total = cv.total();
            if total > 0 {
                let f = cv.prefix();
                for j in 1..p {
                    let x = plan.boundaries()[j];
                    prop_assert!(x >= 1);
                    let before = f[x - 1];
                    // F(x_j − 1) < jα ≤ F(x_j), scaled by p
                    prop_assert!((p as u128) * (before as u128) < (j as u128) * total as u128);
                    prop_assert!((j as u128) * (total as u128) <= (p as u128) * f[x] as u128);
                }
            }
            let mut owned = vec![0; cv.len()];
            for i in 0..p {
                for v in plan.core(i) {
                    owned[v as usize] += 1;
                    prop_assert_eq!(plan.owner(v), i);
                }
            }
            prop_assert!(owned.iter().all(|&c| c == 1));
        }

        #[test]
        fn partition_storage(g in arb_graph(), p in 1usize..10, kind_idx in 0usize..8) {
            let eff = degree_eff(&g);
            let costs = node_costs(&g, &eff, CostKind::ALL[kind_idx]);
            let plan = compute_boundaries(&costs, p).unwrap();
            let mut overlap = 0;
            let mut disjoint = 0;
            for i in 0..p {
                let o = OverlapPartition::build(&eff, &plan, i);
                let d = NonOverlapPartition::build(&eff, &plan, i);
                for v in plan.core(i) {
                    prop_assert_eq!(o.row(v), Some(eff.row(v)));
                    prop_assert_eq!(d.row(v), eff.row(v));
                }
                // every triangle whose ≺-smallest node is core is decidable locally
                for v in plan.core(i) {
                    for &u in eff.row(v) {
                        let local = o.row(u).unwrap();
                        for &w in eff.row(v) {
                            if eff.row(u).binary_search(&w).is_ok() {
                                prop_assert!(local.binary_search(&w).is_ok());
                            }
                        }
                    }
                }
                overlap += o.entry_count();
                disjoint += d.entry_count();
            }
            prop_assert_eq!(disjoint, g.edge_count());
            prop_assert!(overlap >= disjoint);
        }
    }
}
