//! Parallel counting engines over the rank harness.
//!
//! * [`EngineKind::Aop`]: overlapping partitions, no messages while counting.
//! * [`EngineKind::AnopDirect`]: non-overlapping partitions, rows fetched on demand.
//! * [`EngineKind::AnopSurrogate`]: non-overlapping partitions, rows pushed once
//!   per destination and intersected by the receiver.
//! * [`EngineKind::Seq`]: NodeIteratorN on one thread, for reference.

mod anop;
mod aop;
mod clustering;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use anop::{anop_direct_count, anop_surrogate_count, surrogate_handle};
pub use aop::aop_count;
pub use clustering::{coefficient, ClusteringResult};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::order::{EffectiveAdjacency, OrderKind, OrderRank};
use crate::partition::{compute_boundaries, node_costs, CostKind, NonOverlapPartition, OverlapPartition, PartitionPlan};
use crate::runtime::{run_ranks, ExecMode, MessageStats, RankContext};
use crate::sequential::for_each_common;
use crate::sink::{LocalTally, TriangleCounter, TriangleSink};
use crate::sparsify::{sparsify_adjacency, SparsifyConfig};
use crate::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum EngineKind {
    Seq,
    Aop,
    AnopDirect,
    #[default]
    AnopSurrogate,
}

impl EngineKind {
    pub const ALL: [EngineKind; 4] = [
        EngineKind::Seq,
        EngineKind::Aop,
        EngineKind::AnopDirect,
        EngineKind::AnopSurrogate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Seq => "seq",
            EngineKind::Aop => "aop",
            EngineKind::AnopDirect => "anop-direct",
            EngineKind::AnopSurrogate => "anop-surrogate",
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        EngineKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown engine {s:?}")))
    }
}

impl Serialize for EngineKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Everything that determines a run besides the graph.
#[derive(Clone, Debug, PartialEq)]
pub struct EngineConfig {
    pub engine: EngineKind,
    pub ranks: usize,
    pub cost: CostKind,
    pub ordering: OrderKind,
    pub mode: ExecMode,
    pub sparsify: Option<SparsifyConfig>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            engine: EngineKind::default(),
            ranks: 1,
            cost: CostKind::DPD,
            ordering: OrderKind::ByDegree,
            mode: ExecMode::Interleaved,
            sparsify: None,
        }
    }
}

impl EngineConfig {
    pub fn new(engine: EngineKind, ranks: usize) -> Self {
        EngineConfig {
            engine,
            ranks,
            ..Default::default()
        }
    }

    pub fn with_cost(mut self, cost: CostKind) -> Self {
        self.cost = cost;
        self
    }

    pub fn with_ordering(mut self, ordering: OrderKind) -> Self {
        self.ordering = ordering;
        self
    }

    pub fn with_mode(mut self, mode: ExecMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_sparsify(mut self, sparsify: SparsifyConfig) -> Self {
        self.sparsify = Some(sparsify);
        self
    }
}

/// Triangles found and element comparisons spent by one rank.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RankCount {
    pub triangles: u64,
    pub cost: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RankReport {
    #[serde(rename = "T")]
    pub triangles: u64,
    pub core_nodes: usize,
    pub data_sent: u64,
    pub data_recv: u64,
    pub control_sent: u64,
    pub control_recv: u64,
    pub realized_cost: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub engine: EngineKind,
    pub p: usize,
    pub cost_kind: CostKind,
    pub ordering: String,
    pub total: u64,
    pub plan: PartitionPlan,
    pub per_rank: Vec<RankReport>,
}

impl RunReport {
    pub fn data_messages(&self) -> u64 {
        self.per_rank.iter().map(|r| r.data_sent).sum()
    }

    /// `max / mean` of realized per-rank cost; 1 is perfect balance.
    pub fn cost_imbalance(&self) -> f64 {
        let costs: Vec<u64> = self.per_rank.iter().map(|r| r.realized_cost).collect();
        let total: u64 = costs.iter().sum();
        if total == 0 {
            return 1.0;
        }
        let max = *costs.iter().max().unwrap() as f64;
        max * costs.len() as f64 / total as f64
    }
}

/// Counts triangles.
pub fn run_engine(graph: &Graph, cfg: &EngineConfig) -> Result<RunReport> {
    execute(graph, cfg, |_| TriangleCounter::default(), false).map(|e| e.report)
}

/// Counts triangles, reporting each to the sink built for the rank that
/// found it. Sinks are returned in rank order.
pub fn run_engine_with<S, F>(graph: &Graph, cfg: &EngineConfig, make_sink: F) -> Result<(RunReport, Vec<S>)>
where
    S: TriangleSink + Send,
    F: Fn(usize) -> S + Sync,
{
    execute(graph, cfg, make_sink, false).map(|e| (e.report, e.sinks))
}

/// Counts triangles, routes per-node tallies to the owning ranks and
/// computes every clustering coefficient.
pub fn aggregate_clustering<S: Scalar>(graph: &Graph, cfg: &EngineConfig) -> Result<(RunReport, ClusteringResult<S>)> {
    let run = execute(graph, cfg, |_| TriangleCounter::default(), true)?;
    let node_counts = run.node_counts.expect("aggregation requested");
    Ok((run.report, ClusteringResult::from_node_counts(graph, node_counts)?))
}

struct Execution<S> {
    report: RunReport,
    sinks: Vec<S>,
    node_counts: Option<Vec<u64>>,
}

struct RankResult<S> {
    count: RankCount,
    sink: S,
    core_counts: Option<Vec<u64>>,
    reduced: Option<u64>,
}

/// Forwards to the caller's sink and optionally keeps per-node tallies.
struct Tracked<S> {
    user: S,
    local: Option<LocalTally>,
}

impl<S: TriangleSink> TriangleSink for Tracked<S> {
    #[inline]
    fn triangle(&mut self, a: NodeId, b: NodeId, c: NodeId) {
        self.user.triangle(a, b, c);
        if let Some(local) = &mut self.local {
            local.triangle(a, b, c);
        }
    }
}

fn execute<S, F>(graph: &Graph, cfg: &EngineConfig, make_sink: F, aggregate: bool) -> Result<Execution<S>>
where
    S: TriangleSink + Send,
    F: Fn(usize) -> S + Sync,
{
    if cfg.ranks == 0 {
        return Err(Error::invalid("rank count must be at least 1"));
    }
    let order = OrderRank::compute(graph, cfg.ordering);
    let eff = EffectiveAdjacency::build(graph, &order);
    let n = graph.node_count();

    if cfg.engine == EngineKind::Seq {
        return execute_sequential(graph, cfg, &eff, make_sink, aggregate);
    }

    let costs = node_costs(graph, &eff, cfg.cost);
    let plan = compute_boundaries(&costs, cfg.ranks)?;
    let (eff, plan) = (&eff, &plan);
    let make_sink = &make_sink;
    let sparsify = cfg.sparsify.as_ref();

    let output = run_ranks(cfg.ranks, cfg.mode, |mut ctx: RankContext| async move {
        let rank = ctx.rank();
        let mut sink = Tracked {
            user: make_sink(rank),
            local: aggregate.then(LocalTally::default),
        };
        let count = match cfg.engine {
            EngineKind::Aop => {
                let mut part = OverlapPartition::build(eff, plan, rank);
                if let Some(sp) = sparsify {
                    part = part.filtered(|v, u| sp.keeps(rank, v, u));
                }
                aop_count(&part, &mut sink)
            }
            EngineKind::AnopDirect | EngineKind::AnopSurrogate => {
                let mut part = NonOverlapPartition::build(eff, plan, rank);
                if let Some(sp) = sparsify {
                    part = part.filtered(|v, u| sp.keeps(rank, v, u));
                }
                if cfg.engine == EngineKind::AnopDirect {
                    anop_direct_count(&part, plan, &mut ctx, &mut sink).await?
                } else {
                    anop_surrogate_count(&part, plan, &mut ctx, &mut sink).await?
                }
            }
            EngineKind::Seq => unreachable!(),
        };
        let core_counts = match &sink.local {
            Some(local) => Some(clustering::exchange_tallies(&mut ctx, plan, local).await?),
            None => None,
        };
        let reduced = ctx.reduce_sum(count.triangles).await?;
        Ok(RankResult {
            count,
            sink: sink.user,
            core_counts,
            reduced,
        })
    })?;

    let mut per_rank = Vec::with_capacity(cfg.ranks);
    let mut sinks = Vec::with_capacity(cfg.ranks);
    let mut node_counts = aggregate.then(|| Vec::with_capacity(n));
    let total = output.results[0].reduced.expect("rank 0 holds the reduction");
    for (rank, (res, stats)) in output.results.into_iter().zip(&output.stats).enumerate() {
        per_rank.push(rank_report(res.count, plan.core(rank).len(), stats));
        sinks.push(res.sink);
        if let (Some(all), Some(mine)) = (node_counts.as_mut(), res.core_counts) {
            all.extend(mine);
        }
    }
    debug_assert_eq!(total, per_rank.iter().map(|r| r.triangles).sum::<u64>());
    Ok(Execution {
        report: RunReport {
            engine: cfg.engine,
            p: cfg.ranks,
            cost_kind: cfg.cost,
            ordering: cfg.ordering.to_string(),
            total,
            plan: plan.clone(),
            per_rank,
        },
        sinks,
        node_counts,
    })
}

fn execute_sequential<S, F>(
    graph: &Graph,
    cfg: &EngineConfig,
    eff: &EffectiveAdjacency,
    make_sink: F,
    aggregate: bool,
) -> Result<Execution<S>>
where
    S: TriangleSink,
    F: Fn(usize) -> S,
{
    let sparsified;
    let eff = match &cfg.sparsify {
        Some(sp) => {
            sparsified = sparsify_adjacency(eff, sp, 0);
            &sparsified
        }
        None => eff,
    };
    let n = graph.node_count();
    let mut sink = make_sink(0);
    let mut node_counts = aggregate.then(|| vec![0u64; n]);
    let mut count = RankCount::default();
    for v in 0..n as NodeId {
        let nv = eff.row(v);
        for &u in nv {
            count.cost += for_each_common(nv, eff.row(u), |w| {
                count.triangles += 1;
                sink.triangle(v, u, w);
                if let Some(t) = node_counts.as_mut() {
                    t[v as usize] += 1;
                    t[u as usize] += 1;
                    t[w as usize] += 1;
                }
            });
        }
    }
    Ok(Execution {
        report: RunReport {
            engine: EngineKind::Seq,
            p: 1,
            cost_kind: cfg.cost,
            ordering: cfg.ordering.to_string(),
            total: count.triangles,
            plan: PartitionPlan::single(n),
            per_rank: vec![rank_report(count, n, &MessageStats::default())],
        },
        sinks: vec![sink],
        node_counts,
    })
}

fn rank_report(count: RankCount, core_nodes: usize, stats: &MessageStats) -> RankReport {
    RankReport {
        triangles: count.triangles,
        core_nodes,
        data_sent: stats.data_sent,
        data_recv: stats.data_received,
        control_sent: stats.control_sent,
        control_recv: stats.control_received,
        realized_cost: count.cost,
    }
}
