use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::partition::PartitionPlan;
use crate::runtime::{Payload, RankContext};
use crate::sink::LocalTally;
use crate::Scalar;

/// Per-node triangle counts `T_v` and clustering coefficients
/// `C_v = 2T_v / (d_v(d_v − 1))`, with `C_v = 0` when `d_v < 2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusteringResult<S> {
    pub triangles: Vec<u64>,
    pub coefficients: Vec<S>,
}

impl<S: Scalar> ClusteringResult<S> {
    pub fn from_node_counts(graph: &Graph, triangles: Vec<u64>) -> Result<Self> {
        if triangles.len() != graph.node_count() {
            return Err(Error::invalid(format!(
                "{} node counts for a graph with {} nodes",
                triangles.len(),
                graph.node_count()
            )));
        }
        let coefficients = triangles
            .iter()
            .enumerate()
            .map(|(v, &t)| coefficient(graph.degree(v as NodeId), t))
            .collect();
        Ok(ClusteringResult {
            triangles,
            coefficients,
        })
    }

    pub fn node_count(&self) -> usize {
        self.triangles.len()
    }

    /// Mean of `C_v` over all nodes; 0 for an empty graph.
    pub fn mean(&self) -> S {
        if self.coefficients.is_empty() {
            return S::zero();
        }
        let sum = self.coefficients.iter().fold(S::zero(), |a, &c| a + c);
        sum / S::from_usize(self.coefficients.len()).unwrap()
    }

    /// `Σ_v T_v`, which is `3T`.
    pub fn incidence_total(&self) -> u64 {
        self.triangles.iter().sum()
    }
}

pub fn coefficient<S: Scalar>(degree: usize, triangles: u64) -> S {
    if degree < 2 {
        return S::zero();
    }
    let pairs = S::from_usize(degree).unwrap() * S::from_usize(degree - 1).unwrap();
    let two = S::one() + S::one();
    two * S::from_u64(triangles).unwrap() / pairs
}

/// Routes every nonzero tally for an off-core node to its owner and sums
/// what arrives. Returns `T_v` for the core nodes of this rank.
///
/// Every rank sends exactly one (possibly empty) tally message to every
/// other rank, so each waits for exactly `p − 1`.
pub(crate) async fn exchange_tallies(ctx: &mut RankContext, plan: &PartitionPlan, local: &LocalTally) -> Result<Vec<u64>> {
    let me = ctx.rank();
    let p = ctx.ranks();
    let core: Range<NodeId> = plan.core(me);
    let mut totals = vec![0u64; core.len()];
    let mut outgoing: Vec<Vec<(NodeId, u64)>> = vec![Vec::new(); p];
    for (&v, &c) in &local.counts {
        if c == 0 {
            continue;
        }
        if core.contains(&v) {
            totals[(v - core.start) as usize] += c;
        } else {
            outgoing[plan.owner(v)].push((v, c));
        }
    }

    ctx.barrier().await?;
    for (dst, counts) in outgoing.into_iter().enumerate() {
        if dst != me {
            ctx.send(dst, Payload::Tallies { counts })?;
        }
    }
    let mut received = 0;
    while received + 1 < p {
        let msg = ctx.recv().await?;
        let Payload::Tallies { counts } = msg.payload else {
            return Err(Error::protocol(me, format!("expected tallies from rank {}", msg.src)));
        };
        for (v, c) in counts {
            if !core.contains(&v) {
                return Err(Error::protocol(
                    me,
                    format!("rank {} sent a tally for node {v}, owned by rank {}", msg.src, plan.owner(v)),
                ));
            }
            totals[(v - core.start) as usize] += c;
        }
        received += 1;
    }
    Ok(totals)
}
