use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::partition::{NonOverlapPartition, PartitionPlan};
use crate::runtime::{Message, Payload, Rank, RankContext};
use crate::sequential::for_each_common;
use crate::sink::TriangleSink;

use super::RankCount;

/// Direct approach: for each off-core `u ∈ N_v`, request `N_u` from its owner
/// and intersect locally. Rows are refetched on every use.
pub async fn anop_direct_count<S: TriangleSink>(
    part: &NonOverlapPartition,
    plan: &PartitionPlan,
    ctx: &mut RankContext,
    mut sink: S,
) -> Result<RankCount> {
    let mut out = RankCount::default();
    let mut controls = 0usize;

    for v in part.core() {
        let nv = part.row(v);
        for &u in nv {
            if part.is_core(u) {
                out.cost += for_each_common(nv, part.row(u), |w| {
                    out.triangles += 1;
                    sink.triangle(v, u, w);
                });
                continue;
            }
            let owner = plan.owner(u);
            ctx.send(owner, Payload::Request { node: u })?;
            loop {
                let msg = ctx.recv().await?;
                match msg.payload {
                    Payload::Data { node, neighbors } if msg.src == owner && node == u => {
                        out.cost += for_each_common(nv, &neighbors, |w| {
                            out.triangles += 1;
                            sink.triangle(v, u, w);
                        });
                        break;
                    }
                    other => serve(part, ctx, &mut controls, msg.src, other)?,
                }
            }
        }
        for msg in ctx.drain().await {
            serve(part, ctx, &mut controls, msg.src, msg.payload)?;
        }
    }

    ctx.broadcast_control()?;
    while controls + 1 < ctx.ranks() {
        let msg = ctx.recv().await?;
        serve(part, ctx, &mut controls, msg.src, msg.payload)?;
    }
    Ok(out)
}

fn serve(
    part: &NonOverlapPartition,
    ctx: &mut RankContext,
    controls: &mut usize,
    src: Rank,
    payload: Payload,
) -> Result<()> {
    match payload {
        Payload::Request { node } if part.is_core(node) => {
            let neighbors = part.row(node).to_vec();
            ctx.send(src, Payload::Data { node, neighbors })
        }
        Payload::Request { node } => Err(Error::protocol(
            ctx.rank(),
            format!("rank {src} requested node {node}, which is not a core node here"),
        )),
        Payload::Control => {
            *controls += 1;
            Ok(())
        }
        Payload::Data { node, .. } => Err(Error::protocol(
            ctx.rank(),
            format!("unrequested row of node {node} from rank {src}"),
        )),
        Payload::Tallies { .. } => Err(Error::protocol(ctx.rank(), "tallies during counting")),
    }
}

/// Surrogate approach: for each core `v`, ship `N_v` once to every rank
/// owning some `u ∈ N_v`; the receiver finishes the intersections.
pub async fn anop_surrogate_count<S: TriangleSink>(
    part: &NonOverlapPartition,
    plan: &PartitionPlan,
    ctx: &mut RankContext,
    mut sink: S,
) -> Result<RankCount> {
    let mut out = RankCount::default();
    let mut controls = 0usize;

    for v in part.core() {
        let nv = part.row(v);
        // N_v is ID-sorted and cores are contiguous, so owners arrive grouped
        let mut last_proc: Option<Rank> = None;
        for &u in nv {
            if part.is_core(u) {
                out.cost += for_each_common(nv, part.row(u), |w| {
                    out.triangles += 1;
                    sink.triangle(v, u, w);
                });
            } else {
                let owner = plan.owner(u);
                if last_proc != Some(owner) {
                    ctx.send(
                        owner,
                        Payload::Data {
                            node: v,
                            neighbors: nv.to_vec(),
                        },
                    )?;
                    last_proc = Some(owner);
                }
            }
        }
        for msg in ctx.drain().await {
            receive(part, ctx.rank(), msg, &mut controls, &mut out, &mut sink)?;
        }
    }

    ctx.broadcast_control()?;
    while controls + 1 < ctx.ranks() {
        let msg = ctx.recv().await?;
        receive(part, ctx.rank(), msg, &mut controls, &mut out, &mut sink)?;
    }
    Ok(out)
}

fn receive<S: TriangleSink>(
    part: &NonOverlapPartition,
    me: Rank,
    msg: Message,
    controls: &mut usize,
    out: &mut RankCount,
    sink: &mut S,
) -> Result<()> {
    match msg.payload {
        Payload::Data { node, neighbors } => {
            let got = surrogate_handle(part, node, &neighbors, sink);
            out.triangles += got.triangles;
            out.cost += got.cost;
            Ok(())
        }
        Payload::Control => {
            *controls += 1;
            Ok(())
        }
        Payload::Request { node } => Err(Error::protocol(
            me,
            format!("request for node {node} from rank {} in surrogate mode", msg.src),
        )),
        Payload::Tallies { .. } => Err(Error::protocol(me, "tallies during counting")),
    }
}

/// Finishes the intersections for a foreign row `x = N_v`: every core
/// `u ∈ x` contributes the triangles `(v, u, w)` for `w ∈ N_u ∩ x`.
///
/// The core members of `x` form one contiguous run, found by binary search.
pub fn surrogate_handle<S: TriangleSink>(
    part: &NonOverlapPartition,
    v: NodeId,
    x: &[NodeId],
    mut sink: S,
) -> RankCount {
    let core = part.core();
    let lo = x.partition_point(|&u| u < core.start);
    let hi = x.partition_point(|&u| u < core.end);
    let mut out = RankCount::default();
    for &u in &x[lo..hi] {
        out.cost += for_each_common(part.row(u), x, |w| {
            out.triangles += 1;
            sink.triangle(v, u, w);
        });
    }
    out
}
