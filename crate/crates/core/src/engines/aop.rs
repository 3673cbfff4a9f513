use crate::partition::OverlapPartition;
use crate::sequential::for_each_common;
use crate::sink::TriangleSink;

use super::RankCount;

/// Counts the triangles whose ≺-smallest node is a core node of `part`,
/// using only partition-local rows. Sends nothing.
pub fn aop_count<S: TriangleSink>(part: &OverlapPartition, mut sink: S) -> RankCount {
    let mut out = RankCount::default();
    for v in part.core() {
        let nv = part.row(v).expect("core rows are stored");
        for &u in nv {
            let nu = part.row(u).expect("effective neighbors of core nodes are stored");
            out.cost += for_each_common(nv, nu, |w| {
                out.triangles += 1;
                sink.triangle(v, u, w);
            });
        }
    }
    out
}
