//! Whole-graph statistics and the optimal-rank-count estimator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::order::{EffectiveAdjacency, OrderKind, OrderRank};
use crate::sequential::{count_triangles, per_edge_triangle_counts};
use crate::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeSummary {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    pub median: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "T")]
    pub triangles: u64,
    /// Normalized triangle count `T / n`.
    pub ntc: f64,
    /// Pairs of triangles sharing an edge.
    pub k: u64,
    pub degree: DegreeSummary,
}

pub fn graph_stats(graph: &Graph) -> GraphStats {
    let eff = EffectiveAdjacency::build(graph, &OrderRank::compute(graph, OrderKind::ByDegree));
    let triangles = count_triangles(&eff);
    let k = per_edge_triangle_counts(&eff)
        .values()
        .map(|&t| t * t.saturating_sub(1) / 2)
        .sum();
    let n = graph.node_count();
    GraphStats {
        n,
        m: graph.edge_count(),
        triangles,
        ntc: normalized_triangle_count(triangles, n),
        k,
        degree: degree_summary(graph),
    }
}

/// `T / n`; 0 for an empty graph.
pub fn normalized_triangle_count(triangles: u64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        triangles as f64 / n as f64
    }
}

pub fn degree_summary(graph: &Graph) -> DegreeSummary {
    let mut d = graph.degrees();
    if d.is_empty() {
        return DegreeSummary {
            min: 0,
            max: 0,
            mean: 0.0,
            median: 0.0,
        };
    }
    d.sort_unstable();
    let len = d.len();
    let median = if len % 2 == 1 {
        d[len / 2] as f64
    } else {
        (d[len / 2 - 1] + d[len / 2]) as f64 / 2.0
    };
    DegreeSummary {
        min: d[0],
        max: d[len - 1],
        mean: 2.0 * graph.edge_count() as f64 / len as f64,
        median,
    }
}

/// A measured optimum: `p_opt` ranks were best for `n` nodes of average degree `dbar`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoptBase<S> {
    pub n: S,
    pub dbar: S,
    pub p_opt: S,
}

/// Extrapolates the best rank count to a graph with `n` nodes and average
/// degree `dbar`: `p_opt ≈ p′_opt · (d̄/d̄′) · √(n/n′)`, rounded to the nearest
/// integer.
pub fn estimate_p_opt<S: Scalar>(n: S, dbar: S, base: PoptBase<S>) -> Result<u64> {
    for (name, x) in [("n", n), ("dbar", dbar), ("base n", base.n), ("base dbar", base.dbar), ("base p_opt", base.p_opt)] {
        if !(x > S::zero()) || !x.is_finite() {
            return Err(Error::invalid(format!("{name} must be positive and finite, got {x}")));
        }
    }
    let est = base.p_opt * (dbar / base.dbar) * (n / base.n).sqrt();
    est.round()
        .to_u64()
        .ok_or_else(|| Error::invalid(format!("estimate {est} does not fit a rank count")))
}
