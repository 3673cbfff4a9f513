//! DOULION-style edge sparsification: keep each stored `(v, u)` entry with
//! probability `q`, count exactly, scale by `1/q³`.
//!
//! Retention draws are a pure function of `(seed, rank, v, u)` (per-partition)
//! or `(seed, min, max)` (global), so any engine, rank count or execution mode
//! sees the same draws for the same key.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::engines::{run_engine, EngineConfig, RunReport};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::order::{EffectiveAdjacency, OrderRank};
use crate::partition::PartitionPlan;
use crate::sequential::{count_node_iterator_n, per_edge_triangle_counts};
use crate::sink::TriangleSink;
use crate::Scalar;

/// How retention draws are keyed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SparsifyMode {
    /// One draw per stored entry per rank: an edge held by two overlapping
    /// partitions survives independently in each.
    #[default]
    PerPartition,
    /// One draw per undirected edge, shared by every rank that stores it.
    Global,
}

impl FromStr for SparsifyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "per-partition" | "perpartition" | "partition" => Ok(SparsifyMode::PerPartition),
            "global" => Ok(SparsifyMode::Global),
            other => Err(Error::invalid(format!("unknown sparsify mode {other:?}"))),
        }
    }
}

impl fmt::Display for SparsifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SparsifyMode::PerPartition => "per-partition",
            SparsifyMode::Global => "global",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SparsifyConfig {
    q: f64,
    seed: u64,
    mode: SparsifyMode,
}

impl SparsifyConfig {
    pub fn new(q: f64, seed: u64, mode: SparsifyMode) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::invalid(format!("retention probability must be in (0, 1], got {q}")));
        }
        Ok(SparsifyConfig { q, seed, mode })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mode(&self) -> SparsifyMode {
        self.mode
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SparsifyConfig { seed, ..self }
    }

    /// Whether rank `rank` keeps its stored entry `u ∈ N_v`.
    #[inline]
    pub fn keeps(&self, rank: usize, v: NodeId, u: NodeId) -> bool {
        if self.q >= 1.0 {
            return true;
        }
        let key = match self.mode {
            SparsifyMode::PerPartition => keyed(self.seed, rank as u64, v, u),
            SparsifyMode::Global => keyed(self.seed, u64::MAX, v.min(u), v.max(u)),
        };
        unit_interval(key) < self.q
    }

    /// `T′ / q³`.
    pub fn scale<S: Scalar>(&self, sampled: u64) -> S {
        let q = S::from_f64(self.q).unwrap();
        S::from_u64(sampled).unwrap() / (q * q * q)
    }
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn keyed(seed: u64, stream: u64, v: NodeId, u: NodeId) -> u64 {
    let h = splitmix64(seed);
    let h = splitmix64(h ^ stream);
    splitmix64(h ^ ((v as u64) << 32 | u as u64))
}

#[inline]
fn unit_interval(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sparsified copy of a whole effective adjacency, as held by rank `rank`.
pub fn sparsify_adjacency(eff: &EffectiveAdjacency, cfg: &SparsifyConfig, rank: usize) -> EffectiveAdjacency {
    eff.filtered(|v, u| cfg.keeps(rank, v, u))
}

/// One approximate count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate<S> {
    /// `T′`, the exact count on the sparsified structure.
    pub sampled: u64,
    pub estimate: S,
}

/// Runs `engine` on the sparsified structure and scales the count.
pub fn approx_count<S: Scalar>(graph: &Graph, engine: &EngineConfig, cfg: SparsifyConfig) -> Result<(Estimate<S>, RunReport)> {
    let mut engine = engine.clone();
    engine.sparsify = Some(cfg);
    let report = run_engine(graph, &engine)?;
    let estimate = Estimate {
        sampled: report.total,
        estimate: cfg.scale(report.total),
    };
    Ok((estimate, report))
}

/// Exact inputs to the estimator variance and both closed forms.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VarianceReport<S> {
    #[serde(rename = "T")]
    pub triangles: u64,
    /// Pairs of triangles sharing an edge.
    pub k: u64,
    /// Such pairs whose ≺-smallest nodes are core nodes of one partition.
    pub k_prime: u64,
    pub var: S,
    pub var_prime: S,
}

impl<S: Scalar> VarianceReport<S> {
    /// `k − k′`, pairs split across partitions.
    pub fn k_double_prime(&self) -> u64 {
        self.k - self.k_prime
    }
}

/// `(1/q³ − 1)·T + 2k·(1/q − 1)`.
pub fn estimator_variance<S: Scalar>(q: S, triangles: u64, k: u64) -> S {
    let one = S::one();
    let two = one + one;
    let t = S::from_u64(triangles).unwrap();
    let k = S::from_u64(k).unwrap();
    (one / (q * q * q) - one) * t + two * k * (one / q - one)
}

/// Computes `T`, `k`, `k′` for `order` and `plan`, and the variance of the
/// global (`var`) and per-partition (`var_prime`) estimators at `q`.
///
/// `var_prime` describes the overlapping engine, where an entry held by
/// several ranks is drawn by each. The non-overlapping engines hold every
/// oriented entry once, so their per-partition variance is `var`.
pub fn variance_report<S: Scalar>(graph: &Graph, order: &OrderRank, plan: &PartitionPlan, q: S) -> Result<VarianceReport<S>> {
    if !(q > S::zero() && q <= S::one()) {
        return Err(Error::invalid("retention probability must be in (0, 1]"));
    }
    if plan.node_count() != graph.node_count() {
        return Err(Error::invalid(format!(
            "plan covers {} nodes, graph has {}",
            plan.node_count(),
            graph.node_count()
        )));
    }
    let eff = EffectiveAdjacency::build(graph, order);
    let per_edge = per_edge_triangle_counts(&eff);
    let k: u64 = per_edge.values().map(|&t| t * t.saturating_sub(1) / 2).sum();

    // each triangle is found from its ≺-smallest node v; tally (edge, owner(v))
    struct ByOwner<'a> {
        plan: &'a PartitionPlan,
        counts: HashMap<(NodeId, NodeId, usize), u64>,
    }
    impl TriangleSink for ByOwner<'_> {
        fn triangle(&mut self, v: NodeId, u: NodeId, w: NodeId) {
            let owner = self.plan.owner(v);
            for (a, b) in [(v, u), (v, w), (u, w)] {
                *self.counts.entry((a.min(b), a.max(b), owner)).or_insert(0) += 1;
            }
        }
    }
    let mut by_owner = ByOwner {
        plan,
        counts: HashMap::new(),
    };
    let triangles = count_node_iterator_n(&eff, &mut by_owner);
    let k_prime: u64 = by_owner.counts.values().map(|&c| c * c.saturating_sub(1) / 2).sum();

    Ok(VarianceReport {
        triangles,
        k,
        k_prime,
        var: estimator_variance(q, triangles, k),
        var_prime: estimator_variance(q, triangles, k_prime),
    })
}

/// Sample mean and unbiased sample variance.
pub fn mean_and_variance<S: Scalar>(xs: &[S]) -> (S, S) {
    let n = S::from_usize(xs.len()).unwrap();
    if xs.is_empty() {
        return (S::nan(), S::nan());
    }
    let mean = xs.iter().fold(S::zero(), |a, &x| a + x) / n;
    if xs.len() < 2 {
        return (mean, S::zero());
    }
    let ss = xs.iter().fold(S::zero(), |a, &x| a + (x - mean) * (x - mean));
    (mean, ss / (n - S::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::order::OrderKind;
    use crate::sequential::count_triangles;

    fn degree(g: &Graph) -> OrderRank {
        OrderRank::compute(g, OrderKind::ByDegree)
    }

    #[test]
    fn config_validation() {
        assert!(SparsifyConfig::new(0.0, 1, SparsifyMode::Global).is_err());
        assert!(SparsifyConfig::new(1.5, 1, SparsifyMode::Global).is_err());
        assert!(SparsifyConfig::new(f64::NAN, 1, SparsifyMode::Global).is_err());
        assert!(SparsifyConfig::new(1.0, 1, SparsifyMode::PerPartition).is_ok());
        assert_eq!("global".parse::<SparsifyMode>().unwrap(), SparsifyMode::Global);
        assert!("sometimes".parse::<SparsifyMode>().is_err());
    }

    #[test]
    fn full_retention_is_identity() {
        let g = wheel(9);
        let eff = EffectiveAdjacency::build(&g, &degree(&g));
        for mode in [SparsifyMode::Global, SparsifyMode::PerPartition] {
            let cfg = SparsifyConfig::new(1.0, 3, mode).unwrap();
            assert_eq!(sparsify_adjacency(&eff, &cfg, 2), eff);
        }
    }

    #[test]
    fn global_draws_ignore_rank_and_direction() {
        let cfg = SparsifyConfig::new(0.5, 11, SparsifyMode::Global).unwrap();
        for v in 0..40 {
            for u in 0..40 {
                let k = cfg.keeps(0, v, u);
                assert_eq!(k, cfg.keeps(7, v, u));
                assert_eq!(k, cfg.keeps(3, u, v));
            }
        }
    }

    #[test]
    fn retained_fraction_matches_q() {
        let g = complete(40);
        let eff = EffectiveAdjacency::build(&g, &degree(&g));
        let entries = eff.entry_count() as f64;
        for q in [0.05, 0.3] {
            let runs = 200;
            let cfg = SparsifyConfig::new(q, 0, SparsifyMode::PerPartition).unwrap();
            let kept: f64 = (0..runs)
                .map(|s| sparsify_adjacency(&eff, &cfg.with_seed(s), 0).entry_count() as f64)
                .sum();
            let n = entries * runs as f64;
            let sd = (n * q * (1.0 - q)).sqrt();
            assert!((kept - n * q).abs() < 3.0 * sd, "q={q}: kept {kept} of {n}");
        }
    }

    #[test]
    fn per_partition_draws_are_independent_across_ranks() {
        let cfg = SparsifyConfig::new(0.5, 0, SparsifyMode::PerPartition).unwrap();
        let runs = 4000;
        let (mut a_sum, mut b_sum, mut ab_sum) = (0.0, 0.0, 0.0);
        for s in 0..runs {
            let c = cfg.with_seed(s);
            let a = c.keeps(0, 3, 4) as u8 as f64;
            let b = c.keeps(1, 3, 4) as u8 as f64;
            a_sum += a;
            b_sum += b;
            ab_sum += a * b;
        }
        let n = runs as f64;
        let cov = ab_sum / n - (a_sum / n) * (b_sum / n);
        let corr = cov / 0.25;
        assert!(corr.abs() < 3.0 / n.sqrt(), "correlation {corr}");
    }

    #[test]
    fn variance_on_g5() {
        let g = g5();
        let order = degree(&g);
        let r: VarianceReport<f64> = variance_report(&g, &order, &PartitionPlan::single(5), 0.5).unwrap();
        assert_eq!((r.triangles, r.k, r.k_prime), (2, 1, 1));
        assert_eq!(r.var, 16.0);
        assert_eq!(r.var_prime, 16.0);

        // both triangles share (1,2); their ≺-smallest nodes 0 and 1 split under [0,1,5]
        let split = PartitionPlan::from_boundaries(vec![0, 1, 5]).unwrap();
        let r: VarianceReport<f64> = variance_report(&g, &order, &split, 0.5).unwrap();
        assert_eq!((r.k, r.k_prime, r.k_double_prime()), (1, 0, 1));
        assert_eq!(r.var_prime, 14.0);
    }

    #[test]
    fn triangle_free_variance_is_zero() {
        let g = star(6);
        let r: VarianceReport<f32> = variance_report(&g, &degree(&g), &PartitionPlan::single(7), 0.2).unwrap();
        assert_eq!((r.triangles, r.k), (0, 0));
        assert_eq!(r.var, 0.0);
    }

    #[test]
    fn complete_graph_k() {
        // in K_n every edge lies in n−2 triangles
        let n = 7u64;
        let g = complete(n as u32);
        let r: VarianceReport<f64> = variance_report(&g, &degree(&g), &PartitionPlan::single(7), 1.0).unwrap();
        assert_eq!(r.k, n * (n - 1) / 2 * (n - 2) * (n - 3) / 2);
        assert_eq!(r.var, 0.0);
    }

    #[test]
    fn global_sparsified_count_is_seed_deterministic() {
        let g = complete(12);
        let eff = EffectiveAdjacency::build(&g, &degree(&g));
        let cfg = SparsifyConfig::new(0.4, 9, SparsifyMode::Global).unwrap();
        let a = count_triangles(&sparsify_adjacency(&eff, &cfg, 0));
        let b = count_triangles(&sparsify_adjacency(&eff, &cfg, 5));
        assert_eq!(a, b);
        assert!(a < 220);
    }

    #[test]
    fn sample_moments() {
        let (m, v) = mean_and_variance(&[1.0f64, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((v - 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(mean_and_variance(&[7.0f64]), (7.0, 0.0));
    }
}
