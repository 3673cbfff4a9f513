//! Exact and approximate triangle counting, clustering coefficients and
//! partition-parallel counting engines for undirected graphs.
//!
//! The parallel engines run over [`runtime`], an in-process message-passing
//! harness in which each rank owns its partition and talks to the others
//! only through messages and collectives.
//!
//! ```
//! use trigraph::{run_engine, EngineConfig, EngineKind, Graph};
//!
//! let g = Graph::from_edges([(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)]);
//! let report = run_engine(&g, &EngineConfig::new(EngineKind::AnopSurrogate, 2)).unwrap();
//! assert_eq!(report.total, 2);
//! ```

pub mod engines;
pub mod error;
pub mod gen;
pub mod graph;
pub mod io;
pub mod order;
pub mod partition;
pub mod runtime;
pub mod sequential;
pub mod sink;
pub mod sparsify;
pub mod stats;

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub use engines::{aggregate_clustering, run_engine, run_engine_with, ClusteringResult, EngineConfig, EngineKind, RunReport};
pub use error::{Error, Result};
pub use graph::{Graph, NodeId};
pub use order::{EffectiveAdjacency, OrderKind, OrderRank};
pub use partition::{compute_boundaries, node_costs, CostKind, CostVector, PartitionPlan};
pub use runtime::ExecMode;
pub use sparsify::{approx_count, variance_report, SparsifyConfig, SparsifyMode, VarianceReport};
pub use stats::{estimate_p_opt, graph_stats, GraphStats, PoptBase};

/// Real type used by the analytic layers (clustering coefficients, estimator
/// variance, rank-count extrapolation).
pub trait Scalar: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {}

impl<T> Scalar for T where T: Float + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {}

pub type Clustering = ClusteringResult<f64>;
pub type Clustering32 = ClusteringResult<f32>;
pub type Variance = VarianceReport<f64>;
pub type Variance32 = VarianceReport<f32>;
