//! Co-registration network analytics for crowdsourced software workers.
//!
//! The crate turns task-registration records into a worker network, finds
//! worker clusters by greedy modularity agglomeration, scores each worker on
//! network position and on performance/preference/strategy ratios, and tests
//! whether those ratios differ between clusters.
//!
//! Module map:
//! - [`data`]: dataset model, delimited-file ingestion, canonical interchange,
//!   synthetic generator.
//! - [`graph`]: bipartite worker/task incidence and its projection onto workers.
//! - [`community`]: modularity and greedy agglomerative clustering.
//! - [`centrality`]: common neighbours, worker rank, closeness, betweenness.
//! - [`metrics`]: belts, active-worker filter and the nine worker metrics.
//! - [`stats`]: descriptive statistics, F distribution and one-way ANOVA.
//! - [`report`]: pipeline orchestration, JSON artifacts, SVG charts, report.

pub mod centrality;
pub mod community;
pub mod data;
mod error;
pub mod graph;
pub mod metrics;
pub mod report;
pub mod stats;

pub use centrality::{CentralityScores, ClusterNetworkSummary, CnScope};
pub use community::{EdgeWeighting, Merge, Partition};
pub use data::{Dataset, RegistrationEvent, SynthConfig, TaskRecord, TaskStatus, WorkerRecord};
pub use error::{Error, Result, RowDiagnostic};
pub use graph::{BipartiteGraph, WorkerGraph};
pub use metrics::{Belt, MetricTable};
pub use stats::AnovaResult;
