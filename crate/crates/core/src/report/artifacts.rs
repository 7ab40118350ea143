use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AnalysisOptions, AnovaUnit};
use crate::centrality::{CentralityScores, ClusterNetworkStats, CnScope};
use crate::community::{EdgeWeighting, Merge};
use crate::error::Result;
use crate::graph::WorkerGraph;
use crate::metrics::{ActivitySummary, ActivityWindow, MetricTable};

pub const GRAPH_FILE: &str = "graph.json";
pub const PARTITION_FILE: &str = "partition.json";
pub const NETWORK_FILE: &str = "network_summary.json";
pub const METRICS_FILE: &str = "metrics.json";
pub const ANOVA_FILE: &str = "anova.json";
pub const PROVENANCE_FILE: &str = "provenance.json";
pub const REPORT_FILE: &str = "report.md";
pub const CHART_DIR: &str = "charts";

/// Projected worker network. `input_hash` is the dataset checksum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphArtifact {
    pub input_hash: String,
    pub min_weight: u32,
    /// Explicit activity window, if one was requested.
    pub window: Option<ActivityWindow>,
    pub activity: ActivitySummary,
    /// Active workers over all workers in the dataset.
    pub active_ratio: Option<f64>,
    pub tasks: usize,
    pub registrations: usize,
    pub duplicate_registrations: usize,
    pub node_count: usize,
    pub edge_count: usize,
    pub total_weight: u64,
    pub nodes: Vec<String>,
    /// `(u, v, weight)` with `u < v`, indices into `nodes`.
    pub edges: Vec<(usize, usize, u32)>,
}

impl GraphArtifact {
    pub fn graph(&self) -> Result<WorkerGraph> {
        let edges: Vec<(&str, &str, u32)> =
            self.edges.iter().map(|&(u, v, w)| (self.nodes[u].as_str(), self.nodes[v].as_str(), w)).collect();
        let nodes: Vec<&str> = self.nodes.iter().map(String::as_str).collect();
        WorkerGraph::from_edges(&nodes, &edges)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionArtifact {
    pub input_hash: String,
    pub weighting: EdgeWeighting,
    pub cluster_count: usize,
    pub modularity: f64,
    /// Decreasing.
    pub sizes: Vec<usize>,
    pub best_step: usize,
    pub assignment: BTreeMap<String, usize>,
    pub merge_trace: Vec<Merge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkArtifact {
    pub input_hash: String,
    pub cn_scope: CnScope,
    pub worker_rank_method: String,
    pub clusters: Vec<ClusterNetworkStats>,
    pub scores: CentralityScores,
}

/// `input_hash` is the partition artifact hash; the dataset is named separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsArtifact {
    pub input_hash: String,
    pub dataset_checksum: String,
    pub table: MetricTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestStatus {
    Tested,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaTest {
    pub metric: String,
    pub status: TestStatus,
    pub reason: Option<String>,
    /// Clusters that contributed a group, in group order.
    pub clusters: Vec<usize>,
    pub group_sizes: Vec<usize>,
    pub group_means: Vec<f64>,
    pub grand_mean: Option<f64>,
    /// `null` when infinite; see `degenerate`.
    pub f_statistic: Option<f64>,
    pub df_between: Option<usize>,
    pub df_within: Option<usize>,
    pub p_value: Option<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaArtifact {
    pub input_hash: String,
    pub unit: AnovaUnit,
    pub design: String,
    pub tests: Vec<AnovaTest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub dataset_checksum: String,
    pub dataset_generator: String,
    pub seed: Option<u64>,
    pub rng: Option<String>,
    pub options: AnalysisOptions,
    /// Artifact file name to SHA-256 of its bytes.
    pub artifacts: BTreeMap<String, String>,
}
