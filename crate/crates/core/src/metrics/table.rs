use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Belt, ClusterMap, MetricContext};
use crate::data::Dataset;
use crate::error::Result;

/// Metrics that get per-cluster tables and a significance test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Metric {
    Reliability,
    Trustworthiness,
    Success,
    Efficiency,
    Elasticity,
}

impl Metric {
    pub const ALL: [Metric; 5] =
        [Metric::Reliability, Metric::Trustworthiness, Metric::Success, Metric::Efficiency, Metric::Elasticity];

    pub fn code(self) -> &'static str {
        match self {
            Metric::Reliability => "RL",
            Metric::Trustworthiness => "TL",
            Metric::Success => "SL",
            Metric::Efficiency => "EF",
            Metric::Elasticity => "EL",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Reliability => "reliability",
            Metric::Trustworthiness => "trustworthiness",
            Metric::Success => "success",
            Metric::Efficiency => "efficiency",
            Metric::Elasticity => "elasticity",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerMetrics {
    pub worker_id: String,
    pub cluster: usize,
    pub belt: Belt,
    pub rating: f64,
    pub registrations: usize,
    pub submissions: usize,
    pub valid_submissions: usize,
    pub wins: usize,
    pub reliability: Option<f64>,
    pub trustworthiness: Option<f64>,
    pub success: Option<f64>,
    pub efficiency: Option<f64>,
    pub proficiency: BTreeMap<String, Option<f64>>,
    pub contest: Option<f64>,
    pub confidence: usize,
    pub deceitfulness: Option<f64>,
}

impl WorkerMetrics {
    pub fn value(&self, m: Metric) -> Option<f64> {
        match m {
            Metric::Reliability => self.reliability,
            Metric::Trustworthiness => self.trustworthiness,
            Metric::Success => self.success,
            Metric::Efficiency => self.efficiency,
            Metric::Elasticity => None,
        }
    }
}

/// Mean of one metric over the workers of one (cluster, belt) cell that have
/// a defined value. `mean` is `None` when `count` is 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeltCell {
    pub cluster: usize,
    pub belt: Belt,
    pub mean: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectElasticity {
    pub project_id: String,
    /// Peak registrants from the cluster over the project's tasks.
    pub cluster_peak: usize,
    /// Peak registrants overall over the project's tasks.
    pub total_peak: usize,
}

impl ProjectElasticity {
    pub fn ratio(&self) -> f64 {
        self.cluster_peak as f64 / self.total_peak as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterElasticity {
    pub cluster: usize,
    pub value: Option<f64>,
    pub projects: Vec<ProjectElasticity>,
}

/// Strategy means over the Blue and Yellow workers of one cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRow {
    pub cluster: usize,
    pub workers: usize,
    pub registrations: Option<f64>,
    pub confidence: Option<f64>,
    pub contest: Option<f64>,
    pub deceitfulness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricTable {
    pub cluster_count: usize,
    pub workers: Vec<WorkerMetrics>,
    /// Per metric code (RL, TL, SL, EF): cells in cluster-major, belt order.
    pub belt_tables: BTreeMap<String, Vec<BeltCell>>,
    pub elasticity: Vec<ClusterElasticity>,
    /// One row per cluster, Blue and Yellow workers only.
    pub strategy: Vec<StrategyRow>,
    /// Mean registrations per worker, all belts, indexed by cluster.
    pub mean_registrations: Vec<Option<f64>>,
}

/// Mean summed in sorted order, so it does not depend on worker order.
fn mean(values: &[f64]) -> Option<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    (!sorted.is_empty()).then(|| sorted.iter().sum::<f64>() / sorted.len() as f64)
}

impl MetricTable {
    pub fn cells(&self, m: Metric) -> &[BeltCell] {
        self.belt_tables.get(m.code()).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn cell(&self, m: Metric, cluster: usize, belt: Belt) -> Option<&BeltCell> {
        self.cells(m).iter().find(|c| c.cluster == cluster && c.belt == belt)
    }

    /// Per-cluster observations of a per-worker metric, Red excluded.
    pub fn worker_observations(&self, m: Metric) -> BTreeMap<usize, Vec<f64>> {
        let mut out: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for w in self.workers.iter().filter(|w| w.belt != Belt::Red) {
            if let Some(v) = w.value(m) {
                out.entry(w.cluster).or_default().push(v);
            }
        }
        out
    }

    /// Per-cluster defined cell means of a per-worker metric.
    pub fn cell_observations(&self, m: Metric) -> BTreeMap<usize, Vec<f64>> {
        let mut out: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for c in self.cells(m) {
            if let Some(v) = c.mean {
                out.entry(c.cluster).or_default().push(v);
            }
        }
        out
    }

    /// Per-cluster per-project elasticity ratios.
    pub fn elasticity_observations(&self) -> BTreeMap<usize, Vec<f64>> {
        self.elasticity
            .iter()
            .filter(|e| !e.projects.is_empty())
            .map(|e| (e.cluster, e.projects.iter().map(ProjectElasticity::ratio).collect()))
            .collect()
    }
}

/// Compute every worker metric and aggregate per cluster and belt.
///
/// Workers absent from `clusters` are not reported but still count as
/// registrants in competition levels and elasticity totals.
pub fn build_metric_table(dataset: &Dataset, clusters: &ClusterMap) -> Result<MetricTable> {
    let ctx = MetricContext::new(dataset, clusters)?;
    let cluster_count = clusters.values().max().map_or(0, |&c| c + 1);

    let mut workers = Vec::with_capacity(clusters.len());
    for (id, &cluster) in clusters {
        let p = ctx.profile(id)?;
        workers.push(WorkerMetrics {
            cluster,
            belt: p.belt,
            rating: p.rating,
            registrations: p.registrations,
            submissions: p.submissions,
            valid_submissions: p.valid_submissions,
            wins: p.wins,
            reliability: ctx.reliability(id)?,
            trustworthiness: ctx.trustworthiness(id)?,
            success: ctx.success(id)?,
            efficiency: ctx.efficiency(id)?,
            proficiency: ctx.proficiencies(id)?,
            contest: ctx.contest(id)?,
            confidence: ctx.confidence(id)?,
            deceitfulness: ctx.deceitfulness(id)?,
            worker_id: p.worker_id,
        });
    }

    let mut grouped: BTreeMap<(usize, Belt), Vec<&WorkerMetrics>> = BTreeMap::new();
    for w in &workers {
        grouped.entry((w.cluster, w.belt)).or_default().push(w);
    }
    let members = |c: usize, b: Belt| grouped.get(&(c, b)).map(Vec::as_slice).unwrap_or(&[]);

    let mut belt_tables = BTreeMap::new();
    for m in &Metric::ALL[..4] {
        let mut cells = Vec::new();
        for c in 0..cluster_count {
            for b in Belt::REPORTED {
                let values: Vec<f64> = members(c, b).iter().filter_map(|w| w.value(*m)).collect();
                cells.push(BeltCell { cluster: c, belt: b, mean: mean(&values), count: values.len() });
            }
        }
        belt_tables.insert(m.code().to_string(), cells);
    }

    let elasticity = (0..cluster_count)
        .map(|c| ClusterElasticity { cluster: c, value: ctx.elasticity(c), projects: ctx.elasticity_by_project(c) })
        .collect();

    let strategy = (0..cluster_count)
        .map(|c| {
            let ws: Vec<&WorkerMetrics> =
                members(c, Belt::Blue).iter().chain(members(c, Belt::Yellow)).copied().collect();
            let collect =
                |f: fn(&WorkerMetrics) -> Option<f64>| mean(&ws.iter().filter_map(|w| f(w)).collect::<Vec<_>>());
            StrategyRow {
                cluster: c,
                workers: ws.len(),
                registrations: collect(|w| Some(w.registrations as f64)),
                confidence: collect(|w| Some(w.confidence as f64)),
                contest: collect(|w| w.contest),
                deceitfulness: collect(|w| w.deceitfulness),
            }
        })
        .collect();

    let mean_registrations = (0..cluster_count)
        .map(|c| {
            let r: Vec<f64> = workers.iter().filter(|w| w.cluster == c).map(|w| w.registrations as f64).collect();
            mean(&r)
        })
        .collect();

    Ok(MetricTable { cluster_count, workers, belt_tables, elasticity, strategy, mean_registrations })
}
