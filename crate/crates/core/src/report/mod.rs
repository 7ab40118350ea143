//! Pipeline stages, their JSON artifacts, charts and the markdown report.
//!
//! Every stage reads its inputs from the run directory and writes one
//! artifact, so running the stages one by one and running [`analyze`] produce
//! the same bytes. Each artifact records the SHA-256 of the artifact it was
//! computed from in `input_hash`.

mod artifacts;
mod chart;
mod json;
mod markdown;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use artifacts::*;
pub use chart::{render_bar_chart, ChartSpec};
pub use json::{read_json, round_significant, sha256_hex, to_stable_json, write_json};
pub use markdown::{emit_report, ALPHA};

use crate::centrality::{compute_scores, summarize_clusters, CnScope, DAMPING};
use crate::community::{cluster_sizes, greedy_cluster, partition_from_parts, EdgeWeighting};
use crate::data::{dataset_checksum, Dataset};
use crate::error::{Error, Result};
use crate::graph::{build_bipartite, project_workers_min_weight};
use crate::metrics::{build_metric_table, ActivitySummary, ActivityWindow, ClusterMap, Metric};
use crate::stats::one_way_anova;

/// Observation unit for the cross-cluster ANOVA of per-worker metrics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnovaUnit {
    /// One observation per worker.
    #[default]
    Worker,
    /// One observation per (cluster, belt) cell mean.
    Cell,
}

impl FromStr for AnovaUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "worker" => Ok(AnovaUnit::Worker),
            "cell" => Ok(AnovaUnit::Cell),
            _ => Err(Error::InvalidConfig(format!("unknown ANOVA unit {s:?} (expected worker or cell)"))),
        }
    }
}

impl fmt::Display for AnovaUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnovaUnit::Worker => "worker",
            AnovaUnit::Cell => "cell",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub weighting: EdgeWeighting,
    pub min_weight: u32,
    pub cn_scope: CnScope,
    pub anova_unit: AnovaUnit,
    pub window: Option<ActivityWindow>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            weighting: EdgeWeighting::Unweighted,
            min_weight: 1,
            cn_scope: CnScope::Cluster,
            anova_unit: AnovaUnit::Worker,
            window: None,
        }
    }
}

/// Dataset restricted to registrations inside `window`.
pub fn restrict_to_window(d: &Dataset, window: Option<&ActivityWindow>) -> Dataset {
    let mut out = d.clone();
    if let Some(w) = window {
        out.events.retain(|e| w.contains(e.registration_date));
    }
    out
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

/// Build the projected network of active workers and write `graph.json`.
pub fn run_network(dataset: &Dataset, options: &AnalysisOptions, dir: &Path) -> Result<GraphArtifact> {
    if options.min_weight == 0 {
        return Err(Error::InvalidConfig("--min-weight must be at least 1".into()));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let scoped = restrict_to_window(dataset, options.window.as_ref());
    let b = build_bipartite(&scoped.events);
    let g = project_workers_min_weight(&b, options.min_weight);
    let activity = ActivitySummary::compute(&dataset.events, dataset.workers.len(), options.window.as_ref());
    let art = GraphArtifact {
        input_hash: dataset_checksum(dataset),
        min_weight: options.min_weight,
        window: options.window,
        active_ratio: (!dataset.workers.is_empty())
            .then(|| activity.active_workers as f64 / dataset.workers.len() as f64),
        activity,
        tasks: b.task_ids().len(),
        registrations: scoped.events.len() - b.duplicate_count(),
        duplicate_registrations: b.duplicate_count(),
        node_count: g.node_count(),
        edge_count: g.edge_count(),
        total_weight: g.total_weight(),
        nodes: g.nodes().to_vec(),
        edges: g.edges().collect(),
    };
    write_json(&path(dir, GRAPH_FILE), &art)?;
    Ok(art)
}

/// Cluster the network in `graph.json`; writes `partition.json` and
/// `network_summary.json`.
pub fn run_cluster(options: &AnalysisOptions, dir: &Path) -> Result<(PartitionArtifact, NetworkArtifact)> {
    let (graph_art, graph_hash): (GraphArtifact, _) = read_json(&path(dir, GRAPH_FILE))?;
    let g = graph_art.graph()?;
    if g.edge_count() == 0 {
        return Err(Error::EdgelessNetwork);
    }
    let p = greedy_cluster(&g, options.weighting)?;
    let part = PartitionArtifact {
        input_hash: graph_hash,
        weighting: options.weighting,
        cluster_count: p.cluster_count(),
        modularity: p.modularity,
        sizes: cluster_sizes(&p),
        best_step: p.best_step,
        assignment: g.nodes().iter().cloned().zip(p.assignment.iter().copied()).collect(),
        merge_trace: p.merge_trace.clone(),
    };
    let part_hash = write_json(&path(dir, PARTITION_FILE), &part)?;

    let scores = compute_scores(&g, &p, options.cn_scope);
    let network = NetworkArtifact {
        input_hash: part_hash,
        cn_scope: options.cn_scope,
        worker_rank_method: format!(
            "damped link analysis over co-registration weights, damping {DAMPING}, uniform teleport"
        ),
        clusters: summarize_clusters(&scores, &p)?.clusters,
        scores,
    };
    write_json(&path(dir, NETWORK_FILE), &network)?;
    Ok((part, network))
}

/// Compute the metric table for the partition in `partition.json`; writes `metrics.json`.
pub fn run_metrics(dataset: &Dataset, dir: &Path) -> Result<MetricsArtifact> {
    let (graph_art, _): (GraphArtifact, _) = read_json(&path(dir, GRAPH_FILE))?;
    let checksum = dataset_checksum(dataset);
    if graph_art.input_hash != checksum {
        return Err(Error::Artifact {
            path: path(dir, GRAPH_FILE),
            message: format!("built from dataset {}, not {checksum}", graph_art.input_hash),
        });
    }
    let (part, part_hash): (PartitionArtifact, _) = read_json(&path(dir, PARTITION_FILE))?;
    let scoped = restrict_to_window(dataset, graph_art.window.as_ref());
    let clusters: ClusterMap = part.assignment.clone();
    let table = build_metric_table(&scoped, &clusters)?;
    let art = MetricsArtifact { input_hash: part_hash, dataset_checksum: checksum, table };
    write_json(&path(dir, METRICS_FILE), &art)?;
    Ok(art)
}

fn anova_test(metric: Metric, groups: BTreeMap<usize, Vec<f64>>) -> Result<AnovaTest> {
    let clusters: Vec<usize> = groups.keys().copied().collect();
    let data: Vec<Vec<f64>> = groups.into_values().collect();
    let mut test = AnovaTest {
        metric: metric.code().to_string(),
        status: TestStatus::Skipped,
        reason: None,
        clusters,
        group_sizes: data.iter().map(Vec::len).collect(),
        group_means: Vec::new(),
        grand_mean: None,
        f_statistic: None,
        df_between: None,
        df_within: None,
        p_value: None,
        degenerate: false,
    };
    match one_way_anova(&data) {
        Ok(r) => {
            test.status = TestStatus::Tested;
            test.f_statistic = r.f_statistic.is_finite().then_some(r.f_statistic);
            test.df_between = Some(r.df_between);
            test.df_within = Some(r.df_within);
            test.p_value = Some(r.p_value);
            test.group_means = r.group_means;
            test.grand_mean = Some(r.grand_mean);
            test.degenerate = r.degenerate;
        }
        Err(Error::InsufficientObservations(why)) => test.reason = Some(why),
        Err(e) => return Err(e),
    }
    Ok(test)
}

/// Cross-cluster ANOVA for every metric in `metrics.json`; writes `anova.json`.
///
/// Red workers are left out of per-worker groups. Elasticity is a cluster-level
/// quantity, so its observations are the per-project ratios regardless of
/// `unit`. A metric with fewer than two non-empty groups is skipped with the
/// reason recorded.
pub fn run_stats(options: &AnalysisOptions, dir: &Path) -> Result<AnovaArtifact> {
    let (metrics, metrics_hash): (MetricsArtifact, _) = read_json(&path(dir, METRICS_FILE))?;
    let table = &metrics.table;
    let tests = Metric::ALL
        .iter()
        .map(|&m| {
            let groups = match (m, options.anova_unit) {
                (Metric::Elasticity, _) => table.elasticity_observations(),
                (_, AnovaUnit::Worker) => table.worker_observations(m),
                (_, AnovaUnit::Cell) => table.cell_observations(m),
            };
            anova_test(m, groups)
        })
        .collect::<Result<_>>()?;
    let art = AnovaArtifact {
        input_hash: metrics_hash,
        unit: options.anova_unit,
        design: "one-way between-groups ANOVA; clusters are disjoint worker sets".into(),
        tests,
    };
    write_json(&path(dir, ANOVA_FILE), &art)?;
    Ok(art)
}

/// All stage artifacts of a run directory, with their file hashes.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedRun {
    pub graph: GraphArtifact,
    pub partition: PartitionArtifact,
    pub network: NetworkArtifact,
    pub metrics: MetricsArtifact,
    pub anova: AnovaArtifact,
    pub hashes: BTreeMap<String, String>,
}

/// Load a run directory and check that every artifact's `input_hash` matches
/// the artifact it claims to derive from.
pub fn load_run(dir: &Path) -> Result<LoadedRun> {
    let (graph, h_graph): (GraphArtifact, _) = read_json(&path(dir, GRAPH_FILE))?;
    let (partition, h_part): (PartitionArtifact, _) = read_json(&path(dir, PARTITION_FILE))?;
    let (network, h_net): (NetworkArtifact, _) = read_json(&path(dir, NETWORK_FILE))?;
    let (metrics, h_metrics): (MetricsArtifact, _) = read_json(&path(dir, METRICS_FILE))?;
    let (anova, h_anova): (AnovaArtifact, _) = read_json(&path(dir, ANOVA_FILE))?;
    let links = [
        (PARTITION_FILE, &partition.input_hash, &h_graph),
        (NETWORK_FILE, &network.input_hash, &h_part),
        (METRICS_FILE, &metrics.input_hash, &h_part),
        (ANOVA_FILE, &anova.input_hash, &h_metrics),
    ];
    for (file, claimed, actual) in links {
        if claimed != actual {
            return Err(Error::Artifact {
                path: path(dir, file),
                message: format!("input hash {claimed} does not match upstream artifact {actual}"),
            });
        }
    }
    if metrics.dataset_checksum != graph.input_hash {
        return Err(Error::Artifact {
            path: path(dir, METRICS_FILE),
            message: "metrics and graph were computed from different datasets".into(),
        });
    }
    let hashes = [
        (GRAPH_FILE, h_graph),
        (PARTITION_FILE, h_part),
        (NETWORK_FILE, h_net),
        (METRICS_FILE, h_metrics),
        (ANOVA_FILE, h_anova),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    Ok(LoadedRun { graph, partition, network, metrics, anova, hashes })
}

/// Chart file names (relative to the run directory) for the per-belt tables.
pub fn chart_files() -> Vec<(Metric, String)> {
    Metric::ALL[..4].iter().map(|&m| (m, format!("{CHART_DIR}/{}.svg", m.name()))).collect()
}

/// Render `report.md` and `charts/*.svg` from the artifacts in `dir`.
pub fn run_report(dir: &Path) -> Result<LoadedRun> {
    let run = load_run(dir)?;
    let chart_dir = path(dir, CHART_DIR);
    fs::create_dir_all(&chart_dir).map_err(|e| Error::io(&chart_dir, e))?;
    for (m, file) in chart_files() {
        let spec = ChartSpec {
            title: format!("Average worker {} per belt per cluster", m.name()),
            y_label: m.code().to_string(),
            cluster_count: run.metrics.table.cluster_count,
        };
        let svg = render_bar_chart(&spec, run.metrics.table.cells(m));
        let p = path(dir, &file);
        fs::write(&p, svg).map_err(|e| Error::io(&p, e))?;
    }
    let md = emit_report(&run);
    let p = path(dir, REPORT_FILE);
    fs::write(&p, md).map_err(|e| Error::io(&p, e))?;
    Ok(run)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageTiming {
    pub stage: &'static str,
    pub elapsed: Duration,
}

/// A completed pipeline run: stage outputs as written to disk, provenance and
/// wall-clock timings. Timings are never written to the run directory.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub dir: PathBuf,
    pub outputs: LoadedRun,
    pub provenance: Provenance,
    pub timings: Vec<StageTiming>,
}

/// Full pipeline: network, clustering, metrics, statistics, report.
pub fn analyze(dataset: &Dataset, options: &AnalysisOptions, dir: &Path) -> Result<PipelineRun> {
    let mut timings = Vec::new();
    let mut timed = |stage: &'static str, f: &mut dyn FnMut() -> Result<()>| -> Result<()> {
        let t = Instant::now();
        f()?;
        timings.push(StageTiming { stage, elapsed: t.elapsed() });
        Ok(())
    };
    timed("network", &mut || run_network(dataset, options, dir).map(drop))?;
    timed("cluster", &mut || run_cluster(options, dir).map(drop))?;
    timed("metrics", &mut || run_metrics(dataset, dir).map(drop))?;
    timed("stats", &mut || run_stats(options, dir).map(drop))?;
    let mut outputs = None;
    timed("report", &mut || {
        outputs = Some(run_report(dir)?);
        Ok(())
    })?;
    let outputs = outputs.expect("report stage ran");

    let mut artifacts = outputs.hashes.clone();
    for file in chart_files().into_iter().map(|(_, f)| f).chain([REPORT_FILE.to_string()]) {
        let p = path(dir, &file);
        let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
        artifacts.insert(file, sha256_hex(&bytes));
    }
    let provenance = Provenance {
        tool: "crowdnet".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        dataset_checksum: outputs.graph.input_hash.clone(),
        dataset_generator: dataset.metadata.generator.clone(),
        seed: dataset.metadata.seed,
        rng: dataset.metadata.rng.clone(),
        options: options.clone(),
        artifacts,
    };
    write_json(&path(dir, PROVENANCE_FILE), &provenance)?;
    Ok(PipelineRun { dir: dir.to_path_buf(), outputs, provenance, timings })
}

/// Rebuild the in-memory partition of a loaded run.
pub fn loaded_partition(run: &LoadedRun) -> Result<crate::community::Partition> {
    let g = run.graph.graph()?;
    let assignment = g
        .nodes()
        .iter()
        .map(|id| run.partition.assignment.get(id).copied().ok_or_else(|| Error::UnknownNode(id.clone())))
        .collect::<Result<Vec<_>>>()?;
    partition_from_parts(
        &g,
        assignment,
        run.partition.merge_trace.clone(),
        run.partition.best_step,
        run.partition.weighting,
    )
}
