use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use crowdnet_core::data::{self, generate_synthetic, read_dataset, read_dataset_dir, write_dataset, write_dataset_dir};
use crowdnet_core::metrics::{ActivityWindow, Month};
use crowdnet_core::report::{self, AnalysisOptions, AnovaUnit};
use crowdnet_core::{CnScope, Dataset, EdgeWeighting, Error, SynthConfig};

/// Co-registration network analysis of crowd-worker task data.
#[derive(Parser, Debug)]
#[command(name = "crowdnet", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a planted-partition synthetic dataset
    Synth(SynthArgs),
    /// Validate delimited input files and write the canonical dataset document
    Ingest {
        /// Directory holding tasks.csv, registrations.csv and workers.csv
        #[arg(long)]
        data: PathBuf,
        /// Output file for the canonical document
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the worker network (graph.json)
    Network {
        #[command(flatten)]
        input: DataArg,
        #[command(flatten)]
        network: NetworkArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster the network and summarize centralities (partition.json, network_summary.json)
    Cluster {
        #[command(flatten)]
        cluster: ClusterArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute worker metrics for the partition (metrics.json)
    Metrics {
        #[command(flatten)]
        input: DataArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Test cross-cluster differences (anova.json)
    Stats {
        #[command(flatten)]
        stats: StatsArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render report.md and charts from an existing run directory
    Report {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every stage and write a complete run directory
    Analyze {
        #[command(flatten)]
        input: DataArg,
        #[command(flatten)]
        network: NetworkArgs,
        #[command(flatten)]
        cluster: ClusterArgs,
        #[command(flatten)]
        stats: StatsArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct DataArg {
    /// Directory of delimited files, or a canonical .json dataset
    #[arg(long)]
    data: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct NetworkArgs {
    /// Drop edges with fewer shared tasks than this
    #[arg(long, default_value_t = 1)]
    min_weight: u32,
    /// First month of the activity window (YYYY-MM)
    #[arg(long, requires = "window_end")]
    window_start: Option<String>,
    /// Last month of the activity window (YYYY-MM)
    #[arg(long, requires = "window_start")]
    window_end: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct ClusterArgs {
    /// Cluster on co-registration weights instead of plain edges
    #[arg(long)]
    weighted: bool,
    /// Peers over which mean common neighbours are taken
    #[arg(long, value_enum, default_value_t = Scope::Cluster)]
    cn_scope: Scope,
}

#[derive(Args, Debug, Clone)]
struct StatsArgs {
    /// ANOVA observation unit
    #[arg(long, value_enum, default_value_t = Unit::Worker)]
    anova_unit: Unit,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Scope {
    Cluster,
    Global,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Unit {
    Worker,
    Cell,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Workers in planted clusters
    #[arg(long, default_value_t = 160)]
    workers: usize,
    /// Number of planted clusters
    #[arg(long, default_value_t = 4)]
    clusters: usize,
    /// Explicit cluster sizes, comma separated; overrides --clusters
    #[arg(long, value_delimiter = ',')]
    cluster_sizes: Vec<usize>,
    /// Tasks (default: twice the worker count)
    #[arg(long)]
    tasks: Option<usize>,
    /// Projects (default: one per twelve tasks)
    #[arg(long)]
    projects: Option<usize>,
    /// Registration probability for a task of the worker's own cluster
    #[arg(long)]
    p_in: Option<f64>,
    /// Registration probability for any other task
    #[arg(long)]
    p_out: Option<f64>,
    /// Per-cluster additive submission-probability offsets, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    reliability_offsets: Vec<f64>,
    /// Extra workers with no registrations
    #[arg(long, default_value_t = 0)]
    inactive: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

impl SynthArgs {
    fn config(&self) -> SynthConfig {
        let mut cfg = SynthConfig::planted(self.workers, self.clusters.max(1), self.seed);
        if !self.cluster_sizes.is_empty() {
            cfg.cluster_sizes = self.cluster_sizes.clone();
        }
        if let Some(t) = self.tasks {
            cfg.task_count = t;
            cfg.project_count = (t / 12).max(1);
        }
        if let Some(p) = self.projects {
            cfg.project_count = p;
        }
        cfg.p_in = self.p_in.unwrap_or(cfg.p_in);
        cfg.p_out = self.p_out.unwrap_or(cfg.p_out);
        cfg.reliability_offsets = self.reliability_offsets.clone();
        cfg.inactive_workers = self.inactive;
        cfg
    }
}

fn load(path: &Path) -> Result<Dataset, Error> {
    if path.is_dir() {
        let (d, report) = read_dataset_dir(path)?;
        if report.duplicate_registrations > 0 {
            eprintln!("warning: dropped {} duplicate registration(s)", report.duplicate_registrations);
        }
        Ok(d)
    } else {
        read_dataset(path)
    }
}

fn options(
    network: Option<&NetworkArgs>,
    cluster: Option<&ClusterArgs>,
    stats: Option<&StatsArgs>,
) -> Result<AnalysisOptions, Error> {
    let mut o = AnalysisOptions::default();
    if let Some(n) = network {
        o.min_weight = n.min_weight;
        if let (Some(a), Some(b)) = (&n.window_start, &n.window_end) {
            o.window = Some(ActivityWindow::new(a.parse::<Month>()?, b.parse::<Month>()?)?);
        }
    }
    if let Some(c) = cluster {
        o.weighting = if c.weighted { EdgeWeighting::Weighted } else { EdgeWeighting::Unweighted };
        o.cn_scope = match c.cn_scope {
            Scope::Cluster => CnScope::Cluster,
            Scope::Global => CnScope::Global,
        };
    }
    if let Some(s) = stats {
        o.anova_unit = match s.anova_unit {
            Unit::Worker => AnovaUnit::Worker,
            Unit::Cell => AnovaUnit::Cell,
        };
    }
    Ok(o)
}

fn synth(args: &SynthArgs) -> Result<(), Error> {
    let out = generate_synthetic(&args.config())?;
    write_dataset_dir(&out.dataset, &args.out)?;
    write_dataset(&out.dataset, &args.out.join("dataset.json"))?;
    let planted = args.out.join("planted.csv");
    let mut text = String::from("worker_id,cluster\n");
    for (w, c) in &out.planted {
        text.push_str(&format!("{w},{c}\n"));
    }
    fs::write(&planted, text).map_err(|source| Error::Io { path: planted.clone(), source })?;
    println!(
        "wrote {} workers, {} tasks, {} registrations to {} (checksum {})",
        out.dataset.workers.len(),
        out.dataset.tasks.len(),
        out.dataset.events.len(),
        args.out.display(),
        data::dataset_checksum(&out.dataset)
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Synth(args) => synth(&args)?,
        Command::Ingest { data, out } => {
            let (d, report) = read_dataset_dir(&data)?;
            write_dataset(&d, &out)?;
            println!(
                "{} workers, {} tasks, {} registrations ({} duplicates dropped); checksum {}",
                d.workers.len(),
                d.tasks.len(),
                d.events.len(),
                report.duplicate_registrations,
                data::dataset_checksum(&d)
            );
        }
        Command::Network { input, network, out } => {
            let g = report::run_network(&load(&input.data)?, &options(Some(&network), None, None)?, &out)?;
            println!("{} nodes, {} edges", g.node_count, g.edge_count);
        }
        Command::Cluster { cluster, out } => {
            let (p, _) = report::run_cluster(&options(None, Some(&cluster), None)?, &out)?;
            println!("{} clusters, sizes {:?}, modularity {:.6}", p.cluster_count, p.sizes, p.modularity);
        }
        Command::Metrics { input, out } => {
            let m = report::run_metrics(&load(&input.data)?, &out)?;
            println!("metrics for {} workers in {} clusters", m.table.workers.len(), m.table.cluster_count);
        }
        Command::Stats { stats, out } => {
            let a = report::run_stats(&options(None, None, Some(&stats))?, &out)?;
            for t in &a.tests {
                match t.p_value {
                    Some(p) => println!("{}: p = {p:.6}", t.metric),
                    None => println!("{}: skipped ({})", t.metric, t.reason.as_deref().unwrap_or("not tested")),
                }
            }
        }
        Command::Report { out } => {
            report::run_report(&out)?;
            println!("wrote {}", out.join(report::REPORT_FILE).display());
        }
        Command::Analyze { input, network, cluster, stats, out } => {
            let d = load(&input.data)?;
            let o = options(Some(&network), Some(&cluster), Some(&stats))?;
            let run = report::analyze(&d, &o, &out)?;
            for t in &run.timings {
                eprintln!("stage {:<8} {:>9.3} s", t.stage, t.elapsed.as_secs_f64());
            }
            println!(
                "{} clusters (sizes {:?}); report at {}",
                run.outputs.partition.cluster_count,
                run.outputs.partition.sizes,
                out.join(report::REPORT_FILE).display()
            );
        }
    }
    Ok(())
}

/// 1 when the data could not support the analysis, 2 for bad input or configuration.
fn exit_code(e: &Error) -> u8 {
    if e.is_analysis_failure() {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
