//! Seeded planted-partition generator for desk-scale experiments.
//!
//! Every project has a home cluster. For each task, members of the home
//! cluster register with probability `p_in` and everyone else with `p_out`,
//! so same-cluster pairs co-register far more often than cross-cluster pairs
//! when `p_in ≫ p_out`. Submission, validity and winning are drawn per belt.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Duration, NaiveDate};
use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dataset, DatasetMetadata, RegistrationEvent, TaskRecord, TaskStatus, WorkerRecord};
use crate::error::{Error, Result};
use crate::metrics::Belt;

/// Worker share per belt, Gray..Red.
pub const DEFAULT_BELT_MIX: [f64; 5] = [0.9002, 0.0288, 0.0539, 0.0154, 0.0016];
/// Submission probability per belt, Gray..Red.
pub const DEFAULT_SUBMIT_PROB: [f64; 5] = [0.25, 0.45, 0.39, 0.6, 0.6];

const RNG_NAME: &str = "ChaCha8Rng";
const GENERATOR_NAME: &str = "crowdnet-synth/planted-partition";
const RED_CEILING: f64 = 3000.0;
const WINDOW_DAYS: i64 = 424; // 2014-01-01 ..= 2015-02-28
const MAX_DURATION_DAYS: i64 = 14;

const TECHNOLOGIES: [&str; 15] = [
    ".net",
    "android",
    "angularjs",
    "c#",
    "c++",
    "css",
    "html",
    "ios",
    "java",
    "javascript",
    "node.js",
    "php",
    "python",
    "ruby",
    "sql",
];
const PLATFORMS: [&str; 6] = ["aws", "cloud", "desktop", "mobile", "salesforce", "web"];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Workers that belong to planted clusters.
    pub worker_count: usize,
    pub task_count: usize,
    pub project_count: usize,
    /// One entry per planted cluster; must sum to `worker_count`.
    pub cluster_sizes: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
    pub belt_mix: [f64; 5],
    pub submit_prob: [f64; 5],
    pub valid_given_submit: f64,
    /// Added to the submission probability of every worker in the cluster.
    /// Empty means no offsets.
    pub reliability_offsets: Vec<f64>,
    /// Extra workers that never register.
    pub inactive_workers: usize,
    pub seed: u64,
}

impl SynthConfig {
    /// `clusters` near-equal planted clusters over `worker_count` workers.
    pub fn planted(worker_count: usize, clusters: usize, seed: u64) -> Self {
        let sizes = if clusters == 0 {
            Vec::new()
        } else {
            (0..clusters).map(|c| worker_count / clusters + usize::from(c < worker_count % clusters)).collect()
        };
        let task_count = (2 * worker_count).max(1);
        SynthConfig {
            worker_count,
            task_count,
            project_count: (task_count / 12).max(1),
            cluster_sizes: sizes,
            p_in: 0.2,
            p_out: 0.0002,
            belt_mix: DEFAULT_BELT_MIX,
            submit_prob: DEFAULT_SUBMIT_PROB,
            valid_given_submit: 0.8,
            reliability_offsets: Vec::new(),
            inactive_workers: 0,
            seed,
        }
    }

    pub fn planted_cluster_count(&self) -> usize {
        self.cluster_sizes.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let prob = |name: &str, p: f64| -> Result<()> {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} = {p} is not a probability")))
            }
        };
        if self.cluster_sizes.is_empty() {
            return bad("at least one planted cluster is required".into());
        }
        if self.cluster_sizes.contains(&0) {
            return bad(format!("empty planted cluster in sizes {:?}", self.cluster_sizes));
        }
        let total: usize = self.cluster_sizes.iter().sum();
        if total != self.worker_count {
            return bad(format!(
                "cluster sizes {:?} sum to {total}, not worker_count {}",
                self.cluster_sizes, self.worker_count
            ));
        }
        if self.task_count == 0 {
            return bad("task_count must be positive".into());
        }
        if self.project_count == 0 || self.project_count > self.task_count {
            return bad(format!("project_count {} must be in 1..={}", self.project_count, self.task_count));
        }
        prob("p_in", self.p_in)?;
        prob("p_out", self.p_out)?;
        prob("valid_given_submit", self.valid_given_submit)?;
        for (b, &p) in Belt::ALL.iter().zip(&self.submit_prob) {
            prob(&format!("submit_prob[{b}]"), p)?;
        }
        if self.belt_mix.iter().any(|&w| w.is_nan() || w < 0.0 || !w.is_finite())
            || self.belt_mix.iter().sum::<f64>() <= 0.0
        {
            return bad(format!("belt mix {:?} must be non-negative with a positive sum", self.belt_mix));
        }
        if !self.reliability_offsets.is_empty() && self.reliability_offsets.len() != self.cluster_sizes.len() {
            return bad(format!(
                "{} reliability offsets for {} clusters",
                self.reliability_offsets.len(),
                self.cluster_sizes.len()
            ));
        }
        if self.reliability_offsets.iter().any(|o| !o.is_finite()) {
            return bad("reliability offsets must be finite".into());
        }
        Ok(())
    }
}

/// Generated dataset plus its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub dataset: Dataset,
    /// Planted cluster of every registering worker.
    pub planted: BTreeMap<String, usize>,
}

fn pick_subset(rng: &mut ChaCha8Rng, pool: &[&str], lo: u32, hi: u32) -> BTreeSet<String> {
    let k = rng.gen_range(lo..=hi.min(pool.len() as u32)) as usize;
    pool.choose_multiple(rng, k).map(|s| s.to_string()).collect()
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub fn generate_synthetic(cfg: &SynthConfig) -> Result<SynthOutput> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let start = NaiveDate::from_ymd_opt(2014, 1, 1).expect("valid date");

    let total_workers = cfg.worker_count + cfg.inactive_workers;
    let width = total_workers.to_string().len().max(4);
    let belt_dist = WeightedIndex::new(cfg.belt_mix).map_err(|e| Error::InvalidConfig(e.to_string()))?;

    let mut cluster_of: Vec<usize> =
        cfg.cluster_sizes.iter().enumerate().flat_map(|(c, &n)| std::iter::repeat_n(c, n)).collect();
    cluster_of.shuffle(&mut rng);

    let mut workers = Vec::with_capacity(total_workers);
    let mut belts = Vec::with_capacity(total_workers);
    for i in 0..total_workers {
        let belt = Belt::ALL[belt_dist.sample(&mut rng)];
        let (lo, hi) = belt.rating_range();
        let hi = if hi.is_finite() { hi } else { RED_CEILING };
        let rating = rng.gen_range(lo as u32..hi as u32) as f64;
        workers.push(WorkerRecord { worker_id: format!("w{:0width$}", i + 1), rating });
        belts.push(belt);
    }

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); cfg.cluster_sizes.len()];
    for (w, &c) in cluster_of.iter().enumerate() {
        members[c].push(w);
    }
    // Projects are dealt to home clusters in proportion to cluster size, so no
    // cluster is starved of tasks by chance.
    let total: usize = cfg.cluster_sizes.iter().sum();
    let home_of = |p: usize| -> usize {
        let mark = (2 * p + 1) * total;
        let mut acc = 0;
        for (c, &n) in cfg.cluster_sizes.iter().enumerate() {
            acc += n;
            if mark < 2 * acc * cfg.project_count {
                return c;
            }
        }
        cfg.cluster_sizes.len() - 1
    };

    struct Project {
        home: usize,
        techs: Vec<&'static str>,
        platforms: Vec<&'static str>,
    }
    let projects: Vec<Project> = (0..cfg.project_count)
        .map(|p| {
            let home = home_of(p);
            let k = rng.gen_range(2u32..=4) as usize;
            let techs = TECHNOLOGIES.choose_multiple(&mut rng, k).copied().collect();
            let k = rng.gen_range(1u32..=2) as usize;
            let platforms = PLATFORMS.choose_multiple(&mut rng, k).copied().collect();
            Project { home, techs, platforms }
        })
        .collect();
    let pwidth = cfg.project_count.to_string().len().max(3);
    let twidth = cfg.task_count.to_string().len().max(4);

    let mut tasks = Vec::with_capacity(cfg.task_count);
    let mut events = Vec::new();
    for t in 0..cfg.task_count {
        let p = t * cfg.project_count / cfg.task_count;
        let project = &projects[p];
        let task_id = format!("t{:0twidth$}", t + 1);
        let posting = start + Duration::days(rng.gen_range(0..=(WINDOW_DAYS - MAX_DURATION_DAYS)));
        let duration = rng.gen_range(3..=MAX_DURATION_DAYS);
        let deadline = posting + Duration::days(duration);
        let technologies = pick_subset(&mut rng, &project.techs, 1, 3);
        let platforms = pick_subset(&mut rng, &project.platforms, 1, 2);
        let prize = (rng.gen_range(4u32..=80) * 25) as f64;

        let mut registrants: Vec<usize> = (0..cfg.worker_count)
            .filter(|&w| {
                let p = if cluster_of[w] == project.home { cfg.p_in } else { cfg.p_out };
                rng.gen::<f64>() < p
            })
            .collect();
        if registrants.is_empty() {
            let home = &members[project.home];
            registrants.push(home[rng.gen_range(0..home.len() as u32) as usize]);
        }

        let mut drawn = Vec::with_capacity(registrants.len());
        for &w in &registrants {
            let belt = belts[w];
            let offset = cfg.reliability_offsets.get(cluster_of[w]).copied().unwrap_or(0.0);
            let p_submit = (cfg.submit_prob[belt.index()] + offset).clamp(0.0, 1.0);
            let submitted = rng.gen::<f64>() < p_submit;
            let valid = submitted && rng.gen::<f64>() < cfg.valid_given_submit;
            let score = submitted.then(|| {
                if valid {
                    round2(rng.gen_range(75.0..100.0))
                } else {
                    round2(rng.gen_range(30.0..75.0))
                }
            });
            let reg_date = posting + Duration::days(rng.gen_range(0..=duration));
            drawn.push((w, reg_date, submitted, valid, score));
        }
        let winner = drawn
            .iter()
            .filter(|d| d.3)
            .fold(None::<(usize, f64)>, |best, d| {
                let s = d.4.unwrap_or(0.0);
                match best {
                    Some((_, bs)) if bs >= s => best,
                    _ => Some((d.0, s)),
                }
            })
            .map(|(w, _)| w);

        let status = if winner.is_some() { TaskStatus::Completed } else { TaskStatus::Failed };
        for (w, reg_date, submitted, valid, score) in drawn {
            events.push(RegistrationEvent {
                worker_id: workers[w].worker_id.clone(),
                task_id: task_id.clone(),
                registration_date: reg_date,
                submitted,
                valid,
                won: winner == Some(w),
                score,
            });
        }
        tasks.push(TaskRecord {
            task_id,
            project_id: format!("p{:0pwidth$}", p + 1),
            status,
            posting_date: posting,
            submission_deadline: deadline,
            prize,
            technologies,
            platforms,
        });
    }

    let planted = (0..cfg.worker_count).map(|w| (workers[w].worker_id.clone(), cluster_of[w])).collect();
    let dataset = Dataset {
        metadata: DatasetMetadata {
            generator: GENERATOR_NAME.into(),
            seed: Some(cfg.seed),
            rng: Some(RNG_NAME.into()),
        },
        workers,
        tasks,
        events,
    };
    Ok(SynthOutput { dataset, planted })
}
