//! Belts, the active-worker filter and the nine worker metrics.
//!
//! Performance ratios (reliability, trustworthiness, success) are taken over a
//! worker's "same-cluster competitions": registered tasks on which at least
//! one other member of the worker's cluster also registered. Undefined ratios
//! are `None`, never 0.

mod activity;
mod belt;
mod table;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

pub use activity::{active_workers, ActivitySummary, ActivityWindow, Month};
pub use belt::{assign_belt, Belt};
pub use table::{
    build_metric_table, BeltCell, ClusterElasticity, Metric, MetricTable, ProjectElasticity, StrategyRow, WorkerMetrics,
};

use crate::data::{Dataset, TaskStatus};
use crate::error::{Error, Result};

/// Worker id → cluster index.
pub type ClusterMap = BTreeMap<String, usize>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerProfile {
    pub worker_id: String,
    pub rating: f64,
    pub belt: Belt,
    pub registrations: usize,
    pub submissions: usize,
    pub valid_submissions: usize,
    pub wins: usize,
    pub technologies: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskContext {
    pub task_id: String,
    pub project_id: String,
    pub status: TaskStatus,
    /// Registrant count.
    pub competition_level: usize,
    pub starved: bool,
    pub technologies: BTreeSet<String>,
    pub platforms: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    worker: usize,
    submitted: bool,
    valid: bool,
    won: bool,
}

struct TaskInfo {
    project: usize,
    entries: Vec<Entry>,
    starved: bool,
    techs: Vec<usize>,
}

/// Indexed view of a dataset plus a cluster assignment, for metric queries.
pub struct MetricContext<'a> {
    dataset: &'a Dataset,
    worker_index: HashMap<&'a str, usize>,
    belts: Vec<Belt>,
    cluster: Vec<Option<usize>>,
    tasks: Vec<TaskInfo>,
    projects: Vec<&'a str>,
    tech_names: Vec<&'a str>,
    /// Per worker: (task index, position within the task's entries).
    registrations: Vec<Vec<(usize, usize)>>,
}

impl<'a> MetricContext<'a> {
    pub fn new(dataset: &'a Dataset, clusters: &ClusterMap) -> Result<Self> {
        let worker_index: HashMap<&str, usize> =
            dataset.workers.iter().enumerate().map(|(i, w)| (w.worker_id.as_str(), i)).collect();
        let belts = dataset.workers.iter().map(|w| assign_belt(w.rating)).collect::<Result<Vec<_>>>()?;
        let mut cluster = vec![None; dataset.workers.len()];
        for (id, &c) in clusters {
            let i = *worker_index.get(id.as_str()).ok_or_else(|| Error::UnknownWorker(id.clone()))?;
            cluster[i] = Some(c);
        }

        let tech_names: Vec<&str> = dataset
            .tasks
            .iter()
            .flat_map(|t| t.technologies.iter().map(String::as_str))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let projects: Vec<&str> =
            dataset.tasks.iter().map(|t| t.project_id.as_str()).collect::<BTreeSet<_>>().into_iter().collect();
        let task_index: HashMap<&str, usize> =
            dataset.tasks.iter().enumerate().map(|(i, t)| (t.task_id.as_str(), i)).collect();
        let mut tasks: Vec<TaskInfo> = dataset
            .tasks
            .iter()
            .map(|t| TaskInfo {
                project: projects.binary_search(&t.project_id.as_str()).expect("collected above"),
                entries: Vec::new(),
                starved: true,
                techs: t.technologies.iter().map(|s| tech_names.binary_search(&s.as_str()).unwrap()).collect(),
            })
            .collect();
        let mut registrations = vec![Vec::new(); dataset.workers.len()];
        for e in &dataset.events {
            let w = *worker_index.get(e.worker_id.as_str()).ok_or_else(|| Error::UnknownWorker(e.worker_id.clone()))?;
            let t = *task_index
                .get(e.task_id.as_str())
                .ok_or_else(|| Error::UnknownReferences { workers: vec![], tasks: vec![e.task_id.clone()] })?;
            let task = &mut tasks[t];
            if task.entries.iter().any(|x| x.worker == w) {
                continue;
            }
            registrations[w].push((t, task.entries.len()));
            task.entries.push(Entry { worker: w, submitted: e.submitted, valid: e.valid, won: e.won });
            task.starved &= !e.submitted;
        }
        Ok(MetricContext { dataset, worker_index, belts, cluster, tasks, projects, tech_names, registrations })
    }

    fn index(&self, worker: &str) -> Result<usize> {
        self.worker_index.get(worker).copied().ok_or_else(|| Error::UnknownWorker(worker.into()))
    }

    pub fn belt(&self, worker: &str) -> Result<Belt> {
        Ok(self.belts[self.index(worker)?])
    }

    pub fn cluster_of(&self, worker: &str) -> Result<Option<usize>> {
        Ok(self.cluster[self.index(worker)?])
    }

    fn entry(&self, t: usize, pos: usize) -> &Entry {
        &self.tasks[t].entries[pos]
    }

    fn cluster_registrants(&self, t: usize, c: usize) -> usize {
        self.tasks[t].entries.iter().filter(|e| self.cluster[e.worker] == Some(c)).count()
    }

    pub fn profile(&self, worker: &str) -> Result<WorkerProfile> {
        let i = self.index(worker)?;
        let regs = &self.registrations[i];
        let count = |f: fn(&Entry) -> bool| regs.iter().filter(|&&(t, p)| f(self.entry(t, p))).count();
        let rec = &self.dataset.workers[i];
        Ok(WorkerProfile {
            worker_id: rec.worker_id.clone(),
            rating: rec.rating,
            belt: self.belts[i],
            registrations: regs.len(),
            submissions: count(|e| e.submitted),
            valid_submissions: count(|e| e.valid),
            wins: count(|e| e.won),
            technologies: regs
                .iter()
                .flat_map(|&(t, _)| self.tasks[t].techs.iter().map(|&j| self.tech_names[j].to_string()))
                .collect(),
        })
    }

    pub fn task_contexts(&self) -> Vec<TaskContext> {
        self.dataset
            .tasks
            .iter()
            .zip(&self.tasks)
            .map(|(t, info)| TaskContext {
                task_id: t.task_id.clone(),
                project_id: t.project_id.clone(),
                status: t.status,
                competition_level: info.entries.len(),
                starved: info.starved,
                technologies: t.technologies.clone(),
                platforms: t.platforms.clone(),
            })
            .collect()
    }

    /// Registrations of `i` on tasks shared with another same-cluster worker.
    fn same_cluster_registrations(&self, i: usize) -> Vec<(usize, usize)> {
        let Some(c) = self.cluster[i] else { return Vec::new() };
        self.registrations[i]
            .iter()
            .copied()
            .filter(|&(t, _)| self.tasks[t].entries.iter().any(|e| e.worker != i && self.cluster[e.worker] == Some(c)))
            .collect()
    }

    fn same_cluster_ratio(&self, worker: &str, hit: fn(&Entry) -> bool) -> Result<Option<f64>> {
        let regs = self.same_cluster_registrations(self.index(worker)?);
        if regs.is_empty() {
            return Ok(None);
        }
        let hits = regs.iter().filter(|&&(t, p)| hit(self.entry(t, p))).count();
        Ok(Some(hits as f64 / regs.len() as f64))
    }

    /// RL: submissions per same-cluster competition.
    pub fn reliability(&self, worker: &str) -> Result<Option<f64>> {
        self.same_cluster_ratio(worker, |e| e.submitted)
    }

    /// TL: valid submissions per same-cluster competition.
    pub fn trustworthiness(&self, worker: &str) -> Result<Option<f64>> {
        self.same_cluster_ratio(worker, |e| e.valid)
    }

    /// SL: wins per same-cluster competition.
    pub fn success(&self, worker: &str) -> Result<Option<f64>> {
        self.same_cluster_ratio(worker, |e| e.won)
    }

    /// PL for technology `tech`: the worker's registrations on tasks requiring
    /// `tech`, over all same-cluster registrations on those same tasks.
    ///
    /// 0 if the worker never touched `tech` but the cluster did; `None` if the
    /// cluster has no registrations on `tech` at all.
    pub fn proficiency(&self, worker: &str, tech: &str) -> Result<Option<f64>> {
        let i = self.index(worker)?;
        let (Some(c), Ok(j)) = (self.cluster[i], self.tech_names.binary_search(&tech)) else {
            return Ok(None);
        };
        let own: Vec<usize> =
            self.registrations[i].iter().map(|&(t, _)| t).filter(|&t| self.tasks[t].techs.contains(&j)).collect();
        if own.is_empty() {
            let cluster_touched = self
                .tasks
                .iter()
                .enumerate()
                .any(|(t, info)| info.techs.contains(&j) && self.cluster_registrants(t, c) > 0);
            return Ok(cluster_touched.then_some(0.0));
        }
        let denom: usize = own.iter().map(|&t| self.cluster_registrants(t, c)).sum();
        Ok(Some(own.len() as f64 / denom as f64))
    }

    /// PL for every technology the worker has touched.
    pub fn proficiencies(&self, worker: &str) -> Result<BTreeMap<String, Option<f64>>> {
        self.profile(worker)?
            .technologies
            .into_iter()
            .map(|tech| {
                let v = self.proficiency(worker, &tech)?;
                Ok((tech, v))
            })
            .collect()
    }

    /// EF: mean PL over the technologies of the worker's registered tasks.
    pub fn efficiency(&self, worker: &str) -> Result<Option<f64>> {
        let values: Vec<f64> = self.proficiencies(worker)?.into_values().flatten().collect();
        if values.is_empty() {
            return Ok(None);
        }
        Ok(Some(values.iter().sum::<f64>() / values.len() as f64))
    }

    /// Per-project peak registrant counts for cluster `c`, over projects with
    /// at least one registration.
    pub fn elasticity_by_project(&self, c: usize) -> Vec<ProjectElasticity> {
        let mut peaks: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for (t, info) in self.tasks.iter().enumerate() {
            if info.entries.is_empty() {
                continue;
            }
            let p = peaks.entry(info.project).or_default();
            p.0 = p.0.max(self.cluster_registrants(t, c));
            p.1 = p.1.max(info.entries.len());
        }
        peaks
            .into_iter()
            .map(|(p, (cluster_peak, total_peak))| ProjectElasticity {
                project_id: self.projects[p].to_string(),
                cluster_peak,
                total_peak,
            })
            .collect()
    }

    /// EL of cluster `c`: `Σ_k RC_{k,c} / Σ_k TC_k`.
    pub fn elasticity(&self, c: usize) -> Option<f64> {
        let rows = self.elasticity_by_project(c);
        let num: usize = rows.iter().map(|r| r.cluster_peak).sum();
        let den: usize = rows.iter().map(|r| r.total_peak).sum();
        (den > 0).then(|| num as f64 / den as f64)
    }

    /// CT: share of lower-belt registrants over all registrants, summed over
    /// the worker's registered tasks.
    pub fn contest(&self, worker: &str) -> Result<Option<f64>> {
        let i = self.index(worker)?;
        let own = self.belts[i];
        let (mut lower, mut total) = (0usize, 0usize);
        for &(t, _) in &self.registrations[i] {
            let entries = &self.tasks[t].entries;
            lower += entries.iter().filter(|e| self.belts[e.worker] < own).count();
            total += entries.len();
        }
        Ok((total > 0).then(|| lower as f64 / total as f64))
    }

    /// CL: largest registrant count among tasks the worker submitted to; 0 if none.
    pub fn confidence(&self, worker: &str) -> Result<usize> {
        let i = self.index(worker)?;
        Ok(self.registrations[i]
            .iter()
            .filter(|&&(t, p)| self.entry(t, p).submitted)
            .map(|&(t, _)| self.tasks[t].entries.len())
            .max()
            .unwrap_or(0))
    }

    /// DL: share of the worker's registered tasks that starved.
    pub fn deceitfulness(&self, worker: &str) -> Result<Option<f64>> {
        let i = self.index(worker)?;
        let regs = &self.registrations[i];
        if regs.is_empty() {
            return Ok(None);
        }
        let starved = regs.iter().filter(|&&(t, _)| self.tasks[t].starved).count();
        Ok(Some(starved as f64 / regs.len() as f64))
    }
}
