//! Canonical dataset model plus its ingestion, interchange and generation.

mod canonical;
mod csv_io;
mod synth;

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

pub use canonical::{dataset_checksum, load_dataset, read_dataset, serialize_dataset, write_dataset, SCHEMA_VERSION};
pub use csv_io::{
    parse_dataset, read_dataset_dir, write_dataset_dir, IngestReport, REGISTRATIONS_FILE, TASKS_FILE, WORKERS_FILE,
};
pub use synth::{generate_synthetic, SynthConfig, SynthOutput, DEFAULT_BELT_MIX, DEFAULT_SUBMIT_PROB};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerRecord {
    pub worker_id: String,
    pub rating: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskStatus {
    Completed,
    Failed,
}

impl TaskStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskStatus::Completed => "completed",
            TaskStatus::Failed => "failed",
        }
    }
}

impl std::str::FromStr for TaskStatus {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "completed" | "complete" => Ok(TaskStatus::Completed),
            "failed" | "fail" => Ok(TaskStatus::Failed),
            other => Err(format!("unknown task status `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task_id: String,
    pub project_id: String,
    pub status: TaskStatus,
    pub posting_date: NaiveDate,
    pub submission_deadline: NaiveDate,
    pub prize: f64,
    pub technologies: BTreeSet<String>,
    pub platforms: BTreeSet<String>,
}

/// One worker's participation in one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistrationEvent {
    pub worker_id: String,
    pub task_id: String,
    pub registration_date: NaiveDate,
    pub submitted: bool,
    pub valid: bool,
    pub won: bool,
    pub score: Option<f64>,
}

impl RegistrationEvent {
    /// `won ⇒ valid ⇒ submitted`.
    pub fn flags_consistent(&self) -> bool {
        (!self.won || self.valid) && (!self.valid || self.submitted)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetMetadata {
    pub generator: String,
    pub seed: Option<u64>,
    pub rng: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub metadata: DatasetMetadata,
    pub workers: Vec<WorkerRecord>,
    pub tasks: Vec<TaskRecord>,
    pub events: Vec<RegistrationEvent>,
}

impl Dataset {
    /// Tasks with zero submitted registrations.
    pub fn starved_tasks(&self) -> BTreeSet<&str> {
        let submitted: BTreeSet<&str> =
            self.events.iter().filter(|e| e.submitted).map(|e| e.task_id.as_str()).collect();
        self.tasks.iter().map(|t| t.task_id.as_str()).filter(|t| !submitted.contains(t)).collect()
    }
}

/// Technologies each worker has touched: `s ∈ result[x]` iff `x` registered
/// for at least one task requiring `s`. Workers without registrations map to
/// an empty set.
pub fn derive_worker_expertise(d: &Dataset) -> BTreeMap<String, BTreeSet<String>> {
    let techs: BTreeMap<&str, &BTreeSet<String>> =
        d.tasks.iter().map(|t| (t.task_id.as_str(), &t.technologies)).collect();
    let mut out: BTreeMap<String, BTreeSet<String>> =
        d.workers.iter().map(|w| (w.worker_id.clone(), BTreeSet::new())).collect();
    for e in &d.events {
        if let Some(ts) = techs.get(e.task_id.as_str()) {
            out.entry(e.worker_id.clone()).or_default().extend(ts.iter().cloned());
        }
    }
    out
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expertise_of_f1() {
        let ex = derive_worker_expertise(&fixtures::f1());
        assert_eq!(ex["w1"], ["java".to_string()].into());
        assert_eq!(ex.len(), 4);
    }

    #[test]
    fn worker_without_registrations_has_no_expertise() {
        let mut d = fixtures::f1();
        d.workers.push(WorkerRecord { worker_id: "w5".into(), rating: 10.0 });
        assert!(derive_worker_expertise(&d)["w5"].is_empty());
    }

    #[test]
    fn only_t2_starves_in_f1() {
        let d = fixtures::f1();
        assert_eq!(d.starved_tasks().into_iter().collect::<Vec<_>>(), vec!["t2"]);
    }

    #[test]
    fn flag_chain() {
        let mut e = fixtures::f1().events[0].clone();
        assert!(e.flags_consistent());
        e.valid = false;
        assert!(!e.flags_consistent());
    }
}
