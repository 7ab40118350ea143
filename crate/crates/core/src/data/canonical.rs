//! Canonical single-document interchange form.
//!
//! The document carries `schema_version`, `metadata`, the three record arrays
//! and a SHA-256 `checksum` over the compact serialization of everything else.
//! Key order is fixed by struct field order.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Dataset, DatasetMetadata, RegistrationEvent, TaskRecord, WorkerRecord};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Body<'a> {
    schema_version: u32,
    metadata: &'a DatasetMetadata,
    workers: &'a [WorkerRecord],
    tasks: &'a [TaskRecord],
    events: &'a [RegistrationEvent],
}

#[derive(Serialize)]
struct DocumentOut<'a> {
    schema_version: u32,
    checksum: String,
    metadata: &'a DatasetMetadata,
    workers: &'a [WorkerRecord],
    tasks: &'a [TaskRecord],
    events: &'a [RegistrationEvent],
}

#[derive(Deserialize)]
struct DocumentIn {
    schema_version: u32,
    checksum: String,
    metadata: DatasetMetadata,
    workers: Vec<WorkerRecord>,
    tasks: Vec<TaskRecord>,
    events: Vec<RegistrationEvent>,
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: u32,
}

/// Hex SHA-256 of the dataset's canonical body.
pub fn dataset_checksum(d: &Dataset) -> String {
    let body = Body {
        schema_version: SCHEMA_VERSION,
        metadata: &d.metadata,
        workers: &d.workers,
        tasks: &d.tasks,
        events: &d.events,
    };
    let bytes = serde_json::to_vec(&body).expect("dataset body always serializes");
    hex::encode(Sha256::digest(&bytes))
}

pub fn serialize_dataset(d: &Dataset) -> String {
    let doc = DocumentOut {
        schema_version: SCHEMA_VERSION,
        checksum: dataset_checksum(d),
        metadata: &d.metadata,
        workers: &d.workers,
        tasks: &d.tasks,
        events: &d.events,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("dataset always serializes");
    s.push('\n');
    s
}

pub fn load_dataset(text: &str) -> Result<Dataset> {
    let probe: VersionProbe = serde_json::from_str(text)?;
    if probe.schema_version != SCHEMA_VERSION {
        return Err(Error::SchemaVersion { found: probe.schema_version, expected: SCHEMA_VERSION });
    }
    let doc: DocumentIn = serde_json::from_str(text)?;
    let d = Dataset { metadata: doc.metadata, workers: doc.workers, tasks: doc.tasks, events: doc.events };
    let computed = dataset_checksum(&d);
    if computed != doc.checksum {
        return Err(Error::Checksum { stored: doc.checksum, computed });
    }
    debug_assert_eq!(doc.schema_version, SCHEMA_VERSION);
    Ok(d)
}

pub fn write_dataset(d: &Dataset, path: &Path) -> Result<()> {
    std::fs::write(path, serialize_dataset(d)).map_err(|e| Error::io(path, e))
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_dataset(&text)
}
