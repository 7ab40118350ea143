//! Comma-delimited ingestion and export.
//!
//! Three files with required headers:
//! - `tasks.csv`: `task_id,project_id,status,posting_date,submission_deadline,prize,technologies,platforms`
//!   (technologies/platforms pipe-separated, dates `YYYY-MM-DD`)
//! - `registrations.csv`: `worker_id,task_id,registration_date,submitted,valid,won,score`
//!   (flags literal `0`/`1`, score may be empty)
//! - `workers.csv`: `worker_id,rating`

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;

use super::{Dataset, DatasetMetadata, RegistrationEvent, TaskRecord, WorkerRecord};
use crate::error::{Error, Result, RowDiagnostic};

pub const TASKS_FILE: &str = "tasks.csv";
pub const REGISTRATIONS_FILE: &str = "registrations.csv";
pub const WORKERS_FILE: &str = "workers.csv";

const TASK_COLUMNS: [&str; 8] =
    ["task_id", "project_id", "status", "posting_date", "submission_deadline", "prize", "technologies", "platforms"];
const REGISTRATION_COLUMNS: [&str; 7] =
    ["worker_id", "task_id", "registration_date", "submitted", "valid", "won", "score"];
const WORKER_COLUMNS: [&str; 2] = ["worker_id", "rating"];

/// Non-fatal observations made during ingestion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    /// Repeated (worker, task) registrations dropped in favour of the first.
    pub duplicate_registrations: usize,
}

struct Table {
    columns: HashMap<&'static str, usize>,
    rows: Vec<(usize, csv::StringRecord)>,
}

impl Table {
    fn get<'r>(&self, rec: &'r csv::StringRecord, col: &str) -> &'r str {
        self.columns.get(col).and_then(|&i| rec.get(i)).map(str::trim).unwrap_or("")
    }
}

fn read_table<R: Read>(file: &str, input: R, required: &[&'static str], optional: &[&'static str]) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(input);
    let headers = rdr.headers().map_err(|source| Error::Csv { file: file.into(), source })?.clone();
    let position = |name: &str| headers.iter().position(|h| h.trim() == name);
    let mut columns = HashMap::new();
    for &col in required {
        let idx = position(col).ok_or_else(|| Error::MissingColumn { file: file.into(), column: col.into() })?;
        columns.insert(col, idx);
    }
    for &col in optional {
        if let Some(idx) = position(col) {
            columns.insert(col, idx);
        }
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|source| Error::Csv { file: file.into(), source })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(rows.len() + 2);
        if rec.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        rows.push((line, rec));
    }
    Ok(Table { columns, rows })
}

fn parse_date(s: &str) -> std::result::Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| format!("bad date `{s}`: {e}"))
}

fn parse_flag(name: &str, s: &str) -> std::result::Result<bool, String> {
    match s {
        "1" => Ok(true),
        "0" => Ok(false),
        _ => Err(format!("{name} must be 0 or 1, got `{s}`")),
    }
}

fn parse_f64(name: &str, s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("{name} must be a finite number, got `{s}`")),
    }
}

fn split_set(s: &str) -> BTreeSet<String> {
    s.split('|').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect()
}

/// Parse the three delimited inputs into a validated [`Dataset`].
pub fn parse_dataset<T: Read, R: Read, W: Read>(
    tasks: T,
    registrations: R,
    workers: W,
) -> Result<(Dataset, IngestReport)> {
    let task_table = read_table(TASKS_FILE, tasks, &TASK_COLUMNS, &[])?;
    let reg_table = read_table(REGISTRATIONS_FILE, registrations, &REGISTRATION_COLUMNS[..6], &["score"])?;
    let worker_table = read_table(WORKERS_FILE, workers, &WORKER_COLUMNS, &[])?;

    let mut bad = Vec::new();
    let mut reject = |file: &str, line: usize, message: String| {
        bad.push(RowDiagnostic { file: file.into(), line, message });
    };

    let mut worker_records = Vec::new();
    for (line, rec) in &worker_table.rows {
        let id = worker_table.get(rec, "worker_id");
        if id.is_empty() {
            reject(WORKERS_FILE, *line, "empty worker_id".into());
            continue;
        }
        match parse_f64("rating", worker_table.get(rec, "rating")) {
            Ok(r) if r < 0.0 => reject(WORKERS_FILE, *line, format!("negative rating {r}")),
            Ok(rating) => worker_records.push(WorkerRecord { worker_id: id.into(), rating }),
            Err(m) => reject(WORKERS_FILE, *line, m),
        }
    }

    let mut task_records = Vec::new();
    for (line, rec) in &task_table.rows {
        let t = &task_table;
        let parsed = (|| {
            let task_id = t.get(rec, "task_id");
            if task_id.is_empty() {
                return Err("empty task_id".to_string());
            }
            let posting_date = parse_date(t.get(rec, "posting_date"))?;
            let submission_deadline = parse_date(t.get(rec, "submission_deadline"))?;
            if submission_deadline < posting_date {
                return Err(format!("submission_deadline {submission_deadline} precedes posting_date {posting_date}"));
            }
            Ok(TaskRecord {
                task_id: task_id.into(),
                project_id: t.get(rec, "project_id").into(),
                status: t.get(rec, "status").parse()?,
                posting_date,
                submission_deadline,
                prize: parse_f64("prize", t.get(rec, "prize"))?,
                technologies: split_set(t.get(rec, "technologies")),
                platforms: split_set(t.get(rec, "platforms")),
            })
        })();
        match parsed {
            Ok(task) => task_records.push(task),
            Err(m) => reject(TASKS_FILE, *line, m),
        }
    }

    let mut events = Vec::new();
    for (line, rec) in &reg_table.rows {
        let t = &reg_table;
        let parsed = (|| {
            let score = match t.get(rec, "score") {
                "" => None,
                s => Some(parse_f64("score", s)?),
            };
            let ev = RegistrationEvent {
                worker_id: t.get(rec, "worker_id").into(),
                task_id: t.get(rec, "task_id").into(),
                registration_date: parse_date(t.get(rec, "registration_date"))?,
                submitted: parse_flag("submitted", t.get(rec, "submitted"))?,
                valid: parse_flag("valid", t.get(rec, "valid"))?,
                won: parse_flag("won", t.get(rec, "won"))?,
                score,
            };
            if !ev.flags_consistent() {
                return Err(format!(
                    "flag chain violated (won={}, valid={}, submitted={}); expected won ⇒ valid ⇒ submitted",
                    ev.won as u8, ev.valid as u8, ev.submitted as u8
                ));
            }
            Ok(ev)
        })();
        match parsed {
            Ok(ev) => events.push((*line, ev)),
            Err(m) => reject(REGISTRATIONS_FILE, *line, m),
        }
    }
    if !bad.is_empty() {
        return Err(Error::InvalidRows(bad));
    }

    let mut worker_ids = HashSet::new();
    for w in &worker_records {
        if !worker_ids.insert(w.worker_id.as_str()) {
            return Err(Error::DuplicateId(w.worker_id.clone()));
        }
    }
    let mut deadlines = HashMap::new();
    for t in &task_records {
        if deadlines.insert(t.task_id.as_str(), t.submission_deadline).is_some() {
            return Err(Error::DuplicateId(t.task_id.clone()));
        }
    }

    let mut unknown_workers = BTreeSet::new();
    let mut unknown_tasks = BTreeSet::new();
    for (_, e) in &events {
        if !worker_ids.contains(e.worker_id.as_str()) {
            unknown_workers.insert(e.worker_id.clone());
        }
        if !deadlines.contains_key(e.task_id.as_str()) {
            unknown_tasks.insert(e.task_id.clone());
        }
    }
    if !unknown_workers.is_empty() || !unknown_tasks.is_empty() {
        return Err(Error::UnknownReferences {
            workers: unknown_workers.into_iter().collect(),
            tasks: unknown_tasks.into_iter().collect(),
        });
    }

    let mut late = Vec::new();
    let mut seen = HashSet::new();
    let mut report = IngestReport::default();
    let mut kept = Vec::with_capacity(events.len());
    for (line, e) in events {
        if e.registration_date > deadlines[e.task_id.as_str()] {
            late.push(RowDiagnostic {
                file: REGISTRATIONS_FILE.into(),
                line,
                message: format!("registration_date {} is after the task's submission deadline", e.registration_date),
            });
            continue;
        }
        if seen.insert((e.worker_id.clone(), e.task_id.clone())) {
            kept.push(e);
        } else {
            report.duplicate_registrations += 1;
        }
    }
    if !late.is_empty() {
        return Err(Error::InvalidRows(late));
    }

    let dataset = Dataset {
        metadata: DatasetMetadata { generator: "csv-ingest".into(), seed: None, rng: None },
        workers: worker_records,
        tasks: task_records,
        events: kept,
    };
    Ok((dataset, report))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

/// Read `tasks.csv`, `registrations.csv` and `workers.csv` from `dir`.
pub fn read_dataset_dir(dir: &Path) -> Result<(Dataset, IngestReport)> {
    parse_dataset(open(&dir.join(TASKS_FILE))?, open(&dir.join(REGISTRATIONS_FILE))?, open(&dir.join(WORKERS_FILE))?)
}

fn fmt_set(s: &BTreeSet<String>) -> String {
    s.iter().map(String::as_str).collect::<Vec<_>>().join("|")
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let csv_err = |source| Error::Csv { file: path.display().to_string(), source };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    File::create(path).and_then(|mut f| f.write_all(&bytes)).map_err(|e| Error::io(path, e))
}

/// Write the three delimited files into `dir` (created if missing).
pub fn write_dataset_dir(d: &Dataset, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let flag = |b: bool| if b { "1" } else { "0" }.to_string();
    write_csv(
        &dir.join(TASKS_FILE),
        &TASK_COLUMNS,
        d.tasks.iter().map(|t| {
            vec![
                t.task_id.clone(),
                t.project_id.clone(),
                t.status.as_str().into(),
                t.posting_date.format("%Y-%m-%d").to_string(),
                t.submission_deadline.format("%Y-%m-%d").to_string(),
                t.prize.to_string(),
                fmt_set(&t.technologies),
                fmt_set(&t.platforms),
            ]
        }),
    )?;
    write_csv(
        &dir.join(REGISTRATIONS_FILE),
        &REGISTRATION_COLUMNS,
        d.events.iter().map(|e| {
            vec![
                e.worker_id.clone(),
                e.task_id.clone(),
                e.registration_date.format("%Y-%m-%d").to_string(),
                flag(e.submitted),
                flag(e.valid),
                flag(e.won),
                e.score.map(|s| s.to_string()).unwrap_or_default(),
            ]
        }),
    )?;
    write_csv(
        &dir.join(WORKERS_FILE),
        &WORKER_COLUMNS,
        d.workers.iter().map(|w| vec![w.worker_id.clone(), w.rating.to_string()]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const TASKS_HDR: &str = "task_id,project_id,status,posting_date,submission_deadline,prize,technologies,platforms\n";
    const REGS_HDR: &str = "worker_id,task_id,registration_date,submitted,valid,won,score\n";
    const WORKERS_HDR: &str = "worker_id,rating\n";

    fn parse(t: &str, r: &str, w: &str) -> Result<(Dataset, IngestReport)> {
        parse_dataset(t.as_bytes(), r.as_bytes(), w.as_bytes())
    }

    #[test]
    fn headers_only_gives_empty_dataset() {
        let (d, rep) = parse(TASKS_HDR, REGS_HDR, WORKERS_HDR).unwrap();
        assert!(d.workers.is_empty() && d.tasks.is_empty() && d.events.is_empty());
        assert_eq!(rep.duplicate_registrations, 0);
    }

    #[test]
    fn missing_column_is_reported() {
        let err = parse(TASKS_HDR, REGS_HDR, "worker_id\n").unwrap_err();
        assert!(matches!(err, Error::MissingColumn { ref column, .. } if column == "rating"), "{err}");
    }

    #[test]
    fn won_without_valid_is_rejected_with_line() {
        let tasks = format!("{TASKS_HDR}t1,P1,completed,2014-01-01,2014-01-10,100,java,\n");
        let regs = format!("{REGS_HDR}w1,t1,2014-01-02,1,0,1,\n");
        let workers = format!("{WORKERS_HDR}w1,1000\n");
        match parse(&tasks, &regs, &workers).unwrap_err() {
            Error::InvalidRows(rows) => {
                assert_eq!(rows.len(), 1);
                assert_eq!(rows[0].line, 2);
                assert!(rows[0].message.contains("flag chain"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn unknown_references_are_listed() {
        let tasks = format!("{TASKS_HDR}t1,P1,completed,2014-01-01,2014-01-10,100,java,\n");
        let regs = format!("{REGS_HDR}w1,t1,2014-01-02,0,0,0,\nwx,t1,2014-01-02,0,0,0,\nw1,tz,2014-01-02,0,0,0,\n");
        let workers = format!("{WORKERS_HDR}w1,1000\n");
        match parse(&tasks, &regs, &workers).unwrap_err() {
            Error::UnknownReferences { workers, tasks } => {
                assert_eq!(workers, vec!["wx"]);
                assert_eq!(tasks, vec!["tz"]);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn duplicates_are_dropped_and_counted() {
        let tasks = format!("{TASKS_HDR}t1,P1,completed,2014-01-01,2014-01-10,100,java|c++,web\n");
        let regs = format!("{REGS_HDR}w1,t1,2014-01-02,1,1,1,91.5\nw1,t1,2014-01-03,0,0,0,\n");
        let workers = format!("{WORKERS_HDR}w1,1000\n");
        let (d, rep) = parse(&tasks, &regs, &workers).unwrap();
        assert_eq!(rep.duplicate_registrations, 1);
        assert_eq!(d.events.len(), 1);
        assert!(d.events[0].won);
        assert_eq!(d.events[0].score, Some(91.5));
        assert_eq!(d.tasks[0].technologies.len(), 2);
    }

    #[test]
    fn late_registration_is_rejected() {
        let tasks = format!("{TASKS_HDR}t1,P1,completed,2014-01-01,2014-01-10,100,java,\n");
        let regs = format!("{REGS_HDR}w1,t1,2014-02-02,0,0,0,\n");
        let workers = format!("{WORKERS_HDR}w1,1000\n");
        assert!(matches!(parse(&tasks, &regs, &workers), Err(Error::InvalidRows(_))));
    }

    #[test]
    fn negative_rating_is_rejected() {
        let workers = format!("{WORKERS_HDR}w1,-3\n");
        assert!(matches!(parse(TASKS_HDR, REGS_HDR, &workers), Err(Error::InvalidRows(_))));
    }

    #[test]
    fn write_then_read_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let mut d = super::super::fixtures::f1();
        d.metadata.generator = "csv-ingest".into();
        write_dataset_dir(&d, dir.path()).unwrap();
        let (back, _) = read_dataset_dir(dir.path()).unwrap();
        assert_eq!(back, d);
    }
}
