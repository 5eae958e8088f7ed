//! Instance and schedule files.
//!
//! Documents are JSON with sorted keys, two-space indentation and a trailing
//! newline, so equal content always gives equal bytes. Ids are 1-based on
//! disk and 0-based in memory.

use osp_core::{Batch, Instance, Interval, Job, Machine, Schedule, SetupMatrix};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("{0}")]
    Data(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineRecord {
    pub availability: Vec<[i64; 2]>,
    pub capacity: i64,
    pub id: usize,
    pub initial_state: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobRecord {
    pub attr: usize,
    pub eligible: Vec<usize>,
    pub et: i64,
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lt: Option<i64>,
    pub maxt: i64,
    pub mint: i64,
    pub size: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub attribute_count: usize,
    pub horizon: i64,
    pub jobs: Vec<JobRecord>,
    pub machines: Vec<MachineRecord>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
    pub setup_costs: Vec<Vec<i64>>,
    pub setup_times: Vec<Vec<i64>>,
    pub version: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchRecord {
    pub jobs: Vec<usize>,
    pub machine: usize,
    pub proc: i64,
    pub start: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub batches: Vec<BatchRecord>,
    pub instance_ref: String,
    pub version: u32,
}

fn one_based(id: usize, what: &str) -> Result<usize, FormatError> {
    id.checked_sub(1)
        .ok_or_else(|| FormatError::Data(format!("{what} id 0 is invalid; ids start at 1")))
}

fn check_ids(ids: impl Iterator<Item = usize>, what: &str) -> Result<(), FormatError> {
    for (i, id) in ids.enumerate() {
        if id != i + 1 {
            return Err(FormatError::Data(format!(
                "{what} ids must be 1, 2, ... in order; found {id} at position {}",
                i + 1
            )));
        }
    }
    Ok(())
}

fn matrix(rows: &[Vec<i64>], what: &str) -> Result<SetupMatrix, FormatError> {
    SetupMatrix::from_rows(rows).ok_or_else(|| FormatError::Data(format!("{what} matrix is not square")))
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        Self {
            attribute_count: inst.attribute_count,
            horizon: inst.horizon,
            jobs: inst
                .jobs
                .iter()
                .enumerate()
                .map(|(j, job)| JobRecord {
                    attr: job.attribute + 1,
                    eligible: job.eligible.iter().map(|m| m + 1).collect(),
                    et: job.release,
                    id: j + 1,
                    lt: job.due,
                    maxt: job.max_time,
                    mint: job.min_time,
                    size: job.size,
                })
                .collect(),
            machines: inst
                .machines
                .iter()
                .enumerate()
                .map(|(m, mach)| MachineRecord {
                    availability: mach.availability.iter().map(|w| [w.start, w.end]).collect(),
                    capacity: mach.capacity,
                    id: m + 1,
                    initial_state: mach.initial_state + 1,
                })
                .collect(),
            metadata: inst.metadata.clone(),
            setup_costs: inst.setup_costs.rows(),
            setup_times: inst.setup_times.rows(),
            version: FORMAT_VERSION,
        }
    }

    pub fn to_instance(&self) -> Result<Instance, FormatError> {
        if self.version != FORMAT_VERSION {
            return Err(FormatError::Version(self.version));
        }
        check_ids(self.machines.iter().map(|m| m.id), "machine")?;
        check_ids(self.jobs.iter().map(|j| j.id), "job")?;
        let machines = self
            .machines
            .iter()
            .map(|m| {
                Ok(Machine {
                    capacity: m.capacity,
                    initial_state: one_based(m.initial_state, "initial state attribute")?,
                    availability: m.availability.iter().map(|w| Interval::new(w[0], w[1])).collect(),
                })
            })
            .collect::<Result<_, FormatError>>()?;
        let jobs = self
            .jobs
            .iter()
            .map(|j| {
                Ok(Job {
                    eligible: j
                        .eligible
                        .iter()
                        .map(|&m| one_based(m, "machine"))
                        .collect::<Result<_, _>>()?,
                    release: j.et,
                    due: j.lt,
                    min_time: j.mint,
                    max_time: j.maxt,
                    size: j.size,
                    attribute: one_based(j.attr, "attribute")?,
                })
            })
            .collect::<Result<_, FormatError>>()?;
        Ok(Instance {
            horizon: self.horizon,
            attribute_count: self.attribute_count,
            machines,
            jobs,
            setup_times: matrix(&self.setup_times, "setup time")?,
            setup_costs: matrix(&self.setup_costs, "setup cost")?,
            metadata: self.metadata.clone(),
        })
    }
}

impl ScheduleFile {
    pub fn from_schedule(schedule: &Schedule, instance_ref: String) -> Self {
        Self {
            batches: schedule
                .batches
                .iter()
                .map(|b| BatchRecord {
                    jobs: b.jobs.iter().map(|j| j + 1).collect(),
                    machine: b.machine + 1,
                    proc: b.proc,
                    start: b.start,
                })
                .collect(),
            instance_ref,
            version: FORMAT_VERSION,
        }
    }

    pub fn to_schedule(&self) -> Result<Schedule, FormatError> {
        if self.version != FORMAT_VERSION {
            return Err(FormatError::Version(self.version));
        }
        let batches = self
            .batches
            .iter()
            .map(|b| {
                Ok(Batch {
                    machine: one_based(b.machine, "machine")?,
                    start: b.start,
                    proc: b.proc,
                    jobs: b.jobs.iter().map(|&j| one_based(j, "job")).collect::<Result<_, _>>()?,
                })
            })
            .collect::<Result<_, FormatError>>()?;
        Ok(Schedule::new(batches))
    }
}

/// Canonical text of any serializable value: sorted keys, pretty-printed,
/// newline-terminated.
pub fn to_canonical<T: Serialize>(value: &T) -> String {
    let tree = serde_json::to_value(value).expect("file records always serialize");
    let mut text = serde_json::to_string_pretty(&tree).expect("JSON values always serialize");
    text.push('\n');
    text
}

fn from_text<T: DeserializeOwned>(text: &str) -> Result<T, FormatError> {
    Ok(serde_json::from_str(text)?)
}

pub fn instance_to_string(inst: &Instance) -> String {
    to_canonical(&InstanceFile::from_instance(inst))
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    from_text::<InstanceFile>(text)?.to_instance()
}

pub fn schedule_to_string(schedule: &Schedule, instance_ref: &str) -> String {
    to_canonical(&ScheduleFile::from_schedule(schedule, instance_ref.to_string()))
}

/// The schedule and the instance reference it was written against.
pub fn parse_schedule(text: &str) -> Result<(Schedule, String), FormatError> {
    let file: ScheduleFile = from_text(text)?;
    Ok((file.to_schedule()?, file.instance_ref))
}

/// `sha256:<hex>` of the canonical instance text.
pub fn instance_hash(inst: &Instance) -> String {
    let digest = Sha256::digest(instance_to_string(inst).as_bytes());
    format!("sha256:{}", hex::encode(digest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use osp_core::fixtures;

    #[test]
    fn six_job_round_trip() {
        let inst = fixtures::six_job_example();
        let text = instance_to_string(&inst);
        assert_eq!(parse_instance(&text).unwrap(), inst);
        assert!(text.ends_with("}\n"));
        assert!(!text.contains("\r"));
        // job 6 has no due date
        assert_eq!(text.matches("\"lt\"").count(), 5);
    }

    #[test]
    fn keys_are_sorted() {
        let text = instance_to_string(&fixtures::six_job_example());
        let a = text.find("\"attribute_count\"").unwrap();
        let h = text.find("\"horizon\"").unwrap();
        let v = text.find("\"version\"").unwrap();
        assert!(a < h && h < v);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = instance_to_string(&fixtures::six_job_example()).replacen(
            "\"horizon\"",
            "\"colour\": 1,\n  \"horizon\"",
            1,
        );
        assert!(matches!(parse_instance(&text), Err(FormatError::Json(_))));
    }

    #[test]
    fn floats_are_rejected() {
        let text = instance_to_string(&fixtures::six_job_example()).replacen("\"horizon\": 15", "\"horizon\": 15.0", 1);
        assert!(parse_instance(&text).is_err());
    }

    #[test]
    fn ids_must_be_contiguous() {
        let text = instance_to_string(&fixtures::six_job_example()).replacen("\"id\": 2", "\"id\": 7", 1);
        assert!(matches!(parse_instance(&text), Err(FormatError::Data(_))));
    }

    #[test]
    fn schedule_round_trip_and_hash() {
        let inst = fixtures::six_job_example();
        let s = Schedule::new(vec![Batch {
            machine: 1,
            start: 5,
            proc: 5,
            jobs: vec![3, 4, 5],
        }]);
        let h = instance_hash(&inst);
        assert!(h.starts_with("sha256:") && h.len() == 7 + 64);
        let text = schedule_to_string(&s, &h);
        assert_eq!(parse_schedule(&text).unwrap(), (s, h));
    }
}
