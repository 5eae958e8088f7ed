//! Exact solvers and earliest-start timing of a fixed batching.
//!
//! Both solvers restrict attention to schedules in which every batch runs for
//! the largest minimal processing time of its members and starts as early as
//! its machine sequence allows. Neither restriction loses optimality: `p` and
//! the number of tardy jobs only grow with later or longer batches, and setup
//! costs depend on the sequences alone.

mod bnb;
mod brute;

pub use bnb::branch_and_bound;
pub use brute::{brute_force, for_each_arrangement, BRUTE_FORCE_LIMIT};

use crate::error::OspError;
use crate::model::{earliest_start, Batch, Instance, Schedule, Time};
use crate::objective::{ObjectiveReport, Rational};
use std::fmt;
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    /// The schedule is proven optimal.
    Optimal,
    /// A schedule was found but the search stopped early.
    Feasible,
    /// The search finished without finding any schedule.
    Infeasible,
    /// The search stopped early without finding any schedule.
    Timeout,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Optimal => "OPTIMAL",
            Self::Feasible => "FEASIBLE",
            Self::Infeasible => "INFEASIBLE",
            Self::Timeout => "TIMEOUT",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Wall-clock budget. `None` searches to completion.
    pub time_limit: Option<Duration>,
    /// Node budget, for reproducible partial runs.
    pub node_limit: Option<u64>,
    /// Starting incumbent; must be feasible.
    pub incumbent: Option<Schedule>,
    /// Search threads. With 1 the node order is deterministic.
    pub workers: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            time_limit: Some(Duration::from_secs(3600)),
            node_limit: None,
            incumbent: None,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub schedule: Option<Schedule>,
    pub obj: Option<ObjectiveReport>,
    pub status: SolveStatus,
    pub lower_bound: Rational,
    pub nodes: u64,
    pub elapsed: Duration,
}

/// `true` if the jobs can form one batch on machine `m`: one attribute,
/// overlapping processing windows, total size within capacity, all eligible.
pub fn block_fits(instance: &Instance, jobs: &[usize], m: usize) -> bool {
    let Some(&first) = jobs.first() else { return false };
    let attr = instance.jobs[first].attribute;
    let mut lo = Time::MIN;
    let mut hi = Time::MAX;
    let mut size = 0;
    for &j in jobs {
        let job = &instance.jobs[j];
        if job.attribute != attr || !job.is_eligible(m) {
            return false;
        }
        lo = lo.max(job.min_time);
        hi = hi.min(job.max_time);
        size += job.size;
    }
    lo <= hi && size <= instance.machines[m].capacity
}

/// Times the given per-machine batch sequences with earliest starts.
///
/// Each batch runs for the largest minimal processing time of its members.
/// The resulting start vector is componentwise minimal among all feasible
/// timings of these sequences.
pub fn schedule_fixed(instance: &Instance, batching: &[Vec<Vec<usize>>]) -> Result<Schedule, OspError> {
    let mut batches = Vec::new();
    for (m, seq) in batching.iter().enumerate() {
        let machine = instance
            .machines
            .get(m)
            .ok_or_else(|| OspError::MalformedSchedule(format!("unknown machine {}", m + 1)))?;
        let mut ready = 0;
        let mut attr = machine.initial_state;
        for (bi, jobs) in seq.iter().enumerate() {
            let Some(&first) = jobs.first() else {
                return Err(OspError::MalformedSchedule(format!("empty batch on machine {}", m + 1)));
            };
            let next = instance.jobs[first].attribute;
            let proc = jobs.iter().map(|&j| instance.jobs[j].min_time).max().unwrap_or(0);
            let release = jobs.iter().map(|&j| instance.jobs[j].release).max().unwrap_or(0);
            let setup = instance.setup_times.get(attr, next);
            let (start, _) = earliest_start(machine, ready, setup, release, proc)
                .ok_or(OspError::DoesNotFit { machine: m, batch: bi })?;
            batches.push(Batch {
                machine: m,
                start,
                proc,
                jobs: jobs.clone(),
            });
            ready = start + proc;
            attr = next;
        }
    }
    Ok(Schedule::new(batches))
}
