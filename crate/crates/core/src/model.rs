//! Instance and schedule types.
//!
//! Machines, jobs and attributes are addressed by 0-based indices throughout
//! the library. The file formats in `osp-cli` translate to and from the
//! 1-based ids used on disk.

use std::collections::BTreeMap;

/// Discrete time unit. Every quantity on the time axis is an integer.
pub type Time = i64;

/// A closed availability window `[start, end]` on a machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub start: Time,
    pub end: Time,
}

impl Interval {
    #[inline]
    pub fn new(start: Time, end: Time) -> Self {
        Self { start, end }
    }

    #[inline]
    pub fn len(&self) -> Time {
        self.end - self.start
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// `true` if `[from, to]` lies inside this window.
    #[inline]
    pub fn contains_span(&self, from: Time, to: Time) -> bool {
        self.start <= from && to <= self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Machine {
    pub capacity: i64,
    /// Attribute the machine is set up for before its first batch.
    pub initial_state: usize,
    /// Sorted, pairwise non-overlapping availability windows.
    pub availability: Vec<Interval>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    /// Sorted machine indices the job may run on.
    pub eligible: Vec<usize>,
    pub release: Time,
    /// Due date. `None` means the job is never tardy.
    pub due: Option<Time>,
    pub min_time: Time,
    pub max_time: Time,
    pub size: i64,
    pub attribute: usize,
}

impl Job {
    #[inline]
    pub fn is_eligible(&self, machine: usize) -> bool {
        self.eligible.binary_search(&machine).is_ok()
    }

    /// Due date with `None` mapped to `Time::MAX`, for ordering.
    #[inline]
    pub fn due_or_max(&self) -> Time {
        self.due.unwrap_or(Time::MAX)
    }
}

/// Dense `a x a` matrix of setup times or setup costs, indexed `(from, to)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetupMatrix {
    size: usize,
    data: Vec<i64>,
}

impl SetupMatrix {
    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            data: vec![0; size * size],
        }
    }

    pub fn constant(size: usize, value: i64) -> Self {
        Self {
            size,
            data: vec![value; size * size],
        }
    }

    /// Builds a matrix from rows. Returns `None` if the rows are not square.
    pub fn from_rows(rows: &[Vec<i64>]) -> Option<Self> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return None;
        }
        Some(Self {
            size,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, from: usize, to: usize) -> i64 {
        self.data[from * self.size + to]
    }

    #[inline]
    pub fn set(&mut self, from: usize, to: usize, value: i64) {
        self.data[from * self.size + to] = value;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.size.max(1)).map(|c| c.to_vec()).collect()
    }

    pub fn max_entry(&self) -> i64 {
        self.data.iter().copied().max().unwrap_or(0)
    }

    pub fn min_entry(&self) -> i64 {
        self.data.iter().copied().min().unwrap_or(0)
    }

    pub fn row_min(&self, from: usize) -> i64 {
        (0..self.size).map(|to| self.get(from, to)).min().unwrap_or(0)
    }

    pub fn column_min(&self, to: usize) -> i64 {
        (0..self.size).map(|from| self.get(from, to)).min().unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub horizon: Time,
    pub attribute_count: usize,
    pub machines: Vec<Machine>,
    pub jobs: Vec<Job>,
    pub setup_times: SetupMatrix,
    pub setup_costs: SetupMatrix,
    /// Free-form provenance, e.g. generator parameters and seed.
    pub metadata: BTreeMap<String, String>,
}

impl Instance {
    #[inline]
    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    #[inline]
    pub fn machine_count(&self) -> usize {
        self.machines.len()
    }

    pub fn max_capacity(&self) -> i64 {
        self.machines.iter().map(|m| m.capacity).max().unwrap_or(0)
    }

    pub fn max_setup_time(&self) -> i64 {
        self.setup_times.max_entry()
    }

    pub fn max_setup_cost(&self) -> i64 {
        self.setup_costs.max_entry()
    }

    /// Overall minimum of the jobs' minimal processing times.
    pub fn min_processing_time(&self) -> Time {
        self.jobs.iter().map(|j| j.min_time).min().unwrap_or(0)
    }

    /// Overall maximum of the jobs' maximal processing times.
    pub fn max_processing_time(&self) -> Time {
        self.jobs.iter().map(|j| j.max_time).max().unwrap_or(0)
    }

    pub fn interval_count(&self) -> usize {
        self.machines.iter().map(|m| m.availability.len()).max().unwrap_or(0)
    }

    /// Pads every machine's availability list with empty `[l, l]` windows so
    /// all machines carry the same number of intervals.
    pub fn normalize_intervals(&self) -> Instance {
        let target = self.interval_count();
        let mut out = self.clone();
        for machine in &mut out.machines {
            while machine.availability.len() < target {
                machine.availability.push(Interval::new(self.horizon, self.horizon));
            }
        }
        out
    }

    /// Sub-instance restricted to the given jobs (in the given order).
    pub fn restrict_jobs(&self, jobs: &[usize]) -> Instance {
        Instance {
            horizon: self.horizon,
            attribute_count: self.attribute_count,
            machines: self.machines.clone(),
            jobs: jobs.iter().map(|&j| self.jobs[j].clone()).collect(),
            setup_times: self.setup_times.clone(),
            setup_costs: self.setup_costs.clone(),
            metadata: BTreeMap::new(),
        }
    }
}

/// One batch: jobs processed together on one machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Batch {
    pub machine: usize,
    pub start: Time,
    pub proc: Time,
    pub jobs: Vec<usize>,
}

impl Batch {
    #[inline]
    pub fn end(&self) -> Time {
        self.start + self.proc
    }

    /// The batch attribute, taken from its first listed job.
    #[inline]
    pub fn attribute(&self, instance: &Instance) -> usize {
        instance.jobs[self.jobs[0]].attribute
    }

    pub fn total_size(&self, instance: &Instance) -> i64 {
        self.jobs.iter().map(|&j| instance.jobs[j].size).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Schedule {
    pub batches: Vec<Batch>,
}

impl Schedule {
    pub fn new(batches: Vec<Batch>) -> Self {
        Self { batches }
    }

    pub fn len(&self) -> usize {
        self.batches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.batches.is_empty()
    }

    /// Batch indices per machine, each list ordered by start time (ties by
    /// position in the batch list). Batches naming a machine outside
    /// `0..machine_count` are dropped.
    pub fn machine_sequences(&self, machine_count: usize) -> Vec<Vec<usize>> {
        let mut seqs = vec![Vec::new(); machine_count];
        for (idx, batch) in self.batches.iter().enumerate() {
            if batch.machine < machine_count {
                seqs[batch.machine].push(idx);
            }
        }
        for seq in &mut seqs {
            seq.sort_by_key(|&idx| (self.batches[idx].start, idx));
        }
        seqs
    }

    /// Batches sorted by `(machine, start)`, member lists sorted. Two
    /// schedules describing the same plan compare equal after this.
    pub fn canonical(&self) -> Schedule {
        let mut batches = self.batches.clone();
        for batch in &mut batches {
            batch.jobs.sort_unstable();
        }
        batches.sort_by(|a, b| (a.machine, a.start, &a.jobs).cmp(&(b.machine, b.start, &b.jobs)));
        Schedule { batches }
    }
}

/// Earliest start for a batch appended after a machine's current last batch.
///
/// `ready` is the end of the previous batch (0 when the machine is empty),
/// `setup` the setup time preceding the batch. Setup and batch must share one
/// availability window. Returns the start and the index of the window used.
pub fn earliest_start(machine: &Machine, ready: Time, setup: Time, release: Time, proc: Time) -> Option<(Time, usize)> {
    let lower = release.max(ready + setup);
    machine.availability.iter().enumerate().find_map(|(idx, window)| {
        let start = lower.max(window.start + setup);
        (start + proc <= window.end).then_some((start, idx))
    })
}
