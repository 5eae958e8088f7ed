//! Feasibility checks for instances and schedules.
//!
//! Every check runs to completion; a report lists all violations found, in a
//! deterministic order.

use crate::model::{Instance, Schedule};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationCode {
    Release,
    ProcWindow,
    Overlap,
    IntervalFit,
    SetupFit,
    Capacity,
    Attribute,
    Eligibility,
    Structure,
}

impl ViolationCode {
    pub const ALL: [ViolationCode; 9] = [
        Self::Release,
        Self::ProcWindow,
        Self::Overlap,
        Self::IntervalFit,
        Self::SetupFit,
        Self::Capacity,
        Self::Attribute,
        Self::Eligibility,
        Self::Structure,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Release => "RELEASE",
            Self::ProcWindow => "PROC_WINDOW",
            Self::Overlap => "OVERLAP",
            Self::IntervalFit => "INTERVAL_FIT",
            Self::SetupFit => "SETUP_FIT",
            Self::Capacity => "CAPACITY",
            Self::Attribute => "ATTRIBUTE",
            Self::Eligibility => "ELIGIBILITY",
            Self::Structure => "STRUCTURE",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    /// Index into the schedule's batch list, if the violation concerns a batch.
    pub batch: Option<usize>,
    /// 0-based job index, if the violation concerns a job.
    pub job: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
    /// Suspicious but accepted properties, e.g. due dates past the horizon.
    pub warnings: Vec<String>,
}

impl ViolationReport {
    #[inline]
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }

    /// Distinct codes present, sorted.
    pub fn codes(&self) -> Vec<ViolationCode> {
        let mut codes: Vec<_> = self.violations.iter().map(|v| v.code).collect();
        codes.sort();
        codes.dedup();
        codes
    }

    fn push(&mut self, code: ViolationCode, batch: Option<usize>, job: Option<usize>, detail: String) {
        self.violations.push(Violation {
            code,
            batch,
            job,
            detail,
        });
    }

    fn structure(&mut self, detail: String) {
        self.push(ViolationCode::Structure, None, None, detail);
    }
}

/// Checks parameter ranges, interval ordering and matrix shapes.
pub fn validate_instance(instance: &Instance) -> ViolationReport {
    let mut r = ViolationReport::default();
    let l = instance.horizon;
    let a = instance.attribute_count;
    let k = instance.machine_count();

    if l < 1 {
        r.structure(format!("horizon {l} must be positive"));
    }
    if a < 1 {
        r.structure("attribute count must be positive".into());
    }
    if k < 1 {
        r.structure("instance has no machines".into());
    }
    for (name, m) in [
        ("setup time", &instance.setup_times),
        ("setup cost", &instance.setup_costs),
    ] {
        if m.size() != a {
            r.structure(format!("{name} matrix is {0}x{0}, expected {a}x{a}", m.size()));
        } else if m.min_entry() < 0 {
            r.structure(format!("{name} matrix has negative entries"));
        }
    }

    for (mi, machine) in instance.machines.iter().enumerate() {
        let id = mi + 1;
        if machine.capacity < 1 {
            r.structure(format!("machine {id}: capacity {} must be positive", machine.capacity));
        }
        if machine.initial_state >= a {
            r.structure(format!(
                "machine {id}: initial state {} outside 1..={a}",
                machine.initial_state + 1
            ));
        }
        for (ii, w) in machine.availability.iter().enumerate() {
            if w.start < 0 || w.end > l || w.start > w.end {
                r.structure(format!(
                    "machine {id}: interval {} [{}, {}] invalid for horizon {l}",
                    ii + 1,
                    w.start,
                    w.end
                ));
            }
        }
        for (ii, pair) in machine.availability.windows(2).enumerate() {
            if pair[0].end > pair[1].start {
                r.structure(format!(
                    "machine {id}: intervals {} and {} overlap or are unsorted",
                    ii + 1,
                    ii + 2
                ));
            }
        }
    }

    for (ji, job) in instance.jobs.iter().enumerate() {
        let id = ji + 1;
        if job.eligible.is_empty() {
            r.structure(format!("job {id}: no eligible machine"));
        }
        if job.eligible.iter().any(|&m| m >= k) {
            r.structure(format!("job {id}: eligible machine out of range"));
        }
        if job.eligible.windows(2).any(|w| w[0] >= w[1]) {
            r.structure(format!("job {id}: eligible machines not sorted and distinct"));
        }
        if job.release < 0 || job.release >= l {
            r.structure(format!("job {id}: release {} outside [0, {l})", job.release));
        }
        if let Some(due) = job.due {
            if due <= job.release {
                r.structure(format!("job {id}: due date {due} not after release {}", job.release));
            } else if due > l {
                r.warnings.push(format!("job {id}: due date {due} exceeds horizon {l}"));
            }
        }
        if job.min_time < 1 || job.min_time > job.max_time {
            r.structure(format!(
                "job {id}: processing window [{}, {}] invalid",
                job.min_time, job.max_time
            ));
        }
        if job.size < 1 {
            r.structure(format!("job {id}: size {} must be positive", job.size));
        }
        if job.attribute >= a {
            r.structure(format!("job {id}: attribute {} outside 1..={a}", job.attribute + 1));
        }
    }
    r
}

/// Checks a schedule against every hard constraint. Tardiness is not a
/// violation.
///
/// The instance is assumed to pass [`validate_instance`].
pub fn validate_schedule(instance: &Instance, schedule: &Schedule) -> ViolationReport {
    use ViolationCode::*;
    let mut r = ViolationReport::default();
    let n = instance.job_count();
    let k = instance.machine_count();

    // Structure: machine ids, empty batches, job references, exact cover.
    let mut count = vec![0usize; n];
    for (bi, batch) in schedule.batches.iter().enumerate() {
        if batch.machine >= k {
            r.push(
                Structure,
                Some(bi),
                None,
                format!("batch {bi}: unknown machine {}", batch.machine + 1),
            );
        }
        if batch.jobs.is_empty() {
            r.push(Structure, Some(bi), None, format!("batch {bi}: no jobs"));
        }
        if batch.proc < 1 {
            r.push(
                Structure,
                Some(bi),
                None,
                format!("batch {bi}: processing time {} not positive", batch.proc),
            );
        }
        for &j in &batch.jobs {
            if j >= n {
                r.push(Structure, Some(bi), None, format!("batch {bi}: unknown job {}", j + 1));
            } else {
                count[j] += 1;
            }
        }
    }
    for (j, &c) in count.iter().enumerate() {
        match c {
            1 => {}
            0 => r.push(Structure, None, Some(j), format!("job {} not scheduled", j + 1)),
            _ => r.push(Structure, None, Some(j), format!("job {} scheduled {c} times", j + 1)),
        }
    }

    // Per-batch constraints.
    for (bi, batch) in schedule.batches.iter().enumerate() {
        let members: Vec<usize> = batch.jobs.iter().copied().filter(|&j| j < n).collect();
        let Some(&first) = members.first() else { continue };
        let attr = instance.jobs[first].attribute;

        for &j in &members {
            let job = &instance.jobs[j];
            if job.release > batch.start {
                r.push(
                    Release,
                    Some(bi),
                    Some(j),
                    format!(
                        "job {} released at {} but batch starts at {}",
                        j + 1,
                        job.release,
                        batch.start
                    ),
                );
            }
            if job.attribute != attr {
                r.push(
                    Attribute,
                    Some(bi),
                    Some(j),
                    format!(
                        "job {} has attribute {}, batch has {}",
                        j + 1,
                        job.attribute + 1,
                        attr + 1
                    ),
                );
            }
            if batch.machine < k && !job.is_eligible(batch.machine) {
                r.push(
                    Eligibility,
                    Some(bi),
                    Some(j),
                    format!("job {} not eligible on machine {}", j + 1, batch.machine + 1),
                );
            }
        }

        let lo = members.iter().map(|&j| instance.jobs[j].min_time).max().unwrap_or(0);
        let hi = members.iter().map(|&j| instance.jobs[j].max_time).min().unwrap_or(0);
        if batch.proc < lo || batch.proc > hi {
            r.push(
                ProcWindow,
                Some(bi),
                None,
                format!("batch {bi}: processing time {} outside [{lo}, {hi}]", batch.proc),
            );
        }

        if batch.machine < k {
            let size: i64 = members.iter().map(|&j| instance.jobs[j].size).sum();
            let cap = instance.machines[batch.machine].capacity;
            if size > cap {
                r.push(
                    Capacity,
                    Some(bi),
                    None,
                    format!("batch {bi}: total size {size} exceeds capacity {cap}"),
                );
            }
        }
    }

    // Per-machine sequencing: overlap, interval and setup fit.
    let attr_of = |bi: usize| -> Option<usize> {
        schedule.batches[bi]
            .jobs
            .first()
            .filter(|&&j| j < n)
            .map(|&j| instance.jobs[j].attribute)
    };
    for (m, seq) in schedule.machine_sequences(k).iter().enumerate() {
        let machine = &instance.machines[m];
        let mut prev: Option<usize> = None;
        for &bi in seq {
            let batch = &schedule.batches[bi];
            let Some(attr) = attr_of(bi) else { continue };
            let prev_attr = match prev {
                Some(p) => attr_of(p).unwrap_or(machine.initial_state),
                None => machine.initial_state,
            };
            let setup = instance.setup_times.get(prev_attr, attr);

            if let Some(p) = prev {
                let pb = &schedule.batches[p];
                if batch.start < pb.end() + setup {
                    r.push(
                        Overlap,
                        Some(bi),
                        None,
                        format!(
                            "batch {bi} starts at {} but batch {p} ends at {} and setup takes {setup}",
                            batch.start,
                            pb.end()
                        ),
                    );
                }
            }

            let end = batch.end();
            let holding = machine
                .availability
                .iter()
                .filter(|w| w.contains_span(batch.start, end));
            let mut fits_any = false;
            let mut fits_with_setup = false;
            for w in holding {
                fits_any = true;
                if w.start <= batch.start - setup {
                    fits_with_setup = true;
                }
            }
            if !fits_any {
                r.push(
                    IntervalFit,
                    Some(bi),
                    None,
                    format!(
                        "batch {bi} [{}, {end}] lies in no availability interval of machine {}",
                        batch.start,
                        m + 1
                    ),
                );
            } else if !fits_with_setup {
                r.push(
                    SetupFit,
                    Some(bi),
                    None,
                    format!(
                        "batch {bi}: setup of {setup} before {} leaves its availability interval",
                        batch.start
                    ),
                );
            }
            prev = Some(bi);
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{Batch, Interval};

    /// A feasible plan for the six-job instance: jobs 1+2 and then job 3 on
    /// machine 1, jobs 4, 5, 6 together on machine 2.
    fn six_job_plan() -> Schedule {
        Schedule::new(vec![
            Batch {
                machine: 0,
                start: 2,
                proc: 3,
                jobs: vec![0, 1],
            },
            Batch {
                machine: 0,
                start: 11,
                proc: 3,
                jobs: vec![2],
            },
            Batch {
                machine: 1,
                start: 5,
                proc: 5,
                jobs: vec![3, 4, 5],
            },
        ])
    }

    #[test]
    fn six_job_instance_is_valid_with_due_date_warnings() {
        let r = validate_instance(&fixtures::six_job_example());
        assert!(r.feasible(), "{:?}", r.violations);
        assert_eq!(r.warnings.len(), 3);
    }

    #[test]
    fn ten_job_instance_is_valid() {
        let r = validate_instance(&fixtures::ten_job_example());
        assert!(r.feasible());
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn release_after_due_is_structural() {
        let mut inst = fixtures::six_job_example();
        inst.jobs[0].release = 12;
        assert_eq!(validate_instance(&inst).codes(), vec![ViolationCode::Structure]);
    }

    #[test]
    fn unsorted_intervals_are_structural() {
        let mut inst = fixtures::six_job_example();
        inst.machines[0].availability.swap(0, 1);
        let r = validate_instance(&inst);
        assert_eq!(r.codes(), vec![ViolationCode::Structure]);
    }

    #[test]
    fn all_instance_problems_are_listed() {
        let mut inst = fixtures::six_job_example();
        inst.machines[0].capacity = 0;
        inst.jobs[2].size = 0;
        inst.jobs[3].min_time = 9;
        assert_eq!(validate_instance(&inst).violations.len(), 3);
    }

    #[test]
    fn hand_plan_is_feasible() {
        let inst = fixtures::six_job_example();
        let r = validate_schedule(&inst, &six_job_plan());
        assert!(r.feasible(), "{:?}", r.violations);
    }

    #[test]
    fn early_start_is_a_release_violation() {
        let inst = fixtures::six_job_example();
        let mut s = six_job_plan();
        // job 1 released at 2; the window [0,6] still holds setup and batch at 1
        s.batches[0].start = 1;
        let r = validate_schedule(&inst, &s);
        assert_eq!(r.codes(), vec![ViolationCode::Release, ViolationCode::SetupFit]);
        let mut inst2 = inst.clone();
        inst2.setup_times.set(0, 1, 1);
        assert_eq!(validate_schedule(&inst2, &s).codes(), vec![ViolationCode::Release]);
    }

    #[test]
    fn ineligible_machine_is_reported() {
        let inst = fixtures::six_job_example();
        let mut s = six_job_plan();
        s.batches[1].machine = 1;
        s.batches[1].start = 11;
        let r = validate_schedule(&inst, &s);
        assert!(r.codes().contains(&ViolationCode::Eligibility));
    }

    #[test]
    fn each_constraint_has_its_code() {
        let inst = fixtures::six_job_example();
        use ViolationCode::*;
        type Mutation = Box<dyn Fn(&mut Schedule)>;
        let cases: Vec<(Mutation, ViolationCode)> = vec![
            (Box::new(|s| s.batches[0].proc = 2), ProcWindow),
            (Box::new(|s| s.batches[1].start = 6), Overlap),
            (Box::new(|s| s.batches[1].start = 12), IntervalFit),
            (Box::new(|s| s.batches[1].start = 9), SetupFit),
            (Box::new(|s| s.batches[2].jobs.push(0)), Structure),
            (Box::new(|s| s.batches[2].jobs.truncate(2)), Structure),
        ];
        for (mutate, code) in cases {
            let mut s = six_job_plan();
            mutate(&mut s);
            let r = validate_schedule(&inst, &s);
            assert!(r.codes().contains(&code), "{code}: {:?}", r.violations);
        }
    }

    #[test]
    fn capacity_uses_at_most() {
        let mut inst = fixtures::six_job_example();
        let s = six_job_plan();
        inst.machines[0].capacity = 100;
        assert!(validate_schedule(&inst, &s).feasible());
        inst.machines[0].capacity = 99;
        assert_eq!(validate_schedule(&inst, &s).codes(), vec![ViolationCode::Capacity]);
    }

    #[test]
    fn setup_must_share_the_batch_window() {
        let mut inst = fixtures::six_job_example();
        inst.machines[0].availability[0] = Interval::new(1, 6);
        // batch at 2 needs setup 2 from initial state 1 to attribute 2
        let r = validate_schedule(&inst, &six_job_plan());
        assert_eq!(r.codes(), vec![ViolationCode::SetupFit]);
    }

    #[test]
    fn mixed_attributes_are_reported_per_job() {
        let inst = fixtures::six_job_example();
        let s = Schedule::new(vec![
            Batch {
                machine: 0,
                start: 2,
                proc: 3,
                jobs: vec![0, 1, 2],
            },
            Batch {
                machine: 1,
                start: 5,
                proc: 5,
                jobs: vec![3, 4, 5],
            },
        ]);
        let r = validate_schedule(&inst, &s);
        assert!(r.codes().contains(&ViolationCode::Attribute));
        assert_eq!(
            r.violations
                .iter()
                .filter(|v| v.code == ViolationCode::Attribute)
                .count(),
            1
        );
    }
}
