//! Dispatching-rule construction heuristic.
//!
//! A time sweep opens batches on idle machines. The seed job is the released
//! job with the earliest due date (then largest size, then lowest id), placed
//! on the eligible machine with the cheapest setup (then lowest id). The
//! batch is filled with compatible released jobs by decreasing due date, then
//! with compatible jobs released later that still fit the current
//! availability interval.

use crate::model::{Batch, Instance, Interval, Schedule, Time};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeuristicError {
    /// The sweep ended with `job` (0-based) unplaced.
    #[error("job {} could not be scheduled", .job + 1)]
    Unschedulable { job: usize, partial: Schedule },
}

#[derive(Clone, Copy)]
struct MachineState {
    ready: Time,
    attr: usize,
}

struct Sweep<'a> {
    inst: &'a Instance,
    state: Vec<MachineState>,
    done: Vec<bool>,
    left: usize,
    batches: Vec<Batch>,
}

impl<'a> Sweep<'a> {
    fn window(&self, m: usize, t: Time) -> Option<Interval> {
        if self.state[m].ready > t {
            return None;
        }
        self.inst.machines[m]
            .availability
            .iter()
            .copied()
            .find(|w| w.start <= t && t < w.end)
    }

    /// Earliest start of job `j` alone on `m` inside `w`, if it fits.
    fn seed_start(&self, j: usize, m: usize, w: Interval) -> Option<Time> {
        let job = &self.inst.jobs[j];
        let st = self.inst.setup_times.get(self.state[m].attr, job.attribute);
        let start = job.release.max(self.state[m].ready.max(w.start) + st);
        (start + job.min_time <= w.end).then_some(start)
    }

    fn pick(&self, t: Time, windows: &[Option<Interval>]) -> Option<(usize, usize, Interval)> {
        let inst = self.inst;
        let mut best: Option<(usize, usize, Interval)> = None;
        for j in 0..inst.job_count() {
            if self.done[j] || inst.jobs[j].release > t {
                continue;
            }
            if let Some((b, _, _)) = best {
                let (x, y) = (&inst.jobs[j], &inst.jobs[b]);
                if (x.due_or_max(), -x.size) >= (y.due_or_max(), -y.size) {
                    continue;
                }
            }
            let machine = inst.jobs[j]
                .eligible
                .iter()
                .filter_map(|&m| {
                    let w = windows.get(m).copied().flatten()?;
                    self.seed_start(j, m, w)?;
                    let st = inst.setup_times.get(self.state[m].attr, inst.jobs[j].attribute);
                    Some((st, m, w))
                })
                .min_by_key(|&(st, m, _)| (st, m));
            if let Some((_, m, w)) = machine {
                best = Some((j, m, w));
            }
        }
        best
    }

    fn build(&mut self, seed: usize, m: usize, w: Interval, t: Time) -> Batch {
        let inst = self.inst;
        let attr = inst.jobs[seed].attribute;
        let cap = inst.machines[m].capacity;
        let base = self.state[m].ready.max(w.start) + inst.setup_times.get(self.state[m].attr, attr);
        let seed_job = &inst.jobs[seed];

        let mut members = vec![seed];
        let mut start = base.max(seed_job.release);
        let mut lo = seed_job.min_time;
        let mut hi = seed_job.max_time;
        let mut size = seed_job.size;
        self.done[seed] = true;

        let mut pool: Vec<usize> = (0..inst.job_count())
            .filter(|&j| {
                let job = &inst.jobs[j];
                !self.done[j] && job.attribute == attr && job.is_eligible(m)
            })
            .collect();
        pool.sort_by(|&a, &b| {
            inst.jobs[b]
                .due_or_max()
                .cmp(&inst.jobs[a].due_or_max())
                .then(a.cmp(&b))
        });

        for look_ahead in [false, true] {
            for &c in &pool {
                if size >= cap {
                    break;
                }
                let job = &inst.jobs[c];
                if self.done[c] || (job.release > t) != look_ahead {
                    continue;
                }
                let new_lo = lo.max(job.min_time);
                let new_hi = hi.min(job.max_time);
                let new_start = start.max(job.release);
                if new_lo > new_hi || size + job.size > cap || new_start + new_lo > w.end {
                    continue;
                }
                if let Some(due) = seed_job.due {
                    let late_already = start + lo > due;
                    if !late_already && new_start + new_lo > due {
                        continue;
                    }
                }
                members.push(c);
                self.done[c] = true;
                start = new_start;
                lo = new_lo;
                hi = new_hi;
                size += job.size;
            }
        }

        self.left -= members.len();
        self.state[m] = MachineState {
            ready: start + lo,
            attr,
        };
        Batch {
            machine: m,
            start,
            proc: lo,
            jobs: members,
        }
    }

    /// Next time at which machine availability or job release changes.
    fn next_event(&self, t: Time) -> Option<Time> {
        let inst = self.inst;
        let ready = self.state.iter().map(|s| s.ready);
        let starts = inst
            .machines
            .iter()
            .flat_map(|m| m.availability.iter().map(|w| w.start));
        let releases = (0..inst.job_count())
            .filter(|&j| !self.done[j])
            .map(|j| inst.jobs[j].release);
        ready.chain(starts).chain(releases).filter(|&x| x > t).min()
    }
}

/// Builds a complete schedule, or reports the first job left unplaced along
/// with the partial schedule.
pub fn construct(instance: &Instance) -> Result<Schedule, HeuristicError> {
    let mut sweep = Sweep {
        inst: instance,
        state: instance
            .machines
            .iter()
            .map(|m| MachineState {
                ready: 0,
                attr: m.initial_state,
            })
            .collect(),
        done: vec![false; instance.job_count()],
        left: instance.job_count(),
        batches: Vec::new(),
    };

    let mut t: Time = 0;
    while sweep.left > 0 && t <= instance.horizon {
        let windows: Vec<Option<Interval>> = (0..instance.machine_count()).map(|m| sweep.window(m, t)).collect();
        if let Some((j, m, w)) = sweep.pick(t, &windows) {
            let batch = sweep.build(j, m, w, t);
            sweep.batches.push(batch);
            continue;
        }
        match sweep.next_event(t) {
            Some(next) => t = next,
            None => break,
        }
    }

    let schedule = Schedule::new(sweep.batches);
    match sweep.done.iter().position(|d| !d) {
        None => Ok(schedule),
        Some(job) => Err(HeuristicError::Unschedulable { job, partial: schedule }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{Job, Machine, SetupMatrix};
    use crate::validate::validate_schedule;
    use std::collections::BTreeMap;

    #[test]
    fn six_job_schedule_is_feasible() {
        let inst = fixtures::six_job_example();
        let s = construct(&inst).unwrap();
        let r = validate_schedule(&inst, &s);
        assert!(r.feasible(), "{:?}", r.violations);
    }

    #[test]
    fn ten_job_schedule_is_feasible() {
        let inst = fixtures::ten_job_example();
        let s = construct(&inst).unwrap();
        assert!(validate_schedule(&inst, &s).feasible());
        for b in &s.batches {
            let lo = b.jobs.iter().map(|&j| inst.jobs[j].min_time).max().unwrap();
            assert_eq!(b.proc, lo);
        }
    }

    #[test]
    fn single_job_starts_after_setup() {
        let inst = Instance {
            horizon: 30,
            attribute_count: 2,
            machines: vec![Machine {
                capacity: 5,
                initial_state: 0,
                availability: vec![Interval::new(3, 6), Interval::new(10, 30)],
            }],
            jobs: vec![Job {
                eligible: vec![0],
                release: 1,
                due: Some(20),
                min_time: 4,
                max_time: 4,
                size: 1,
                attribute: 1,
            }],
            setup_times: SetupMatrix::from_rows(&[vec![0, 2], vec![2, 0]]).unwrap(),
            setup_costs: SetupMatrix::zeros(2),
            metadata: BTreeMap::new(),
        };
        let s = construct(&inst).unwrap();
        assert_eq!(
            s.batches,
            vec![Batch {
                machine: 0,
                start: 12,
                proc: 4,
                jobs: vec![0]
            }]
        );
    }

    #[test]
    fn unplaceable_job_returns_partial_schedule() {
        let mut inst = fixtures::six_job_example();
        inst.jobs[5].min_time = 9;
        inst.jobs[5].max_time = 10;
        match construct(&inst) {
            Err(HeuristicError::Unschedulable { job, partial }) => {
                assert_eq!(job, 5);
                assert!(!partial.batches.iter().any(|b| b.jobs.contains(&5)));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn deterministic() {
        let inst = fixtures::ten_job_example();
        assert_eq!(construct(&inst), construct(&inst));
    }
}
