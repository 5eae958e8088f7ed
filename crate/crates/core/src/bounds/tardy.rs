use crate::model::{Instance, Time};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TardyBound {
    pub count: i64,
    /// Jobs late in every feasible schedule.
    pub tardy_jobs: Vec<usize>,
    /// Jobs that fit no availability interval of any eligible machine.
    pub unschedulable: Vec<usize>,
}

/// Lower bound on the completion of job `j` on machine `m` in any schedule.
///
/// The setup before the job's batch is bounded below by the initial-state
/// setup or, when another batch may precede it, by the cheapest setup into
/// the job's attribute. In the first interval such a predecessor also takes
/// at least one time unit.
pub fn earliest_solo_completion(instance: &Instance, j: usize, m: usize) -> Option<Time> {
    let job = &instance.jobs[j];
    let machine = &instance.machines[m];
    let st = &instance.setup_times;
    let initial = st.get(machine.initial_state, job.attribute);
    let cheapest = st.column_min(job.attribute);
    machine.availability.iter().enumerate().find_map(|(i, w)| {
        let sigma = if i == 0 {
            initial.min(1 + cheapest)
        } else {
            initial.min(cheapest)
        };
        let end = job.release.max(w.start + sigma) + job.min_time;
        (end <= w.end).then_some(end)
    })
}

/// Counts the jobs that finish after their due date even when each is
/// placed alone at its earliest possible completion on its best machine.
/// Jobs that cannot be placed at all are counted and flagged.
pub fn tardy_bound(instance: &Instance) -> TardyBound {
    let mut out = TardyBound::default();
    for (j, job) in instance.jobs.iter().enumerate() {
        let best = job
            .eligible
            .iter()
            .filter(|&&m| m < instance.machine_count())
            .filter_map(|&m| earliest_solo_completion(instance, j, m))
            .min();
        match best {
            None => {
                out.unschedulable.push(j);
                if job.due.is_some() {
                    out.tardy_jobs.push(j);
                }
            }
            Some(end) => {
                if job.due.is_some_and(|due| end > due) {
                    out.tardy_jobs.push(j);
                }
            }
        }
    }
    out.count = out.tardy_jobs.len() as i64;
    out
}
