//! Two small hand-written instances used across tests, docs and the shipped
//! data files.

use crate::model::{Instance, Interval, Job, Machine, SetupMatrix, Time};
use std::collections::BTreeMap;

fn job(
    eligible: &[usize],
    release: Time,
    due: Option<Time>,
    min_time: Time,
    max_time: Time,
    size: i64,
    attribute: usize,
) -> Job {
    Job {
        eligible: eligible.iter().map(|m| m - 1).collect(),
        release,
        due,
        min_time,
        max_time,
        size,
        attribute: attribute - 1,
    }
}

/// Six jobs, two machines, two attributes, horizon 15. Job 6 has no due date
/// and several due dates lie beyond the horizon.
pub fn six_job_example() -> Instance {
    Instance {
        horizon: 15,
        attribute_count: 2,
        machines: vec![
            Machine {
                capacity: 100,
                initial_state: 0,
                availability: vec![Interval::new(0, 6), Interval::new(8, 14)],
            },
            Machine {
                capacity: 150,
                initial_state: 1,
                availability: vec![Interval::new(2, 10), Interval::new(11, 14)],
            },
        ],
        jobs: vec![
            job(&[1], 2, Some(10), 3, 3, 40, 2),
            job(&[1, 2], 0, Some(10), 3, 5, 60, 2),
            job(&[1], 0, Some(20), 3, 5, 30, 1),
            job(&[1, 2], 3, Some(20), 5, 8, 50, 1),
            job(&[2], 0, Some(20), 5, 8, 50, 1),
            job(&[2], 2, None, 5, 10, 50, 1),
        ],
        setup_times: SetupMatrix::from_rows(&[vec![1, 2], vec![3, 1]]).unwrap(),
        setup_costs: SetupMatrix::from_rows(&[vec![0, 20], vec![10, 0]]).unwrap(),
        metadata: BTreeMap::new(),
    }
}

/// Ten jobs, two machines, two attributes, tight capacities. Setup times are
/// all zero; the horizon is the end of the last availability window.
pub fn ten_job_example() -> Instance {
    Instance {
        horizon: 259,
        attribute_count: 2,
        machines: vec![
            Machine {
                capacity: 18,
                initial_state: 0,
                availability: vec![Interval::new(21, 250)],
            },
            Machine {
                capacity: 20,
                initial_state: 1,
                availability: vec![Interval::new(103, 259)],
            },
        ],
        jobs: vec![
            job(&[1, 2], 2, Some(16), 11, 11, 18, 2),
            job(&[1, 2], 3, Some(20), 10, 50, 16, 2),
            job(&[2], 8, Some(43), 19, 19, 17, 2),
            job(&[1], 1, Some(24), 19, 19, 2, 1),
            job(&[1, 2], 39, Some(55), 10, 50, 6, 2),
            job(&[2], 41, Some(64), 19, 50, 19, 2),
            job(&[1, 2], 40, Some(56), 11, 50, 11, 2),
            job(&[1], 31, Some(89), 50, 50, 11, 2),
            job(&[2], 27, Some(58), 19, 19, 4, 1),
            job(&[1, 2], 16, Some(27), 11, 50, 14, 1),
        ],
        setup_times: SetupMatrix::zeros(2),
        setup_costs: SetupMatrix::from_rows(&[vec![6, 8], vec![10, 10]]).unwrap(),
        metadata: BTreeMap::new(),
    }
}
