//! Greedy clique cover for unit-size jobs with processing-time windows.

use crate::error::OspError;
use crate::model::Time;

/// `multiplicity` identical unit-size jobs with window `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UnitJobInterval {
    pub lo: Time,
    pub hi: Time,
    pub multiplicity: i64,
}

impl UnitJobInterval {
    pub fn new(lo: Time, hi: Time, multiplicity: i64) -> Self {
        Self { lo, hi, multiplicity }
    }

    #[inline]
    pub fn admits(&self, t: Time) -> bool {
        self.lo <= t && t <= self.hi
    }
}

/// A group of `copies` identical batches. Each holds `units[i].1` copies of
/// input entry `units[i].0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GacBatch {
    /// Input index of the labelling entry.
    pub label: usize,
    pub proc: Time,
    pub units: Vec<(usize, i64)>,
    pub copies: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GacResult {
    pub batch_count: i64,
    pub total_proc: i64,
    pub batches: Vec<GacBatch>,
}

/// Covers all unit jobs with batches of at most `capacity` mutually
/// compatible jobs, minimizing both the batch count and the summed batch
/// processing time.
///
/// Entries are visited by non-increasing `lo`, ties by input position. Each
/// batch is labelled by the first entry with unplaced copies and filled with
/// up to `capacity` copies of entries whose window contains the label's `lo`.
pub fn gac_plus(jobs: &[UnitJobInterval], capacity: i64) -> Result<GacResult, OspError> {
    if capacity < 1 {
        return Err(OspError::CapacityZero);
    }
    let mut order: Vec<usize> = (0..jobs.len()).filter(|&i| jobs[i].multiplicity > 0).collect();
    order.sort_by(|&a, &b| jobs[b].lo.cmp(&jobs[a].lo).then(a.cmp(&b)));
    let mut remaining: Vec<i64> = jobs.iter().map(|j| j.multiplicity.max(0)).collect();

    let mut out = GacResult::default();
    let mut head = 0;
    while head < order.len() {
        let label = order[head];
        if remaining[label] == 0 {
            head += 1;
            continue;
        }
        let t = jobs[label].lo;

        // Whole batches of the label alone.
        let full = remaining[label] / capacity;
        if full > 0 {
            remaining[label] -= full * capacity;
            out.batch_count += full;
            out.total_proc += full * t;
            out.batches.push(GacBatch {
                label,
                proc: t,
                units: vec![(label, capacity)],
                copies: full,
            });
            if remaining[label] == 0 {
                head += 1;
                continue;
            }
        }

        let mut room = capacity;
        let mut units = Vec::new();
        for &j in &order[head..] {
            if room == 0 {
                break;
            }
            if remaining[j] > 0 && jobs[j].admits(t) {
                let take = remaining[j].min(room);
                remaining[j] -= take;
                room -= take;
                units.push((j, take));
            }
        }
        out.batch_count += 1;
        out.total_proc += t;
        out.batches.push(GacBatch {
            label,
            proc: t,
            units,
            copies: 1,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_unit_job() {
        let r = gac_plus(&[UnitJobInterval::new(5, 5, 1)], 1).unwrap();
        assert_eq!((r.batch_count, r.total_proc), (1, 5));
    }

    #[test]
    fn zero_capacity_is_rejected() {
        assert_eq!(gac_plus(&[], 0), Err(OspError::CapacityZero));
    }

    #[test]
    fn empty_input_needs_no_batches() {
        let r = gac_plus(&[], 3).unwrap();
        assert_eq!((r.batch_count, r.total_proc), (0, 0));
    }

    #[test]
    fn ten_job_attribute_two_small_jobs() {
        // jobs 5, 7, 8
        let jobs = [
            UnitJobInterval::new(10, 50, 6),
            UnitJobInterval::new(11, 50, 11),
            UnitJobInterval::new(50, 50, 11),
        ];
        let r = gac_plus(&jobs, 20).unwrap();
        assert_eq!((r.batch_count, r.total_proc), (2, 61));
        assert_eq!(r.batches[0].units, vec![(2, 11), (1, 9)]);
        assert_eq!(r.batches[1].units, vec![(1, 2), (0, 6)]);
    }

    #[test]
    fn ten_job_attribute_one_small_jobs() {
        // jobs 4, 9, 10
        let jobs = [
            UnitJobInterval::new(19, 19, 2),
            UnitJobInterval::new(19, 19, 4),
            UnitJobInterval::new(11, 50, 14),
        ];
        let r = gac_plus(&jobs, 20).unwrap();
        assert_eq!((r.batch_count, r.total_proc), (1, 19));
    }

    #[test]
    fn large_multiplicities_are_grouped() {
        let r = gac_plus(&[UnitJobInterval::new(3, 7, 1_000_000_001)], 10).unwrap();
        assert_eq!(r.batch_count, 100_000_001);
        assert_eq!(r.total_proc, 300_000_003);
        assert_eq!(r.batches.len(), 2);
    }

    #[test]
    fn ties_go_to_the_lower_index() {
        let jobs = [UnitJobInterval::new(4, 4, 1), UnitJobInterval::new(4, 9, 1)];
        let r = gac_plus(&jobs, 1).unwrap();
        assert_eq!(r.batches[0].label, 0);
    }
}
