//! Exhaustive search over batchings, machine assignments and sequences.

use super::{block_fits, schedule_fixed, SolveResult, SolveStatus};
use crate::error::OspError;
use crate::model::{Instance, Schedule};
use crate::objective::{objective_components, ObjectiveReport, Rational, Weights};
use std::time::Instant;

/// Per-machine batch sequences, each batch a list of job indices.
type Sequences = [Vec<Vec<usize>>];

/// Largest job count [`brute_force`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 10;

/// Calls `visit` with every assignment of jobs to per-machine batch
/// sequences in which each batch could share a machine: same attribute,
/// overlapping windows, capacity and eligibility respected. Timing is not
/// checked.
pub fn for_each_arrangement(instance: &Instance, mut visit: impl FnMut(&[Vec<Vec<usize>>])) {
    let n = instance.job_count();
    let mut assigned = vec![false; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    partitions(instance, &mut assigned, &mut blocks, &mut |blocks| {
        let mut seqs = vec![Vec::new(); instance.machine_count()];
        arrange(instance, blocks, 0, &mut seqs, &mut visit);
    });
}

fn partitions(
    instance: &Instance,
    assigned: &mut Vec<bool>,
    blocks: &mut Vec<Vec<usize>>,
    emit: &mut dyn FnMut(&[Vec<usize>]),
) {
    let Some(head) = assigned.iter().position(|a| !a) else {
        emit(blocks);
        return;
    };
    let rest: Vec<usize> = (head + 1..assigned.len())
        .filter(|&j| !assigned[j] && instance.jobs[j].attribute == instance.jobs[head].attribute)
        .collect();
    let mut block = vec![head];
    assigned[head] = true;
    grow(instance, &rest, 0, &mut block, assigned, blocks, emit);
    assigned[head] = false;
}

fn grow(
    instance: &Instance,
    rest: &[usize],
    from: usize,
    block: &mut Vec<usize>,
    assigned: &mut Vec<bool>,
    blocks: &mut Vec<Vec<usize>>,
    emit: &mut dyn FnMut(&[Vec<usize>]),
) {
    if !(0..instance.machine_count()).any(|m| block_fits(instance, block, m)) {
        return;
    }
    blocks.push(block.clone());
    partitions(instance, assigned, blocks, emit);
    blocks.pop();
    for i in from..rest.len() {
        let j = rest[i];
        block.push(j);
        assigned[j] = true;
        grow(instance, rest, i + 1, block, assigned, blocks, emit);
        assigned[j] = false;
        block.pop();
    }
}

fn arrange(
    instance: &Instance,
    blocks: &[Vec<usize>],
    next: usize,
    seqs: &mut Vec<Vec<Vec<usize>>>,
    visit: &mut dyn FnMut(&Sequences),
) {
    if next == blocks.len() {
        visit(seqs);
        return;
    }
    let block = &blocks[next];
    for m in 0..instance.machine_count() {
        if !block_fits(instance, block, m) {
            continue;
        }
        for pos in 0..=seqs[m].len() {
            seqs[m].insert(pos, block.clone());
            arrange(instance, blocks, next + 1, seqs, visit);
            seqs[m].remove(pos);
        }
    }
}

/// Optimal schedule by exhaustive enumeration. Among optimal schedules the
/// one with the fewest batches is returned.
pub fn brute_force(instance: &Instance, weights: Weights) -> Result<SolveResult, OspError> {
    weights.check()?;
    let n = instance.job_count();
    if n > BRUTE_FORCE_LIMIT {
        return Err(OspError::TooLarge {
            jobs: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let clock = Instant::now();
    let norm = crate::objective::Normalization::of(instance);
    let mut best: Option<(i128, usize, Schedule)> = None;
    let mut leaves = 0u64;
    for_each_arrangement(instance, |seqs| {
        leaves += 1;
        let Ok(schedule) = schedule_fixed(instance, seqs) else {
            return;
        };
        let Ok(c) = objective_components(instance, &schedule) else {
            return;
        };
        let key = (norm.integer_objective(&weights, &c), schedule.len());
        if best.as_ref().is_none_or(|(v, b, _)| key < (*v, *b)) {
            best = Some((key.0, key.1, schedule));
        }
    });

    let elapsed = clock.elapsed();
    Ok(match best {
        Some((_, _, schedule)) => {
            let c = objective_components(instance, &schedule)?;
            let obj = ObjectiveReport::from_components(instance, weights, c);
            SolveResult {
                lower_bound: obj.obj_real,
                schedule: Some(schedule),
                obj: Some(obj),
                status: SolveStatus::Optimal,
                nodes: leaves,
                elapsed,
            }
        }
        None => SolveResult {
            schedule: None,
            obj: None,
            status: SolveStatus::Infeasible,
            lower_bound: Rational::from_integer(0),
            nodes: leaves,
            elapsed,
        },
    })
}
