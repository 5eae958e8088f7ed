//! Lower bounds on the batch count, the cumulative processing time, the
//! setup costs, the number of tardy jobs and the objective.
//!
//! Attribute arguments are 0-based.

mod gac;
mod tardy;

pub use gac::{gac_plus, GacBatch, GacResult, UnitJobInterval};
pub use tardy::{earliest_solo_completion, tardy_bound, TardyBound};

use crate::model::{Instance, Time};
use crate::objective::{Components, Normalization, Rational, Weights};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeBound {
    pub attribute: usize,
    pub large_jobs: Vec<usize>,
    pub small_jobs: Vec<usize>,
    pub large_count: i64,
    pub large_proc: i64,
    pub simple_cap_count: i64,
    pub b_e: i64,
    pub p_e: i64,
    pub b_c: i64,
    pub p_c: i64,
    pub combined_b: i64,
    pub combined_p: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub per_attribute: Vec<AttributeBound>,
    /// Sum of the simple capacity bounds over all attributes.
    pub simple_cap_total: i64,
    pub batch_count_lb: i64,
    pub proc_time_lb: i64,
    pub setup_cost_lb: i64,
    pub tardy_lb: i64,
    pub tardy: TardyBound,
    pub weights: Weights,
    pub normalization: Normalization,
    pub obj_lb_int: i128,
    pub obj_lb: Rational,
}

impl BoundReport {
    pub fn components(&self) -> Components {
        Components {
            processing: self.proc_time_lb,
            setup_cost: self.setup_cost_lb,
            tardy: self.tardy_lb,
        }
    }
}

fn jobs_of(instance: &Instance, r: usize) -> impl Iterator<Item = usize> + '_ {
    (0..instance.job_count()).filter(move |&j| instance.jobs[j].attribute == r)
}

/// `ceil(total size of attribute r / max capacity)`.
pub fn simple_cap_bound(instance: &Instance, r: usize) -> i64 {
    let total: i64 = jobs_of(instance, r).map(|j| instance.jobs[j].size).sum();
    let cap = instance.max_capacity();
    if total == 0 || cap < 1 {
        return 0;
    }
    ceil_div(total, cap)
}

/// Splits attribute `r` into jobs that can never share a batch with another
/// job of the same attribute, and the rest.
pub fn split_large_small(instance: &Instance, r: usize) -> (Vec<usize>, Vec<usize>) {
    let members: Vec<usize> = jobs_of(instance, r).collect();
    let Some(min_size) = members.iter().map(|&j| instance.jobs[j].size).min() else {
        return (Vec::new(), Vec::new());
    };
    members.into_iter().partition(|&j| {
        let job = &instance.jobs[j];
        let cap = job
            .eligible
            .iter()
            .filter_map(|&m| instance.machines.get(m))
            .map(|m| m.capacity)
            .max()
            .unwrap_or(0);
        cap - job.size < min_size
    })
}

/// Batch count and processing time bounds for the small jobs of attribute
/// `r`, accounting for jobs bound to a single machine.
pub fn eligibility_bound(instance: &Instance, r: usize) -> (i64, i64) {
    let (_, small) = split_large_small(instance, r);
    eligibility_bound_for(instance, &small)
}

fn eligibility_bound_for(instance: &Instance, small: &[usize]) -> (i64, i64) {
    let max_cap = instance.max_capacity().max(1);
    let mut b = 0;
    let mut cap_total = 0;
    let mut times: Vec<Time> = Vec::new();

    for (i, machine) in instance.machines.iter().enumerate() {
        let mut mints: Vec<Time> = Vec::new();
        let mut size = 0;
        for &j in small {
            let job = &instance.jobs[j];
            if job.eligible.as_slice() == [i] {
                mints.push(job.min_time);
                size += job.size;
            }
        }
        if mints.is_empty() {
            continue;
        }
        let c = machine.capacity.max(1);
        let batches = ceil_div(size, c);
        b += batches;
        cap_total += batches * c - size;
        mints.sort_unstable();
        times.push(*mints.last().unwrap());
        let extra = ((batches - 1) as usize).min(mints.len());
        times.extend_from_slice(&mints[..extra]);
    }

    let mut shared: Vec<Time> = Vec::new();
    let mut shared_size = 0;
    for &j in small {
        let job = &instance.jobs[j];
        if job.eligible.len() > 1 {
            shared.push(job.min_time);
            shared_size += job.size;
        }
    }
    let b_star = ceil_div((shared_size - cap_total).max(0), max_cap);
    b += b_star;

    shared.sort_unstable();
    if let Some(&top) = shared.last() {
        let current = times.iter().copied().max();
        if current.is_none_or(|cur| top > cur) {
            if let Some(pos) = times.iter().position(|&t| Some(t) == current) {
                times.swap_remove(pos);
            }
            times.push(top);
            let take = ((b_star - 1).max(0) as usize).min(shared.len());
            times.extend_from_slice(&shared[..take]);
        } else {
            let take = (b_star as usize).min(shared.len());
            times.extend_from_slice(&shared[..take]);
        }
    }
    (b, times.iter().sum())
}

/// GAC+ over the small jobs of attribute `r`, each split into unit copies,
/// on a single machine of maximal capacity.
pub fn compat_bound(instance: &Instance, r: usize) -> (i64, i64) {
    let (_, small) = split_large_small(instance, r);
    compat_bound_for(instance, &small)
}

fn compat_bound_for(instance: &Instance, small: &[usize]) -> (i64, i64) {
    let units: Vec<UnitJobInterval> = small
        .iter()
        .map(|&j| {
            let job = &instance.jobs[j];
            UnitJobInterval::new(job.min_time, job.max_time, job.size)
        })
        .collect();
    match gac_plus(&units, instance.max_capacity()) {
        Ok(res) => (res.batch_count, res.total_proc),
        Err(_) => (0, 0),
    }
}

pub fn attribute_bound(instance: &Instance, r: usize) -> AttributeBound {
    let (large, small) = split_large_small(instance, r);
    let large_count = large.len() as i64;
    let large_proc = large.iter().map(|&j| instance.jobs[j].min_time).sum();
    let (b_e, p_e) = eligibility_bound_for(instance, &small);
    let (b_c, p_c) = compat_bound_for(instance, &small);
    AttributeBound {
        attribute: r,
        simple_cap_count: simple_cap_bound(instance, r),
        combined_b: large_count + b_e.max(b_c),
        combined_p: large_proc + p_e.max(p_c),
        large_jobs: large,
        small_jobs: small,
        large_count,
        large_proc,
        b_e,
        p_e,
        b_c,
        p_c,
    }
}

/// Setup cost bound from per-attribute batch counts: the larger of "every
/// batch is entered at its column minimum" and "every batch and machine is
/// left at its row minimum".
pub fn setup_cost_bound(instance: &Instance, counts: &[i64]) -> i64 {
    let sc = &instance.setup_costs;
    let before: i64 = counts.iter().enumerate().map(|(r, &b)| b * sc.column_min(r)).sum();

    let b: i64 = counts.iter().sum();
    let mut list: Vec<(i64, i64)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &b)| b > 0)
        .map(|(r, &b)| (sc.row_min(r), b))
        .collect();
    list.extend(instance.machines.iter().map(|m| (sc.row_min(m.initial_state), 1)));
    list.sort_unstable();
    let mut left = b;
    let mut after = 0;
    for (value, copies) in list {
        if left == 0 {
            break;
        }
        let take = copies.min(left);
        after += take * value;
        left -= take;
    }
    before.max(after)
}

/// All bounds for the instance, aggregated into an objective bound.
pub fn bound_report(instance: &Instance, weights: Weights) -> BoundReport {
    let per_attribute: Vec<AttributeBound> = (0..instance.attribute_count)
        .map(|r| attribute_bound(instance, r))
        .collect();
    let counts: Vec<i64> = per_attribute.iter().map(|a| a.combined_b).collect();
    let tardy = tardy_bound(instance);
    let normalization = Normalization::of(instance);
    let components = Components {
        processing: per_attribute.iter().map(|a| a.combined_p).sum(),
        setup_cost: setup_cost_bound(instance, &counts),
        tardy: tardy.count,
    };
    BoundReport {
        simple_cap_total: per_attribute.iter().map(|a| a.simple_cap_count).sum(),
        batch_count_lb: counts.iter().sum(),
        proc_time_lb: components.processing,
        setup_cost_lb: components.setup_cost,
        tardy_lb: components.tardy,
        obj_lb_int: normalization.integer_objective(&weights, &components),
        obj_lb: normalization.real_objective(&weights, &components),
        per_attribute,
        tardy,
        weights,
        normalization,
    }
}

/// Bounded `(p, sc, t)` of any completion of `instance`, plus whether some
/// job has no feasible placement at all.
pub fn bound_components(instance: &Instance) -> (Components, bool) {
    let mut counts = Vec::with_capacity(instance.attribute_count);
    let mut processing = 0;
    for r in 0..instance.attribute_count {
        let (large, small) = split_large_small(instance, r);
        let large_proc: i64 = large.iter().map(|&j| instance.jobs[j].min_time).sum();
        let (b_e, p_e) = eligibility_bound_for(instance, &small);
        let (b_c, p_c) = compat_bound_for(instance, &small);
        counts.push(large.len() as i64 + b_e.max(b_c));
        processing += large_proc + p_e.max(p_c);
    }
    let tardy = tardy_bound(instance);
    (
        Components {
            processing,
            setup_cost: setup_cost_bound(instance, &counts),
            tardy: tardy.count,
        },
        !tardy.unschedulable.is_empty(),
    )
}

#[inline]
fn ceil_div(a: i64, b: i64) -> i64 {
    (a + b - 1).div_euclid(b)
}
