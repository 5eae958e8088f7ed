//! Objective evaluation.
//!
//! The three raw components are the cumulative batch processing time `p`, the
//! cumulative setup cost `sc` and the number of tardy jobs `t`. They are
//! normalized by `avg_t * n`, `max(max_sc, 1) * n` and `n`, weighted, and
//! combined. All arithmetic is exact: the real objective is a rational, and
//! the integer objective is the same value scaled by `C * n * (w_p + w_sc +
//! w_t)` with `C = lcm(avg_t, max(max_sc, 1))`.

use crate::error::OspError;
use crate::model::{Instance, Schedule};
use num_integer::Integer;
use num_rational::Ratio;

pub type Rational = Ratio<i128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Weights {
    pub processing: i64,
    pub setup_cost: i64,
    pub tardiness: i64,
}

impl Default for Weights {
    fn default() -> Self {
        Self {
            processing: 4,
            setup_cost: 1,
            tardiness: 100,
        }
    }
}

impl Weights {
    pub fn new(processing: i64, setup_cost: i64, tardiness: i64) -> Result<Self, OspError> {
        let w = Self {
            processing,
            setup_cost,
            tardiness,
        };
        w.check()?;
        Ok(w)
    }

    pub fn check(&self) -> Result<(), OspError> {
        if self.processing < 0 || self.setup_cost < 0 || self.tardiness < 0 {
            return Err(OspError::InvalidWeights("weights must be non-negative".into()));
        }
        if self.sum() == 0 {
            return Err(OspError::InvalidWeights("weights must not all be zero".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn sum(&self) -> i64 {
        self.processing + self.setup_cost + self.tardiness
    }
}

/// The raw objective components of a schedule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Components {
    pub processing: i64,
    pub setup_cost: i64,
    pub tardy: i64,
}

/// Per-instance normalization constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Normalization {
    pub jobs: i128,
    /// `ceil(sum(mint) / n)`, at least 1.
    pub avg_time: i128,
    /// `max(max_sc, 1)`.
    pub cost_scale: i128,
    /// `lcm(avg_time, cost_scale)`.
    pub lcm: i128,
}

impl Normalization {
    pub fn of(instance: &Instance) -> Self {
        let n = instance.job_count() as i128;
        let total: i128 = instance.jobs.iter().map(|j| j.min_time as i128).sum();
        let avg_time = if n == 0 {
            1
        } else {
            Integer::div_ceil(&total, &n).max(1)
        };
        let cost_scale = (instance.max_setup_cost() as i128).max(1);
        Self {
            jobs: n,
            avg_time,
            cost_scale,
            lcm: avg_time.lcm(&cost_scale),
        }
    }

    /// Integer objective: `C * n * (w_p + w_sc + w_t) * obj`.
    pub fn integer_objective(&self, weights: &Weights, c: &Components) -> i128 {
        let wp = weights.processing as i128;
        let wsc = weights.setup_cost as i128;
        let wt = weights.tardiness as i128;
        (wp * self.lcm / self.avg_time) * c.processing as i128
            + (wsc * self.lcm / self.cost_scale) * c.setup_cost as i128
            + wt * self.lcm * c.tardy as i128
    }

    /// The factor relating the integer objective to the real one.
    pub fn scale(&self, weights: &Weights) -> i128 {
        self.lcm * self.jobs.max(1) * weights.sum() as i128
    }

    /// Real objective obtained directly from the normalized components.
    pub fn real_objective(&self, weights: &Weights, c: &Components) -> Rational {
        if self.jobs == 0 {
            return Rational::from_integer(0);
        }
        let n = self.jobs;
        let p = Rational::new(c.processing as i128, self.avg_time * n);
        let sc = Rational::new(c.setup_cost as i128, self.cost_scale * n);
        let t = Rational::new(c.tardy as i128, n);
        (p * weights.processing as i128 + sc * weights.setup_cost as i128 + t * weights.tardiness as i128)
            / weights.sum() as i128
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectiveReport {
    pub components: Components,
    pub weights: Weights,
    pub normalization: Normalization,
    pub obj_int: i128,
    pub obj_real: Rational,
}

impl ObjectiveReport {
    pub fn from_components(instance: &Instance, weights: Weights, components: Components) -> Self {
        let normalization = Normalization::of(instance);
        Self {
            components,
            weights,
            normalization,
            obj_int: normalization.integer_objective(&weights, &components),
            obj_real: normalization.real_objective(&weights, &components),
        }
    }

    /// `obj_real` rendered with 6 fractional digits.
    pub fn obj_real_decimal(&self) -> String {
        format_decimal(&self.obj_real, 6)
    }
}

/// Computes `(p, sc, t)` for a structurally well-formed schedule.
///
/// Batches are sequenced per machine by start time, so the order of the batch
/// list does not matter.
pub fn objective_components(instance: &Instance, schedule: &Schedule) -> Result<Components, OspError> {
    check_structure(instance, schedule)?;
    let mut out = Components::default();
    for seq in schedule.machine_sequences(instance.machine_count()) {
        let Some(&first) = seq.first() else { continue };
        let machine = &instance.machines[schedule.batches[first].machine];
        let mut prev = machine.initial_state;
        for &idx in &seq {
            let batch = &schedule.batches[idx];
            let attr = batch.attribute(instance);
            out.setup_cost += instance.setup_costs.get(prev, attr);
            out.processing += batch.proc;
            let end = batch.end();
            out.tardy += batch
                .jobs
                .iter()
                .filter(|&&j| instance.jobs[j].due.is_some_and(|due| end > due))
                .count() as i64;
            prev = attr;
        }
    }
    Ok(out)
}

pub fn objective(instance: &Instance, schedule: &Schedule, weights: Weights) -> Result<ObjectiveReport, OspError> {
    weights.check()?;
    let components = objective_components(instance, schedule)?;
    Ok(ObjectiveReport::from_components(instance, weights, components))
}

fn check_structure(instance: &Instance, schedule: &Schedule) -> Result<(), OspError> {
    let n = instance.job_count();
    let mut seen = vec![false; n];
    for (idx, batch) in schedule.batches.iter().enumerate() {
        if batch.machine >= instance.machine_count() {
            return Err(OspError::MalformedSchedule(format!(
                "batch {idx} names unknown machine {}",
                batch.machine + 1
            )));
        }
        if batch.jobs.is_empty() {
            return Err(OspError::MalformedSchedule(format!("batch {idx} is empty")));
        }
        for &j in &batch.jobs {
            if j >= n {
                return Err(OspError::MalformedSchedule(format!("unknown job {}", j + 1)));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(OspError::MalformedSchedule(format!("job {} placed twice", j + 1)));
            }
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(OspError::MalformedSchedule(format!("job {} not placed", missing + 1)));
    }
    Ok(())
}

/// Decimal rendering with `digits` fractional digits, rounding half to even.
pub fn format_decimal(value: &Rational, digits: u32) -> String {
    let scale = 10i128.pow(digits);
    let negative = *value < Rational::from_integer(0);
    let abs = if negative { -*value } else { *value };
    let scaled = abs * scale;
    let floor = scaled.floor().to_integer();
    let frac = scaled - Rational::from_integer(floor);
    let half = Rational::new(1, 2);
    let rounded = if frac > half || (frac == half && floor % 2 == 1) {
        floor + 1
    } else {
        floor
    };
    let int_part = rounded / scale;
    let frac_part = rounded % scale;
    let sign = if negative && rounded != 0 { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part:0width$}", width = digits as usize)
    }
}
