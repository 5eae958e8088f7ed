//! Depth-first branch-and-bound.
//!
//! A node is a partial schedule built by appending batches in increasing
//! `(start, machine)` order, each at its earliest start after the machine's
//! last batch. Every schedule with earliest starts has exactly one such
//! construction order, so the search is complete and never revisits a
//! schedule. Costs of placed batches are final, and the jobs still open
//! form a residual instance: machines keep their last attribute, lose the
//! time before their last batch ends, and no open job may start before the
//! last placed batch. The bounds of that residual instance, scaled with the
//! full instance's constants, are added to the prefix cost for pruning.

use super::{SolveOptions, SolveResult, SolveStatus};
use crate::bounds::{bound_components, bound_report};
use crate::error::OspError;
use crate::model::{earliest_start, Batch, Instance, Interval, Machine, Schedule, Time};
use crate::objective::{objective_components, Components, Normalization, ObjectiveReport, Rational, Weights};
use crate::validate::validate_schedule;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

struct Shared {
    bound: AtomicI64,
    best: Mutex<Option<(i128, Schedule)>>,
    nodes: AtomicU64,
    stop: AtomicBool,
}

impl Shared {
    fn incumbent(&self) -> i128 {
        self.bound.load(Ordering::Relaxed) as i128
    }

    fn offer(&self, value: i128, schedule: &Schedule) {
        let mut best = self.best.lock().unwrap();
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            *best = Some((value, schedule.clone()));
            self.bound.store(clamp(value), Ordering::Relaxed);
        }
    }
}

fn clamp(v: i128) -> i64 {
    v.clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

struct Ctx<'a> {
    inst: &'a Instance,
    weights: Weights,
    norm: Normalization,
    /// Lowest machine interchangeable with each machine, if any.
    twin: Vec<Option<usize>>,
    clock: Instant,
    options: &'a SolveOptions,
    shared: &'a Shared,
}

#[derive(Clone)]
struct State {
    ready: Vec<Time>,
    attr: Vec<usize>,
    count: Vec<usize>,
    open: Vec<bool>,
    left: usize,
    last: Option<(Time, usize)>,
    batches: Vec<Batch>,
    cost: Components,
}

#[derive(Clone)]
struct Child {
    bound: i128,
    start: Time,
    machine: usize,
    jobs: Vec<usize>,
    proc: Time,
    delta: Components,
}

impl<'a> Ctx<'a> {
    fn value(&self, c: &Components) -> i128 {
        self.norm.integer_objective(&self.weights, c)
    }

    fn out_of_budget(&self) -> bool {
        if self.shared.stop.load(Ordering::Relaxed) {
            return true;
        }
        let nodes = self.shared.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        let over_nodes = self.options.node_limit.is_some_and(|limit| nodes > limit);
        let over_time =
            nodes.is_multiple_of(1024) && self.options.time_limit.is_some_and(|t| self.clock.elapsed() >= t);
        if over_nodes || over_time {
            self.shared.stop.store(true, Ordering::Relaxed);
            return true;
        }
        false
    }

    /// Open jobs minus `taken`, with machine states and the start floor
    /// `floor` applied.
    fn residual(&self, st: &State, taken: &[usize], machine: usize, end: Time, attr: usize, floor: Time) -> Instance {
        let inst = self.inst;
        let machines = inst
            .machines
            .iter()
            .enumerate()
            .map(|(m, mach)| {
                let (ready, state) = if m == machine {
                    (end, attr)
                } else {
                    (st.ready[m], st.attr[m])
                };
                Machine {
                    capacity: mach.capacity,
                    initial_state: state,
                    availability: mach
                        .availability
                        .iter()
                        .filter(|w| w.end >= ready)
                        .map(|w| Interval::new(w.start.max(ready), w.end))
                        .collect(),
                }
            })
            .collect();
        let jobs = (0..inst.job_count())
            .filter(|&j| st.open[j] && !taken.contains(&j))
            .map(|j| {
                let mut job = inst.jobs[j].clone();
                job.release = job.release.max(floor);
                job
            })
            .collect();
        Instance {
            horizon: inst.horizon,
            attribute_count: inst.attribute_count,
            machines,
            jobs,
            setup_times: inst.setup_times.clone(),
            setup_costs: inst.setup_costs.clone(),
            metadata: BTreeMap::new(),
        }
    }

    fn children(&self, st: &State) -> Vec<Child> {
        let inst = self.inst;
        let mut out = Vec::new();
        for m in 0..inst.machine_count() {
            if st.count[m] == 0 {
                if let Some(t) = self.twin[m] {
                    if st.count[t] == 0 {
                        continue;
                    }
                }
            }
            let candidates: Vec<usize> = (0..inst.job_count())
                .filter(|&j| st.open[j] && inst.jobs[j].is_eligible(m))
                .collect();
            let mut block = Vec::new();
            for (i, &j) in candidates.iter().enumerate() {
                let job = &inst.jobs[j];
                block.push(j);
                self.subsets(
                    st,
                    m,
                    &candidates[i + 1..],
                    &mut block,
                    (job.min_time, job.max_time, job.size, job.release),
                    &mut out,
                );
                block.pop();
            }
        }
        out.sort_by(|a, b| (a.bound, a.start, a.machine, &a.jobs).cmp(&(b.bound, b.start, b.machine, &b.jobs)));
        out
    }

    fn subsets(
        &self,
        st: &State,
        m: usize,
        rest: &[usize],
        block: &mut Vec<usize>,
        (lo, hi, size, release): (Time, Time, i64, Time),
        out: &mut Vec<Child>,
    ) {
        if self.shared.stop.load(Ordering::Relaxed) {
            return;
        }
        let inst = self.inst;
        let attr = inst.jobs[block[0]].attribute;
        let machine = &inst.machines[m];
        let setup = inst.setup_times.get(st.attr[m], attr);
        if let Some((start, _)) = earliest_start(machine, st.ready[m], setup, release, lo) {
            if st.last.is_none_or(|last| (start, m) > last) {
                if let Some(child) = self.evaluate(st, m, block, start, lo, attr) {
                    out.push(child);
                }
            }
        }
        for (i, &j) in rest.iter().enumerate() {
            let job = &inst.jobs[j];
            if job.attribute != attr {
                continue;
            }
            let next = (
                lo.max(job.min_time),
                hi.min(job.max_time),
                size + job.size,
                release.max(job.release),
            );
            if next.0 > next.1 || next.2 > machine.capacity {
                continue;
            }
            block.push(j);
            self.subsets(st, m, &rest[i + 1..], block, next, out);
            block.pop();
        }
    }

    fn evaluate(&self, st: &State, m: usize, block: &[usize], start: Time, proc: Time, attr: usize) -> Option<Child> {
        let inst = self.inst;
        let end = start + proc;
        let delta = Components {
            processing: proc,
            setup_cost: inst.setup_costs.get(st.attr[m], attr),
            tardy: block
                .iter()
                .filter(|&&j| inst.jobs[j].due.is_some_and(|d| end > d))
                .count() as i64,
        };
        let mut total = st.cost;
        add(&mut total, &delta);
        let mut bound = self.value(&total);
        if st.left > block.len() {
            let residual = self.residual(st, block, m, end, attr, start);
            let (rest, stuck) = bound_components(&residual);
            if stuck {
                return None;
            }
            bound += self.value(&rest);
        }
        if bound >= self.shared.incumbent() {
            return None;
        }
        Some(Child {
            bound,
            start,
            machine: m,
            jobs: block.to_vec(),
            proc,
            delta,
        })
    }

    fn search(&self, st: &mut State) {
        if self.out_of_budget() {
            return;
        }
        if st.left == 0 {
            let value = self.value(&st.cost);
            if value < self.shared.incumbent() {
                self.shared.offer(value, &Schedule::new(st.batches.clone()));
            }
            return;
        }
        for child in self.children(st) {
            if child.bound >= self.shared.incumbent() || self.shared.stop.load(Ordering::Relaxed) {
                continue;
            }
            self.descend(st, &child);
        }
    }

    fn descend(&self, st: &mut State, child: &Child) {
        let m = child.machine;
        let saved = (st.ready[m], st.attr[m], st.last, st.cost);
        for &j in &child.jobs {
            st.open[j] = false;
        }
        st.left -= child.jobs.len();
        st.ready[m] = child.start + child.proc;
        st.attr[m] = self.inst.jobs[child.jobs[0]].attribute;
        st.count[m] += 1;
        st.last = Some((child.start, m));
        add(&mut st.cost, &child.delta);
        st.batches.push(Batch {
            machine: m,
            start: child.start,
            proc: child.proc,
            jobs: child.jobs.clone(),
        });

        self.search(st);

        st.batches.pop();
        st.count[m] -= 1;
        (st.ready[m], st.attr[m], st.last, st.cost) = saved;
        st.left += child.jobs.len();
        for &j in &child.jobs {
            st.open[j] = true;
        }
    }
}

fn add(acc: &mut Components, d: &Components) {
    acc.processing += d.processing;
    acc.setup_cost += d.setup_cost;
    acc.tardy += d.tardy;
}

/// Machines that no job or parameter can tell apart.
fn twins(inst: &Instance) -> Vec<Option<usize>> {
    (0..inst.machine_count())
        .map(|m| {
            (0..m).find(|&t| {
                inst.machines[t] == inst.machines[m] && inst.jobs.iter().all(|j| j.is_eligible(t) == j.is_eligible(m))
            })
        })
        .collect()
}

/// Exact search with pruning by lower bounds. Stops early on the time or
/// node budget in `options`, returning the best schedule found.
pub fn branch_and_bound(
    instance: &Instance,
    weights: Weights,
    options: &SolveOptions,
) -> Result<SolveResult, OspError> {
    weights.check()?;
    let clock = Instant::now();
    let norm = Normalization::of(instance);
    let shared = Shared {
        bound: AtomicI64::new(i64::MAX),
        best: Mutex::new(None),
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
    };
    if let Some(inc) = &options.incumbent {
        let report = validate_schedule(instance, inc);
        if !report.feasible() {
            return Err(OspError::MalformedSchedule(format!(
                "incumbent is infeasible: {}",
                report.violations[0].detail
            )));
        }
        let value = norm.integer_objective(&weights, &objective_components(instance, inc)?);
        shared.offer(value, inc);
    }

    let root = bound_report(instance, weights);
    let root_infeasible = !root.tardy.unschedulable.is_empty();

    let ctx = Ctx {
        inst: instance,
        weights,
        norm,
        twin: twins(instance),
        clock,
        options,
        shared: &shared,
    };
    let k = instance.machine_count();
    let n = instance.job_count();
    let mut state = State {
        ready: vec![0; k],
        attr: instance.machines.iter().map(|m| m.initial_state).collect(),
        count: vec![0; k],
        open: vec![true; n],
        left: n,
        last: None,
        batches: Vec::new(),
        cost: Components::default(),
    };

    if !root_infeasible && root.obj_lb_int < shared.incumbent() {
        let workers = options.workers.max(1);
        if workers == 1 || n == 0 {
            ctx.search(&mut state);
        } else {
            let _ = ctx.out_of_budget();
            let children = ctx.children(&state);
            std::thread::scope(|scope| {
                for w in 0..workers {
                    let ctx = &ctx;
                    let children = &children;
                    let mut st = state.clone();
                    scope.spawn(move || {
                        for child in children.iter().skip(w).step_by(workers) {
                            if child.bound < ctx.shared.incumbent() && !ctx.shared.stop.load(Ordering::Relaxed) {
                                ctx.descend(&mut st, child);
                            }
                        }
                    });
                }
            });
        }
    }

    let stopped = shared.stop.load(Ordering::Relaxed);
    let nodes = shared.nodes.load(Ordering::Relaxed);
    let best = shared.best.into_inner().unwrap();
    let elapsed = clock.elapsed();
    Ok(match best {
        Some((_, schedule)) => {
            let obj = ObjectiveReport::from_components(instance, weights, objective_components(instance, &schedule)?);
            let (status, lower_bound) = if stopped {
                (SolveStatus::Feasible, root.obj_lb.min(obj.obj_real))
            } else {
                (SolveStatus::Optimal, obj.obj_real)
            };
            SolveResult {
                schedule: Some(schedule),
                obj: Some(obj),
                status,
                lower_bound,
                nodes,
                elapsed,
            }
        }
        None => SolveResult {
            schedule: None,
            obj: None,
            status: if stopped {
                SolveStatus::Timeout
            } else {
                SolveStatus::Infeasible
            },
            lower_bound: if stopped {
                root.obj_lb
            } else {
                Rational::from_integer(0)
            },
            nodes,
            elapsed,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::heuristic::construct;
    use crate::solve::brute_force;

    fn unlimited() -> SolveOptions {
        SolveOptions {
            time_limit: None,
            ..SolveOptions::default()
        }
    }

    #[test]
    fn six_job_matches_oracle() {
        let inst = fixtures::six_job_example();
        let w = Weights::default();
        let exact = brute_force(&inst, w).unwrap();
        let r = branch_and_bound(&inst, w, &unlimited()).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.obj.unwrap().obj_int, exact.obj.unwrap().obj_int);
        assert!(validate_schedule(&inst, r.schedule.as_ref().unwrap()).feasible());
    }

    #[test]
    fn warm_start_never_gets_worse() {
        let inst = fixtures::ten_job_example();
        let w = Weights::default();
        let start = construct(&inst).unwrap();
        let start_value =
            ObjectiveReport::from_components(&inst, w, objective_components(&inst, &start).unwrap()).obj_int;
        let opts = SolveOptions {
            incumbent: Some(start),
            node_limit: Some(50),
            ..unlimited()
        };
        let r = branch_and_bound(&inst, w, &opts).unwrap();
        assert!(r.obj.unwrap().obj_int <= start_value);
    }

    #[test]
    fn node_budget_is_reported_without_proof() {
        let inst = fixtures::ten_job_example();
        let opts = SolveOptions {
            node_limit: Some(3),
            ..unlimited()
        };
        let r = branch_and_bound(&inst, Weights::default(), &opts).unwrap();
        assert!(matches!(r.status, SolveStatus::Feasible | SolveStatus::Timeout));
        if let Some(obj) = r.obj {
            assert!(r.lower_bound <= obj.obj_real);
        }
    }

    #[test]
    fn infeasible_root_is_detected() {
        let mut inst = fixtures::six_job_example();
        inst.jobs[5].min_time = 9;
        inst.jobs[5].max_time = 10;
        let r = branch_and_bound(&inst, Weights::default(), &unlimited()).unwrap();
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    #[test]
    fn infeasible_incumbent_is_refused() {
        let inst = fixtures::six_job_example();
        let opts = SolveOptions {
            incumbent: Some(Schedule::default()),
            ..unlimited()
        };
        assert!(branch_and_bound(&inst, Weights::default(), &opts).is_err());
    }

    #[test]
    fn identical_machines_are_twins() {
        let mut inst = fixtures::six_job_example();
        inst.machines[1] = inst.machines[0].clone();
        for j in &mut inst.jobs {
            j.eligible = vec![0, 1];
        }
        assert_eq!(twins(&inst), vec![None, Some(0)]);
        assert_eq!(twins(&fixtures::six_job_example()), vec![None, None]);
    }
}
