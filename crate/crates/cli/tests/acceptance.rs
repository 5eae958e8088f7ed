//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use osp_cli::format::{instance_hash, instance_to_string, parse_instance, parse_schedule, schedule_to_string};
use osp_core::bounds::{bound_report, gac_plus, UnitJobInterval};
use osp_core::fixtures::{six_job_example, ten_job_example};
use osp_core::gen::{benchmark_family, benchmark_grid, generate, GeneratorParams, SetupType};
use osp_core::heuristic::{construct, HeuristicError};
use osp_core::solve::{branch_and_bound, brute_force, SolveOptions, SolveStatus};
use osp_core::validate::{validate_schedule, ViolationCode};
use osp_core::{Instance, Rational, Schedule, Weights};
use std::time::{Duration, Instant};

/// Regression constant: the six-job optimum found by exhaustive search.
const SIX_JOB_OPT: i128 = 260;

type Verdict = (bool, String);

fn unlimited() -> SolveOptions {
    SolveOptions {
        time_limit: None,
        ..SolveOptions::default()
    }
}

fn secs(d: Duration) -> String {
    format!("{:.3}s", d.as_secs_f64())
}

fn criterion_1() -> Verdict {
    let inst = ten_job_example();
    let clock = Instant::now();
    let r = bound_report(&inst, Weights::default());
    let took = clock.elapsed();
    let lo = Rational::new(70658, 100000);
    let hi = Rational::new(70659, 100000);
    // table columns: (b_E, b_C) include the large jobs, (p_E, p_C) do not
    let rows: Vec<(i64, i64, i64, i64, i64)> = r
        .per_attribute
        .iter()
        .map(|a| (a.large_count + a.b_e, a.large_count + a.b_c, a.large_proc, a.p_e, a.p_c))
        .collect();
    let ok = (r.batch_count_lb, r.proc_time_lb, r.setup_cost_lb, r.tardy_lb) == (8, 158, 68, 7)
        && r.obj_lb >= lo
        && r.obj_lb <= hi
        && rows == vec![(2, 1, 0, 38, 19), (6, 6, 59, 60, 61)]
        && r.simple_cap_total == 6
        && took < Duration::from_secs(1);
    (
        ok,
        format!(
            "b={} p={} sc={} t={} obj_lb={} per-attribute {:?} simple={} in {}",
            r.batch_count_lb,
            r.proc_time_lb,
            r.setup_cost_lb,
            r.tardy_lb,
            osp_core::objective::format_decimal(&r.obj_lb, 6),
            rows,
            r.simple_cap_total,
            secs(took)
        ),
    )
}

fn criterion_2() -> Verdict {
    let inst = ten_job_example();
    let w = Weights::default();
    let expected = Rational::new(18952, 23625);
    let clock = Instant::now();
    let brute = brute_force(&inst, w).unwrap();
    let t_brute = clock.elapsed();
    let clock = Instant::now();
    let bnb = branch_and_bound(&inst, w, &unlimited()).unwrap();
    let t_bnb = clock.elapsed();
    let check = |r: &osp_core::solve::SolveResult| {
        let o = r.obj.as_ref().unwrap();
        r.status == SolveStatus::Optimal
            && (o.components.processing, o.components.setup_cost, o.components.tardy) == (158, 72, 8)
            && o.obj_real == expected
            && o.obj_real_decimal() == "0.802201"
            && validate_schedule(&inst, r.schedule.as_ref().unwrap()).feasible()
    };
    let ok = check(&brute) && check(&bnb) && t_brute < Duration::from_secs(600) && t_bnb < Duration::from_secs(60);
    let o = bnb.obj.as_ref().unwrap();
    (
        ok,
        format!(
            "(p, sc, t)=({}, {}, {}) obj_real={} brute {} bnb {} ({} nodes)",
            o.components.processing,
            o.components.setup_cost,
            o.components.tardy,
            o.obj_real,
            secs(t_brute),
            secs(t_bnb),
            bnb.nodes
        ),
    )
}

fn criterion_3() -> Verdict {
    let inst = six_job_example();
    let clock = Instant::now();
    let r = brute_force(&inst, Weights::default()).unwrap();
    let took = clock.elapsed();
    let s = r.schedule.as_ref().unwrap();
    let obj = r.obj.as_ref().unwrap().obj_int;
    let ok = r.status == SolveStatus::Optimal
        && obj == SIX_JOB_OPT
        && s.len() == 3
        && validate_schedule(&inst, s).feasible()
        && took < Duration::from_secs(60);
    (ok, format!("obj_int={obj} batches={} in {}", s.len(), secs(took)))
}

/// The 100 small instances shared by criteria 4 and 6.
fn small_instances() -> Vec<Instance> {
    (0..100usize)
        .map(|i| {
            let n = 3 + i % 4;
            let k = [2, 5][(i / 4) % 2];
            let a = [2, 5][(i / 8) % 2];
            let grid = benchmark_grid(n, k, a);
            let mut p = grid[(i * 389 + 17) % grid.len()].clone();
            p.seed = i as u64;
            generate(&p).unwrap()
        })
        .collect()
}

fn criterion_4_and_6() -> (Verdict, Verdict) {
    let w = Weights::default();
    let clock = Instant::now();
    let mut mismatches = Vec::new();
    let mut unsound = Vec::new();
    let mut feasible = 0;
    for (i, inst) in small_instances().iter().enumerate() {
        let exact = brute_force(inst, w).unwrap();
        let bnb = branch_and_bound(inst, w, &unlimited()).unwrap();
        let a = exact.obj.as_ref().map(|o| o.obj_int);
        let b = bnb.obj.as_ref().map(|o| o.obj_int);
        if a != b || exact.status != bnb.status {
            mismatches.push(format!("#{i}: oracle {a:?} bnb {b:?}"));
        }
        if let (Some(o), Some(s)) = (&exact.obj, &exact.schedule) {
            feasible += 1;
            let lb = bound_report(inst, w);
            let c = lb.components();
            if lb.batch_count_lb > s.len() as i64
                || c.processing > o.components.processing
                || c.setup_cost > o.components.setup_cost
                || c.tardy > o.components.tardy
                || lb.obj_lb > o.obj_real
            {
                unsound.push(i);
            }
        }
    }
    let took = clock.elapsed();
    (
        (
            mismatches.is_empty() && took < Duration::from_secs(900),
            format!(
                "100 instances ({feasible} feasible), {} mismatches {:?} in {}",
                mismatches.len(),
                mismatches,
                secs(took)
            ),
        ),
        (
            unsound.is_empty(),
            format!(
                "{} bound violations over {feasible} optima {:?}",
                unsound.len(),
                unsound
            ),
        ),
    )
}

/// Fewest batches and least total processing time over all partitions of
/// unit jobs into compatible batches of at most `cap` jobs.
fn partition_minima(jobs: &[(i64, i64)], cap: usize) -> (i64, i64) {
    fn go(jobs: &[(i64, i64)], cap: usize, blocks: &mut Vec<(i64, i64, usize)>, best: &mut (i64, i64)) {
        let Some((&(lo, hi), rest)) = jobs.split_first() else {
            let count = blocks.len() as i64;
            let proc: i64 = blocks.iter().map(|b| b.0).sum();
            best.0 = best.0.min(count);
            best.1 = best.1.min(proc);
            return;
        };
        for i in 0..blocks.len() {
            let (blo, bhi, n) = blocks[i];
            let (nlo, nhi) = (blo.max(lo), bhi.min(hi));
            if n < cap && nlo <= nhi {
                blocks[i] = (nlo, nhi, n + 1);
                go(rest, cap, blocks, best);
                blocks[i] = (blo, bhi, n);
            }
        }
        blocks.push((lo, hi, 1));
        go(rest, cap, blocks, best);
        blocks.pop();
    }
    let mut best = (i64::MAX, i64::MAX);
    go(jobs, cap, &mut Vec::new(), &mut best);
    best
}

fn criterion_5() -> Verdict {
    let windows: Vec<(i64, i64)> = (1..=4).flat_map(|lo| (lo..=4).map(move |hi| (lo, hi))).collect();
    let clock = Instant::now();
    let mut checked = 0u64;
    let mut failures = Vec::new();
    // every multiset of at most 7 windows, as multiplicity vectors
    let mut counts = vec![0i64; windows.len()];
    fn each(pos: usize, left: i64, counts: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
        if pos == counts.len() {
            f(counts);
            return;
        }
        for c in 0..=left {
            counts[pos] = c;
            each(pos + 1, left - c, counts, f);
        }
        counts[pos] = 0;
    }
    each(0, 7, &mut counts, &mut |counts| {
        let entries: Vec<UnitJobInterval> = windows
            .iter()
            .zip(counts)
            .filter(|(_, &c)| c > 0)
            .map(|(&(lo, hi), &c)| UnitJobInterval::new(lo, hi, c))
            .collect();
        let jobs: Vec<(i64, i64)> = entries
            .iter()
            .flat_map(|e| std::iter::repeat_n((e.lo, e.hi), e.multiplicity as usize))
            .collect();
        for cap in 1..=3 {
            let g = gac_plus(&entries, cap as i64).unwrap();
            let exact = partition_minima(&jobs, cap);
            checked += 1;
            if (g.batch_count, g.total_proc) != exact && failures.len() < 5 {
                failures.push(format!(
                    "{jobs:?} cap {cap}: gac {:?} exact {exact:?}",
                    (g.batch_count, g.total_proc)
                ));
            }
        }
    });
    let took = clock.elapsed();
    (
        failures.is_empty() && took < Duration::from_secs(300),
        format!(
            "{checked} multiset/capacity pairs, failures {failures:?} in {}",
            secs(took)
        ),
    )
}

fn criterion_7_and_8() -> (Verdict, Verdict) {
    let family = benchmark_family(2024);
    let mut worst_heur = Duration::ZERO;
    let mut worst_bound = Duration::ZERO;
    let mut failed = Vec::new();
    let mut large = 0;
    for (i, p) in family.iter().enumerate() {
        let inst = generate(p).unwrap();
        let clock = Instant::now();
        let result = construct(&inst);
        let took = clock.elapsed();
        worst_heur = worst_heur.max(took);
        match result {
            Ok(s) if validate_schedule(&inst, &s).feasible() && took < Duration::from_secs(6) => {}
            Ok(_) => failed.push(format!("#{i} infeasible or slow")),
            Err(HeuristicError::Unschedulable { job, .. }) => failed.push(format!("#{i} job {} unplaced", job + 1)),
        }
        if p.n == 100 {
            large += 1;
            let clock = Instant::now();
            let _ = bound_report(&inst, Weights::default());
            worst_bound = worst_bound.max(clock.elapsed());
        }
    }
    (
        (
            failed.is_empty(),
            format!(
                "{} instances, failures {failed:?}, slowest {}",
                family.len(),
                secs(worst_heur)
            ),
        ),
        (
            large == 20 && worst_bound < Duration::from_secs(2),
            format!("{large} instances with n=100, slowest {}", secs(worst_bound)),
        ),
    )
}

/// A generated instance with one availability interval per machine,
/// positive setup times and a heuristic schedule in which some machine
/// runs at least two batches and some batch holds at least two jobs.
fn mutation_base(trial: u64) -> Option<(Instance, Schedule)> {
    for attempt in 0..1000 {
        let p = GeneratorParams {
            n: 12,
            machines: 2,
            attributes: 2,
            max_t: 10,
            max_job_size: 5,
            max_capacity: 12,
            max_intervals: 1,
            tau: 0.75,
            setup_time_type: SetupType::Arbitrary,
            seed: trial * 1000 + attempt,
            ..GeneratorParams::default()
        };
        let inst = generate(&p).ok()?;
        let Ok(s) = construct(&inst) else { continue };
        let seqs = s.machine_sequences(inst.machine_count());
        if seqs.iter().any(|q| q.len() >= 2) && s.batches.iter().any(|b| b.jobs.len() >= 2) {
            return Some((inst, s));
        }
    }
    None
}

fn mutate(code: ViolationCode, inst: &Instance, s: &Schedule) -> (Instance, Schedule) {
    use ViolationCode::*;
    let mut inst = inst.clone();
    let mut s = s.clone();
    let seqs = s.machine_sequences(inst.machine_count());
    let batch = s.batches.iter().find(|b| b.jobs.len() >= 2).cloned().unwrap();
    let first = batch.jobs[0];
    let m = batch.machine;
    match code {
        Release => inst.jobs[first].release = batch.start + 1,
        ProcWindow => {
            let job = &mut inst.jobs[first];
            if batch.proc > 1 {
                job.max_time = batch.proc - 1;
                job.min_time = job.min_time.min(job.max_time);
            } else {
                job.min_time = batch.proc + 1;
                job.max_time = job.max_time.max(job.min_time);
            }
        }
        Capacity => inst.machines[m].capacity = batch.total_size(&inst) - 1,
        Attribute => {
            let other = batch.jobs[1];
            let a = inst.attribute_count;
            inst.jobs[other].attribute = (inst.jobs[other].attribute + 1) % a;
        }
        Eligibility => {
            inst.jobs[first].eligible.retain(|&e| e != m);
        }
        Overlap => {
            let q = seqs.iter().find(|q| q.len() >= 2).unwrap();
            let (b1, b2) = (q[0], q[1]);
            let setup = inst.setup_times.get(
                inst.jobs[s.batches[b1].jobs[0]].attribute,
                inst.jobs[s.batches[b2].jobs[0]].attribute,
            );
            let start = s.batches[b1].end() + setup - 1;
            s.batches[b2].start = start;
            for &j in &s.batches[b2].jobs.clone() {
                inst.jobs[j].release = inst.jobs[j].release.min(start);
            }
        }
        IntervalFit => {
            let mach = &mut inst.machines[m];
            let w = mach
                .availability
                .iter_mut()
                .find(|w| w.contains_span(batch.start, batch.end()))
                .unwrap();
            w.end = batch.end() - 1;
        }
        SetupFit => {
            let first_bi = seqs[m][0];
            let b = &s.batches[first_bi];
            let init = inst.machines[m].initial_state;
            let setup = inst.setup_times.get(init, inst.jobs[b.jobs[0]].attribute);
            let start = b.start - setup + 1;
            let end = b.end();
            let w = inst.machines[m]
                .availability
                .iter_mut()
                .find(|w| w.contains_span(b.start, end))
                .unwrap();
            w.start = start;
        }
        Structure => unreachable!(),
    }
    (inst, s)
}

fn criterion_9() -> Verdict {
    let codes: Vec<ViolationCode> = ViolationCode::ALL
        .into_iter()
        .filter(|c| *c != ViolationCode::Structure)
        .collect();
    let mut failures = Vec::new();
    let mut trials = 0;
    for trial in 0..100 {
        let Some((inst, s)) = mutation_base(trial) else {
            failures.push(format!("trial {trial}: no base instance"));
            continue;
        };
        if !validate_schedule(&inst, &s).feasible() {
            failures.push(format!("trial {trial}: base schedule infeasible"));
            continue;
        }
        trials += 1;
        for &code in &codes {
            let (mi, ms) = mutate(code, &inst, &s);
            let got = validate_schedule(&mi, &ms).codes();
            if got != vec![code] && failures.len() < 10 {
                failures.push(format!("trial {trial}: {code} mutation gave {got:?}"));
            }
        }
    }
    (
        failures.is_empty() && trials == 100,
        format!("{} codes x {trials} trials, failures {failures:?}", codes.len()),
    )
}

fn criterion_10() -> Verdict {
    let mut failures = Vec::new();
    for seed in 0..1000u64 {
        let p = GeneratorParams {
            n: 5 + (seed % 26) as usize,
            machines: 1 + (seed % 5) as usize,
            attributes: 1 + (seed / 5 % 5) as usize,
            setup_time_type: SetupType::ALL[(seed % 4) as usize],
            setup_cost_type: SetupType::ALL[(seed / 4 % 4) as usize],
            max_t: [10, 100][(seed % 2) as usize],
            seed,
            ..GeneratorParams::default()
        };
        let inst = generate(&p).unwrap();
        let text = instance_to_string(&inst);
        let back = parse_instance(&text).unwrap();
        let schedule = match construct(&inst) {
            Ok(s) => s,
            Err(HeuristicError::Unschedulable { partial, .. }) => partial,
        };
        let reference = instance_hash(&inst);
        let stext = schedule_to_string(&schedule, &reference);
        let (sback, rback) = parse_schedule(&stext).unwrap();
        let ok = back == inst
            && instance_to_string(&back) == text
            && sback == schedule
            && rback == reference
            && schedule_to_string(&sback, &rback) == stext
            && instance_hash(&back) == reference;
        if !ok {
            failures.push(seed);
        }
    }
    (failures.is_empty(), format!("1000 seeds, failures {failures:?}"))
}

fn main() {
    let mut results: Vec<(u32, Verdict)> = Vec::new();
    let mut report = |n: u32, v: Verdict| {
        println!("criterion {n}: {} {}", if v.0 { "PASS" } else { "FAIL" }, v.1);
        results.push((n, v));
    };
    report(1, criterion_1());
    report(2, criterion_2());
    report(3, criterion_3());
    let (c4, c6) = criterion_4_and_6();
    report(4, c4);
    report(5, criterion_5());
    report(6, c6);
    let (c7, c8) = criterion_7_and_8();
    report(7, c7);
    report(8, c8);
    report(9, criterion_9());
    report(10, criterion_10());
    let failed: Vec<u32> = results.iter().filter(|(_, v)| !v.0).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("acceptance: all 10 criteria PASS");
    } else {
        println!("acceptance: FAILED criteria {failed:?}");
        std::process::exit(1);
    }
}
