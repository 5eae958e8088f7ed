//! ILP model in CPLEX LP text format.
//!
//! Every machine gets `n` batch slots. Attributes are shifted up by one so
//! that value 0 marks an empty slot, and every machine gets an extra empty
//! interval `[l, l]` that empty slots are parked in. Matrix lookups between
//! consecutive slots go through one-hot attribute binaries `A_m_b_r` and
//! pair variables `y_m_b_r_q` whose row and column sums equal the one-hot
//! vectors of the two slots; with 0/1 marginals the only feasible pair
//! matrix is the indicator of the chosen pair, so the lookups are exact.
//!
//! The objective is the integer objective: processing time, setup cost
//! (including each machine's change from its initial state) and tardy jobs,
//! each with its normalized integer weight.

use osp_core::objective::Normalization;
use osp_core::{Instance, OspError, Weights};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Weights(#[from] OspError),
}

const WRAP: usize = 100;

type Terms = Vec<(i64, String)>;

struct Row {
    name: String,
    terms: Terms,
    sense: &'static str,
    rhs: i64,
}

#[derive(Default)]
struct Model {
    objective: Terms,
    rows: Vec<Row>,
    bounds: Vec<String>,
    general: Vec<String>,
    binary: Vec<String>,
}

impl Model {
    fn row(&mut self, name: String, terms: Terms, sense: &'static str, rhs: i64) {
        let terms: Terms = terms.into_iter().filter(|(c, _)| *c != 0).collect();
        if !terms.is_empty() {
            self.rows.push(Row {
                name,
                terms,
                sense,
                rhs,
            });
        }
    }

    fn integer(&mut self, var: &str, hi: i64) {
        self.bounds.push(format!("0 <= {var} <= {hi}"));
        self.general.push(var.to_string());
    }

    fn render(&self, header: &[String]) -> String {
        let mut out = String::new();
        for line in header {
            out.push_str("\\ ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str("Minimize\n");
        write_terms(&mut out, " obj:", &self.objective, "");
        out.push_str("Subject To\n");
        for row in &self.rows {
            let tail = format!(" {} {}", row.sense, row.rhs);
            write_terms(&mut out, &format!(" {}:", row.name), &row.terms, &tail);
        }
        out.push_str("Bounds\n");
        for b in &self.bounds {
            out.push(' ');
            out.push_str(b);
            out.push('\n');
        }
        for (title, vars) in [("Generals", &self.general), ("Binaries", &self.binary)] {
            if vars.is_empty() {
                continue;
            }
            out.push_str(title);
            out.push('\n');
            write_names(&mut out, vars);
        }
        out.push_str("End\n");
        out
    }
}

fn write_terms(out: &mut String, label: &str, terms: &Terms, tail: &str) {
    let mut line = label.to_string();
    if terms.is_empty() {
        line.push_str(" 0 E_0");
    }
    for (i, (c, v)) in terms.iter().enumerate() {
        let sign = if *c < 0 { "-" } else { "+" };
        let mag = c.unsigned_abs();
        let piece = match (i, mag) {
            (0, 1) if *c > 0 => format!(" {v}"),
            (0, _) if *c > 0 => format!(" {mag} {v}"),
            (_, 1) => format!(" {sign} {v}"),
            _ => format!(" {sign} {mag} {v}"),
        };
        if line.len() + piece.len() > WRAP {
            out.push_str(&line);
            out.push('\n');
            line = String::from("  ");
        }
        line.push_str(&piece);
    }
    line.push_str(tail);
    out.push_str(&line);
    out.push('\n');
}

fn write_names(out: &mut String, names: &[String]) {
    let mut line = String::new();
    for v in names {
        if !line.is_empty() && line.len() + v.len() + 1 > WRAP {
            out.push_str(&line);
            out.push('\n');
            line.clear();
        }
        line.push(' ');
        line.push_str(v);
    }
    if !line.is_empty() {
        out.push_str(&line);
        out.push('\n');
    }
}

fn narrow(v: i128, what: &str) -> Result<i64, LpError> {
    i64::try_from(v).map_err(|_| LpError::Unsupported(format!("{what} coefficient {v} does not fit in 63 bits")))
}

fn times(a: i64, b: i64, what: &str) -> Result<i64, LpError> {
    narrow(a as i128 * b as i128, what)
}

/// The ILP for `instance` under `weights`. `instance` must pass instance
/// validation. Output is byte-identical for identical inputs.
pub fn export_ilp(instance: &Instance, weights: Weights) -> Result<String, LpError> {
    weights.check()?;
    let inst = instance.normalize_intervals();
    let norm = Normalization::of(&inst);
    let c = norm.lcm;
    let w_proc = narrow(weights.processing as i128 * c / norm.avg_time, "processing")?;
    let w_cost = narrow(weights.setup_cost as i128 * c / norm.cost_scale, "setup cost")?;
    let w_tardy = narrow(weights.tardiness as i128 * c, "tardiness")?;

    let n = inst.job_count();
    let k = inst.machine_count();
    let l = inst.horizon;
    let a = inst.attribute_count as i64;
    let max_t = inst.max_processing_time();
    let slots = inst.interval_count() + 1;
    // one-hot index r stands for attribute r - 1, r = 0 for an empty slot
    let st = |r: usize, q: usize| {
        if r == 0 || q == 0 {
            0
        } else {
            inst.setup_times.get(r - 1, q - 1)
        }
    };
    let sc = |r: usize, q: usize| {
        if r == 0 || q == 0 {
            0
        } else {
            inst.setup_costs.get(r - 1, q - 1)
        }
    };
    let attrs = inst.attribute_count + 1;

    let x = |m: usize, b: usize, j: usize| format!("X_{}_{}_{}", m + 1, b, j + 1);
    let s = |m: usize, b: usize| format!("S_{}_{}", m + 1, b);
    let p = |m: usize, b: usize| format!("P_{}_{}", m + 1, b);
    let av = |m: usize, b: usize| format!("A_{}_{}", m + 1, b);
    let hot = |m: usize, b: usize, r: usize| format!("A_{}_{}_{}", m + 1, b, r);
    let iv = |m: usize, b: usize, i: usize| format!("I_{}_{}_{}", m + 1, b, i);
    let tv = |m: usize, b: usize, j: usize| format!("T_{}_{}_{}", m + 1, b, j + 1);
    let ev = |m: usize, b: usize| format!("E_{}_{}", m + 1, b);
    let stv = |m: usize, b: usize| format!("st_{}_{}", m + 1, b);
    let scv = |m: usize, b: usize| format!("sc_{}_{}", m + 1, b);
    let yv = |m: usize, b: usize, r: usize, q: usize| format!("y_{}_{}_{}_{}", m + 1, b, r, q);
    // a job can only be late if its due date falls before the horizon
    let may_be_late = |j: usize| inst.jobs[j].due.is_some_and(|d| d < l);

    let mut lp = Model::default();

    // objective
    for m in 0..k {
        let init = inst.machines[m].initial_state + 1;
        for b in 1..=n {
            lp.objective.push((w_proc, p(m, b)));
            if b == 1 {
                for r in 1..attrs {
                    lp.objective
                        .push((times(w_cost, sc(init, r), "setup cost")?, hot(m, 1, r)));
                }
            }
            if b < n {
                lp.objective.push((w_cost, scv(m, b)));
            }
            for j in (0..n).filter(|&j| may_be_late(j)) {
                lp.objective.push((w_tardy, tv(m, b, j)));
            }
        }
    }
    lp.objective.retain(|(c, _)| *c != 0);

    // every job in exactly one slot, and that slot on an eligible machine
    for j in 0..n {
        let all = (0..k).flat_map(|m| (1..=n).map(move |b| (m, b)));
        lp.row(
            format!("assign_{}", j + 1),
            all.map(|(m, b)| (1, x(m, b, j))).collect(),
            "=",
            1,
        );
        let eligible = inst.jobs[j].eligible.iter().flat_map(|&m| (1..=n).map(move |b| (m, b)));
        lp.row(
            format!("elig_{}", j + 1),
            eligible.map(|(m, b)| (1, x(m, b, j))).collect(),
            "=",
            1,
        );
    }

    for m in 0..k {
        let mach = &inst.machines[m];
        let init = mach.initial_state + 1;
        for b in 1..=n {
            let tag = format!("{}_{}", m + 1, b);
            for j in 0..n {
                let job = &inst.jobs[j];
                let jt = format!("{tag}_{}", j + 1);
                let aj = job.attribute as i64 + 1;
                lp.row(
                    format!("release_{jt}"),
                    vec![(1, s(m, b)), (-job.release, x(m, b, j))],
                    ">=",
                    0,
                );
                lp.row(
                    format!("pmin_{jt}"),
                    vec![(1, p(m, b)), (-job.min_time, x(m, b, j))],
                    ">=",
                    0,
                );
                lp.row(
                    format!("pmax_{jt}"),
                    vec![(1, p(m, b)), (max_t - job.max_time, x(m, b, j))],
                    "<=",
                    max_t,
                );
                lp.row(format!("attrlo_{jt}"), vec![(1, av(m, b)), (-aj, x(m, b, j))], ">=", 0);
                lp.row(
                    format!("attrhi_{jt}"),
                    vec![(1, av(m, b)), (a - aj, x(m, b, j))],
                    "<=",
                    a,
                );
                lp.row(format!("nonempty_{jt}"), vec![(1, x(m, b, j)), (1, ev(m, b))], "<=", 1);
                if let Some(due) = job.due.filter(|_| may_be_late(j)) {
                    lp.row(format!("late_{jt}"), vec![(1, tv(m, b, j)), (-1, x(m, b, j))], "<=", 0);
                    // on time unless flagged: S + P <= (X - T)(lt - l) + l
                    lp.row(
                        format!("ontime_{jt}"),
                        vec![
                            (1, s(m, b)),
                            (1, p(m, b)),
                            (l - due, x(m, b, j)),
                            (due - l, tv(m, b, j)),
                        ],
                        "<=",
                        l,
                    );
                    // flagged only if late: S + P + (1 - T)(lt + 1) >= lt + 1
                    lp.row(
                        format!("tardy_{jt}"),
                        vec![(1, s(m, b)), (1, p(m, b)), (-(due + 1), tv(m, b, j))],
                        ">=",
                        0,
                    );
                }
            }
            lp.row(
                format!("cap_{tag}"),
                (0..n).map(|j| (inst.jobs[j].size, x(m, b, j))).collect(),
                "<=",
                mach.capacity,
            );
            if b < n {
                lp.row(
                    format!("order_{tag}"),
                    vec![(1, s(m, b + 1)), (-1, s(m, b)), (-1, p(m, b)), (-1, stv(m, b))],
                    ">=",
                    0,
                );
            }

            // attribute value and its one-hot encoding
            lp.row(
                format!("onehot_{tag}"),
                (0..attrs).map(|r| (1, hot(m, b, r))).collect(),
                "=",
                1,
            );
            let mut val = vec![(1, av(m, b))];
            val.extend((1..attrs).map(|r| (-(r as i64), hot(m, b, r))));
            lp.row(format!("attrval_{tag}"), val, "=", 0);

            // interval choice
            lp.row(
                format!("interval_{tag}"),
                (1..=slots).map(|i| (1, iv(m, b, i))).collect(),
                "=",
                1,
            );
            for i in 1..=slots {
                let w = mach
                    .availability
                    .get(i - 1)
                    .copied()
                    .unwrap_or(osp_core::Interval::new(l, l));
                let it = format!("{tag}_{i}");
                lp.row(
                    format!("instart_{it}"),
                    vec![(1, s(m, b)), (-w.start, iv(m, b, i))],
                    ">=",
                    0,
                );
                lp.row(
                    format!("inopen_{it}"),
                    vec![(1, s(m, b)), (l - w.end, iv(m, b, i))],
                    "<=",
                    l,
                );
                lp.row(
                    format!("inend_{it}"),
                    vec![(1, s(m, b)), (1, p(m, b)), (l - w.end, iv(m, b, i))],
                    "<=",
                    l,
                );
                // the setup before the slot lies in the same interval
                let mut setup = vec![(1, s(m, b)), (-w.start, iv(m, b, i))];
                if b == 1 {
                    setup.extend((1..attrs).map(|r| (-st(init, r), hot(m, 1, r))));
                } else {
                    setup.push((-1, stv(m, b - 1)));
                }
                if setup.iter().skip(2).any(|(c, _)| *c != 0) {
                    lp.row(format!("insetup_{it}"), setup, ">=", 0);
                }
            }

            // empty slots: no jobs, parked at l with attribute 0, all at the end
            let mut any: Terms = (0..n).map(|j| (1, x(m, b, j))).collect();
            any.push((1, ev(m, b)));
            lp.row(format!("empty_{tag}"), any, ">=", 1);
            lp.row(format!("emptystart_{tag}"), vec![(1, s(m, b)), (-l, ev(m, b))], ">=", 0);
            lp.row(
                format!("emptyproc_{tag}"),
                vec![(1, p(m, b)), (max_t, ev(m, b))],
                "<=",
                max_t,
            );
            lp.row(
                format!("emptyint_{tag}"),
                vec![(1, ev(m, b)), (-1, iv(m, b, slots))],
                "<=",
                0,
            );
            lp.row(format!("emptyattr_{tag}"), vec![(1, av(m, b)), (a, ev(m, b))], "<=", a);
            if b < n {
                lp.row(
                    format!("emptylast_{tag}"),
                    vec![(1, ev(m, b)), (-1, ev(m, b + 1))],
                    "<=",
                    0,
                );

                // matrix lookups between slot b and slot b + 1
                for r in 0..attrs {
                    let mut row: Terms = (0..attrs).map(|q| (1, yv(m, b, r, q))).collect();
                    row.push((-1, hot(m, b, r)));
                    lp.row(format!("pairfrom_{tag}_{r}"), row, "=", 0);
                }
                for q in 0..attrs {
                    let mut row: Terms = (0..attrs).map(|r| (1, yv(m, b, r, q))).collect();
                    row.push((-1, hot(m, b + 1, q)));
                    lp.row(format!("pairto_{tag}_{q}"), row, "=", 0);
                }
                let pairs = || (0..attrs).flat_map(|r| (0..attrs).map(move |q| (r, q)));
                let mut row = vec![(1, stv(m, b))];
                row.extend(pairs().map(|(r, q)| (-st(r, q), yv(m, b, r, q))));
                lp.row(format!("stdef_{tag}"), row, "=", 0);
                let mut row = vec![(1, scv(m, b))];
                row.extend(pairs().map(|(r, q)| (-sc(r, q), yv(m, b, r, q))));
                lp.row(format!("scdef_{tag}"), row, "=", 0);
            }
        }
    }

    // domains
    for m in 0..k {
        for b in 1..=n {
            lp.integer(&s(m, b), l);
            lp.integer(&p(m, b), max_t);
            lp.integer(&av(m, b), a);
        }
    }
    if n == 0 {
        lp.bounds.push("E_0 = 0".into());
    }
    for m in 0..k {
        for b in 1..=n {
            lp.binary.extend((0..n).map(|j| x(m, b, j)));
            lp.binary.extend((0..attrs).map(|r| hot(m, b, r)));
            lp.binary.extend((1..=slots).map(|i| iv(m, b, i)));
            lp.binary
                .extend((0..n).filter(|&j| may_be_late(j)).map(|j| tv(m, b, j)));
            lp.binary.push(ev(m, b));
        }
    }

    let header = [
        format!(
            "oven scheduling ILP: {n} jobs, {k} machines, {} attributes, horizon {l}",
            inst.attribute_count
        ),
        format!("objective weights {w_proc} (processing) {w_cost} (setup cost) {w_tardy} (tardy jobs)"),
    ];
    Ok(lp.render(&header))
}
