//! The `osp` subcommands.
//!
//! [`run`] parses arguments, executes one command and returns the process
//! exit code. Output goes to the given writers so tests can drive it
//! in-process.

use crate::format::{
    instance_hash, instance_to_string, parse_instance, parse_schedule, schedule_to_string, FormatError,
};
use crate::lp::{export_ilp, LpError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use osp_core::bounds::{bound_report, BoundReport};
use osp_core::gen::{generate, GeneratorParams, SetupType};
use osp_core::heuristic::construct;
use osp_core::objective::format_decimal;
use osp_core::solve::{branch_and_bound, brute_force, SolveOptions, SolveResult, SolveStatus};
use osp_core::validate::{validate_instance, validate_schedule, ViolationReport};
use osp_core::{objective, Instance, OspError, Rational, Weights};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_BAD_PARAMS: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_CANT_CREATE: i32 = 73;

/// Environment variable capping solver threads.
pub const WORKERS_VAR: &str = "OSP_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "osp",
    version,
    about = "Oven scheduling: instances, schedules, bounds and solvers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance.
    Generate(GenerateArgs),
    /// Check an instance, or a schedule against its instance.
    Validate {
        instance: PathBuf,
        schedule: Option<PathBuf>,
        /// Print a JSON report.
        #[arg(long)]
        json: bool,
    },
    /// Lower bounds on batches, processing time, setup cost and tardy jobs.
    Bounds {
        instance: PathBuf,
        #[arg(long, default_value = "4,1,100", value_parser = parse_weights)]
        weights: Weights,
        #[arg(long)]
        json: bool,
    },
    /// Build a schedule.
    Solve(SolveArgs),
    /// Write the ILP model in LP format.
    ExportIlp {
        instance: PathBuf,
        #[arg(long, default_value = "4,1,100", value_parser = parse_weights)]
        weights: Weights,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// JSON file with generator parameters; missing fields take defaults.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub machines: Option<usize>,
    #[arg(long)]
    pub attributes: Option<usize>,
    #[arg(long)]
    pub max_t: Option<i64>,
    #[arg(long)]
    pub max_time: Option<bool>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub max_job_size: Option<i64>,
    #[arg(long)]
    pub max_capacity: Option<i64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub max_intervals: Option<usize>,
    #[arg(long, value_enum)]
    pub setup_time_type: Option<SetupKind>,
    #[arg(long, value_enum)]
    pub setup_cost_type: Option<SetupKind>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SetupKind {
    Constant,
    Arbitrary,
    Realistic,
    Symmetric,
}

impl From<SetupKind> for SetupType {
    fn from(k: SetupKind) -> Self {
        match k {
            SetupKind::Constant => SetupType::Constant,
            SetupKind::Arbitrary => SetupType::Arbitrary,
            SetupKind::Realistic => SetupType::Realistic,
            SetupKind::Symmetric => SetupType::Symmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Heuristic,
    Bnb,
    Oracle,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "bnb")]
    pub method: Method,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 3600.0)]
    pub time_limit: f64,
    #[arg(long)]
    pub node_limit: Option<u64>,
    /// Seed the search with the heuristic schedule.
    #[arg(long)]
    pub warm_start: bool,
    #[arg(long, default_value = "4,1,100", value_parser = parse_weights)]
    pub weights: Weights,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

pub fn parse_weights(text: &str) -> Result<Weights, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [p, sc, t] = parts.as_slice() else {
        return Err("expected three comma-separated integers, e.g. 4,1,100".into());
    };
    let num = |s: &str| s.parse::<i64>().map_err(|e| format!("bad weight {s:?}: {e}"));
    Weights::new(num(p)?, num(sc)?, num(t)?).map_err(|e| e.to_string())
}

/// Failure carrying its exit code.
struct Fail(i32, String);

impl From<FormatError> for Fail {
    fn from(e: FormatError) -> Self {
        Fail(EXIT_DATA, e.to_string())
    }
}

type Outcome = Result<i32, Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail(EXIT_NO_INPUT, format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Fail(EXIT_CANT_CREATE, format!("{}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Fail(EXIT_CANT_CREATE, format!("standard output: {e}"))),
    }
}

/// Loads an instance and refuses it unless it passes validation.
fn load_valid(path: &Path) -> Result<Instance, Fail> {
    let inst = parse_instance(&read(path)?)?;
    let report = validate_instance(&inst);
    if let Some(v) = report.violations.first() {
        return Err(Fail(EXIT_DATA, format!("invalid instance: {}", v.detail)));
    }
    Ok(inst)
}

fn workers() -> Result<usize, Fail> {
    match std::env::var(WORKERS_VAR) {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w >= 1 => Ok(w),
            _ => Err(Fail(
                EXIT_USAGE,
                format!("{WORKERS_VAR} must be a positive integer, got {v:?}"),
            )),
        },
    }
}

fn decimal(r: &Rational) -> String {
    format_decimal(r, 6)
}

/// Runs `osp` with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(&a, out),
        Command::Validate {
            instance,
            schedule,
            json,
        } => cmd_validate(&instance, schedule.as_deref(), json, out),
        Command::Bounds {
            instance,
            weights,
            json,
        } => cmd_bounds(&instance, weights, json, out),
        Command::Solve(a) => cmd_solve(&a, out, err),
        Command::ExportIlp {
            instance,
            weights,
            output,
        } => cmd_export(&instance, weights, output.as_deref(), out),
    };
    match result {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "osp: {msg}");
            code
        }
    }
}

fn cmd_generate(a: &GenerateArgs, out: &mut dyn Write) -> Outcome {
    let mut p = match &a.params {
        Some(path) => serde_json::from_str::<GeneratorParams>(&read(path)?)
            .map_err(|e| Fail(EXIT_BAD_PARAMS, format!("{}: {e}", path.display())))?,
        None => GeneratorParams::default(),
    };
    p.seed = a.seed;
    macro_rules! set {
        ($($field:ident),*) => {$(
            if let Some(v) = a.$field {
                p.$field = v.into();
            }
        )*};
    }
    set!(
        n,
        machines,
        attributes,
        max_t,
        max_time,
        rho,
        phi,
        sigma,
        max_job_size,
        max_capacity,
        tau,
        max_intervals
    );
    set!(setup_time_type, setup_cost_type);
    let inst = generate(&p).map_err(|e| Fail(EXIT_BAD_PARAMS, e.to_string()))?;
    emit(out, a.output.as_deref(), &instance_to_string(&inst))?;
    Ok(EXIT_OK)
}

fn report_json(report: &ViolationReport) -> serde_json::Value {
    json!({
        "feasible": report.feasible(),
        "violations": report.violations.iter().map(|v| json!({
            "code": v.code.as_str(),
            "batch": v.batch.map(|b| b + 1),
            "job": v.job.map(|j| j + 1),
            "detail": v.detail,
        })).collect::<Vec<_>>(),
        "warnings": report.warnings,
    })
}

fn cmd_validate(instance: &Path, schedule: Option<&Path>, as_json: bool, out: &mut dyn Write) -> Outcome {
    let inst = parse_instance(&read(instance)?)?;
    let mut report = validate_instance(&inst);
    let mut objective_line = None;
    if let Some(path) = schedule {
        let (sched, reference) = parse_schedule(&read(path)?)?;
        if report.feasible() {
            report = validate_schedule(&inst, &sched);
            if reference.starts_with("sha256:") && reference != instance_hash(&inst) {
                report
                    .warnings
                    .push("instance_ref does not match the instance's content hash".into());
            }
            if report.feasible() {
                if let Ok(o) = objective(&inst, &sched, Weights::default()) {
                    objective_line = Some(o);
                }
            }
        }
    }
    let text = if as_json {
        let mut v = report_json(&report);
        if let Some(o) = &objective_line {
            v["objective"] = objective_json(o);
        }
        crate::format::to_canonical(&v)
    } else {
        let mut s = String::new();
        s.push_str(if report.feasible() {
            "FEASIBLE\n"
        } else {
            "INFEASIBLE\n"
        });
        for v in &report.violations {
            let mut at = String::new();
            if let Some(b) = v.batch {
                at.push_str(&format!(" batch={}", b + 1));
            }
            if let Some(j) = v.job {
                at.push_str(&format!(" job={}", j + 1));
            }
            s.push_str(&format!("{}{at}: {}\n", v.code.as_str(), v.detail));
        }
        for w in &report.warnings {
            s.push_str(&format!("warning: {w}\n"));
        }
        if let Some(o) = &objective_line {
            s.push_str(&objective_text(o));
        }
        s
    };
    emit(out, None, &text)?;
    Ok(if report.feasible() { EXIT_OK } else { EXIT_INFEASIBLE })
}

fn objective_json(o: &osp_core::ObjectiveReport) -> serde_json::Value {
    json!({
        "p": o.components.processing,
        "sc": o.components.setup_cost,
        "t": o.components.tardy,
        "obj_int": o.obj_int.to_string(),
        "obj_real": o.obj_real_decimal(),
    })
}

fn objective_text(o: &osp_core::ObjectiveReport) -> String {
    format!(
        "p={} sc={} t={} obj_int={} obj_real={}\n",
        o.components.processing,
        o.components.setup_cost,
        o.components.tardy,
        o.obj_int,
        o.obj_real_decimal()
    )
}

/// Text rendering of a bound report.
pub fn bounds_text(r: &BoundReport) -> String {
    let mut s = format!(
        "b={} p={} sc={} t={} obj_lb={} obj_lb_int={}\n",
        r.batch_count_lb,
        r.proc_time_lb,
        r.setup_cost_lb,
        r.tardy_lb,
        decimal(&r.obj_lb),
        r.obj_lb_int
    );
    for a in &r.per_attribute {
        s.push_str(&format!(
            "attribute {}: jobs={} large={} large_p={} simple={} b_E={} p_E={} b_C={} p_C={} b={} p={}\n",
            a.attribute + 1,
            a.large_jobs.len() + a.small_jobs.len(),
            a.large_count,
            a.large_proc,
            a.simple_cap_count,
            a.b_e,
            a.p_e,
            a.b_c,
            a.p_c,
            a.combined_b,
            a.combined_p
        ));
    }
    if !r.tardy.unschedulable.is_empty() {
        let jobs: Vec<String> = r.tardy.unschedulable.iter().map(|j| (j + 1).to_string()).collect();
        s.push_str(&format!("unschedulable jobs: {}\n", jobs.join(" ")));
    }
    s
}

pub fn bounds_json(r: &BoundReport) -> serde_json::Value {
    let one_based = |v: &[usize]| v.iter().map(|j| j + 1).collect::<Vec<_>>();
    json!({
        "batch_count_lb": r.batch_count_lb,
        "proc_time_lb": r.proc_time_lb,
        "setup_cost_lb": r.setup_cost_lb,
        "tardy_lb": r.tardy_lb,
        "simple_cap_total": r.simple_cap_total,
        "obj_lb": decimal(&r.obj_lb),
        "obj_lb_int": r.obj_lb_int.to_string(),
        "tardy_jobs": one_based(&r.tardy.tardy_jobs),
        "unschedulable": one_based(&r.tardy.unschedulable),
        "per_attribute": r.per_attribute.iter().map(|a| json!({
            "attribute": a.attribute + 1,
            "large_jobs": one_based(&a.large_jobs),
            "small_jobs": one_based(&a.small_jobs),
            "large_count": a.large_count,
            "large_proc": a.large_proc,
            "simple_cap_count": a.simple_cap_count,
            "b_e": a.b_e,
            "p_e": a.p_e,
            "b_c": a.b_c,
            "p_c": a.p_c,
            "b": a.combined_b,
            "p": a.combined_p,
        })).collect::<Vec<_>>(),
    })
}

fn cmd_bounds(instance: &Path, weights: Weights, as_json: bool, out: &mut dyn Write) -> Outcome {
    let inst = load_valid(instance)?;
    let report = bound_report(&inst, weights);
    let text = if as_json {
        crate::format::to_canonical(&bounds_json(&report))
    } else {
        bounds_text(&report)
    };
    emit(out, None, &text)?;
    Ok(EXIT_OK)
}

fn heuristic_result(inst: &Instance, weights: Weights) -> Result<SolveResult, Fail> {
    let clock = std::time::Instant::now();
    match construct(inst) {
        Ok(s) => {
            let o = objective(inst, &s, weights).map_err(|e| Fail(EXIT_DATA, e.to_string()))?;
            Ok(SolveResult {
                lower_bound: bound_report(inst, weights).obj_lb.min(o.obj_real),
                schedule: Some(s),
                obj: Some(o),
                status: SolveStatus::Feasible,
                nodes: 0,
                elapsed: clock.elapsed(),
            })
        }
        Err(_) => Ok(SolveResult {
            schedule: None,
            obj: None,
            status: SolveStatus::Infeasible,
            lower_bound: Rational::from_integer(0),
            nodes: 0,
            elapsed: clock.elapsed(),
        }),
    }
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    if !(a.time_limit.is_finite() && a.time_limit >= 0.0) {
        return Err(Fail(
            EXIT_USAGE,
            "--time-limit must be a non-negative number of seconds".into(),
        ));
    }
    let inst = load_valid(&a.instance)?;
    let solver_error = |e: OspError| match e {
        OspError::InvalidWeights(_) => Fail(EXIT_USAGE, e.to_string()),
        _ => Fail(EXIT_DATA, e.to_string()),
    };
    let result = match a.method {
        Method::Heuristic => heuristic_result(&inst, a.weights)?,
        Method::Oracle => brute_force(&inst, a.weights).map_err(solver_error)?,
        Method::Bnb => {
            let incumbent = if a.warm_start { construct(&inst).ok() } else { None };
            if a.warm_start && incumbent.is_none() {
                let _ = writeln!(err, "osp: heuristic found no schedule; starting without incumbent");
            }
            let options = SolveOptions {
                time_limit: Some(Duration::from_secs_f64(a.time_limit)),
                node_limit: a.node_limit,
                incumbent,
                workers: workers()?,
            };
            branch_and_bound(&inst, a.weights, &options).map_err(solver_error)?
        }
    };

    let schedule = result.schedule.as_ref().map(|s| s.canonical());
    if let (Some(path), Some(s)) = (&a.output, &schedule) {
        emit(out, Some(path), &schedule_to_string(s, &instance_hash(&inst)))?;
    }
    let text = if a.json {
        let mut v = json!({
            "status": result.status.as_str(),
            "lower_bound": decimal(&result.lower_bound),
            "nodes": result.nodes,
            "elapsed_ms": result.elapsed.as_millis() as u64,
            "batches": schedule.as_ref().map(|s| s.len()),
        });
        if let Some(o) = &result.obj {
            v["objective"] = objective_json(o);
        }
        crate::format::to_canonical(&v)
    } else {
        let mut s = format!("status={}\n", result.status);
        if let (Some(o), Some(sched)) = (&result.obj, &schedule) {
            s.push_str(&format!("batches={}\n", sched.len()));
            s.push_str(&objective_text(o));
        }
        s.push_str(&format!(
            "lower_bound={}\nnodes={}\nelapsed_ms={}\n",
            decimal(&result.lower_bound),
            result.nodes,
            result.elapsed.as_millis()
        ));
        s
    };
    emit(out, None, &text)?;
    Ok(if result.schedule.is_some() {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    })
}

fn cmd_export(instance: &Path, weights: Weights, output: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let inst = load_valid(instance)?;
    let text = export_ilp(&inst, weights).map_err(|e| match e {
        LpError::Unsupported(msg) => Fail(EXIT_DATA, msg),
        LpError::Weights(e) => Fail(EXIT_USAGE, e.to_string()),
    })?;
    emit(out, output, &text)?;
    Ok(EXIT_OK)
}
