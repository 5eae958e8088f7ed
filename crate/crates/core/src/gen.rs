//! Seeded random instance generator.
//!
//! Draws come from ChaCha8 with one stream per entity category (job data,
//! setup matrices, machines, eligibility), so changing the machine count
//! does not change job times, sizes or attributes.

use crate::error::OspError;
use crate::model::{Instance, Interval, Job, Machine, SetupMatrix, Time};
use rand::distributions::{Distribution, Uniform};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

pub const PRNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3)";
const STREAM_JOBS: u64 = 0;
const STREAM_MATRICES: u64 = 1;
const STREAM_MACHINES: u64 = 2;
const STREAM_ELIGIBILITY: u64 = 3;
const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetupType {
    Constant,
    Arbitrary,
    Realistic,
    Symmetric,
}

impl SetupType {
    pub const ALL: [SetupType; 4] = [Self::Constant, Self::Arbitrary, Self::Realistic, Self::Symmetric];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Constant => "constant",
            Self::Arbitrary => "arbitrary",
            Self::Realistic => "realistic",
            Self::Symmetric => "symmetric",
        }
    }
}

impl fmt::Display for SetupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
/// Missing fields in serialized form take their default values.
#[serde(default, deny_unknown_fields)]
pub struct GeneratorParams {
    /// Number of jobs.
    pub n: usize,
    /// Overall maximum processing time.
    pub max_t: i64,
    /// Jobs get individual maximum processing times.
    pub max_time: bool,
    /// Spread of release dates.
    pub rho: f64,
    /// Slack from release to due date.
    pub phi: f64,
    /// Probability of each additional eligible machine.
    pub sigma: f64,
    /// Maximum job size, also the minimum machine capacity.
    pub max_job_size: i64,
    /// Number of attributes.
    pub attributes: usize,
    pub setup_time_type: SetupType,
    pub setup_cost_type: SetupType,
    /// Number of machines.
    pub machines: usize,
    pub max_capacity: i64,
    /// Lower bound on the fraction of time each machine is available.
    pub tau: f64,
    /// Maximum number of availability intervals per machine.
    pub max_intervals: usize,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            n: 10,
            max_t: 10,
            max_time: true,
            rho: 0.1,
            phi: 2.0,
            sigma: 0.2,
            max_job_size: 5,
            attributes: 2,
            setup_time_type: SetupType::Realistic,
            setup_cost_type: SetupType::Realistic,
            machines: 2,
            max_capacity: 20,
            tau: 0.75,
            max_intervals: 5,
            seed: 0,
        }
    }
}

impl GeneratorParams {
    pub fn check(&self) -> Result<(), OspError> {
        let bad = |msg: &str| Err(OspError::BadParams(msg.into()));
        if self.n < 1 {
            return bad("n must be at least 1");
        }
        if self.max_t < 1 {
            return bad("max_t must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return bad("rho must lie in [0, 1]");
        }
        if !self.phi.is_finite() || self.phi < 1.0 {
            return bad("phi must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.sigma) {
            return bad("sigma must lie in [0, 1]");
        }
        if self.max_job_size < 1 {
            return bad("max_job_size must be at least 1");
        }
        if self.attributes < 1 {
            return bad("attributes must be at least 1");
        }
        if self.machines < 1 {
            return bad("machines must be at least 1");
        }
        if self.max_capacity < self.max_job_size {
            return bad("max_capacity must be at least max_job_size");
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return bad("tau must lie in (0, 1]");
        }
        if self.max_intervals < 1 {
            return bad("max_intervals must be at least 1");
        }
        Ok(())
    }

    /// Parameters and PRNG description as instance metadata.
    pub fn to_metadata(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("generator", "osp-gen 1".into());
        put(
            "prng",
            format!("{PRNG_NAME}; seed_from_u64; streams jobs=0 matrices=1 machines=2 eligibility=3"),
        );
        put("due_date_factor", "continuous uniform".into());
        put("seed", self.seed.to_string());
        put("n", self.n.to_string());
        put("max_t", self.max_t.to_string());
        put("max_time", self.max_time.to_string());
        put("rho", self.rho.to_string());
        put("phi", self.phi.to_string());
        put("sigma", self.sigma.to_string());
        put("max_job_size", self.max_job_size.to_string());
        put("attributes", self.attributes.to_string());
        put("setup_time_type", self.setup_time_type.to_string());
        put("setup_cost_type", self.setup_cost_type.to_string());
        put("machines", self.machines.to_string());
        put("max_capacity", self.max_capacity.to_string());
        put("tau", self.tau.to_string());
        put("max_intervals", self.max_intervals.to_string());
        m
    }
}

fn snap_ceil(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() < EPS {
        r as i64
    } else {
        x.ceil() as i64
    }
}

fn snap_floor(x: f64) -> i64 {
    let r = x.round();
    if (x - r).abs() < EPS {
        r as i64
    } else {
        x.floor() as i64
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn uniform_real(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

fn setup_matrix(kind: SetupType, a: usize, max_t: i64, rng: &mut ChaCha8Rng) -> SetupMatrix {
    let quarter = (max_t + 3) / 4;
    let eighth = (max_t + 7) / 8;
    let mut m = SetupMatrix::zeros(a);
    match kind {
        SetupType::Constant => {
            m = SetupMatrix::constant(a, rng.gen_range(0..=quarter));
        }
        SetupType::Arbitrary => {
            for i in 0..a {
                for j in 0..a {
                    m.set(i, j, rng.gen_range(1..=quarter));
                }
            }
        }
        SetupType::Realistic => {
            let off_hi = quarter.max(eighth + 1);
            for i in 0..a {
                for j in 0..a {
                    let v = if i == j {
                        rng.gen_range(0..=eighth)
                    } else {
                        rng.gen_range(eighth + 1..=off_hi)
                    };
                    m.set(i, j, v);
                }
            }
        }
        SetupType::Symmetric => {
            for i in 0..a {
                for j in i..a {
                    let v = rng.gen_range(0..=quarter);
                    m.set(i, j, v);
                    m.set(j, i, v);
                }
            }
        }
    }
    m
}

/// `count` sorted integers in `[lo, hi]`, consecutive ones at least `d`
/// apart, uniform over all such tuples.
///
/// Draws `count` distinct values from `[lo, hi - (count - 1) * (d - 1)]`
/// and shifts the `i`-th smallest up by `i * (d - 1)`. Requires `d >= 1`
/// and `hi - lo >= (count - 1) * d`.
pub fn spread_starts<R: Rng + ?Sized>(count: usize, lo: Time, hi: Time, d: Time, rng: &mut R) -> Vec<Time> {
    if count == 0 {
        return Vec::new();
    }
    assert!(d >= 1, "spacing must be positive");
    let slack = count as Time - 1;
    assert!(
        hi - lo >= slack * d,
        "no room for {count} starts {d} apart in [{lo}, {hi}]"
    );
    let top = hi - slack * (d - 1);
    let width = (top - lo + 1) as usize;
    let mut picks: Vec<Time> = index::sample(rng, width, count)
        .into_iter()
        .map(|i| lo + i as Time)
        .collect();
    picks.sort_unstable();
    picks
        .into_iter()
        .enumerate()
        .map(|(i, x)| x + i as Time * (d - 1))
        .collect()
}

pub fn generate(params: &GeneratorParams) -> Result<Instance, OspError> {
    params.check()?;
    let n = params.n;
    let k = params.machines;
    let a = params.attributes;
    let max_t = params.max_t;

    let mut rj = stream(params.seed, STREAM_JOBS);
    let windows: Vec<(Time, Time)> = (0..n)
        .map(|_| {
            let mint = rj.gen_range(1..=max_t);
            let maxt = if params.max_time {
                rj.gen_range(mint..=max_t)
            } else {
                max_t
            };
            (mint, maxt)
        })
        .collect();
    let z: i64 = windows.iter().map(|w| w.0).sum();
    let release_hi = snap_ceil(params.rho * z as f64);
    let mut re = stream(params.seed, STREAM_ELIGIBILITY);
    let machine_pick = Uniform::new(0, k);
    let jobs: Vec<Job> = windows
        .iter()
        .map(|&(mint, maxt)| {
            let release = rj.gen_range(0..=release_hi);
            let u = uniform_real(&mut rj, 1.0, params.phi);
            let due = release + snap_floor(u * mint as f64);
            let first = machine_pick.sample(&mut re);
            let mut eligible = vec![first];
            for m in 0..k {
                if m != first && re.gen_bool(params.sigma) {
                    eligible.push(m);
                }
            }
            eligible.sort_unstable();
            Job {
                eligible,
                release,
                due: Some(due),
                min_time: mint,
                max_time: maxt,
                size: rj.gen_range(1..=params.max_job_size),
                attribute: rj.gen_range(0..a),
            }
        })
        .collect();

    let mut rx = stream(params.seed, STREAM_MATRICES);
    let setup_times = setup_matrix(params.setup_time_type, a, max_t, &mut rx);
    let setup_costs = setup_matrix(params.setup_cost_type, a, max_t, &mut rx);

    let mut rm = stream(params.seed, STREAM_MACHINES);
    let bases: Vec<(i64, usize)> = (0..k)
        .map(|_| {
            let capacity = rm.gen_range(params.max_job_size..=params.max_capacity);
            (capacity, rm.gen_range(0..a))
        })
        .collect();

    let max_st = setup_times.max_entry();
    let max_et = jobs.iter().map(|j| j.release).max().unwrap_or(0);
    let max_due = jobs.iter().filter_map(|j| j.due).max().unwrap_or(0);
    let stretched = snap_ceil((z + n as i64 * max_st) as f64 / params.tau);
    let horizon = (max_et + stretched).max(max_due);

    let min_t = windows.iter().map(|w| w.0).min().unwrap_or(1);
    let d = min_t + max_st;
    let tau = params.tau;
    let machines = bases
        .into_iter()
        .map(|(capacity, initial_state)| {
            let fit = (horizon / d).max(1) as usize;
            let count = rm.gen_range(1..=params.max_intervals).min(fit);
            let first_hi = snap_floor(horizon as f64 * (1.0 - tau))
                .min(horizon - count as Time * d)
                .max(0);
            let first = rm.gen_range(0..=first_hi);
            let mut starts = vec![first];
            starts.extend(spread_starts(count - 1, first + d, horizon - d, d, &mut rm));
            let availability = (0..count)
                .map(|i| {
                    let next = starts.get(i + 1).copied().unwrap_or(horizon);
                    let gap = next - starts[i];
                    let u = uniform_real(&mut rm, tau, 1.0);
                    Interval::new(starts[i], starts[i] + d.max(snap_ceil(u * gap as f64)))
                })
                .collect();
            Machine {
                capacity,
                initial_state,
                availability,
            }
        })
        .collect();

    Ok(Instance {
        horizon,
        attribute_count: a,
        machines,
        jobs,
        setup_times,
        setup_costs,
        metadata: params.to_metadata(),
    })
}

/// The 1024 parameter combinations of the benchmark grid for fixed `n`, `k`
/// and `a`, all with seed 0.
pub fn benchmark_grid(n: usize, machines: usize, attributes: usize) -> Vec<GeneratorParams> {
    let mut out = Vec::with_capacity(1024);
    for max_t in [10, 100] {
        for max_time in [true, false] {
            for rho in [0.1, 0.5] {
                for phi in [2.0, 5.0] {
                    for sigma in [0.2, 0.5] {
                        for s in [5, 20] {
                            for setup in SetupType::ALL {
                                for max_capacity in [20, 100] {
                                    for tau in [0.25, 0.75] {
                                        out.push(GeneratorParams {
                                            n,
                                            max_t,
                                            max_time,
                                            rho,
                                            phi,
                                            sigma,
                                            max_job_size: s,
                                            attributes,
                                            setup_time_type: setup,
                                            setup_cost_type: setup,
                                            machines,
                                            max_capacity,
                                            tau,
                                            max_intervals: 5,
                                            seed: 0,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// 80 parameter sets: for each job count in 10, 25, 50, 100 and each
/// combination of 2 or 5 machines and 2 or 5 attributes, five grid points
/// drawn without replacement. Each gets its own seed.
pub fn benchmark_family(seed: u64) -> Vec<GeneratorParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(80);
    for n in [10, 25, 50, 100] {
        for k in [2, 5] {
            for a in [2, 5] {
                let grid = benchmark_grid(n, k, a);
                for i in index::sample(&mut rng, grid.len(), 5).into_iter() {
                    let mut p = grid[i].clone();
                    p.seed = rng.gen();
                    out.push(p);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::validate_instance;

    #[test]
    fn same_seed_same_instance() {
        let p = GeneratorParams {
            seed: 42,
            ..GeneratorParams::default()
        };
        assert_eq!(generate(&p).unwrap(), generate(&p).unwrap());
    }

    #[test]
    fn zero_rho_releases_everything_at_zero() {
        let p = GeneratorParams {
            rho: 0.0,
            seed: 7,
            ..GeneratorParams::default()
        };
        assert!(generate(&p).unwrap().jobs.iter().all(|j| j.release == 0));
    }

    #[test]
    fn machine_count_does_not_move_job_draws() {
        let p = GeneratorParams {
            seed: 3,
            ..GeneratorParams::default()
        };
        let q = GeneratorParams {
            machines: 5,
            ..p.clone()
        };
        let a = generate(&p).unwrap();
        let b = generate(&q).unwrap();
        let times = |i: &Instance| {
            i.jobs
                .iter()
                .map(|j| (j.min_time, j.max_time, j.release, j.due, j.size, j.attribute))
                .collect::<Vec<_>>()
        };
        assert_eq!(times(&a), times(&b));
    }

    #[test]
    fn bad_params_are_rejected() {
        for p in [
            GeneratorParams {
                tau: 0.0,
                ..Default::default()
            },
            GeneratorParams {
                phi: 0.5,
                ..Default::default()
            },
            GeneratorParams {
                max_capacity: 2,
                ..Default::default()
            },
            GeneratorParams {
                n: 0,
                ..Default::default()
            },
        ] {
            assert!(matches!(generate(&p), Err(OspError::BadParams(_))));
        }
    }

    #[test]
    fn spread_starts_forced_configuration() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(spread_starts(2, 0, 5, 5, &mut rng), vec![0, 5]);
        let one = spread_starts(1, 3, 9, 4, &mut rng);
        assert!(one.len() == 1 && (3..=9).contains(&one[0]));
        assert!(spread_starts(0, 3, 9, 4, &mut rng).is_empty());
    }

    #[test]
    fn grid_and_family_sizes() {
        assert_eq!(benchmark_grid(10, 2, 2).len(), 1024);
        let fam = benchmark_family(1);
        assert_eq!(fam.len(), 80);
        assert_eq!(fam.iter().filter(|p| p.n == 100).count(), 20);
    }

    #[test]
    fn generated_instances_validate() {
        for seed in 0..20 {
            let p = GeneratorParams {
                seed,
                n: 25,
                machines: 5,
                attributes: 5,
                setup_time_type: SetupType::ALL[seed as usize % 4],
                ..GeneratorParams::default()
            };
            let inst = generate(&p).unwrap();
            let r = validate_instance(&inst);
            assert!(r.feasible(), "seed {seed}: {:?}", r.violations);
        }
    }
}
