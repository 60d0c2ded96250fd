//! The Local SGD simulator.
//!
//! Every agent starts at `x0`, takes one stochastic gradient step per
//! iteration, and at each communication instant all agents are replaced by
//! the average of their post-step iterates.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::ProblemInstance;
use crate::rng::step_stream;
use crate::schedules::Schedule;
use crate::vector::{dist_sq, norm_sq, CompensatedSum, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StepsizePolicy {
    /// `η_t = 2/(μ(β + t))`.
    InverseTime { mu: f64, beta: f64 },
    /// `η = c·√(n/T)`.
    Constant {
        c: f64,
        n: usize,
        #[serde(rename = "T")]
        total: usize,
    },
}

impl StepsizePolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StepsizePolicy::InverseTime { mu, beta } => {
                if !(mu > 0.0) || !mu.is_finite() || !(beta > 0.0) || !beta.is_finite() {
                    return Err(Error::invalid(format!("inverse-time stepsize needs mu > 0 and beta > 0 (mu={mu}, beta={beta})")));
                }
            }
            StepsizePolicy::Constant { c, n, total } => {
                if !(c > 0.0) || !c.is_finite() || n == 0 || total == 0 {
                    return Err(Error::invalid(format!("constant stepsize needs c > 0, n ≥ 1, T ≥ 1 (c={c}, n={n}, T={total})")));
                }
            }
        }
        Ok(())
    }

    pub fn at(&self, t: usize) -> f64 {
        match *self {
            StepsizePolicy::InverseTime { mu, beta } => 2.0 / (mu * (beta + t as f64)),
            StepsizePolicy::Constant { c, n, total } => c * (n as f64 / total as f64).sqrt(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: usize,
    pub schedule: Schedule,
    pub stepsize: StepsizePolicy,
    pub x0: Vector,
    pub seed: u64,
    pub record_stride: usize,
    /// Also accumulate `(1/T)Σ_{t<T} e_t` and `h_t` at every step,
    /// independently of `record_stride`.
    pub time_averages: bool,
}

/// Metrics of the averaged iterate at one recorded time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Record {
    pub t: usize,
    /// `‖x̄ − x*‖²`, when the family has a unique optimum.
    pub r: Option<f64>,
    /// `f(x̄) − f*`, or `f(x̄) − f_lower` when `f*` is unknown.
    pub e: f64,
    /// `(1/n)Σ‖x_i − x̄‖²`.
    pub v: f64,
    /// `‖∇f(x̄)‖²`.
    pub h: f64,
    pub is_comm: bool,
    /// `Σ_i ‖x_i − z‖²` with `z = x*` (or the origin when there is no `x*`).
    pub anchor_spread: f64,
    /// `‖x̄ − z‖²` for the same `z`, so `anchor_spread = n·(v + anchor_dist)`.
    pub anchor_dist: f64,
    /// `max_i ‖x_i‖²`.
    pub max_norm_sq: f64,
}

#[derive(Clone, Debug)]
pub struct RunMetrics {
    pub records: Vec<Record>,
    pub final_x_bar: Vector,
    pub rounds_used: usize,
    /// `((1/T)Σ e_t, (1/T)Σ h_t)` when requested.
    pub time_averages: Option<(f64, f64)>,
    pub wall_time: Duration,
}

/// Reference point and optimal values the metrics are measured against.
struct Reference {
    x_star: Option<Vec<f64>>,
    f_ref: f64,
}

impl Reference {
    fn of(problem: &ProblemInstance) -> Result<Self> {
        let c = problem.constants()?;
        let f_ref = c.f_star.map(|f| f.value).unwrap_or(c.f_lower.value);
        Ok(Reference { x_star: c.x_star.map(Vector::into_inner), f_ref })
    }
}

fn validate(problem: &ProblemInstance, config: &RunConfig) -> Result<()> {
    if config.n != problem.n() {
        return Err(Error::invalid(format!("config has n={} but the problem has {} agents", config.n, problem.n())));
    }
    if config.x0.dim() != problem.dim() {
        return Err(Error::DimensionMismatch { expected: problem.dim(), got: config.x0.dim() });
    }
    if config.x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("x0 has non-finite components"));
    }
    if config.record_stride == 0 {
        return Err(Error::invalid("record_stride must be ≥ 1"));
    }
    config.stepsize.validate()
}

/// Runs Algorithm 1 once. The noise draw of agent `i` at step `t` comes
/// from the stream `(seed, i, t)`, so the result is a pure function of the
/// inputs.
pub fn run_local_sgd(problem: &ProblemInstance, config: &RunConfig) -> Result<RunMetrics> {
    validate(problem, config)?;
    let reference = Reference::of(problem)?;
    Ok(simulate(problem, config, &reference))
}

fn simulate(problem: &ProblemInstance, config: &RunConfig, reference: &Reference) -> RunMetrics {
    let start = Instant::now();
    let (n, d) = (problem.n(), problem.dim());
    let total = config.schedule.total_steps();
    let instants = config.schedule.instants();

    let mut xs: Vec<f64> = config.x0.iter().copied().cycle().take(n * d).collect();
    let mut grad = vec![0.0; d];
    let mut x_bar = vec![0.0; d];
    let mut scratch = vec![0.0; d];
    let mut records = Vec::with_capacity(total / config.record_stride + instants.len() + 2);
    let mut rounds_used = 0;
    let mut next_instant = 1;
    let (mut sum_e, mut sum_h) = (CompensatedSum::default(), CompensatedSum::default());

    records.push(measure(problem, reference, 0, false, &xs, &mut x_bar, &mut scratch));
    for t in 0..total {
        if config.time_averages {
            let rec = if t == 0 || records.last().map(|r| r.t) == Some(t) {
                *records.last().expect("t = 0 is always recorded")
            } else {
                measure(problem, reference, t, false, &xs, &mut x_bar, &mut scratch)
            };
            sum_e.add(rec.e);
            sum_h.add(rec.h);
        }
        let eta = config.stepsize.at(t);
        for (i, x) in xs.chunks_exact_mut(d).enumerate() {
            let mut rng = step_stream(config.seed, i, t);
            problem.stochastic_grad_into(i, x, &mut rng, &mut grad);
            x.iter_mut().zip(&grad).for_each(|(xk, gk)| *xk -= eta * gk);
        }
        let is_comm = instants.get(next_instant) == Some(&(t + 1));
        if is_comm {
            mean_into(&xs, n, &mut x_bar);
            for x in xs.chunks_exact_mut(d) {
                x.copy_from_slice(&x_bar);
            }
            rounds_used += 1;
            next_instant += 1;
        }
        if is_comm || (t + 1) % config.record_stride == 0 || t + 1 == total {
            records.push(measure(problem, reference, t + 1, is_comm, &xs, &mut x_bar, &mut scratch));
        }
    }
    mean_into(&xs, n, &mut x_bar);
    let time_averages = config
        .time_averages
        .then(|| (sum_e.value() / total as f64, sum_h.value() / total as f64));
    RunMetrics { records, final_x_bar: Vector::from_raw(x_bar), rounds_used, time_averages, wall_time: start.elapsed() }
}

fn mean_into(xs: &[f64], n: usize, out: &mut [f64]) {
    let d = out.len();
    out.iter_mut().for_each(|v| *v = 0.0);
    for x in xs.chunks_exact(d) {
        out.iter_mut().zip(x).for_each(|(o, v)| *o += v);
    }
    let inv = 1.0 / n as f64;
    out.iter_mut().for_each(|v| *v *= inv);
}

fn measure(
    problem: &ProblemInstance,
    reference: &Reference,
    t: usize,
    is_comm: bool,
    xs: &[f64],
    x_bar: &mut [f64],
    grad: &mut [f64],
) -> Record {
    let n = problem.n();
    let d = x_bar.len();
    mean_into(xs, n, x_bar);
    let v = xs.chunks_exact(d).map(|x| dist_sq(x, x_bar)).sum::<f64>() / n as f64;
    let r = reference.x_star.as_deref().map(|xs_| dist_sq(x_bar, xs_));
    let (anchor_spread, anchor_dist) = match reference.x_star.as_deref() {
        Some(z) => (xs.chunks_exact(d).map(|x| dist_sq(x, z)).sum(), r.unwrap_or_default()),
        None => (xs.chunks_exact(d).map(norm_sq).sum(), norm_sq(x_bar)),
    };
    let max_norm_sq = xs.chunks_exact(d).map(norm_sq).fold(0.0, f64::max);
    let e = problem.global_value_unchecked(x_bar) - reference.f_ref;
    problem.global_grad_into(x_bar, grad);
    Record { t, r, e, v, h: norm_sq(grad), is_comm, anchor_spread, anchor_dist, max_norm_sq }
}

/// One seed's run.
#[derive(Clone, Debug)]
pub struct SeedRun {
    pub seed: u64,
    pub metrics: RunMetrics,
}

/// Runs every seed (in parallel on the current rayon pool). The output is
/// sorted by seed.
pub fn run_seeds(problem: &ProblemInstance, config: &RunConfig, seeds: &[u64]) -> Result<Vec<SeedRun>> {
    if seeds.is_empty() {
        return Err(Error::invalid("seed list is empty"));
    }
    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::invalid(format!("duplicate seed {}", w[0])));
    }
    validate(problem, config)?;
    let reference = Reference::of(problem)?;
    Ok(sorted
        .par_iter()
        .map(|&seed| {
            let cfg = RunConfig { seed, ..config.clone() };
            SeedRun { seed, metrics: simulate(problem, &cfg, &reference) }
        })
        .collect())
}

/// Mean and standard error of one quantity across seeds.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Stat {
    pub mean: f64,
    pub se: f64,
}

impl Stat {
    /// Compensated mean and `s/√m` (zero for a single sample).
    pub fn of(values: &[f64]) -> Stat {
        let m = values.len() as f64;
        let mean = values.iter().copied().collect::<CompensatedSum>().value() / m;
        if values.len() < 2 {
            return Stat { mean, se: 0.0 };
        }
        let ss = values.iter().map(|v| (v - mean) * (v - mean)).collect::<CompensatedSum>().value();
        Stat { mean, se: (ss / (m - 1.0) / m).sqrt() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRecord {
    pub t: usize,
    pub is_comm: bool,
    pub r: Option<Stat>,
    pub e: Stat,
    pub v: Stat,
    pub h: Stat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateMetrics {
    pub records: Vec<AggregateRecord>,
    pub seeds: usize,
}

impl AggregateMetrics {
    pub fn last(&self) -> &AggregateRecord {
        self.records.last().expect("a run always records t = 0")
    }

    /// `(1/T)Σ_{t<T}` of the seed-mean of a quantity; needs every `t` recorded.
    pub fn time_average(&self, pick: impl Fn(&AggregateRecord) -> f64) -> Result<f64> {
        let total = self.last().t;
        if self.records.len() != total + 1 || self.records.iter().enumerate().any(|(k, r)| r.t != k) {
            return Err(Error::invalid("time average needs record_stride = 1"));
        }
        let sum: CompensatedSum = self.records[..total].iter().map(pick).collect();
        Ok(sum.value() / total as f64)
    }
}

/// Seed mean and standard error at every recorded time. Runs must share a
/// config apart from the seed, so their record times coincide.
pub fn aggregate(runs: &[SeedRun]) -> Result<AggregateMetrics> {
    let first = runs.first().ok_or_else(|| Error::invalid("no runs to aggregate"))?;
    let len = first.metrics.records.len();
    if runs.iter().any(|r| r.metrics.records.len() != len) {
        return Err(Error::invalid("runs recorded different time grids"));
    }
    let mut buf = vec![0.0; runs.len()];
    let mut stat = |f: &dyn Fn(&Record) -> f64, k: usize| {
        for (b, run) in buf.iter_mut().zip(runs) {
            *b = f(&run.metrics.records[k]);
        }
        Stat::of(&buf)
    };
    let records = (0..len)
        .map(|k| {
            let rec = &first.metrics.records[k];
            AggregateRecord {
                t: rec.t,
                is_comm: rec.is_comm,
                r: rec.r.map(|_| stat(&|x: &Record| x.r.unwrap_or(f64::NAN), k)),
                e: stat(&|x: &Record| x.e, k),
                v: stat(&|x: &Record| x.v, k),
                h: stat(&|x: &Record| x.h, k),
            }
        })
        .collect();
    Ok(AggregateMetrics { records, seeds: runs.len() })
}

/// [`run_seeds`] followed by [`aggregate`].
pub fn run_many(problem: &ProblemInstance, config: &RunConfig, seeds: &[u64]) -> Result<AggregateMetrics> {
    aggregate(&run_seeds(problem, config, seeds)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{make_strongly_convex_quadratics, Family};
    use crate::schedules::{fixed_schedule, Schedule};
    use proptest::prelude::*;

    fn half_x_squared(sigma: f64) -> ProblemInstance {
        ProblemInstance::diagonal_quadratics(Family::StronglyConvexQuadratic, vec![vec![1.0]], vec![vec![0.0]], sigma)
            .unwrap()
    }

    fn config(problem: &ProblemInstance, schedule: Schedule, stepsize: StepsizePolicy, x0: Vec<f64>) -> RunConfig {
        RunConfig {
            n: problem.n(),
            schedule,
            stepsize,
            x0: Vector::new(x0).unwrap(),
            seed: 7,
            record_stride: 1,
            time_averages: false,
        }
    }

    #[test]
    fn stepsize_examples() {
        let p = StepsizePolicy::InverseTime { mu: 2.0, beta: 1.0 };
        assert_eq!(p.at(0), 1.0);
        assert!(p.at(1) < p.at(0));
        let c = StepsizePolicy::Constant { c: 1.0, n: 4, total: 100 };
        assert_eq!(c.at(0), 0.2);
        assert_eq!(c.at(99), 0.2);
        assert!(StepsizePolicy::InverseTime { mu: 0.0, beta: 1.0 }.validate().is_err());
        assert!(StepsizePolicy::Constant { c: 1.0, n: 0, total: 100 }.validate().is_err());
    }

    #[test]
    fn one_gradient_step() {
        let p = half_x_squared(0.0);
        let cfg = config(&p, fixed_schedule(1, 1).unwrap(), StepsizePolicy::Constant { c: 0.1, n: 1, total: 1 }, vec![1.0]);
        let m = run_local_sgd(&p, &cfg).unwrap();
        assert_eq!(m.final_x_bar[0], 0.9);
        let last = m.records.last().unwrap();
        assert_eq!(last.t, 1);
        assert!((last.r.unwrap() - 0.81).abs() < 1e-15);
        assert!((last.e - 0.405).abs() < 1e-15);
        assert_eq!(m.rounds_used, 1);
    }

    #[test]
    fn single_agent_ignores_schedule() {
        let p = make_strongly_convex_quadratics(1, 4, 0.5, 2.0, 0.0, 1.0, 3).unwrap();
        let step = StepsizePolicy::InverseTime { mu: 0.5, beta: 40.0 };
        let a = run_local_sgd(&p, &config(&p, fixed_schedule(60, 60).unwrap(), step, vec![1.0; 4])).unwrap();
        let b = run_local_sgd(&p, &config(&p, fixed_schedule(60, 3).unwrap(), step, vec![1.0; 4])).unwrap();
        assert_eq!(a.final_x_bar, b.final_x_bar);
    }

    #[test]
    fn homogeneous_noiseless_has_no_consensus_error() {
        // identical agents: same curvature and center
        let p = ProblemInstance::diagonal_quadratics(
            Family::StronglyConvexQuadratic,
            vec![vec![1.0, 0.2, 0.7]; 5],
            vec![vec![0.3, -1.0, 2.0]; 5],
            0.0,
        )
        .unwrap();
        let cfg = config(&p, Schedule::from_intervals(vec![7, 1, 12]).unwrap(), StepsizePolicy::InverseTime { mu: 0.2, beta: 100.0 }, vec![3.0, -1.0, 2.0]);
        let m = run_local_sgd(&p, &cfg).unwrap();
        // x̄ of identical rows is only equal to them up to rounding
        assert!(m.records.iter().all(|r| r.v <= 1e-28 * (1.0 + r.max_norm_sq)));
        // with d = 2 the generator pins both coordinates, so δ = 0 is homogeneous
        let p = make_strongly_convex_quadratics(5, 2, 0.2, 1.0, 0.0, 0.0, 11).unwrap();
        let cfg = config(&p, fixed_schedule(20, 2).unwrap(), StepsizePolicy::InverseTime { mu: 0.2, beta: 100.0 }, vec![3.0, -1.0]);
        assert!(run_local_sgd(&p, &cfg).unwrap().records.iter().all(|r| r.v <= 1e-28 * (1.0 + r.max_norm_sq)));
    }

    #[test]
    fn averaging_happens_exactly_at_instants() {
        let p = make_strongly_convex_quadratics(4, 3, 0.2, 1.0, 1.0, 1.0, 5).unwrap();
        let schedule = Schedule::from_intervals(vec![3, 1, 5, 2]).unwrap();
        let mut cfg = config(&p, schedule.clone(), StepsizePolicy::InverseTime { mu: 0.2, beta: 100.0 }, vec![0.5; 3]);
        cfg.record_stride = 4;
        let m = run_local_sgd(&p, &cfg).unwrap();
        assert_eq!(m.rounds_used, 4);
        let comm: Vec<usize> = m.records.iter().filter(|r| r.is_comm).map(|r| r.t).collect();
        assert_eq!(comm, &schedule.instants()[1..]);
        for r in &m.records {
            if r.is_comm {
                assert!(r.v <= 1e-12 * (1.0 + r.max_norm_sq));
            } else if r.t > 0 {
                assert!(r.v > 0.0);
            }
        }
        let times: Vec<usize> = m.records.iter().map(|r| r.t).collect();
        assert_eq!(times, vec![0, 3, 4, 8, 9, 11]);
    }

    #[test]
    fn stride_does_not_change_values() {
        let p = make_strongly_convex_quadratics(3, 2, 0.2, 1.0, 1.0, 1.0, 5).unwrap();
        let mut cfg = config(&p, fixed_schedule(40, 8).unwrap(), StepsizePolicy::InverseTime { mu: 0.2, beta: 100.0 }, vec![1.0, 2.0]);
        let dense = run_local_sgd(&p, &cfg).unwrap();
        cfg.record_stride = 7;
        let sparse = run_local_sgd(&p, &cfg).unwrap();
        for r in &sparse.records {
            assert_eq!(&dense.records[r.t], r);
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let p = make_strongly_convex_quadratics(3, 2, 0.2, 1.0, 1.0, 1.0, 5).unwrap();
        let step = StepsizePolicy::InverseTime { mu: 0.2, beta: 100.0 };
        let mut cfg = config(&p, fixed_schedule(10, 2).unwrap(), step, vec![1.0, 2.0, 3.0]);
        assert!(matches!(run_local_sgd(&p, &cfg), Err(Error::DimensionMismatch { .. })));
        cfg.x0 = Vector::zeros(2);
        cfg.n = 4;
        assert!(run_local_sgd(&p, &cfg).is_err());
        cfg.n = 3;
        assert!(run_seeds(&p, &cfg, &[1, 2, 1]).is_err());
        assert!(run_seeds(&p, &cfg, &[]).is_err());
    }

    #[test]
    fn one_seed_aggregate_matches_run() {
        let p = make_strongly_convex_quadratics(3, 2, 0.2, 1.0, 1.0, 1.0, 5).unwrap();
        let cfg = config(&p, fixed_schedule(20, 4).unwrap(), StepsizePolicy::InverseTime { mu: 0.2, beta: 100.0 }, vec![1.0, 2.0]);
        let run = run_local_sgd(&p, &RunConfig { seed: 42, ..cfg.clone() }).unwrap();
        let agg = run_many(&p, &cfg, &[42]).unwrap();
        for (a, r) in agg.records.iter().zip(&run.records) {
            assert_eq!(a.r.unwrap(), Stat { mean: r.r.unwrap(), se: 0.0 });
            assert_eq!(a.e.mean, r.e);
            assert_eq!(a.v.se, 0.0);
        }
    }

    #[test]
    fn noiseless_runs_agree_across_seeds() {
        let p = make_strongly_convex_quadratics(3, 2, 0.2, 1.0, 1.0, 0.0, 5).unwrap();
        let cfg = config(&p, fixed_schedule(20, 4).unwrap(), StepsizePolicy::InverseTime { mu: 0.2, beta: 100.0 }, vec![1.0, 2.0]);
        let agg = run_many(&p, &cfg, &[1, 2, 3, 4]).unwrap();
        assert!(agg.records.iter().all(|r| r.r.unwrap().se == 0.0 && r.v.se == 0.0));
    }

    #[test]
    fn stat_matches_textbook() {
        let s = Stat::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn time_average_requires_dense_records() {
        let p = half_x_squared(0.0);
        let mut cfg = config(&p, fixed_schedule(4, 4).unwrap(), StepsizePolicy::Constant { c: 0.5, n: 1, total: 4 }, vec![1.0]);
        let agg = run_many(&p, &cfg, &[0]).unwrap();
        // x_t = 0.75^t, e_t = ½·0.75^{2t}
        let expected: f64 = (0..4).map(|t| 0.5 * 0.5625f64.powi(t)).sum::<f64>() / 4.0;
        assert!((agg.time_average(|r| r.e.mean).unwrap() - expected).abs() < 1e-15);
        cfg.record_stride = 2;
        cfg.schedule = fixed_schedule(4, 1).unwrap();
        assert!(run_many(&p, &cfg, &[0]).unwrap().time_average(|r| r.e.mean).is_err());
    }

    #[test]
    fn online_time_averages_match_dense_records() {
        let p = make_strongly_convex_quadratics(3, 4, 0.2, 1.0, 1.0, 1.0, 8).unwrap();
        let mut cfg = config(&p, fixed_schedule(50, 7).unwrap(), StepsizePolicy::InverseTime { mu: 0.2, beta: 100.0 }, vec![1.0; 4]);
        let dense = run_many(&p, &cfg, &[3, 4]).unwrap();
        cfg.record_stride = 9;
        cfg.time_averages = true;
        let runs = run_seeds(&p, &cfg, &[3, 4]).unwrap();
        let (e, h): (Vec<f64>, Vec<f64>) = runs.iter().map(|r| r.metrics.time_averages.unwrap()).unzip();
        let want_e = dense.time_average(|r| r.e.mean).unwrap();
        let want_h = dense.time_average(|r| r.h.mean).unwrap();
        assert!((Stat::of(&e).mean - want_e).abs() <= 1e-13 * want_e);
        assert!((Stat::of(&h).mean - want_h).abs() <= 1e-13 * want_h);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn averaging_identity(seed in 0u64..1000, n in 1usize..6, h in proptest::collection::vec(1usize..6, 1..6)) {
            let p = make_strongly_convex_quadratics(n, 3, 0.1, 1.0, 2.0, 1.0, seed).unwrap();
            let cfg = RunConfig {
                n,
                schedule: Schedule::from_intervals(h).unwrap(),
                stepsize: StepsizePolicy::InverseTime { mu: 0.1, beta: 200.0 },
                x0: Vector::new(vec![1.0, -2.0, 0.5]).unwrap(),
                seed,
                record_stride: 1,
                time_averages: false,
            };
            let m = run_local_sgd(&p, &cfg).unwrap();
            for r in &m.records {
                prop_assert_eq!(r.anchor_dist, r.r.unwrap());
                let rhs = n as f64 * (r.v + r.anchor_dist);
                prop_assert!((r.anchor_spread - rhs).abs() <= 1e-9 * r.anchor_spread.max(1e-300));
            }
        }
    }
}
