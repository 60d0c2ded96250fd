//! Experiment protocols: bound validation, rounds-to-target trade-offs,
//! speedup curves and strategy comparisons.

use serde::{Deserialize, Serialize};

use crate::bounds::{compare, thm1_rhs, thm2_rhs, thm3_rhs, BoundReport};
use crate::engine::{aggregate, run_seeds, AggregateMetrics, RunConfig, SeedRun, Stat, StepsizePolicy};
use crate::error::{Error, Result};
use crate::objectives::{Family, ProblemConstants, ProblemInstance, ProblemSpec};
use crate::schedules::{
    check_thm1_condition, check_thm2_condition, check_thm3_condition, min_beta_thm1, Schedule,
    ScheduleSpec,
};
use crate::vector::{dist_sq, Vector};

/// Scalar an experiment reports as its error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// `r_t` at the final (or crossing) time.
    R,
    /// `e_t` at the final (or crossing) time.
    E,
    /// `h_t` at the final (or crossing) time.
    H,
    /// `(1/T)Σ e_t`.
    MeanE,
    /// `(1/T)Σ h_t`.
    MeanH,
}

impl Metric {
    /// `r_T` where a unique optimum and strong convexity exist, the
    /// time-averaged gap for merely convex problems and the time-averaged
    /// squared gradient norm for the nonconvex family.
    pub fn default_for(family: Family) -> Metric {
        match family {
            Family::StronglyConvexQuadratic | Family::SyntheticLogistic => Metric::R,
            Family::ConvexQuadratic => Metric::MeanE,
            Family::NonconvexQuadraticSinusoid => Metric::MeanH,
        }
    }

    pub fn is_time_average(self) -> bool {
        matches!(self, Metric::MeanE | Metric::MeanH)
    }

    pub fn tag(self) -> &'static str {
        match self {
            Metric::R => "r",
            Metric::E => "e",
            Metric::H => "h",
            Metric::MeanE => "mean-e",
            Metric::MeanH => "mean-h",
        }
    }
}

/// Stepsize as configured; the missing pieces (`mu`, `n`, `T`) come from
/// the problem and the experiment cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StepsizeSpec {
    /// `η_t = 2/(μ(β+t))`. Without `beta`, the smallest value meeting the
    /// schedule condition and `β ≥ 20L/μ` is used.
    InverseTime {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
    },
    /// `η = c·√(n/T)`.
    Constant { c: f64 },
}

/// Starting point shared by all agents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum X0Spec {
    Point(Vec<f64>),
    /// `x* + (dist/√d)·(1, …, 1)`, so that `r_0 = dist²`.
    FromOptimum { from_optimum: f64 },
}

impl X0Spec {
    pub fn resolve(spec: Option<&X0Spec>, problem: &ProblemInstance, constants: &ProblemConstants) -> Result<Vector> {
        let d = problem.dim();
        match spec {
            None => Ok(Vector::zeros(d)),
            Some(X0Spec::Point(v)) => {
                if v.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, got: v.len() });
                }
                Vector::new(v.clone())
            }
            Some(X0Spec::FromOptimum { from_optimum }) => {
                let x_star = constants.x_star_ref()?;
                let shift = from_optimum / (d as f64).sqrt();
                Vector::new(x_star.iter().map(|v| v + shift).collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    /// Runs one schedule and checks it against theorem `theorem`.
    Bounds {
        theorem: u8,
        #[serde(rename = "T")]
        total: usize,
        #[serde(default = "default_stride")]
        record_stride: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x0: Option<X0Spec>,
    },
    /// First communication instant at which the seed-mean metric is at or
    /// below `threshold`, per strategy.
    RoundsToTarget {
        #[serde(rename = "T_max")]
        t_max: usize,
        threshold: f64,
        #[serde(default = "default_point_metric")]
        metric: Metric,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x0: Option<X0Spec>,
    },
    /// Final error against `n`, relative to the single-agent run.
    Speedup {
        #[serde(rename = "T")]
        total: usize,
        n_list: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metric: Option<Metric>,
        #[serde(default = "default_stride")]
        record_stride: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x0: Option<X0Spec>,
    },
    /// Final error and convergence curve per strategy at the problem's `n`.
    StrategyCompare {
        #[serde(rename = "T")]
        total: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metric: Option<Metric>,
        #[serde(default = "default_stride")]
        record_stride: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x0: Option<X0Spec>,
    },
}

fn default_stride() -> usize {
    1
}

fn default_point_metric() -> Metric {
    Metric::E
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Bounds { .. } => "bounds",
            Experiment::RoundsToTarget { .. } => "rounds-to-target",
            Experiment::Speedup { .. } => "speedup",
            Experiment::StrategyCompare { .. } => "strategy-compare",
        }
    }

    fn x0(&self) -> Option<&X0Spec> {
        match self {
            Experiment::Bounds { x0, .. }
            | Experiment::RoundsToTarget { x0, .. }
            | Experiment::Speedup { x0, .. }
            | Experiment::StrategyCompare { x0, .. } => x0.as_ref(),
        }
    }
}

/// A fully specified experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub problem: ProblemSpec,
    pub schedules: Vec<ScheduleSpec>,
    pub stepsize: StepsizeSpec,
    pub seeds: Vec<u64>,
}

impl ExperimentSpec {
    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("seed list is empty".into()));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("seed list has duplicates".into()));
        }
        if self.schedules.is_empty() {
            return Err(Error::Config("no schedule given".into()));
        }
        match self.stepsize {
            StepsizeSpec::InverseTime { beta: Some(b) } if !(b > 0.0) || !b.is_finite() => {
                return Err(Error::Config(format!("beta must be > 0, got {b}")));
            }
            StepsizeSpec::Constant { c } if !(c > 0.0) || !c.is_finite() => {
                return Err(Error::Config(format!("c must be > 0, got {c}")));
            }
            _ => {}
        }
        let (total, n_list): (usize, Vec<usize>) = match &self.experiment {
            Experiment::Bounds { theorem, total, record_stride, .. } => {
                if !(1..=3).contains(theorem) {
                    return Err(Error::Config(format!("theorem must be 1, 2 or 3, got {theorem}")));
                }
                if self.schedules.len() != 1 {
                    return Err(Error::Config("a bounds experiment takes exactly one schedule".into()));
                }
                check_stride(*record_stride)?;
                (*total, vec![self.problem.n()])
            }
            Experiment::RoundsToTarget { t_max, threshold, metric, .. } => {
                if !(*threshold > 0.0) || !threshold.is_finite() {
                    return Err(Error::Config(format!("threshold must be > 0, got {threshold}")));
                }
                if metric.is_time_average() {
                    return Err(Error::Config("rounds-to-target needs a pointwise metric (r, e or h)".into()));
                }
                (*t_max, vec![self.problem.n()])
            }
            Experiment::Speedup { total, n_list, record_stride, .. } => {
                if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Config("n_list must be nonempty and strictly ascending".into()));
                }
                if n_list[0] != 1 {
                    return Err(Error::Config("n_list must start with the single-agent baseline n = 1".into()));
                }
                check_stride(*record_stride)?;
                (*total, n_list.clone())
            }
            Experiment::StrategyCompare { total, record_stride, .. } => {
                check_stride(*record_stride)?;
                (*total, vec![self.problem.n()])
            }
        };
        if total == 0 {
            return Err(Error::Config("T must be ≥ 1".into()));
        }
        for spec in &self.schedules {
            for &n in &n_list {
                spec.build(total, n).map_err(|e| Error::Config(format!("schedule {}: {e}", spec.label())))?;
            }
        }
        Ok(())
    }
}

fn check_stride(stride: usize) -> Result<()> {
    if stride == 0 {
        return Err(Error::Config("record_stride must be ≥ 1".into()));
    }
    Ok(())
}

/// One (problem, schedule) combination run across all seeds.
#[derive(Clone, Debug)]
pub struct Cell {
    pub label: String,
    pub n: usize,
    pub schedule: Schedule,
    pub stepsize: StepsizePolicy,
    pub runs: Vec<SeedRun>,
    pub aggregate: AggregateMetrics,
}

impl Cell {
    /// Seed mean and standard error of `metric` at the final time.
    pub fn final_error(&self, metric: Metric) -> Result<Stat> {
        let per_seed: Vec<f64> = self
            .runs
            .iter()
            .map(|run| {
                let last = run.metrics.records.last().expect("t = 0 is always recorded");
                match metric {
                    Metric::R => last.r.ok_or_else(|| Error::invalid("r_t is undefined for this family")),
                    Metric::E => Ok(last.e),
                    Metric::H => Ok(last.h),
                    Metric::MeanE | Metric::MeanH => {
                        let (e, h) = run.metrics.time_averages.ok_or_else(|| Error::invalid("time averages were not tracked"))?;
                        Ok(if metric == Metric::MeanE { e } else { h })
                    }
                }
            })
            .collect::<Result<_>>()?;
        Ok(Stat::of(&per_seed))
    }
}

/// Smallest β meeting both the per-round condition and `β ≥ 20L/μ`.
pub fn min_beta_guarded(schedule: &Schedule, mu: f64, l: f64) -> f64 {
    min_beta_thm1(schedule, mu, l).max(20.0 * l / mu)
}

/// β for an inverse-time run on `schedule`: explicit, or [`min_beta_guarded`].
pub fn resolve_beta(beta: Option<f64>, schedule: &Schedule, mu: f64, l: f64) -> f64 {
    beta.unwrap_or_else(|| min_beta_guarded(schedule, mu, l))
}

fn stepsize_policy(
    stepsize: &StepsizeSpec,
    schedule: &Schedule,
    constants: &ProblemConstants,
    n: usize,
) -> Result<StepsizePolicy> {
    match *stepsize {
        StepsizeSpec::InverseTime { beta } => {
            let mu = constants.mu.value;
            if !(mu > 0.0) {
                return Err(Error::invalid("inverse-time stepsize needs a strongly convex problem (mu > 0)"));
            }
            let beta = resolve_beta(beta, schedule, mu, constants.l.value);
            Ok(StepsizePolicy::InverseTime { mu, beta })
        }
        StepsizeSpec::Constant { c } => Ok(StepsizePolicy::Constant { c, n, total: schedule.total_steps() }),
    }
}

struct CellPlan<'a> {
    problem: &'a ProblemInstance,
    schedule: Schedule,
    stepsize: StepsizePolicy,
    x0: Vector,
    record_stride: usize,
    time_averages: bool,
    label: String,
}

fn run_cell(plan: CellPlan<'_>, seeds: &[u64]) -> Result<Cell> {
    let config = RunConfig {
        n: plan.problem.n(),
        schedule: plan.schedule.clone(),
        stepsize: plan.stepsize,
        x0: plan.x0,
        seed: 0,
        record_stride: plan.record_stride,
        time_averages: plan.time_averages,
    };
    let runs = run_seeds(plan.problem, &config, seeds)?;
    let aggregate = aggregate(&runs)?;
    Ok(Cell { label: plan.label, n: plan.problem.n(), schedule: plan.schedule, stepsize: plan.stepsize, runs, aggregate })
}

#[derive(Clone, Debug)]
pub struct BoundsOutcome {
    pub report: BoundReport,
    pub cell: Cell,
}

/// Runs one schedule and evaluates the matching bound. Refuses (without
/// running) when the theorem's schedule condition fails, and for the
/// strongly convex bound also when `β < 20L/μ`.
pub fn run_bounds_experiment(spec: &ExperimentSpec) -> Result<BoundsOutcome> {
    spec.validate()?;
    let Experiment::Bounds { theorem, total, record_stride, .. } = spec.experiment else {
        return Err(Error::Config(format!("expected a bounds experiment, got {}", spec.experiment.kind())));
    };
    let problem = spec.problem.build()?;
    let constants = problem.constants()?;
    let n = problem.n();
    let sched_spec = &spec.schedules[0];
    let schedule = sched_spec.build(total, n)?.schedule;
    let stepsize = stepsize_policy(&spec.stepsize, &schedule, &constants, n)?;
    let x0 = X0Spec::resolve(spec.experiment.x0(), &problem, &constants)?;
    let (l, mu) = (constants.l.value, constants.mu.value);

    let (rhs, stride) = match (theorem, stepsize) {
        (1, StepsizePolicy::InverseTime { beta, .. }) => {
            let report = check_thm1_condition(&schedule, mu, l, beta);
            if let Some(fail) = report.first_failure() {
                return Err(Error::Precondition {
                    check: "check_thm1_condition",
                    detail: format!(
                        "round {} has H = {} > μ(β + τ)/(12L) = {:.6} (β = {beta})",
                        fail.round, fail.interval, fail.cap
                    ),
                });
            }
            if beta < 20.0 * l / mu {
                return Err(Error::Precondition {
                    check: "check_thm1_condition",
                    detail: format!("β = {beta} is below the stepsize guard 20L/μ = {}", 20.0 * l / mu),
                });
            }
            let r0 = dist_sq(&x0, constants.x_star_ref()?);
            (thm1_rhs(r0, beta, n, total, mu, l, constants.sigma_bar_sq_value()?, &schedule)?, record_stride)
        }
        (2, StepsizePolicy::Constant { c, .. }) => {
            let check = check_thm2_condition(&schedule, l, c, n, total);
            if !check.pass {
                return Err(Error::Precondition {
                    check: "check_thm2_condition",
                    detail: format!("max H = {} exceeds √T/(7Lc√n) = {:.6}", check.max_interval, check.cap),
                });
            }
            let r0 = dist_sq(&x0, constants.x_star_ref()?);
            (thm2_rhs(r0, c, n, total, l, constants.sigma_bar_sq_value()?, &schedule)?, 1)
        }
        (3, StepsizePolicy::Constant { c, .. }) => {
            let missing = || Error::invalid("σ², G and B are needed for the nonconvex bound but this family lacks them");
            let sigma_sq = constants.sigma_sq.ok_or_else(missing)?.value;
            let g = constants.g.ok_or_else(missing)?.value;
            let b = constants.b.ok_or_else(missing)?.value;
            let check = check_thm3_condition(&schedule, l, b, c, n, total);
            if !check.pass {
                return Err(Error::Precondition {
                    check: "check_thm3_condition",
                    detail: format!("max H = {} exceeds √T/(7LBc√n) = {:.6}", check.max_interval, check.cap),
                });
            }
            let e0 = problem.global_value(&x0)? - constants.f_lower.value;
            (thm3_rhs(e0, c, n, total, l, sigma_sq, g, &schedule)?, 1)
        }
        (1, _) => return Err(Error::Config("the strongly convex bound needs the inverse-time stepsize".into())),
        _ => return Err(Error::Config(format!("theorem {theorem} needs the constant stepsize"))),
    };

    let cell = run_cell(
        CellPlan {
            problem: &problem,
            label: sched_spec.label(),
            schedule,
            stepsize,
            x0,
            record_stride: stride,
            time_averages: false,
        },
        &spec.seeds,
    )?;
    let agg = &cell.aggregate;
    let measured = match theorem {
        1 => agg.last().r.map(|s| s.mean).ok_or_else(|| Error::invalid("r_T is undefined for this family"))?,
        2 => agg.time_average(|r| r.e.mean)?,
        _ => agg.time_average(|r| r.h.mean)?,
    };
    Ok(BoundsOutcome { report: compare(measured, rhs, true), cell })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundsRow {
    pub strategy: String,
    pub reached: bool,
    pub rounds_used: Option<usize>,
    pub t_used: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct RoundsOutcome {
    pub rows: Vec<RoundsRow>,
    pub cells: Vec<Cell>,
}

/// First communication instant (or `t = 0`) at which `metric`'s seed mean
/// is ≤ `threshold`, as `(rounds used, iterations used)`.
pub fn first_crossing(agg: &AggregateMetrics, metric: Metric, threshold: f64) -> Result<Option<(usize, usize)>> {
    let mut rounds = 0;
    for rec in &agg.records {
        if rec.t > 0 && !rec.is_comm {
            continue;
        }
        if rec.is_comm {
            rounds += 1;
        }
        let value = match metric {
            Metric::R => rec.r.ok_or_else(|| Error::invalid("r_t is undefined for this family"))?.mean,
            Metric::E => rec.e.mean,
            Metric::H => rec.h.mean,
            _ => return Err(Error::invalid("crossings need a pointwise metric")),
        };
        if value <= threshold {
            return Ok(Some((rounds, rec.t)));
        }
    }
    Ok(None)
}

pub fn run_rounds_to_target(spec: &ExperimentSpec) -> Result<RoundsOutcome> {
    spec.validate()?;
    let Experiment::RoundsToTarget { t_max, threshold, metric, .. } = spec.experiment else {
        return Err(Error::Config(format!("expected a rounds-to-target experiment, got {}", spec.experiment.kind())));
    };
    let problem = spec.problem.build()?;
    let constants = problem.constants()?;
    let x0 = X0Spec::resolve(spec.experiment.x0(), &problem, &constants)?;
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for sched_spec in &spec.schedules {
        let schedule = sched_spec.build(t_max, problem.n())?.schedule;
        let stepsize = stepsize_policy(&spec.stepsize, &schedule, &constants, problem.n())?;
        let cell = run_cell(
            CellPlan {
                problem: &problem,
                label: sched_spec.label(),
                schedule,
                stepsize,
                x0: x0.clone(),
                // only communication instants and the endpoints are needed
                record_stride: t_max,
                time_averages: false,
            },
            &spec.seeds,
        )?;
        let crossing = first_crossing(&cell.aggregate, metric, threshold)?;
        rows.push(RoundsRow {
            strategy: cell.label.clone(),
            reached: crossing.is_some(),
            rounds_used: crossing.map(|c| c.0),
            t_used: crossing.map(|c| c.1),
        });
        cells.push(cell);
    }
    Ok(RoundsOutcome { rows, cells })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpeedupRow {
    pub n: usize,
    pub rounds: usize,
    pub strategy: String,
    pub mean_error: f64,
    pub stderr: f64,
    pub speedup: f64,
    /// Delta-method standard error of the ratio (cells are independent).
    pub speedup_stderr: f64,
    pub sqrt_n: f64,
    /// The round rule gave `R` outside `[1, T]` and was clamped.
    pub clamped: bool,
}

#[derive(Clone, Debug)]
pub struct SpeedupOutcome {
    pub metric: Metric,
    pub rows: Vec<SpeedupRow>,
    pub cells: Vec<Cell>,
}

/// For each strategy and each `n`, rebuilds the problem with `n` agents,
/// runs all seeds and divides the `n = 1` error by the error at `n`.
pub fn run_speedup_experiment(spec: &ExperimentSpec) -> Result<SpeedupOutcome> {
    spec.validate()?;
    let Experiment::Speedup { total, ref n_list, metric, record_stride, .. } = spec.experiment else {
        return Err(Error::Config(format!("expected a speedup experiment, got {}", spec.experiment.kind())));
    };
    let metric = metric.unwrap_or_else(|| Metric::default_for(spec.problem.family()));
    let problems = n_list
        .iter()
        .map(|&n| {
            let p = spec.problem.with_n(n).build()?;
            let c = p.constants()?;
            Ok((p, c))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for sched_spec in &spec.schedules {
        let mut baseline = None;
        for (problem, constants) in &problems {
            let n = problem.n();
            let built = sched_spec.build(total, n)?;
            let stepsize = stepsize_policy(&spec.stepsize, &built.schedule, constants, n)?;
            let x0 = X0Spec::resolve(spec.experiment.x0(), problem, constants)?;
            let cell = run_cell(
                CellPlan {
                    problem,
                    label: format!("{}-n{n}", sched_spec.label()),
                    schedule: built.schedule,
                    stepsize,
                    x0,
                    record_stride,
                    time_averages: metric.is_time_average(),
                },
                &spec.seeds,
            )?;
            let err = cell.final_error(metric)?;
            let base = *baseline.get_or_insert(err);
            let speedup = if n == 1 { 1.0 } else { base.mean / err.mean };
            let speedup_stderr = if n == 1 {
                0.0
            } else {
                speedup * ((base.se / base.mean).powi(2) + (err.se / err.mean).powi(2)).sqrt()
            };
            rows.push(SpeedupRow {
                n,
                rounds: cell.schedule.rounds(),
                strategy: sched_spec.label(),
                mean_error: err.mean,
                stderr: err.se,
                speedup,
                speedup_stderr,
                sqrt_n: (n as f64).sqrt(),
                clamped: built.clamped,
            });
            cells.push(cell);
        }
    }
    Ok(SpeedupOutcome { metric, rows, cells })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub strategy: String,
    pub rounds: usize,
    pub mean_error: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug)]
pub struct CompareOutcome {
    pub metric: Metric,
    pub rows: Vec<CompareRow>,
    pub cells: Vec<Cell>,
}

pub fn run_strategy_compare(spec: &ExperimentSpec) -> Result<CompareOutcome> {
    spec.validate()?;
    let Experiment::StrategyCompare { total, metric, record_stride, .. } = spec.experiment else {
        return Err(Error::Config(format!("expected a strategy-compare experiment, got {}", spec.experiment.kind())));
    };
    let metric = metric.unwrap_or_else(|| Metric::default_for(spec.problem.family()));
    let problem = spec.problem.build()?;
    let constants = problem.constants()?;
    let x0 = X0Spec::resolve(spec.experiment.x0(), &problem, &constants)?;
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for sched_spec in &spec.schedules {
        let schedule = sched_spec.build(total, problem.n())?.schedule;
        let stepsize = stepsize_policy(&spec.stepsize, &schedule, &constants, problem.n())?;
        let cell = run_cell(
            CellPlan {
                problem: &problem,
                label: sched_spec.label(),
                schedule,
                stepsize,
                x0: x0.clone(),
                record_stride,
                time_averages: metric.is_time_average(),
            },
            &spec.seeds,
        )?;
        let err = cell.final_error(metric)?;
        rows.push(CompareRow { strategy: cell.label.clone(), rounds: cell.schedule.rounds(), mean_error: err.mean, stderr: err.se });
        cells.push(cell);
    }
    Ok(CompareOutcome { metric, rows, cells })
}

/// Result of any experiment kind.
#[derive(Clone, Debug)]
pub enum Outcome {
    Bounds(BoundsOutcome),
    Rounds(RoundsOutcome),
    Speedup(SpeedupOutcome),
    Compare(CompareOutcome),
}

impl Outcome {
    pub fn cells(&self) -> Vec<&Cell> {
        match self {
            Outcome::Bounds(o) => vec![&o.cell],
            Outcome::Rounds(o) => o.cells.iter().collect(),
            Outcome::Speedup(o) => o.cells.iter().collect(),
            Outcome::Compare(o) => o.cells.iter().collect(),
        }
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Outcome> {
    Ok(match spec.experiment {
        Experiment::Bounds { .. } => Outcome::Bounds(run_bounds_experiment(spec)?),
        Experiment::RoundsToTarget { .. } => Outcome::Rounds(run_rounds_to_target(spec)?),
        Experiment::Speedup { .. } => Outcome::Speedup(run_speedup_experiment(spec)?),
        Experiment::StrategyCompare { .. } => Outcome::Compare(run_strategy_compare(spec)?),
    })
}
