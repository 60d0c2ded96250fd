//! Communication schedules.
//!
//! A schedule is the sequence `H_1, …, H_R` of local-step counts between
//! averaging rounds. Its prefix sums `τ_0 = 0 < τ_1 < … < τ_R = T` are the
//! communication instants.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::CompensatedSum;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    h: Vec<usize>,
    tau: Vec<usize>,
}

impl Schedule {
    /// Builds a schedule from explicit interval lengths.
    pub fn from_intervals(h: Vec<usize>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::invalid("schedule needs at least one round"));
        }
        if let Some(i) = h.iter().position(|&v| v == 0) {
            return Err(Error::invalid(format!("interval {} is zero; every H_i must be ≥ 1", i + 1)));
        }
        let mut tau = Vec::with_capacity(h.len() + 1);
        tau.push(0);
        let mut acc = 0usize;
        for &v in &h {
            acc = acc
                .checked_add(v)
                .ok_or_else(|| Error::invalid("schedule total overflows"))?;
            tau.push(acc);
        }
        Ok(Schedule { h, tau })
    }

    /// Interval lengths `H_1..H_R`.
    pub fn intervals(&self) -> &[usize] {
        &self.h
    }

    /// Prefix sums `τ_0..τ_R`.
    pub fn instants(&self) -> &[usize] {
        &self.tau
    }

    pub fn rounds(&self) -> usize {
        self.h.len()
    }

    pub fn total_steps(&self) -> usize {
        *self.tau.last().expect("tau is never empty")
    }

    pub fn max_interval(&self) -> usize {
        self.h.iter().copied().max().unwrap_or(0)
    }

    /// `k(t)`: the index with `τ_k ≤ t < τ_{k+1}`.
    pub fn round_index(&self, t: usize) -> Result<usize> {
        let total = self.total_steps();
        if t >= total {
            return Err(Error::TimeOutOfRange { t, total });
        }
        Ok(self.tau.partition_point(|&x| x <= t) - 1)
    }

    pub fn is_instant(&self, t: usize) -> bool {
        self.tau.binary_search(&t).is_ok()
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.h.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

/// `R` intervals of `⌈T/R⌉` then `⌊T/R⌋` steps.
pub fn fixed_schedule(total: usize, rounds: usize) -> Result<Schedule> {
    if rounds == 0 || rounds > total {
        return Err(Error::invalid(format!("fixed schedule needs 1 ≤ R ≤ T, got R={rounds}, T={total}")));
    }
    let (base, extra) = (total / rounds, total % rounds);
    Schedule::from_intervals((0..rounds).map(|i| base + usize::from(i < extra)).collect())
}

/// Constant interval `h`, the final interval truncated so the total is `T`.
pub fn fixed_interval_schedule(total: usize, h: usize) -> Result<Schedule> {
    if h == 0 || total == 0 {
        return Err(Error::invalid("fixed interval schedule needs H ≥ 1 and T ≥ 1"));
    }
    let mut intervals = vec![h; total / h];
    if !total.is_multiple_of(h) {
        intervals.push(total % h);
    }
    Schedule::from_intervals(intervals)
}

/// `H_i = max(1, ⌊a·i^s⌋)` until the total reaches `T`; the last interval
/// absorbs the overshoot.
pub fn increasing_power_schedule(a: f64, s: f64, total: usize) -> Result<Schedule> {
    if !(a > 0.0) || !a.is_finite() || !(s >= 0.0) || !s.is_finite() || total == 0 {
        return Err(Error::invalid(format!("increasing schedule needs a > 0, s ≥ 0, T ≥ 1 (a={a}, s={s}, T={total})")));
    }
    let mut h = Vec::new();
    let mut acc = 0usize;
    let mut i = 1usize;
    while acc < total {
        let raw = (a * (i as f64).powf(s)).floor();
        let step = if raw >= 1.0 { raw.min((total - acc) as f64) as usize } else { 1 };
        let step = step.min(total - acc);
        h.push(step);
        acc += step;
        i += 1;
    }
    Schedule::from_intervals(h)
}

/// Scales `weights` to sum to `T` and rounds by largest remainder, keeping
/// every interval ≥ 1. Ties go to the lower index.
pub fn weighted_schedule(weights: &[f64], total: usize) -> Result<Schedule> {
    let rounds = weights.len();
    if rounds == 0 || total < rounds {
        return Err(Error::invalid(format!("need 1 ≤ R ≤ T, got R={rounds}, T={total}")));
    }
    if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(Error::invalid("weights must be finite and ≥ 0"));
    }
    let sum: f64 = weights.iter().sum();
    let targets: Vec<f64> = if sum > 0.0 {
        weights.iter().map(|w| w / sum * total as f64).collect()
    } else {
        vec![total as f64 / rounds as f64; rounds]
    };
    let mut h: Vec<usize> = targets.iter().map(|t| (t.floor() as usize).max(1)).collect();
    // measured against the clamped value so rounds lifted to 1 rank last
    let remainder = |i: usize, h: &[usize]| targets[i] - h[i] as f64;
    let mut assigned: usize = h.iter().sum();
    if assigned < total {
        let mut order: Vec<usize> = (0..rounds).collect();
        order.sort_by(|&x, &y| remainder(y, &h).total_cmp(&remainder(x, &h)).then(x.cmp(&y)));
        for &i in order.iter().cycle() {
            if assigned == total {
                break;
            }
            h[i] += 1;
            assigned += 1;
        }
    } else if assigned > total {
        // clamping to 1 overshot; take back from the smallest remainders
        let mut order: Vec<usize> = (0..rounds).collect();
        order.sort_by(|&x, &y| remainder(x, &h).total_cmp(&remainder(y, &h)).then(y.cmp(&x)));
        while assigned > total {
            for &i in &order {
                if assigned == total {
                    break;
                }
                if h[i] > 1 {
                    h[i] -= 1;
                    assigned -= 1;
                }
            }
        }
    }
    Schedule::from_intervals(h)
}

/// `H_i ∝ (R − i + 1)^p`.
pub fn decreasing_power_schedule(p: f64, rounds: usize, total: usize) -> Result<Schedule> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::invalid(format!("decreasing schedule needs p ≥ 0, got {p}")));
    }
    if rounds == 0 || total < rounds {
        return Err(Error::invalid(format!("cannot give each of {rounds} rounds a step within T={total}")));
    }
    let weights: Vec<f64> = (1..=rounds).map(|i| ((rounds - i + 1) as f64).powf(p)).collect();
    weighted_schedule(&weights, total)
}

/// `H_i ∝ i^p` over a fixed number of rounds.
pub fn increasing_rounds_schedule(p: f64, rounds: usize, total: usize) -> Result<Schedule> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::invalid(format!("increasing schedule needs p ≥ 0, got {p}")));
    }
    if rounds == 0 || total < rounds {
        return Err(Error::invalid(format!("cannot give each of {rounds} rounds a step within T={total}")));
    }
    let weights: Vec<f64> = (1..=rounds).map(|i| (i as f64).powf(p)).collect();
    weighted_schedule(&weights, total)
}

/// `β = a·⌈24L/μ⌉^s·12L/μ + 1`, which makes every round of
/// [`increasing_power_schedule`] meet [`check_thm1_condition`].
pub fn beta_for_increasing(a: f64, s: f64, mu: f64, l: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::invalid(format!("mu must be > 0, got {mu}")));
    }
    // L < mu is accepted: the formula stays well defined
    if !(l > 0.0) || !(a > 0.0) || !(s > 0.0) {
        return Err(Error::invalid(format!("need L > 0, a > 0, s > 0 (L={l}, a={a}, s={s})")));
    }
    let k = (24.0 * l / mu).ceil();
    Ok(a * k.powf(s) * 12.0 * l / mu + 1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundCheck {
    pub round: usize,
    pub interval: usize,
    pub cap: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub rounds: Vec<RoundCheck>,
    pub all_pass: bool,
}

impl ConditionReport {
    pub fn first_failure(&self) -> Option<&RoundCheck> {
        self.rounds.iter().find(|r| !r.pass)
    }
}

/// Per round: `H_i ≤ μ(β + τ_{i−1})/(12L)`.
pub fn check_thm1_condition(schedule: &Schedule, mu: f64, l: f64, beta: f64) -> ConditionReport {
    let rounds: Vec<RoundCheck> = schedule
        .intervals()
        .iter()
        .zip(schedule.instants())
        .enumerate()
        .map(|(i, (&h, &tau_prev))| {
            let cap = mu * (beta + tau_prev as f64) / (12.0 * l);
            RoundCheck { round: i + 1, interval: h, cap, pass: h as f64 <= cap }
        })
        .collect();
    let all_pass = rounds.iter().all(|r| r.pass);
    ConditionReport { rounds, all_pass }
}

/// Smallest `β` for which [`check_thm1_condition`] passes.
pub fn min_beta_thm1(schedule: &Schedule, mu: f64, l: f64) -> f64 {
    let mut beta = schedule
        .intervals()
        .iter()
        .zip(schedule.instants())
        .map(|(&h, &tau_prev)| 12.0 * l * h as f64 / mu - tau_prev as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    while !check_thm1_condition(schedule, mu, l, beta).all_pass {
        beta = beta.next_up();
    }
    beta
}

/// Uniform cap check: `max_i H_i ≤ cap`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapCheck {
    pub cap: f64,
    pub max_interval: usize,
    pub pass: bool,
}

/// `max H_i ≤ √T/(7Lc√n)`.
pub fn check_thm2_condition(schedule: &Schedule, l: f64, c: f64, n: usize, total: usize) -> CapCheck {
    check_thm3_condition(schedule, l, 1.0, c, n, total)
}

/// `max H_i ≤ √T/(7LBc√n)`.
pub fn check_thm3_condition(schedule: &Schedule, l: f64, b: f64, c: f64, n: usize, total: usize) -> CapCheck {
    let cap = (total as f64).sqrt() / (7.0 * l * b * c * (n as f64).sqrt());
    let max_interval = schedule.max_interval();
    CapCheck { cap, max_interval, pass: max_interval as f64 <= cap }
}

/// `Σ_i H_i³ / (τ_{i−1} + β)`.
pub fn weighted_cubic_sum(schedule: &Schedule, beta: f64) -> f64 {
    schedule
        .intervals()
        .iter()
        .zip(schedule.instants())
        .map(|(&h, &tau_prev)| (h as f64).powi(3) / (tau_prev as f64 + beta))
        .collect::<CompensatedSum>()
        .value()
}

/// `Σ_i H_i³`, accumulated in 128-bit integers.
pub fn cubic_sum(schedule: &Schedule) -> f64 {
    schedule.intervals().iter().map(|&h| (h as u128).pow(3)).sum::<u128>() as f64
}

/// Rule `R = ⌊coef · T^t_exp · n^n_exp⌋`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundsRule {
    pub coef: f64,
    pub t_exp: f64,
    pub n_exp: f64,
}

impl RoundsRule {
    /// Returns `R` clamped to `[1, T]` and whether clamping happened.
    pub fn rounds(&self, total: usize, n: usize) -> (usize, bool) {
        let raw = (self.coef * (total as f64).powf(self.t_exp) * (n as f64).powf(self.n_exp)).floor();
        if raw < 1.0 {
            (1, true)
        } else if raw > total as f64 {
            (total, true)
        } else {
            (raw as usize, false)
        }
    }
}

/// Either an explicit round count or a rule producing one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RoundCount {
    Exact(usize),
    Rule(RoundsRule),
}

impl RoundCount {
    fn resolve(&self, total: usize, n: usize) -> (usize, bool) {
        match self {
            RoundCount::Exact(r) => (*r, false),
            RoundCount::Rule(rule) => rule.rounds(total, n),
        }
    }
}

/// Schedule description as it appears in configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScheduleSpec {
    /// Equal intervals: either `R` rounds or a constant interval `H`.
    Fixed {
        #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
        rounds: Option<RoundCount>,
        #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
        interval: Option<usize>,
    },
    /// `H_i = max(1, ⌊a i^s⌋)`.
    Increasing { a: f64, s: f64 },
    /// `H_i ∝ i^p` over `R` rounds.
    IncreasingPower {
        p: f64,
        #[serde(rename = "R")]
        rounds: RoundCount,
    },
    /// `H_i ∝ (R − i + 1)^p` over `R` rounds.
    Decreasing {
        p: f64,
        #[serde(rename = "R")]
        rounds: RoundCount,
    },
    Explicit {
        #[serde(rename = "H")]
        intervals: Vec<usize>,
    },
}

/// A built schedule plus whether a round rule had to be clamped to `[1, T]`.
#[derive(Clone, Debug)]
pub struct BuiltSchedule {
    pub schedule: Schedule,
    pub clamped: bool,
}

impl ScheduleSpec {
    /// Builds the schedule for horizon `T` and `n` agents.
    pub fn build(&self, total: usize, n: usize) -> Result<BuiltSchedule> {
        let (schedule, clamped) = match self {
            ScheduleSpec::Fixed { rounds: Some(r), interval: None } => {
                let (r, clamped) = r.resolve(total, n);
                (fixed_schedule(total, r)?, clamped)
            }
            ScheduleSpec::Fixed { rounds: None, interval: Some(h) } => (fixed_interval_schedule(total, *h)?, false),
            ScheduleSpec::Fixed { .. } => {
                return Err(Error::invalid("fixed schedule takes exactly one of R or H"));
            }
            ScheduleSpec::Increasing { a, s } => (increasing_power_schedule(*a, *s, total)?, false),
            ScheduleSpec::IncreasingPower { p, rounds } => {
                let (r, clamped) = rounds.resolve(total, n);
                (increasing_rounds_schedule(*p, r, total)?, clamped)
            }
            ScheduleSpec::Decreasing { p, rounds } => {
                let (r, clamped) = rounds.resolve(total, n);
                (decreasing_power_schedule(*p, r, total)?, clamped)
            }
            ScheduleSpec::Explicit { intervals } => {
                let s = Schedule::from_intervals(intervals.clone())?;
                if s.total_steps() != total {
                    return Err(Error::invalid(format!(
                        "explicit H list sums to {} but T = {total}; Σ H_i must equal T",
                        s.total_steps()
                    )));
                }
                (s, false)
            }
        };
        Ok(BuiltSchedule { schedule, clamped })
    }

    /// Short label for output rows.
    pub fn label(&self) -> String {
        match self {
            ScheduleSpec::Fixed { interval: Some(h), .. } => format!("fixed-H{h}"),
            ScheduleSpec::Fixed { rounds: Some(RoundCount::Exact(r)), .. } => format!("fixed-R{r}"),
            ScheduleSpec::Fixed { rounds: Some(RoundCount::Rule(rule)), .. } => format!("fixed-n^{}", rule.n_exp),
            ScheduleSpec::Fixed { .. } => "fixed".to_string(),
            ScheduleSpec::Increasing { a, s } => format!("increasing-a{a}-s{s}"),
            ScheduleSpec::IncreasingPower { p, rounds } => format!("increasing-p{p}{}", rounds_suffix(rounds)),
            ScheduleSpec::Decreasing { p, rounds } => format!("decreasing-p{p}{}", rounds_suffix(rounds)),
            ScheduleSpec::Explicit { .. } => "explicit".to_string(),
        }
    }
}

fn rounds_suffix(r: &RoundCount) -> String {
    match r {
        RoundCount::Exact(r) => format!("-R{r}"),
        RoundCount::Rule(rule) => format!("-n^{}", rule.n_exp),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h(v: &[usize]) -> Schedule {
        Schedule::from_intervals(v.to_vec()).unwrap()
    }

    #[test]
    fn fixed_examples() {
        assert_eq!(fixed_schedule(100, 10).unwrap().intervals(), &[10; 10]);
        assert_eq!(fixed_schedule(10, 3).unwrap().intervals(), &[4, 3, 3]);
        assert_eq!(fixed_schedule(5, 5).unwrap().intervals(), &[1; 5]);
        assert!(fixed_schedule(3, 4).is_err());
        assert!(fixed_schedule(3, 0).is_err());
    }

    #[test]
    fn fixed_interval_truncates() {
        assert_eq!(fixed_interval_schedule(10, 4).unwrap().intervals(), &[4, 4, 2]);
        assert_eq!(fixed_interval_schedule(8, 4).unwrap().intervals(), &[4, 4]);
    }

    #[test]
    fn increasing_examples() {
        assert_eq!(increasing_power_schedule(1.0, 1.0, 10).unwrap().intervals(), &[1, 2, 3, 4]);
        assert_eq!(increasing_power_schedule(10.0, 0.2, 30).unwrap().intervals(), &[10, 11, 9]);
        // tiny a is floored to unit intervals
        assert_eq!(increasing_power_schedule(0.1, 1.0, 5).unwrap().intervals(), &[1; 5]);
        // s = 0 gives constant ⌊a⌋ intervals
        assert_eq!(increasing_power_schedule(3.0, 0.0, 7).unwrap().intervals(), &[3, 3, 1]);
        assert!(increasing_power_schedule(0.0, 1.0, 5).is_err());
    }

    #[test]
    fn decreasing_examples() {
        assert_eq!(decreasing_power_schedule(0.0, 5, 10).unwrap().intervals(), &[2; 5]);
        assert_eq!(decreasing_power_schedule(1.0, 3, 12).unwrap().intervals(), &[6, 4, 2]);
        assert_eq!(decreasing_power_schedule(2.0, 2, 5).unwrap().intervals(), &[4, 1]);
        assert!(decreasing_power_schedule(1.0, 6, 5).is_err());
    }

    #[test]
    fn decreasing_keeps_tail_rounds_alive() {
        // weights 100, 81, …, 1 would round the last rounds to 0
        let s = decreasing_power_schedule(2.0, 10, 40).unwrap();
        assert_eq!(s.total_steps(), 40);
        assert!(s.intervals().iter().all(|&v| v >= 1));
        assert!(s.intervals().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_for_increasing(1.0, 1.0, 24.0, 1.0).unwrap(), 1.5);
        let b = beta_for_increasing(10.0, 0.2, 0.001, 1.0).unwrap();
        let expected = 10.0 * 24000f64.powf(0.2) * 12000.0 + 1.0;
        assert!((b - expected).abs() <= 1e-14 * expected);
        assert!((b - 9.02e5).abs() < 0.01e5);
        assert!(beta_for_increasing(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(beta_for_increasing(1e-9, 0.5, 1.0, 1.0).unwrap() > 1.0);
    }

    #[test]
    fn thm1_condition_examples() {
        let report = check_thm1_condition(&h(&[1; 10]), 1.0, 1.0, 12.0);
        assert!(report.all_pass);
        let report = check_thm1_condition(&h(&[2]), 1.0, 1.0, 12.0);
        assert!(!report.all_pass);
        assert_eq!(report.first_failure().unwrap().round, 1);
    }

    #[test]
    fn min_beta_is_tight() {
        let s = h(&[3, 1, 7, 2]);
        let beta = min_beta_thm1(&s, 0.5, 2.0);
        assert!(check_thm1_condition(&s, 0.5, 2.0, beta).all_pass);
        assert!(!check_thm1_condition(&s, 0.5, 2.0, beta.next_down()).all_pass);
    }

    #[test]
    fn increasing_schedule_meets_condition_with_formula_beta() {
        for &(a, s) in &[(1.0, 0.5), (10.0, 0.2), (2.0, 1.0)] {
            let beta = beta_for_increasing(a, s, 0.1, 1.0).unwrap();
            let sched = increasing_power_schedule(a, s, 20_000).unwrap();
            assert!(check_thm1_condition(&sched, 0.1, 1.0, beta).all_pass);
        }
    }

    #[test]
    fn thm2_thm3_caps() {
        // cap = √4900/(7·1·1·√4) = 5
        let pass = check_thm2_condition(&fixed_schedule(4900, 980).unwrap(), 1.0, 1.0, 4, 4900);
        assert_eq!(pass.cap, 5.0);
        assert!(pass.pass);
        let mut v = vec![5; 980];
        v[0] = 6;
        v[1] = 4;
        assert!(!check_thm2_condition(&h(&v), 1.0, 1.0, 4, 4900).pass);
        let s = h(&v);
        assert_eq!(check_thm3_condition(&s, 1.0, 1.0, 1.0, 4, 4900), check_thm2_condition(&s, 1.0, 1.0, 4, 4900));
        // cap 1
        assert!(check_thm2_condition(&h(&[1; 49]), 1.0, 1.0, 1, 49).pass);
        let mut v = vec![1; 47];
        v.push(2);
        assert!(!check_thm2_condition(&h(&v), 1.0, 1.0, 1, 49).pass);
    }

    #[test]
    fn sums() {
        assert_eq!(weighted_cubic_sum(&h(&[1, 1, 1]), 1.0), 11.0 / 6.0);
        assert_eq!(weighted_cubic_sum(&h(&[2, 3]), 4.0), 6.5);
        assert_eq!(weighted_cubic_sum(&h(&[50]), 7.0), 125000.0 / 7.0);
        assert_eq!(cubic_sum(&h(&[10; 10])), 10000.0);
        assert_eq!(cubic_sum(&h(&[1, 2, 3, 4])), 100.0);
        assert_eq!(cubic_sum(&h(&[123_456])), 123_456f64.powi(3));
    }

    #[test]
    fn round_index_cases() {
        let s = h(&[3, 2]);
        assert_eq!(s.round_index(0).unwrap(), 0);
        assert_eq!(s.round_index(2).unwrap(), 0);
        assert_eq!(s.round_index(3).unwrap(), 1);
        assert_eq!(s.round_index(4).unwrap(), 1);
        assert!(s.round_index(5).is_err());
        assert_eq!(s.instants(), &[0, 3, 5]);
        assert_eq!(s.to_string(), "3,2");
    }

    #[test]
    fn rejects_zero_intervals() {
        assert!(Schedule::from_intervals(vec![]).is_err());
        assert!(Schedule::from_intervals(vec![1, 0]).is_err());
    }

    #[test]
    fn spec_parsing_and_build() {
        let s: ScheduleSpec = serde_json::from_str(r#"{"strategy":"increasing","a":10,"s":0.2}"#).unwrap();
        assert_eq!(s.build(30, 1).unwrap().schedule.intervals(), &[10, 11, 9]);

        let s: ScheduleSpec =
            serde_json::from_str(r#"{"strategy":"fixed","R":{"coef":0.2,"t_exp":0.75,"n_exp":0.75}}"#).unwrap();
        let built = s.build(4000, 16).unwrap();
        let expected = (0.2 * 4000f64.powf(0.75) * 16f64.powf(0.75)).floor() as usize;
        assert_eq!(built.schedule.rounds(), expected);
        assert!(!built.clamped);

        let s: ScheduleSpec = serde_json::from_str(r#"{"strategy":"explicit","H":[1,2,3]}"#).unwrap();
        assert!(s.build(6, 1).is_ok());
        let err = s.build(7, 1).unwrap_err().to_string();
        assert!(err.contains("Σ H_i must equal T"), "{err}");

        assert!(serde_json::from_str::<ScheduleSpec>(r#"{"strategy":"fixed","R":3,"bogus":1}"#).is_err());
        let both: ScheduleSpec = serde_json::from_str(r#"{"strategy":"fixed","R":3,"H":2}"#).unwrap();
        assert!(both.build(6, 1).is_err());

        let rule = RoundsRule { coef: 1.0, t_exp: 1.0, n_exp: 1.0 };
        assert_eq!(rule.rounds(10, 4), (10, true));
    }

    fn naive_cubic(h: &[usize]) -> f64 {
        let mut total = 0.0;
        for &v in h {
            total += (v * v * v) as f64;
        }
        total
    }

    fn naive_weighted(h: &[usize], beta: f64) -> f64 {
        let mut total = 0.0;
        let mut prefix = 0.0;
        for &v in h {
            total += (v * v * v) as f64 / (prefix + beta);
            prefix += v as f64;
        }
        total
    }

    proptest! {
        #[test]
        fn generators_sum_to_total(total in 1usize..3000, r_frac in 0.0f64..1.0, a in 0.1f64..20.0, s in 0.0f64..2.5, p in 0.0f64..3.0) {
            let rounds = 1 + ((total - 1) as f64 * r_frac) as usize;
            for sched in [
                fixed_schedule(total, rounds).unwrap(),
                increasing_power_schedule(a, s, total).unwrap(),
                decreasing_power_schedule(p, rounds, total).unwrap(),
                increasing_rounds_schedule(p, rounds, total).unwrap(),
            ] {
                prop_assert_eq!(sched.total_steps(), total);
                prop_assert!(sched.intervals().iter().all(|&v| v >= 1));
                prop_assert!(sched.instants().windows(2).all(|w| w[0] < w[1]));
            }
        }

        #[test]
        fn fixed_is_locally_cubic_optimal(total in 2usize..2000, r_frac in 0.0f64..1.0) {
            let rounds = 1 + ((total - 1) as f64 * r_frac) as usize;
            let sched = fixed_schedule(total, rounds).unwrap();
            let base = cubic_sum(&sched);
            let h = sched.intervals();
            for from in 0..h.len().min(6) {
                for to in 0..h.len().min(6) {
                    if from == to || h[from] == 1 { continue; }
                    let mut moved = h.to_vec();
                    moved[from] -= 1;
                    moved[to] += 1;
                    prop_assert!(naive_cubic(&moved) >= base);
                }
            }
        }

        #[test]
        fn thm1_monotone_in_beta(h in proptest::collection::vec(1usize..20, 1..30), beta in 1.0f64..500.0, extra in 0.0f64..500.0, mu in 0.01f64..1.0) {
            let s = Schedule::from_intervals(h).unwrap();
            if check_thm1_condition(&s, mu, 1.0, beta).all_pass {
                prop_assert!(check_thm1_condition(&s, mu, 1.0, beta + extra).all_pass);
            }
        }

        #[test]
        fn sums_match_naive(h in proptest::collection::vec(1usize..200, 1..100), beta in 0.5f64..1e4) {
            let s = Schedule::from_intervals(h.clone()).unwrap();
            let w = weighted_cubic_sum(&s, beta);
            prop_assert!((w - naive_weighted(&h, beta)).abs() <= 1e-12 * w);
            prop_assert_eq!(cubic_sum(&s), naive_cubic(&h));
        }

        #[test]
        fn round_index_matches_scan(h in proptest::collection::vec(1usize..10, 1..20)) {
            let s = Schedule::from_intervals(h.clone()).unwrap();
            let mut t = 0;
            for (k, &len) in h.iter().enumerate() {
                for _ in 0..len {
                    prop_assert_eq!(s.round_index(t).unwrap(), k);
                    t += 1;
                }
            }
        }
    }
}
