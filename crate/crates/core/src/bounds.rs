//! Right-hand sides of the three convergence-rate bounds, term by term.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schedules::{cubic_sum, weighted_cubic_sum, Schedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Theorem {
    /// Strongly convex, bound on `r_T`.
    StronglyConvex,
    /// Convex, bound on the time average of `e_t`.
    Convex,
    /// Nonconvex, bound on the time average of `h_t`.
    Nonconvex,
}

impl Theorem {
    pub fn number(self) -> u8 {
        match self {
            Theorem::StronglyConvex => 1,
            Theorem::Convex => 2,
            Theorem::Nonconvex => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Term {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhsTerms {
    pub theorem: Theorem,
    pub terms: Vec<Term>,
    pub total: f64,
}

impl RhsTerms {
    fn new(theorem: Theorem, terms: Vec<Term>) -> Self {
        let total = terms.iter().map(|t| t.value).sum();
        RhsTerms { theorem, terms, total }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }
}

fn check_horizon(schedule: &Schedule, total: usize) -> Result<()> {
    if schedule.total_steps() != total {
        return Err(Error::invalid(format!("schedule covers {} steps but T = {total}", schedule.total_steps())));
    }
    Ok(())
}

/// `r_T ≤ (β−1)²r_0/T² + 12σ̄²/(nμ²T) + 144Lσ̄²/(μ³T²)·Σ H_i³/(τ_{i−1}+β)`.
#[allow(clippy::too_many_arguments)]
pub fn thm1_rhs(
    r0: f64,
    beta: f64,
    n: usize,
    total: usize,
    mu: f64,
    l: f64,
    sigma_bar_sq: f64,
    schedule: &Schedule,
) -> Result<RhsTerms> {
    if !(mu > 0.0) {
        return Err(Error::invalid(format!("mu must be > 0, got {mu}")));
    }
    check_horizon(schedule, total)?;
    let (t, nf) = (total as f64, n as f64);
    let init = (beta - 1.0).powi(2) * r0 / (t * t);
    let noise = 12.0 * sigma_bar_sq / (nf * mu * mu * t);
    let sched = 144.0 * l * sigma_bar_sq / (mu.powi(3) * t * t) * weighted_cubic_sum(schedule, beta);
    Ok(RhsTerms::new(
        Theorem::StronglyConvex,
        vec![
            Term { name: "init", value: init },
            Term { name: "noise", value: noise },
            Term { name: "schedule", value: sched },
        ],
    ))
}

/// `(1/T)Σ e_t ≤ (2r_0 + 6c²σ̄²)/(c√(nT)) + 24Lσ̄²c²n/T²·Σ H_i³`.
pub fn thm2_rhs(r0: f64, c: f64, n: usize, total: usize, l: f64, sigma_bar_sq: f64, schedule: &Schedule) -> Result<RhsTerms> {
    if !(c > 0.0) {
        return Err(Error::invalid(format!("c must be > 0, got {c}")));
    }
    check_horizon(schedule, total)?;
    let (t, nf) = (total as f64, n as f64);
    let lead = (2.0 * r0 + 6.0 * c * c * sigma_bar_sq) / (c * (nf * t).sqrt());
    let sched = 24.0 * l * sigma_bar_sq * c * c * nf / (t * t) * cubic_sum(schedule);
    Ok(RhsTerms::new(
        Theorem::Convex,
        vec![Term { name: "init-noise", value: lead }, Term { name: "schedule", value: sched }],
    ))
}

/// `(1/T)Σ h_t ≤ (8e_0 + 4c²σ²)/(c√(nT)) + 48L²(σ²+G²)c²n/T²·Σ H_i³`.
#[allow(clippy::too_many_arguments)]
pub fn thm3_rhs(
    e0: f64,
    c: f64,
    n: usize,
    total: usize,
    l: f64,
    sigma_sq: f64,
    g: f64,
    schedule: &Schedule,
) -> Result<RhsTerms> {
    if !(c > 0.0) {
        return Err(Error::invalid(format!("c must be > 0, got {c}")));
    }
    check_horizon(schedule, total)?;
    let (t, nf) = (total as f64, n as f64);
    let lead = (8.0 * e0 + 4.0 * c * c * sigma_sq) / (c * (nf * t).sqrt());
    let sched = 48.0 * l * l * (sigma_sq + g * g) * c * c * nf / (t * t) * cubic_sum(schedule);
    Ok(RhsTerms::new(
        Theorem::Nonconvex,
        vec![Term { name: "init-noise", value: lead }, Term { name: "schedule", value: sched }],
    ))
}

/// Measured quantity set against a bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub terms: Vec<Term>,
    pub total: f64,
    pub measured: f64,
    pub margin: f64,
    pub precondition_pass: bool,
    /// The precondition failed, so the theorem says nothing about this run.
    pub vacuous: bool,
    pub holds: bool,
}

pub fn compare(measured: f64, rhs: RhsTerms, precondition_pass: bool) -> BoundReport {
    let margin = rhs.total - measured;
    BoundReport {
        theorem: rhs.theorem,
        terms: rhs.terms,
        total: rhs.total,
        measured,
        margin,
        precondition_pass,
        vacuous: !precondition_pass,
        holds: margin >= 0.0,
    }
}
