//! Heterogeneous synthetic objective families.
//!
//! Every family is a set of `n` local objectives `f_i` over R^d with an
//! unbiased stochastic gradient oracle. The global objective is their mean.
//! Each family also knows its problem constants: smoothness, strong
//! convexity, the optimum-noise level `σ̄²` (mean second moment of local
//! stochastic gradients at `x*`), and the bounded-gradient-dissimilarity
//! pair `(G, B)` where those are available in closed form.

mod logistic;
mod quadratic;
mod spec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

pub use logistic::make_logistic_family;
pub use quadratic::{make_convex_quadratics, make_nonconvex_family, make_strongly_convex_quadratics};
pub use spec::ProblemSpec;

use logistic::LogisticShards;
use quadratic::{DiagonalQuadratics, SinusoidQuadratics};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    StronglyConvexQuadratic,
    ConvexQuadratic,
    NonconvexQuadraticSinusoid,
    SyntheticLogistic,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::StronglyConvexQuadratic => "strongly-convex-quadratic",
            Family::ConvexQuadratic => "convex-quadratic",
            Family::NonconvexQuadraticSinusoid => "nonconvex-quadratic-sinusoid",
            Family::SyntheticLogistic => "synthetic-logistic",
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Model {
    Quadratic(DiagonalQuadratics),
    Sinusoid(SinusoidQuadratics),
    Logistic(LogisticShards),
}

/// An immutable family of `n` local objectives.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    family: Family,
    n: usize,
    d: usize,
    model: Model,
    sigma_noise: f64,
    construction_seed: u64,
}

/// How a constant was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Analytic,
    NumericOracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub value: f64,
    pub provenance: Provenance,
}

impl Constant {
    pub(crate) fn analytic(value: f64) -> Self {
        Constant { value, provenance: Provenance::Analytic }
    }

    pub(crate) fn numeric(value: f64) -> Self {
        Constant { value, provenance: Provenance::NumericOracle }
    }
}

/// Problem constants. Fields that a family cannot provide are `None`:
/// the nonconvex family has no unique optimum, and the logistic family has
/// no closed-form `σ²` or `(G, B)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemConstants {
    pub l: Constant,
    pub mu: Constant,
    pub sigma_bar_sq: Option<Constant>,
    pub sigma_sq: Option<Constant>,
    pub g: Option<Constant>,
    pub b: Option<Constant>,
    pub x_star: Option<Vector>,
    pub x_star_provenance: Option<Provenance>,
    pub f_star: Option<Constant>,
    /// A certified lower bound on `inf f`; equals `f*` when that is known.
    pub f_lower: Constant,
}

impl ProblemConstants {
    pub fn sigma_bar_sq_value(&self) -> Result<f64> {
        self.sigma_bar_sq
            .map(|c| c.value)
            .ok_or_else(|| Error::invalid("σ̄² is undefined for this family (no unique optimum)"))
    }

    pub fn x_star_ref(&self) -> Result<&Vector> {
        self.x_star
            .as_ref()
            .ok_or_else(|| Error::invalid("x* is undefined for this family"))
    }
}

impl ProblemInstance {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn sigma_noise(&self) -> f64 {
        self.sigma_noise
    }

    pub fn construction_seed(&self) -> u64 {
        self.construction_seed
    }

    fn check_agent(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::AgentOutOfRange { index: i, n: self.n });
        }
        Ok(())
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("point has non-finite components"));
        }
        Ok(())
    }

    /// Stochastic gradient of agent `i` (0-based) at `x`.
    pub fn local_stochastic_grad<R: Rng + ?Sized>(&self, i: usize, x: &[f64], rng: &mut R) -> Result<Vector> {
        self.check_agent(i)?;
        self.check_point(x)?;
        let mut out = vec![0.0; self.d];
        self.stochastic_grad_into(i, x, rng, &mut out);
        Ok(Vector::from_raw(out))
    }

    /// Unchecked variant of [`Self::local_stochastic_grad`] writing into `out`.
    pub fn stochastic_grad_into<R: Rng + ?Sized>(&self, i: usize, x: &[f64], rng: &mut R, out: &mut [f64]) {
        match &self.model {
            Model::Quadratic(m) => {
                m.grad_into(i, x, out);
                quadratic::add_isotropic_noise(self.sigma_noise, rng, out);
            }
            Model::Sinusoid(m) => {
                m.grad_into(i, x, out);
                quadratic::add_isotropic_noise(self.sigma_noise, rng, out);
            }
            Model::Logistic(m) => {
                let s = rng.random_range(0..m.agent_len(i));
                m.sample_grad_into(i, s, x, out);
            }
        }
    }

    pub fn local_full_grad(&self, i: usize, x: &[f64]) -> Result<Vector> {
        self.check_agent(i)?;
        self.check_point(x)?;
        let mut out = vec![0.0; self.d];
        self.full_grad_into(i, x, &mut out);
        Ok(Vector::from_raw(out))
    }

    pub fn full_grad_into(&self, i: usize, x: &[f64], out: &mut [f64]) {
        match &self.model {
            Model::Quadratic(m) => m.grad_into(i, x, out),
            Model::Sinusoid(m) => m.grad_into(i, x, out),
            Model::Logistic(m) => m.full_grad_into(i, x, out),
        }
    }

    pub fn local_value(&self, i: usize, x: &[f64]) -> Result<f64> {
        self.check_agent(i)?;
        self.check_point(x)?;
        Ok(self.local_value_unchecked(i, x))
    }

    fn local_value_unchecked(&self, i: usize, x: &[f64]) -> f64 {
        match &self.model {
            Model::Quadratic(m) => m.value(i, x),
            Model::Sinusoid(m) => m.value(i, x),
            Model::Logistic(m) => m.value(i, x),
        }
    }

    pub fn global_grad(&self, x: &[f64]) -> Result<Vector> {
        self.check_point(x)?;
        let mut out = vec![0.0; self.d];
        self.global_grad_into(x, &mut out);
        Ok(Vector::from_raw(out))
    }

    pub(crate) fn global_grad_into(&self, x: &[f64], out: &mut [f64]) {
        match &self.model {
            Model::Quadratic(m) => m.global_grad_into(x, out),
            Model::Sinusoid(m) => m.global_grad_into(x, out),
            Model::Logistic(_) => {
                out.iter_mut().for_each(|v| *v = 0.0);
                let mut buf = vec![0.0; self.d];
                for i in 0..self.n {
                    self.full_grad_into(i, x, &mut buf);
                    out.iter_mut().zip(&buf).for_each(|(o, g)| *o += g);
                }
                let inv = 1.0 / self.n as f64;
                out.iter_mut().for_each(|v| *v *= inv);
            }
        }
    }

    pub fn global_value(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.global_value_unchecked(x))
    }

    pub(crate) fn global_value_unchecked(&self, x: &[f64]) -> f64 {
        match &self.model {
            Model::Quadratic(m) => m.global_value(x),
            Model::Sinusoid(m) => m.global_value(x),
            Model::Logistic(_) => {
                (0..self.n).map(|i| self.local_value_unchecked(i, x)).sum::<f64>() / self.n as f64
            }
        }
    }

    /// All problem constants. Analytic for the quadratic families; the
    /// logistic family runs a deterministic full-batch descent to find `x*`
    /// and then enumerates every local sample for `σ̄²`.
    pub fn constants(&self) -> Result<ProblemConstants> {
        match &self.model {
            Model::Quadratic(m) => Ok(m.constants(self.family, self.sigma_noise)),
            Model::Sinusoid(m) => Ok(m.constants(self.sigma_noise)),
            Model::Logistic(m) => m.constants(self),
        }
    }
}
