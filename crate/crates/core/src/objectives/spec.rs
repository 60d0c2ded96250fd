use serde::{Deserialize, Serialize};

use super::{
    make_convex_quadratics, make_logistic_family, make_nonconvex_family, make_strongly_convex_quadratics, Family,
    ProblemInstance,
};
use crate::error::Result;

/// Serializable description of a problem instance: family tag, parameters
/// and construction seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemSpec {
    StronglyConvexQuadratic {
        n: usize,
        d: usize,
        mu: f64,
        #[serde(rename = "L")]
        l: f64,
        delta: f64,
        sigma_noise: f64,
        seed: u64,
    },
    ConvexQuadratic {
        n: usize,
        d: usize,
        #[serde(rename = "L")]
        l: f64,
        eps_pd: f64,
        delta: f64,
        sigma_noise: f64,
        seed: u64,
    },
    NonconvexQuadraticSinusoid {
        n: usize,
        d: usize,
        q_diag: Vec<f64>,
        delta: f64,
        eps_sin: f64,
        sigma_noise: f64,
        seed: u64,
    },
    SyntheticLogistic {
        n: usize,
        d: usize,
        classes: usize,
        samples_per_agent: usize,
        shards_per_agent: usize,
        lambda: f64,
        seed: u64,
    },
}

impl ProblemSpec {
    pub fn build(&self) -> Result<ProblemInstance> {
        match self {
            ProblemSpec::StronglyConvexQuadratic { n, d, mu, l, delta, sigma_noise, seed } => {
                make_strongly_convex_quadratics(*n, *d, *mu, *l, *delta, *sigma_noise, *seed)
            }
            ProblemSpec::ConvexQuadratic { n, d, l, eps_pd, delta, sigma_noise, seed } => {
                make_convex_quadratics(*n, *d, *l, *eps_pd, *delta, *sigma_noise, *seed)
            }
            ProblemSpec::NonconvexQuadraticSinusoid { n, d, q_diag, delta, eps_sin, sigma_noise, seed } => {
                make_nonconvex_family(*n, *d, q_diag, *delta, *eps_sin, *sigma_noise, *seed)
            }
            ProblemSpec::SyntheticLogistic { n, d, classes, samples_per_agent, shards_per_agent, lambda, seed } => {
                make_logistic_family(*n, *d, *classes, *samples_per_agent, *shards_per_agent, *lambda, *seed)
            }
        }
    }

    pub fn family(&self) -> Family {
        match self {
            ProblemSpec::StronglyConvexQuadratic { .. } => Family::StronglyConvexQuadratic,
            ProblemSpec::ConvexQuadratic { .. } => Family::ConvexQuadratic,
            ProblemSpec::NonconvexQuadraticSinusoid { .. } => Family::NonconvexQuadraticSinusoid,
            ProblemSpec::SyntheticLogistic { .. } => Family::SyntheticLogistic,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ProblemSpec::StronglyConvexQuadratic { n, .. }
            | ProblemSpec::ConvexQuadratic { n, .. }
            | ProblemSpec::NonconvexQuadraticSinusoid { n, .. }
            | ProblemSpec::SyntheticLogistic { n, .. } => *n,
        }
    }

    /// Same family and parameters with a different agent count.
    pub fn with_n(&self, agents: usize) -> Self {
        let mut out = self.clone();
        match &mut out {
            ProblemSpec::StronglyConvexQuadratic { n, .. }
            | ProblemSpec::ConvexQuadratic { n, .. }
            | ProblemSpec::NonconvexQuadraticSinusoid { n, .. }
            | ProblemSpec::SyntheticLogistic { n, .. } => *n = agents,
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_unknown_keys() {
        let ok = r#"{"family":"strongly-convex-quadratic","n":2,"d":3,"mu":0.1,"L":1,"delta":1,"sigma_noise":0.5,"seed":3}"#;
        let spec: ProblemSpec = serde_json::from_str(ok).unwrap();
        assert_eq!(spec.n(), 2);
        assert_eq!(spec.build().unwrap().dim(), 3);

        let bad = r#"{"family":"strongly-convex-quadratic","n":2,"d":3,"mu":0.1,"L":1,"delta":1,"sigma_noise":0.5,"seed":3,"extra":1}"#;
        assert!(serde_json::from_str::<ProblemSpec>(bad).is_err());
    }

    #[test]
    fn round_trips() {
        let spec = ProblemSpec::NonconvexQuadraticSinusoid {
            n: 4,
            d: 2,
            q_diag: vec![1.0, 2.0],
            delta: 0.5,
            eps_sin: 0.1,
            sigma_noise: 0.0,
            seed: 9,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<ProblemSpec>(&text).unwrap(), spec);
        assert_eq!(spec.with_n(16).n(), 16);
    }
}
