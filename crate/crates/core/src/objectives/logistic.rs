//! Ridge-regularized multinomial logistic regression over label-skewed shards.
//!
//! The parameter vector is a row-major `classes × features` weight matrix.

use rand_distr::{Distribution, StandardNormal};

use super::{Constant, Family, Model, ProblemConstants, ProblemInstance, Provenance};
use crate::error::{Error, Result};
use crate::rng::construction_stream;
use crate::vector::{norm_sq, CompensatedSum, Vector};

/// Gradient-norm target for the `x*` oracle.
pub const ORACLE_GRAD_TOL: f64 = 1e-10;
const ORACLE_MAX_ITERS: usize = 500_000;
const CLASS_SEPARATION: f64 = 1.5;

#[derive(Clone, Debug)]
struct AgentShard {
    /// `m_i × features`, row-major.
    samples: Vec<f64>,
    labels: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct LogisticShards {
    classes: usize,
    features: usize,
    ridge: f64,
    agents: Vec<AgentShard>,
}

/// Gaussian class blobs sorted by label, cut into `n·shards_per_agent`
/// contiguous shards. Agent `i` receives shards `i, i+n, i+2n, …`, so with
/// sorted labels each agent sees roughly `shards_per_agent` classes.
pub fn make_logistic_family(
    n: usize,
    d: usize,
    classes: usize,
    samples_per_agent: usize,
    shards_per_agent: usize,
    lambda: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    if n == 0 || d == 0 {
        return Err(Error::invalid("n and d must be at least 1"));
    }
    if classes < 2 {
        return Err(Error::invalid("need at least 2 classes"));
    }
    if samples_per_agent == 0 || shards_per_agent == 0 {
        return Err(Error::invalid("samples_per_agent and shards_per_agent must be ≥ 1"));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!("ridge weight must be > 0, got {lambda}")));
    }
    let total = n * samples_per_agent;
    if classes > n * shards_per_agent * samples_per_agent {
        return Err(Error::invalid(format!("{classes} classes cannot fill {total} samples")));
    }
    if shards_per_agent > samples_per_agent {
        return Err(Error::invalid("shards_per_agent > samples_per_agent would leave empty shards"));
    }

    let mut rng = construction_stream(seed);
    let mut gaussian = || -> f64 { StandardNormal.sample(&mut rng) };
    let means: Vec<f64> = (0..classes * d).map(|_| CLASS_SEPARATION * gaussian()).collect();
    let labels: Vec<usize> = (0..total).map(|j| j * classes / total).collect();
    let samples: Vec<f64> = labels
        .iter()
        .flat_map(|&y| (0..d).map(move |k| (y, k)))
        .map(|(y, k)| means[y * d + k] + gaussian())
        .collect();

    let shard_count = n * shards_per_agent;
    let bounds: Vec<usize> = (0..=shard_count).map(|s| s * total / shard_count).collect();
    let agents = (0..n)
        .map(|i| {
            let mut shard = AgentShard { samples: Vec::new(), labels: Vec::new() };
            for s in (i..shard_count).step_by(n) {
                for j in bounds[s]..bounds[s + 1] {
                    shard.samples.extend_from_slice(&samples[j * d..(j + 1) * d]);
                    shard.labels.push(labels[j]);
                }
            }
            shard
        })
        .collect();

    Ok(ProblemInstance {
        family: Family::SyntheticLogistic,
        n,
        d: classes * d,
        model: Model::Logistic(LogisticShards { classes, features: d, ridge: lambda, agents }),
        sigma_noise: 0.0,
        construction_seed: seed,
    })
}

impl LogisticShards {
    pub(crate) fn agent_len(&self, i: usize) -> usize {
        self.agents[i].labels.len()
    }

    pub(crate) fn classes(&self) -> usize {
        self.classes
    }

    /// Labels held by agent `i`.
    pub(crate) fn labels(&self, i: usize) -> &[usize] {
        &self.agents[i].labels
    }

    fn sample(&self, i: usize, s: usize) -> (&[f64], usize) {
        let a = &self.agents[i];
        (&a.samples[s * self.features..(s + 1) * self.features], a.labels[s])
    }

    /// Softmax probabilities of `W a` into `probs`; returns the log-partition.
    fn softmax(&self, w: &[f64], a: &[f64], probs: &mut [f64]) -> f64 {
        let f = self.features;
        for (c, p) in probs.iter_mut().enumerate() {
            *p = w[c * f..(c + 1) * f].iter().zip(a).map(|(x, y)| x * y).sum();
        }
        let max = probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for p in probs.iter_mut() {
            *p = (*p - max).exp();
            z += *p;
        }
        probs.iter_mut().for_each(|p| *p /= z);
        max + z.ln()
    }

    /// Adds `scale · ∇ CE(W a, y)` to `out`.
    fn add_sample_loss_grad(&self, w: &[f64], a: &[f64], y: usize, scale: f64, probs: &mut [f64], out: &mut [f64]) {
        let f = self.features;
        self.softmax(w, a, probs);
        for c in 0..self.classes {
            let r = scale * (probs[c] - if c == y { 1.0 } else { 0.0 });
            for k in 0..f {
                out[c * f + k] += r * a[k];
            }
        }
    }

    pub(crate) fn sample_grad_into(&self, i: usize, s: usize, w: &[f64], out: &mut [f64]) {
        let mut probs = vec![0.0; self.classes];
        for (o, x) in out.iter_mut().zip(w) {
            *o = self.ridge * x;
        }
        let (a, y) = self.sample(i, s);
        self.add_sample_loss_grad(w, a, y, 1.0, &mut probs, out);
    }

    pub(crate) fn full_grad_into(&self, i: usize, w: &[f64], out: &mut [f64]) {
        let mut probs = vec![0.0; self.classes];
        for (o, x) in out.iter_mut().zip(w) {
            *o = self.ridge * x;
        }
        let m = self.agent_len(i);
        let scale = 1.0 / m as f64;
        for s in 0..m {
            let (a, y) = self.sample(i, s);
            self.add_sample_loss_grad(w, a, y, scale, &mut probs, out);
        }
    }

    pub(crate) fn value(&self, i: usize, w: &[f64]) -> f64 {
        let mut probs = vec![0.0; self.classes];
        let f = self.features;
        let m = self.agent_len(i);
        let loss: f64 = (0..m)
            .map(|s| {
                let (a, y) = self.sample(i, s);
                let log_z = self.softmax(w, a, &mut probs);
                let logit_y: f64 = w[y * f..(y + 1) * f].iter().zip(a).map(|(x, v)| x * v).sum();
                log_z - logit_y
            })
            .sum::<f64>()
            / m as f64;
        loss + 0.5 * self.ridge * norm_sq(w)
    }

    /// Largest eigenvalue of agent `i`'s empirical second-moment matrix,
    /// by power iteration.
    fn second_moment_top_eigenvalue(&self, i: usize) -> f64 {
        let f = self.features;
        let m = self.agent_len(i);
        let mut moment = vec![0.0; f * f];
        for s in 0..m {
            let (a, _) = self.sample(i, s);
            for r in 0..f {
                for c in 0..f {
                    moment[r * f + c] += a[r] * a[c] / m as f64;
                }
            }
        }
        let mut v = vec![1.0 / (f as f64).sqrt(); f];
        let mut next = vec![0.0; f];
        let mut estimate = 0.0;
        for _ in 0..10_000 {
            for r in 0..f {
                next[r] = (0..f).map(|c| moment[r * f + c] * v[c]).sum();
            }
            let norm = norm_sq(&next).sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            next.iter_mut().for_each(|x| *x /= norm);
            std::mem::swap(&mut v, &mut next);
            let converged = (norm - estimate).abs() <= 1e-14 * norm;
            estimate = norm;
            if converged {
                break;
            }
        }
        estimate
    }

    /// Smoothness bound: the softmax cross-entropy Hessian is
    /// `(diag p − p pᵀ) ⊗ a aᵀ` and `‖diag p − p pᵀ‖ ≤ ½`.
    fn smoothness(&self) -> f64 {
        let top = (0..self.agents.len())
            .map(|i| self.second_moment_top_eigenvalue(i))
            .fold(0.0, f64::max);
        self.ridge + 0.5 * top
    }

    fn minimize(&self, problem: &ProblemInstance, l: f64) -> Result<Vec<f64>> {
        let dim = problem.dim();
        let mut w = vec![0.0; dim];
        let mut grad = vec![0.0; dim];
        let mut trial = vec![0.0; dim];
        let mut step = 1.0 / l;
        let mut value = problem.global_value_unchecked(&w);
        for _ in 0..ORACLE_MAX_ITERS {
            problem.global_grad_into(&w, &mut grad);
            let g_sq = norm_sq(&grad);
            if g_sq.sqrt() <= ORACLE_GRAD_TOL {
                return Ok(w);
            }
            step *= 2.0;
            loop {
                for k in 0..dim {
                    trial[k] = w[k] - step * grad[k];
                }
                let next = problem.global_value_unchecked(&trial);
                // Armijo, or any step ≤ 1/L (descent is guaranteed there even
                // when function values no longer resolve the decrease)
                if next <= value - 0.5 * step * g_sq || step <= 1.0 / l {
                    std::mem::swap(&mut w, &mut trial);
                    value = next;
                    break;
                }
                step *= 0.5;
            }
        }
        Err(Error::OracleFailed(format!(
            "gradient norm above {ORACLE_GRAD_TOL:e} after {ORACLE_MAX_ITERS} iterations"
        )))
    }

    pub(crate) fn constants(&self, problem: &ProblemInstance) -> Result<ProblemConstants> {
        let l = self.smoothness();
        let x_star = self.minimize(problem, l)?;
        let mut g = vec![0.0; problem.dim()];
        let per_agent: CompensatedSum = (0..self.agents.len())
            .map(|i| {
                let m = self.agent_len(i);
                let acc: CompensatedSum = (0..m)
                    .map(|s| {
                        self.sample_grad_into(i, s, &x_star, &mut g);
                        norm_sq(&g)
                    })
                    .collect();
                acc.value() / m as f64
            })
            .collect();
        let sigma_bar_sq = per_agent.value() / self.agents.len() as f64;
        let f_star = problem.global_value_unchecked(&x_star);
        Ok(ProblemConstants {
            l: Constant::numeric(l),
            mu: Constant::analytic(self.ridge),
            sigma_bar_sq: Some(Constant::numeric(sigma_bar_sq)),
            sigma_sq: None,
            g: None,
            b: None,
            x_star: Some(Vector::from_raw(x_star)),
            x_star_provenance: Some(Provenance::NumericOracle),
            f_star: Some(Constant::numeric(f_star)),
            f_lower: Constant::numeric(f_star),
        })
    }
}

impl ProblemInstance {
    /// Distinct labels held by each agent (logistic family only).
    pub fn agent_classes(&self) -> Option<Vec<Vec<usize>>> {
        match &self.model {
            Model::Logistic(m) => Some(
                (0..self.n)
                    .map(|i| {
                        let mut seen = vec![false; m.classes()];
                        m.labels(i).iter().for_each(|&y| seen[y] = true);
                        (0..m.classes()).filter(|&c| seen[c]).collect()
                    })
                    .collect(),
            ),
            _ => None,
        }
    }
}
