//! Diagonal quadratic families, with and without a sinusoidal perturbation.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Constant, Family, Model, ProblemConstants, ProblemInstance, Provenance};
use crate::error::{Error, Result};
use crate::rng::construction_stream;
use crate::vector::{CompensatedSum, Vector};

/// Construction attempts for the convex family before giving up.
const CONVEX_RETRIES: u64 = 100;

/// `f_i(x) = ½ Σ_k q_{i,k} (x_k − c_{i,k})²`, stored agent-major.
#[derive(Clone, Debug)]
pub(crate) struct DiagonalQuadratics {
    n: usize,
    d: usize,
    curvature: Vec<f64>,
    centers: Vec<f64>,
    l: f64,
    mu: f64,
}

/// `f_i(x) = ½ (x − c_i)ᵀ Q (x − c_i) + ε Σ_k sin(x_k)` with `Q` shared.
#[derive(Clone, Debug)]
pub(crate) struct SinusoidQuadratics {
    n: usize,
    d: usize,
    curvature: Vec<f64>,
    centers: Vec<f64>,
    amplitude: f64,
}

pub(crate) fn add_isotropic_noise<R: Rng + ?Sized>(sigma: f64, rng: &mut R, out: &mut [f64]) {
    if sigma == 0.0 {
        return;
    }
    let scale = sigma / (out.len() as f64).sqrt();
    for v in out.iter_mut() {
        let z: f64 = StandardNormal.sample(rng);
        *v += scale * z;
    }
}

/// Centers `c̄ + δ·u_i` with the `u_i` deflated to sum to zero.
fn heterogeneous_centers<R: Rng + ?Sized>(n: usize, d: usize, delta: f64, rng: &mut R) -> Vec<f64> {
    let base: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let mut u: Vec<f64> = (0..n * d).map(|_| StandardNormal.sample(rng)).collect();
    for k in 0..d {
        let mean = (0..n).map(|i| u[i * d + k]).sum::<f64>() / n as f64;
        for i in 0..n {
            u[i * d + k] -= mean;
        }
    }
    (0..n * d).map(|j| base[j % d] + delta * u[j]).collect()
}

fn check_common(n: usize, d: usize, delta: f64, sigma_noise: f64) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(Error::invalid("n and d must be at least 1"));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::invalid("heterogeneity δ must be finite and ≥ 0"));
    }
    if !(sigma_noise >= 0.0 && sigma_noise.is_finite()) {
        return Err(Error::invalid("σ_noise must be finite and ≥ 0"));
    }
    Ok(())
}

/// Strongly convex diagonal quadratics with curvature in `[mu, L]`. For
/// `d ≥ 2` every agent has one coordinate pinned to `L` and one to `mu`.
pub fn make_strongly_convex_quadratics(
    n: usize,
    d: usize,
    mu: f64,
    l: f64,
    delta: f64,
    sigma_noise: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    check_common(n, d, delta, sigma_noise)?;
    if !(mu > 0.0) {
        return Err(Error::invalid(format!("mu must be > 0, got {mu}")));
    }
    if !(l >= mu) || !l.is_finite() {
        return Err(Error::invalid(format!("L must be finite and ≥ mu, got L={l}, mu={mu}")));
    }
    let mut rng = construction_stream(seed);
    let mut curvature = vec![0.0; n * d];
    for i in 0..n {
        for k in 0..d {
            curvature[i * d + k] = match k {
                0 if d >= 2 => l,
                1 => mu,
                _ => rng.random_range(mu..=l),
            };
        }
    }
    let centers = heterogeneous_centers(n, d, delta, &mut rng);
    Ok(ProblemInstance {
        family: Family::StronglyConvexQuadratic,
        n,
        d,
        model: Model::Quadratic(DiagonalQuadratics { n, d, curvature, centers, l, mu }),
        sigma_noise,
        construction_seed: seed,
    })
}

/// Merely convex diagonal quadratics: every agent zeroes `⌊d/2⌋` of its
/// coordinates, while the averaged curvature stays `≥ eps_pd` so the global
/// optimum is unique. Retries successive seeds before failing.
pub fn make_convex_quadratics(
    n: usize,
    d: usize,
    l: f64,
    eps_pd: f64,
    delta: f64,
    sigma_noise: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    check_common(n, d, delta, sigma_noise)?;
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::invalid(format!("L must be finite and > 0, got {l}")));
    }
    if !(eps_pd > 0.0 && eps_pd <= l) {
        return Err(Error::invalid(format!("need 0 < eps_pd ≤ L, got eps_pd={eps_pd}")));
    }
    for attempt in 0..CONVEX_RETRIES {
        let attempt_seed = seed.wrapping_add(attempt);
        let mut rng = construction_stream(attempt_seed);
        let mut curvature = vec![0.0; n * d];
        let zeroed = d / 2;
        for i in 0..n {
            let row = &mut curvature[i * d..(i + 1) * d];
            for q in row.iter_mut() {
                // (0, L]
                *q = l * (1.0 - rng.random::<f64>());
            }
            let mut coords: Vec<usize> = (0..d).collect();
            for j in 0..zeroed {
                let pick = rng.random_range(j..d);
                coords.swap(j, pick);
                row[coords[j]] = 0.0;
            }
            row[coords[zeroed.min(d - 1)]] = l;
        }
        let centers = heterogeneous_centers(n, d, delta, &mut rng);
        let averaged_ok = (0..d).all(|k| (0..n).map(|i| curvature[i * d + k]).sum::<f64>() / n as f64 >= eps_pd);
        if averaged_ok {
            return Ok(ProblemInstance {
                family: Family::ConvexQuadratic,
                n,
                d,
                model: Model::Quadratic(DiagonalQuadratics { n, d, curvature, centers, l, mu: 0.0 }),
                sigma_noise,
                construction_seed: attempt_seed,
            });
        }
    }
    Err(Error::invalid(format!(
        "averaged curvature stayed below eps_pd={eps_pd} after {CONVEX_RETRIES} seeds"
    )))
}

/// Shared-curvature quadratics plus `ε Σ sin(x_k)`.
pub fn make_nonconvex_family(
    n: usize,
    d: usize,
    q_diag: &[f64],
    delta: f64,
    eps_sin: f64,
    sigma_noise: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    check_common(n, d, delta, sigma_noise)?;
    if q_diag.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: q_diag.len() });
    }
    if q_diag.iter().any(|q| !(*q >= 0.0 && q.is_finite())) {
        return Err(Error::invalid("Q diagonal entries must be finite and ≥ 0"));
    }
    let mut rng = construction_stream(seed);
    let centers = heterogeneous_centers(n, d, delta, &mut rng);
    ProblemInstance::sinusoid_quadratics(q_diag.to_vec(), centers, eps_sin, sigma_noise, seed)
}

impl ProblemInstance {
    /// Diagonal quadratic family from explicit per-agent curvatures and
    /// centers. Declared `L` is the largest entry; `mu` is the smallest entry
    /// for the strongly convex tag and `0` for the convex tag.
    pub fn diagonal_quadratics(
        family: Family,
        curvature: Vec<Vec<f64>>,
        centers: Vec<Vec<f64>>,
        sigma_noise: f64,
    ) -> Result<Self> {
        let n = curvature.len();
        if n == 0 || centers.len() != n {
            return Err(Error::invalid("need one curvature and one center row per agent"));
        }
        let d = curvature[0].len();
        check_common(n, d, 0.0, sigma_noise)?;
        if curvature.iter().chain(&centers).any(|row| row.len() != d) {
            return Err(Error::invalid("ragged curvature/center rows"));
        }
        let flat_q: Vec<f64> = curvature.into_iter().flatten().collect();
        let flat_c: Vec<f64> = centers.into_iter().flatten().collect();
        if flat_q.iter().chain(&flat_c).any(|v| !v.is_finite()) || flat_q.iter().any(|q| *q < 0.0) {
            return Err(Error::invalid("curvatures must be finite and ≥ 0, centers finite"));
        }
        let l = flat_q.iter().cloned().fold(0.0, f64::max);
        let mu = match family {
            Family::StronglyConvexQuadratic => {
                let mu = flat_q.iter().cloned().fold(f64::INFINITY, f64::min);
                if !(mu > 0.0) {
                    return Err(Error::invalid("strongly convex family needs every curvature > 0"));
                }
                mu
            }
            Family::ConvexQuadratic => 0.0,
            other => return Err(Error::invalid(format!("{} is not a diagonal quadratic family", other.tag()))),
        };
        let degenerate = (0..d).any(|k| (0..n).map(|i| flat_q[i * d + k]).sum::<f64>() <= 0.0);
        if degenerate {
            return Err(Error::invalid("averaged curvature has a zero entry: optimum is not unique"));
        }
        Ok(ProblemInstance {
            family,
            n,
            d,
            model: Model::Quadratic(DiagonalQuadratics { n, d, curvature: flat_q, centers: flat_c, l, mu }),
            sigma_noise,
            construction_seed: 0,
        })
    }

    /// Nonconvex family from an explicit shared diagonal and agent-major
    /// centers (`n·d` entries).
    pub fn sinusoid_quadratics(
        q_diag: Vec<f64>,
        centers: Vec<f64>,
        eps_sin: f64,
        sigma_noise: f64,
        seed: u64,
    ) -> Result<Self> {
        let d = q_diag.len();
        if d == 0 || centers.is_empty() || !centers.len().is_multiple_of(d) {
            return Err(Error::invalid("centers must hold n·d entries"));
        }
        let n = centers.len() / d;
        check_common(n, d, 0.0, sigma_noise)?;
        if !(eps_sin > 0.0) || !eps_sin.is_finite() {
            return Err(Error::invalid(format!(
                "sinusoid amplitude must be > 0 (got {eps_sin}); use the convex family instead"
            )));
        }
        Ok(ProblemInstance {
            family: Family::NonconvexQuadraticSinusoid,
            n,
            d,
            model: Model::Sinusoid(SinusoidQuadratics { n, d, curvature: q_diag, centers, amplitude: eps_sin }),
            sigma_noise,
            construction_seed: seed,
        })
    }
}

impl DiagonalQuadratics {
    fn row<'a>(&self, v: &'a [f64], i: usize) -> &'a [f64] {
        &v[i * self.d..(i + 1) * self.d]
    }

    pub(crate) fn grad_into(&self, i: usize, x: &[f64], out: &mut [f64]) {
        let q = self.row(&self.curvature, i);
        let c = self.row(&self.centers, i);
        for k in 0..self.d {
            out[k] = q[k] * (x[k] - c[k]);
        }
    }

    pub(crate) fn value(&self, i: usize, x: &[f64]) -> f64 {
        let q = self.row(&self.curvature, i);
        let c = self.row(&self.centers, i);
        0.5 * (0..self.d).map(|k| q[k] * (x[k] - c[k]).powi(2)).sum::<f64>()
    }

    pub(crate) fn global_grad_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            let q = self.row(&self.curvature, i);
            let c = self.row(&self.centers, i);
            for k in 0..self.d {
                out[k] += q[k] * (x[k] - c[k]);
            }
        }
        let inv = 1.0 / self.n as f64;
        out.iter_mut().for_each(|v| *v *= inv);
    }

    pub(crate) fn global_value(&self, x: &[f64]) -> f64 {
        (0..self.n).map(|i| self.value(i, x)).sum::<f64>() / self.n as f64
    }

    fn minimizer(&self) -> Vec<f64> {
        (0..self.d)
            .map(|k| {
                let (mut qc, mut q) = (0.0, 0.0);
                for i in 0..self.n {
                    qc += self.curvature[i * self.d + k] * self.centers[i * self.d + k];
                    q += self.curvature[i * self.d + k];
                }
                qc / q
            })
            .collect()
    }

    /// `(G, B)` for `(1/n)Σ‖∇f_i‖² ≤ G² + B²‖∇f‖²`, solved per coordinate.
    ///
    /// With `a_i = q_{i,k}`, `b_i = q_{i,k} c_{i,k}` the slack per coordinate
    /// is the quadratic `α z² − 2γ z + κ` with `α = mean(a²) − B² ā²`. When all
    /// agents share each coordinate's curvature `B = 1` makes `α = γ = 0`.
    /// Otherwise `B² = 2 max_k mean(a²)/ā²` makes every `α < 0` and the slack
    /// is maximized in closed form.
    fn dissimilarity(&self) -> (f64, f64) {
        let (n, d) = (self.n, self.d);
        let homogeneous =
            (0..d).all(|k| (1..n).all(|i| self.curvature[i * d + k] == self.curvature[k]));
        if homogeneous {
            let g_sq: f64 = (0..d)
                .map(|k| {
                    let a = self.curvature[k];
                    let cbar = (0..n).map(|i| self.centers[i * d + k]).sum::<f64>() / n as f64;
                    (0..n).map(|i| (a * (self.centers[i * d + k] - cbar)).powi(2)).sum::<f64>() / n as f64
                })
                .sum();
            return (g_sq.sqrt(), 1.0);
        }
        let stats: Vec<(f64, f64, f64, f64, f64)> = (0..d)
            .map(|k| {
                let (mut a1, mut a2, mut b1, mut b2, mut ab) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for i in 0..n {
                    let a = self.curvature[i * d + k];
                    let b = a * self.centers[i * d + k];
                    a1 += a;
                    a2 += a * a;
                    b1 += b;
                    b2 += b * b;
                    ab += a * b;
                }
                let m = n as f64;
                (a1 / m, a2 / m, b1 / m, b2 / m, ab / m)
            })
            .collect();
        let ratio = stats.iter().map(|&(a1, a2, ..)| a2 / (a1 * a1)).fold(1.0, f64::max);
        let b_sq = 2.0 * ratio;
        let g_sq: f64 = stats
            .iter()
            .map(|&(a1, a2, b1, b2, ab)| {
                let alpha = a2 - b_sq * a1 * a1;
                let gamma = ab - b_sq * a1 * b1;
                let kappa = b2 - b_sq * b1 * b1;
                kappa - gamma * gamma / alpha
            })
            .sum();
        (g_sq.max(0.0).sqrt(), b_sq.sqrt())
    }

    pub(crate) fn constants(&self, family: Family, sigma_noise: f64) -> ProblemConstants {
        let x_star = self.minimizer();
        let mut grad = vec![0.0; self.d];
        let heterogeneity: CompensatedSum = (0..self.n)
            .map(|i| {
                self.grad_into(i, &x_star, &mut grad);
                grad.iter().map(|g| g * g).sum::<f64>()
            })
            .collect();
        let sigma_bar_sq = heterogeneity.value() / self.n as f64 + sigma_noise * sigma_noise;
        let f_star = self.global_value(&x_star);
        let (g, b) = self.dissimilarity();
        debug_assert!(family != Family::StronglyConvexQuadratic || self.mu > 0.0);
        ProblemConstants {
            l: Constant::analytic(self.l),
            mu: Constant::analytic(self.mu),
            sigma_bar_sq: Some(Constant::analytic(sigma_bar_sq)),
            sigma_sq: Some(Constant::analytic(sigma_noise * sigma_noise)),
            g: Some(Constant::analytic(g)),
            b: Some(Constant::analytic(b)),
            x_star: Some(Vector::from_raw(x_star)),
            x_star_provenance: Some(Provenance::Analytic),
            f_star: Some(Constant::analytic(f_star)),
            f_lower: Constant::analytic(f_star),
        }
    }
}

impl SinusoidQuadratics {
    fn center(&self, i: usize) -> &[f64] {
        &self.centers[i * self.d..(i + 1) * self.d]
    }

    fn mean_center(&self) -> Vec<f64> {
        (0..self.d)
            .map(|k| (0..self.n).map(|i| self.centers[i * self.d + k]).sum::<f64>() / self.n as f64)
            .collect()
    }

    pub(crate) fn grad_into(&self, i: usize, x: &[f64], out: &mut [f64]) {
        let c = self.center(i);
        for k in 0..self.d {
            out[k] = self.curvature[k] * (x[k] - c[k]) + self.amplitude * x[k].cos();
        }
    }

    pub(crate) fn value(&self, i: usize, x: &[f64]) -> f64 {
        let c = self.center(i);
        (0..self.d)
            .map(|k| 0.5 * self.curvature[k] * (x[k] - c[k]).powi(2) + self.amplitude * x[k].sin())
            .sum()
    }

    pub(crate) fn global_grad_into(&self, x: &[f64], out: &mut [f64]) {
        let cbar = self.mean_center();
        for k in 0..self.d {
            out[k] = self.curvature[k] * (x[k] - cbar[k]) + self.amplitude * x[k].cos();
        }
    }

    pub(crate) fn global_value(&self, x: &[f64]) -> f64 {
        (0..self.n).map(|i| self.value(i, x)).sum::<f64>() / self.n as f64
    }

    pub(crate) fn constants(&self, sigma_noise: f64) -> ProblemConstants {
        let cbar = self.mean_center();
        let g_sq = (0..self.n)
            .map(|i| {
                let c = self.center(i);
                (0..self.d).map(|k| (self.curvature[k] * (cbar[k] - c[k])).powi(2)).sum::<f64>()
            })
            .sum::<f64>()
            / self.n as f64;
        // quadratic part is minimized at c̄; the sinusoid is ≥ −ε per coordinate
        let quad_min = (0..self.n)
            .map(|i| {
                let c = self.center(i);
                0.5 * (0..self.d).map(|k| self.curvature[k] * (cbar[k] - c[k]).powi(2)).sum::<f64>()
            })
            .sum::<f64>()
            / self.n as f64;
        let l = self.curvature.iter().cloned().fold(0.0, f64::max) + self.amplitude;
        ProblemConstants {
            l: Constant::analytic(l),
            mu: Constant::analytic(0.0),
            sigma_bar_sq: None,
            sigma_sq: Some(Constant::analytic(sigma_noise * sigma_noise)),
            g: Some(Constant::analytic(g_sq.sqrt())),
            b: Some(Constant::analytic(1.0)),
            x_star: None,
            x_star_provenance: None,
            f_star: None,
            f_lower: Constant::analytic(quad_min - self.amplitude * self.d as f64),
        }
    }
}
