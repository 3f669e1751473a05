//! ψ(w) = ‖w‖_{Π*X}/vol(B_X) = (n/2) E_{θ~κ_X} |⟨w, ∇‖·‖_X(θ)⟩|, plus the quantities built on it.

use serde::Serialize;

use super::sampling::{cone_expectation, GradientSamples};
use super::volume::volume_any;
use crate::error::{Error, Result};
use crate::estimate::MonteCarloEstimate;
use crate::optimize::{sphere_maximize, AscentResult};
use crate::rng::derive_seed;
use crate::space::{Exponent, NormedSpace, Node};
use crate::special::{gamma, ln_euclidean_ball_volume, ln_gamma};

/// vol(B_2^{n−1}) / vol(B_2^n).
pub fn euclidean_psi_constant(n: usize) -> f64 {
    (ln_euclidean_ball_volume(n - 1) - ln_euclidean_ball_volume(n)).exp()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn l2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Closed form of ψ where one is known: ℓ∞ gives ‖w‖₁/2, ℓ2 gives ‖w‖₂·vol(B_2^{n−1})/vol(B_2^n).
pub fn psi_closed_form(space: &NormedSpace, w: &[f64]) -> Option<f64> {
    match space.node() {
        Node::Lp { p: Exponent::Inf, .. } => Some(0.5 * w.iter().map(|v| v.abs()).sum::<f64>()),
        Node::Lp { n, p: Exponent::Finite(p) } if *p == 2.0 => Some(l2(w) * euclidean_psi_constant(*n)),
        _ => None,
    }
}

fn check(space: &NormedSpace, w: &[f64]) -> Result<()> {
    if w.len() != space.dim() {
        return Err(Error::input(
            "/w",
            format!("vector has length {}, space dimension is {}", w.len(), space.dim()),
        ));
    }
    Ok(())
}

/// ψ(w), exact where a closed form exists, otherwise Monte Carlo over `samples` cone draws.
pub fn psi(space: &NormedSpace, w: &[f64], samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    check(space, w)?;
    if w.iter().all(|&v| v == 0.0) {
        return Ok(MonteCarloEstimate::exact(0.0));
    }
    match psi_closed_form(space, w) {
        Some(v) => Ok(MonteCarloEstimate::exact(v)),
        None => psi_mc(space, w, samples, seed),
    }
}

/// ψ(w) by Monte Carlo even when a closed form exists.
pub fn psi_mc(space: &NormedSpace, w: &[f64], samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    check(space, w)?;
    if samples == 0 {
        return Err(Error::input("/samples", "samples must be positive"));
    }
    let half_n = 0.5 * space.dim() as f64;
    Ok(cone_expectation(space, samples, seed, |_, g| dot(w, g).abs()).scale(half_n))
}

/// A deterministic ψ surrogate for optimization: closed forms where available, otherwise
/// a fixed set of gradient samples, which makes ψ̂ convex and piecewise linear.
pub enum PsiModel {
    LInf,
    L2 { c: f64 },
    Samples(GradientSamples),
}

impl PsiModel {
    pub fn new(space: &NormedSpace, samples: usize, seed: u64) -> PsiModel {
        match space.node() {
            Node::Lp { p: Exponent::Inf, .. } => PsiModel::LInf,
            Node::Lp { n, p: Exponent::Finite(p) } if *p == 2.0 => PsiModel::L2 {
                c: euclidean_psi_constant(*n),
            },
            _ => PsiModel::Samples(GradientSamples::generate(space, samples, seed)),
        }
    }

    pub fn mc(space: &NormedSpace, samples: usize, seed: u64) -> PsiModel {
        PsiModel::Samples(GradientSamples::generate(space, samples, seed))
    }

    pub fn value_grad(&self, w: &[f64]) -> (f64, Vec<f64>) {
        match self {
            PsiModel::LInf => (
                0.5 * w.iter().map(|v| v.abs()).sum::<f64>(),
                w.iter().map(|v| 0.5 * sign(*v)).collect(),
            ),
            PsiModel::L2 { c } => {
                let r = l2(w);
                (c * r, w.iter().map(|v| if r > 0.0 { c * v / r } else { 0.0 }).collect())
            }
            PsiModel::Samples(s) => {
                let n = s.dim;
                let mut grad = vec![0.0; n];
                let mut val = 0.0;
                let mut wsum = 0.0;
                for k in 0..s.len() {
                    let g = s.grad(k);
                    let d = dot(w, g);
                    let wk = s.weights[k];
                    val += wk * d.abs();
                    wsum += wk;
                    let sg = wk * sign(d);
                    for i in 0..n {
                        grad[i] += sg * g[i];
                    }
                }
                let c = 0.5 * n as f64 / wsum;
                grad.iter_mut().for_each(|v| *v *= c);
                (val * c, grad)
            }
        }
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        match self {
            PsiModel::Samples(s) => {
                let mut val = 0.0;
                let mut wsum = 0.0;
                for k in 0..s.len() {
                    val += s.weights[k] * dot(w, s.grad(k)).abs();
                    wsum += s.weights[k];
                }
                0.5 * s.dim as f64 * val / wsum
            }
            _ => self.value_grad(w).0,
        }
    }

    /// ψ(w) with its standard error under the stored samples.
    pub fn estimate(&self, w: &[f64]) -> MonteCarloEstimate {
        match self {
            PsiModel::Samples(s) => s.mean(|g| dot(w, g).abs()).scale(0.5 * s.dim as f64),
            _ => MonteCarloEstimate::exact(self.value(w)),
        }
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Deterministic starts for sphere searches: the first axis and the diagonal.
pub fn standard_starts(n: usize) -> Vec<Vec<f64>> {
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    vec![e1, vec![1.0; n]]
}

/// vol_{n−1}(Proj_{w⊥} B_X) = ψ(w)·vol(B_X)/‖w‖₂.
pub fn hyperplane_projection_volume(space: &NormedSpace, w: &[f64], samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    let p = psi(space, w, samples, seed)?;
    let norm = l2(w);
    if norm == 0.0 {
        return Err(Error::Domain("projection direction must be nonzero".into()));
    }
    let vol = volume_any(space, samples, derive_seed(seed, 1))?;
    Ok(product_estimate(p, vol).scale(1.0 / norm))
}

/// Product of two independent estimates with first-order error propagation.
pub fn product_estimate(a: MonteCarloEstimate, b: MonteCarloEstimate) -> MonteCarloEstimate {
    let value = a.value * b.value;
    let stderr = ((a.stderr * b.value).powi(2) + (b.stderr * a.value).powi(2)).sqrt();
    MonteCarloEstimate {
        value,
        stderr,
        trials: a.trials.max(b.trials),
        seed: a.seed,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeVolume {
    /// vol(Cone_z(B_X)).
    pub volume: MonteCarloEstimate,
    /// vol(Cone_z(B_X))/vol(B_X) = ψ(z)/n.
    pub fraction: MonteCarloEstimate,
}

/// Volume of the cone over the boundary point `z`: (1/n)·vol_{n−1}(Proj_{z⊥}B_X)·‖z‖₂.
pub fn cone_volume(space: &NormedSpace, z: &[f64], samples: usize, seed: u64) -> Result<ConeVolume> {
    check(space, z)?;
    let nz = space.norm(z);
    if (nz - 1.0).abs() > 1e-9 {
        return Err(Error::input("/z", format!("z must lie on the unit sphere of X, ‖z‖ = {nz}")));
    }
    let n = space.dim() as f64;
    let fraction = psi(space, z, samples, seed)?.scale(1.0 / n);
    let vol = volume_any(space, samples, derive_seed(seed, 1))?;
    Ok(ConeVolume {
        volume: product_estimate(fraction, vol),
        fraction,
    })
}

/// Γ(n/2)/(2√π Γ((n+1)/2)): lower bound for the largest cone fraction, attained by the Euclidean ball.
pub fn sharp_cone_bound(n: usize) -> f64 {
    (ln_gamma(0.5 * n as f64) - ln_gamma(0.5 * (n as f64 + 1.0))).exp() / (2.0 * std::f64::consts::PI.sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectionalMax {
    pub direction: Vec<f64>,
    pub value: MonteCarloEstimate,
    /// Value of the deterministic surrogate at the maximizer.
    pub surrogate: f64,
    pub dispersion: f64,
    pub restarts: usize,
    pub heuristic: bool,
}

fn finish(search: AscentResult, value: MonteCarloEstimate, heuristic: bool) -> DirectionalMax {
    DirectionalMax {
        direction: search.argmax,
        value,
        surrogate: search.value,
        dispersion: search.dispersion,
        restarts: search.restarts,
        heuristic,
    }
}

/// Largest cone fraction over z ∈ ∂B_X, i.e. max ψ(y)/(n‖y‖_X).
pub fn max_cone_fraction(space: &NormedSpace, restarts: usize, samples: usize, seed: u64) -> DirectionalMax {
    let n = space.dim();
    let model = PsiModel::new(space, samples, derive_seed(seed, 2));
    let node = space.node();
    let search = sphere_maximize(n, restarts, seed, &standard_starts(n), |y| {
        let (p, gp) = model.value_grad(y);
        let nx = node.norm(y);
        let mut gx = vec![0.0; n];
        node.gradient_into(y, &mut gx);
        let g = gp.iter().zip(&gx).map(|(a, b)| (a / nx - p * b / (nx * nx)) / n as f64).collect();
        (p / (nx * n as f64), g)
    });
    let z: Vec<f64> = {
        let nx = node.norm(&search.argmax);
        search.argmax.iter().map(|v| v / nx).collect()
    };
    let fresh = PsiModel::new(space, samples, derive_seed(seed, 3));
    let value = fresh.estimate(&z).scale(1.0 / n as f64);
    let heuristic = matches!(fresh, PsiModel::Samples(_));
    let mut out = finish(search, value, heuristic);
    out.direction = z;
    out
}

/// MaxProj(B_X) = max_{z ∈ S^{n−1}} vol_{n−1}(Proj_{z⊥}B_X) = vol(B_X)·max ψ(z).
pub fn maxproj(space: &NormedSpace, restarts: usize, samples: usize, seed: u64) -> Result<DirectionalMax> {
    let n = space.dim();
    let model = PsiModel::new(space, samples, derive_seed(seed, 2));
    let search = sphere_maximize(n, restarts, seed, &standard_starts(n), |y| model.value_grad(y));
    let fresh = PsiModel::new(space, samples, derive_seed(seed, 3));
    let psi_at = fresh.estimate(&search.argmax);
    let vol = volume_any(space, samples, derive_seed(seed, 4))?;
    let heuristic = matches!(fresh, PsiModel::Samples(_));
    Ok(finish(search, product_estimate(psi_at, vol), heuristic))
}

/// MaxProj of B_{ℓ∞^n}: 2^{n−1}√n.
pub fn maxproj_cube(n: usize) -> f64 {
    2f64.powi(n as i32 - 1) * (n as f64).sqrt()
}

/// Γ-based sanity value used in tests: vol(B_2^{n−1}).
pub fn euclidean_maxproj(n: usize) -> f64 {
    std::f64::consts::PI.powf(0.5 * (n as f64 - 1.0)) / gamma(0.5 * (n as f64 - 1.0) + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        let linf = NormedSpace::lp(2, f64::INFINITY);
        assert_eq!(psi(&linf, &[1.0, 1.0], 10, 0).unwrap().value, 1.0);
        let l2s = NormedSpace::lp(2, 2.0);
        let v = psi(&l2s, &[1.0, 0.0], 10, 0).unwrap().value;
        assert!((v - 2.0 / std::f64::consts::PI).abs() < 1e-14);
        assert_eq!(psi(&l2s, &[0.0, 0.0], 10, 0).unwrap().value, 0.0);
    }

    #[test]
    fn sharp_cone_bound_planar() {
        assert!((sharp_cone_bound(2) - 1.0 / std::f64::consts::PI).abs() < 1e-14);
    }
}
