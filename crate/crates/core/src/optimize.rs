//! Multi-restart projected gradient ascent on the unit sphere.

use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::rng::{substream, tag};

#[derive(Debug, Clone, Serialize)]
pub struct AscentResult {
    /// Best point found, on the Euclidean unit sphere.
    pub argmax: Vec<f64>,
    pub value: f64,
    /// Standard deviation of the per-restart optima.
    pub dispersion: f64,
    pub restarts: usize,
}

pub const DEFAULT_RESTARTS: usize = 32;
const TOL: f64 = 1e-8;
const MAX_ITERS: usize = 2000;

pub fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

pub fn random_unit(rng: &mut impl rand::Rng, dim: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if normalize(&mut v) > 0.0 {
            return v;
        }
    }
}

fn climb<F>(f: &F, mut y: Vec<f64>) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let (mut val, mut grad) = f(&y);
    let mut step = 0.5;
    for _ in 0..MAX_ITERS {
        let dot: f64 = grad.iter().zip(&y).map(|(g, v)| g * v).sum();
        let tangent: Vec<f64> = grad.iter().zip(&y).map(|(g, v)| g - dot * v).collect();
        let tnorm = tangent.iter().map(|t| t * t).sum::<f64>().sqrt();
        if tnorm * step < TOL || step < TOL {
            break;
        }
        let mut cand: Vec<f64> = y
            .iter()
            .zip(&tangent)
            .map(|(v, t)| v + step * t / tnorm.max(1.0))
            .collect();
        normalize(&mut cand);
        let (cv, cg) = f(&cand);
        if cv > val {
            let gain = cv - val;
            y = cand;
            val = cv;
            grad = cg;
            step = (step * 1.5).min(1.0);
            if gain <= TOL * val.abs().max(1e-300) && step < 1e-4 {
                break;
            }
        } else {
            step *= 0.5;
        }
    }
    (y, val)
}

/// Maximize `f` over the unit sphere. `f` returns the value and its Euclidean gradient
/// (any ambient extension works; the tangential part is used). `starts` adds
/// deterministic starting points before the random restarts.
pub fn sphere_maximize<F>(
    dim: usize,
    restarts: usize,
    seed: u64,
    starts: &[Vec<f64>],
    f: F,
) -> AscentResult
where
    F: Fn(&[f64]) -> (f64, Vec<f64>) + Sync,
{
    let mut inits: Vec<Vec<f64>> = starts
        .iter()
        .map(|s| {
            let mut v = s.clone();
            normalize(&mut v);
            v
        })
        .collect();
    for r in 0..restarts {
        let mut rng = substream(seed, tag::RESTART, r as u64);
        inits.push(random_unit(&mut rng, dim));
    }
    let results: Vec<(Vec<f64>, f64)> = inits.into_par_iter().map(|y| climb(&f, y)).collect();
    let vals: Vec<f64> = results.iter().map(|r| r.1).collect();
    let k = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / k;
    let dispersion = if vals.len() > 1 {
        (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    let best = results
        .into_iter()
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .expect("at least one start");
    AscentResult {
        argmax: best.0,
        value: best.1,
        dispersion,
        restarts: vals.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_top_eigenvector() {
        // f(y) = yᵀAy on the sphere, A = diag(1, 3, 2).
        let a = [1.0, 3.0, 2.0];
        let r = sphere_maximize(3, 8, 1, &[], |y| {
            let v = y.iter().zip(&a).map(|(x, w)| w * x * x).sum();
            (v, y.iter().zip(&a).map(|(x, w)| 2.0 * w * x).collect())
        });
        assert!((r.value - 3.0).abs() < 1e-8);
        assert!(r.argmax[1].abs() > 1.0 - 1e-6);
    }

    #[test]
    fn l1_over_sphere_reaches_sqrt_n() {
        let n = 5;
        let r = sphere_maximize(n, 16, 2, &[], |y| {
            (
                y.iter().map(|v| v.abs()).sum(),
                y.iter().map(|v| v.signum()).collect(),
            )
        });
        assert!((r.value - (n as f64).sqrt()).abs() < 1e-6);
    }
}
