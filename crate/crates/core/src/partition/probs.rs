//! Separation and padding probabilities of the ball partition.

use rand::Rng as _;
use serde::Serialize;

use super::sample::{check_delta, check_points, Carver, PartitionSample, Proposal, Window};
use crate::error::{Error, Result};
use crate::estimate::{merge_all, MonteCarloEstimate, WeightedMean};
use crate::geometry::psi::psi;
use crate::geometry::sampling::{fallback_mean, fallback_points, ConeSampler};
use crate::rng::{derive_seed, run_batches, tag};
use crate::space::{Exponent, NormedSpace};

fn binomial(hits: u64, trials: usize, seed: u64) -> MonteCarloEstimate {
    let p = hits as f64 / trials as f64;
    MonteCarloEstimate {
        value: p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        trials: trials as u64,
        seed,
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::input("/trials", "trials must be positive"));
    }
    Ok(())
}

/// Fraction of partitions separating `u` and `v`.
pub fn separation_prob_mc(space: &NormedSpace, u: &[f64], v: &[f64], delta: f64, trials: usize, seed: u64) -> Result<MonteCarloEstimate> {
    separation_prob_mc_with(space, u, v, delta, trials, seed, Proposal::Auto)
}

pub fn separation_prob_mc_with(
    space: &NormedSpace,
    u: &[f64],
    v: &[f64],
    delta: f64,
    trials: usize,
    seed: u64,
    mode: Proposal,
) -> Result<MonteCarloEstimate> {
    check_delta(delta)?;
    check_trials(trials)?;
    let q = vec![u.to_vec(), v.to_vec()];
    check_points(space, &q, "/queries")?;
    if u == v {
        return Ok(MonteCarloEstimate::exact(0.0));
    }
    let s = 2.0 / delta;
    let scaled: Vec<Vec<f64>> = q.iter().map(|p| p.iter().map(|x| x * s).collect()).collect();
    let carver = Carver::new(space);
    let window = carver.window_for(&scaled);
    let mode = carver.resolve(mode, &window, 1.0);
    drop(carver);
    let parts = run_batches(seed, tag::PARTITION, trials, |rng, len, _| -> Result<u64> {
        let mut c = Carver::new(space);
        let mut a = [0usize; 2];
        let mut sep = 0;
        for _ in 0..len {
            c.carve(&scaled, &window, mode, rng, &mut a, None)?;
            sep += (a[0] != a[1]) as u64;
        }
        Ok(sep)
    });
    let hits = parts.into_iter().sum::<Result<u64>>()?;
    Ok(binomial(hits, trials, seed))
}

/// t = vol(B ∩ (w + B))/vol(B), estimated as P_{x~Unif(B)}[‖x − w‖ ≤ 1].
pub fn overlap_fraction(space: &NormedSpace, w: &[f64], samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    check_trials(samples)?;
    check_points(space, &[w.to_vec()], "/w")?;
    if w.iter().all(|&x| x == 0.0) {
        return Ok(MonteCarloEstimate::exact(1.0));
    }
    let node = space.node();
    let n = space.dim();
    if space.norm(w) >= 2.0 {
        return Ok(MonteCarloEstimate::exact(0.0));
    }
    let indicator = |x: &[f64], d: &mut [f64]| {
        for i in 0..n {
            d[i] = x[i] - w[i];
        }
        node.within(d, 1.0) as u64 as f64
    };
    match ConeSampler::new(node) {
        Some(sampler) => {
            let parts = run_batches(seed, tag::OVERLAP, samples, |rng, len, _| {
                let mut x = vec![0.0; n];
                let mut g = vec![0.0; n];
                let mut d = vec![0.0; n];
                let mut acc = WeightedMean::default();
                for _ in 0..len {
                    let wt = sampler.draw(rng, &mut x, &mut g);
                    let r = rng.random::<f64>().powf(1.0 / n as f64);
                    x.iter_mut().for_each(|v| *v *= r);
                    acc.push(indicator(&x, &mut d), wt);
                }
                acc
            });
            Ok(merge_all(&parts).estimate(seed))
        }
        None => {
            let (pts, correlated) = fallback_points(node, samples, seed);
            let mut d = vec![0.0; n];
            let vals: Vec<f64> = pts.iter().map(|x| indicator(x, &mut d)).collect();
            Ok(fallback_mean(&vals, correlated, seed))
        }
    }
}

/// Pr[separated] = (2 − 2t)/(2 − t).
pub fn separation_from_overlap(t: f64) -> f64 {
    (2.0 - 2.0 * t) / (2.0 - t)
}

/// Separation probability from the overlap formula; only t is estimated.
pub fn separation_prob_exact(space: &NormedSpace, u: &[f64], v: &[f64], delta: f64, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    check_delta(delta)?;
    check_points(space, &[u.to_vec(), v.to_vec()], "/queries")?;
    if u == v {
        return Ok(MonteCarloEstimate::exact(0.0));
    }
    let w: Vec<f64> = u.iter().zip(v).map(|(a, b)| 2.0 * (b - a) / delta).collect();
    let t = overlap_fraction(space, &w, samples, seed)?;
    let d = 2.0 / (2.0 - t.value).powi(2);
    Ok(MonteCarloEstimate {
        value: separation_from_overlap(t.value),
        stderr: d * t.stderr,
        ..t
    })
}

/// ((1−ρ)/(1+ρ))ⁿ.
pub fn padding_prob_exact(space: &NormedSpace, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(((1.0 - rho) / (1.0 + rho)).powi(space.dim() as i32))
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::input("/rho", format!("rho must lie in (0, 1), got {rho}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct PaddingEstimate {
    pub estimate: MonteCarloEstimate,
    pub mode: Proposal,
}

/// Fraction of partitions in which u + ρ(Δ/2)B_X lies inside the cluster of u. The event is
/// decided by the first center within (1+ρ)Δ/2 of u, which pads u iff it is within (1−ρ)Δ/2.
pub fn padding_prob_mc(space: &NormedSpace, rho: f64, delta: f64, trials: usize, seed: u64, mode: Proposal) -> Result<PaddingEstimate> {
    check_rho(rho)?;
    check_delta(delta)?;
    check_trials(trials)?;
    let carver = Carver::new(space);
    let r = space.linf_radius() * (1.0 + rho);
    let window = Window {
        lo: vec![-r; space.dim()],
        hi: vec![r; space.dim()],
    };
    let mode = carver.resolve(mode, &window, 1.0 + rho);
    drop(carver);
    let parts = run_batches(seed, tag::PADDING, trials, |rng, len, _| -> Result<u64> {
        let mut c = Carver::new(space);
        let mut hits = 0;
        for _ in 0..len {
            hits += c.padded(rho, &window, mode, rng)? as u64;
        }
        Ok(hits)
    });
    let hits = parts.into_iter().sum::<Result<u64>>()?;
    Ok(PaddingEstimate {
        estimate: binomial(hits, trials, seed),
        mode,
    })
}

/// Two-sided bound on Pr[sep] in terms of ψ = ψ((2/Δ)(v−u)):
/// (2e^ψ − 2)/(2e^ψ − 1) ≤ Pr ≤ 2ψ/(1 + ψ).
pub fn separation_bracket(psi: f64) -> (f64, f64) {
    let e = psi.exp();
    ((2.0 * e - 2.0) / (2.0 * e - 1.0), 2.0 * psi / (1.0 + psi))
}

#[derive(Debug, Clone, Serialize)]
pub struct Bracket {
    pub lower: f64,
    pub t: MonteCarloEstimate,
    pub upper: f64,
    pub psi: MonteCarloEstimate,
    /// lower ≤ t ≤ upper within 3 combined standard errors.
    pub holds: bool,
}

/// 1 − ψ(w) ≤ vol(B ∩ (w+B))/vol(B) ≤ e^{−ψ(w)}.
pub fn schmuckenschlager_bracket(space: &NormedSpace, w: &[f64], samples: usize, seed: u64) -> Result<Bracket> {
    let p = psi(space, w, samples, derive_seed(seed, 1))?;
    let t = overlap_fraction(space, w, samples, derive_seed(seed, 2))?;
    let lower = 1.0 - p.value;
    let upper = (-p.value).exp();
    let sd = (t.stderr.powi(2) + p.stderr.powi(2)).sqrt();
    let slack = 3.0 * sd + 1e-12;
    Ok(Bracket {
        lower,
        t,
        upper,
        psi: p,
        holds: lower - slack <= t.value && t.value <= upper + slack,
    })
}

/// 𝔡(u, v) = 4ψ(u − v).
pub fn separation_profile(space: &NormedSpace, u: &[f64], v: &[f64], samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    let d: Vec<f64> = u.iter().zip(v).map(|(a, b)| a - b).collect();
    Ok(psi(space, &d, samples, seed)?.scale(4.0))
}

/// Diameter bound of a product partition under the ℓs combination of the factor norms.
pub fn combined_delta(d1: f64, d2: f64, s: Exponent) -> f64 {
    match s {
        Exponent::Inf => d1.max(d2),
        Exponent::Finite(s) => (d1.powf(s) + d2.powf(s)).powf(1.0 / s),
    }
}

/// Split Δ between two factors with separation moduli σ₁, σ₂: Δ_i = Δ(σ_i/(σ₁+σ₂))^{1/s}.
pub fn split_delta(delta: f64, sigma1: f64, sigma2: f64, s: Exponent) -> (f64, f64) {
    match s {
        Exponent::Inf => (delta, delta),
        Exponent::Finite(s) => {
            let t = sigma1 + sigma2;
            (delta * (sigma1 / t).powf(1.0 / s), delta * (sigma2 / t).powf(1.0 / s))
        }
    }
}

/// 𝒫(x₁, x₂) = 𝒫₁(x₁) × 𝒫₂(x₂) on the product query set, ordered (i, j) ↦ i·|Q₂| + j.
pub fn product_partition(a: &PartitionSample, b: &PartitionSample, s: Exponent) -> PartitionSample {
    let (qa, qb) = (a.queries.len(), b.queries.len());
    let cb = b.centers.len();
    let mut queries = Vec::with_capacity(qa * qb);
    let mut assignment = Vec::with_capacity(qa * qb);
    for i in 0..qa {
        for j in 0..qb {
            queries.push([a.queries[i].clone(), b.queries[j].clone()].concat());
            assignment.push(a.assignment[i] * cb + b.assignment[j]);
        }
    }
    let mut centers = Vec::with_capacity(a.centers.len() * cb);
    for ca in &a.centers {
        for cbv in &b.centers {
            centers.push([ca.clone(), cbv.clone()].concat());
        }
    }
    PartitionSample {
        delta: combined_delta(a.delta, b.delta, s),
        queries,
        centers,
        assignment,
        window: Window {
            lo: [a.window.lo.clone(), b.window.lo.clone()].concat(),
            hi: [a.window.hi.clone(), b.window.hi.clone()].concat(),
        },
        proposals: a.proposals + b.proposals,
        mode: a.mode,
        seed: a.seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_endpoints() {
        let (lo, hi) = separation_bracket(0.0);
        assert_eq!((lo, hi), (0.0, 0.0));
        let (lo, hi) = separation_bracket(0.5);
        assert!(lo < hi);
        assert_eq!(separation_from_overlap(1.0), 0.0);
        assert_eq!(separation_from_overlap(0.0), 1.0);
    }

    #[test]
    fn delta_split_recombines() {
        let s = Exponent::Finite(2.0);
        let (d1, d2) = split_delta(3.0, 1.0, 2.0, s);
        assert!((combined_delta(d1, d2, s) - 3.0).abs() < 1e-14);
    }
}
