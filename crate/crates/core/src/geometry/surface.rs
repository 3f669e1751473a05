//! Surface-to-volume ratios and isoperimetric quotients via
//! vol_{n−1}(∂B)/vol(B) = n ∫ ‖∇‖·‖_X‖₂ dκ_X.

use super::sampling::cone_expectation;
use super::volume::{ln_volume, volume_mc};
use crate::error::Result;
use crate::estimate::MonteCarloEstimate;
use crate::rng::derive_seed;
use crate::space::{Exponent, NormedSpace, Node};
use crate::special::{ln_factorial, ln_gamma};

fn l2(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn surface_ratio(space: &NormedSpace, samples: usize, seed: u64) -> MonteCarloEstimate {
    let n = space.dim() as f64;
    cone_expectation(space, samples, seed, |_, g| l2(g)).scale(n)
}

/// ∫ ‖∇‖·‖_X‖₂² dκ_X.
pub fn gradient_second_moment(space: &NormedSpace, samples: usize, seed: u64) -> MonteCarloEstimate {
    cone_expectation(space, samples, seed, |_, g| g.iter().map(|v| v * v).sum())
}

/// Ratio ∫‖∇‖² dκ_{ℓp^k(X)} / ∫‖∇‖² dκ_X for X of dimension m:
/// kΓ(km/p)Γ((m+2p−2)/p) / (Γ(m/p)Γ((km+2p−2)/p)).
pub fn block_second_moment_factor(k: usize, m: usize, p: f64) -> f64 {
    let (k, m) = (k as f64, m as f64);
    k * (ln_gamma(k * m / p) + ln_gamma((m + 2.0 * p - 2.0) / p)
        - ln_gamma(m / p)
        - ln_gamma((k * m + 2.0 * p - 2.0) / p))
        .exp()
}

/// Closed-form isoperimetric quotients: cube 2n, Euclidean ball n√π/Γ(n/2+1)^{1/n},
/// cross-polytope n^{3/2}(2ⁿ/n!)^{1/n}.
pub fn iq_closed_form(space: &NormedSpace) -> Option<f64> {
    match space.node() {
        Node::Lp { n, p } => {
            let nf = *n as f64;
            match p {
                Exponent::Inf => Some(2.0 * nf),
                Exponent::Finite(p) if *p == 2.0 => {
                    Some(nf * std::f64::consts::PI.sqrt() / (ln_gamma(0.5 * nf + 1.0) / nf).exp())
                }
                Exponent::Finite(p) if *p == 1.0 => {
                    Some(nf.powf(1.5) * ((nf * 2f64.ln() - ln_factorial(*n as u64)) / nf).exp())
                }
                _ => None,
            }
        }
        _ => None,
    }
}

/// iq(B_X) = surface_ratio · vol^{1/n}; the volume is exact when available.
pub fn iq(space: &NormedSpace, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    let n = space.dim() as f64;
    let ratio = surface_ratio(space, samples, seed);
    let (root, rel_root) = match ln_volume(space.node()) {
        Some(lv) => ((lv / n).exp(), 0.0),
        None => {
            let v = volume_mc(space, samples, derive_seed(seed, 1), false)?;
            (v.value.powf(1.0 / n), v.stderr / v.value / n)
        }
    };
    let value = ratio.value * root;
    let rel = ((ratio.stderr / ratio.value).powi(2) + rel_root * rel_root).sqrt();
    Ok(MonteCarloEstimate {
        value,
        stderr: value * rel,
        trials: ratio.trials,
        seed,
    })
}
