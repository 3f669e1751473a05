//! Mean width, the Cauchy surface-area identity and the ball-intersection construction.

use rand_distr::StandardNormal;
use rand::Rng as _;
use serde::Serialize;

use super::psi::maxproj;
use super::sampling::{cone_expectation, cone_expectation_rng};
use super::surface::iq;
use super::volume::volume_mc;
use crate::error::{Error, Result};
use crate::estimate::{merge_all, MonteCarloEstimate, WeightedMean};
use crate::optimize::random_unit;
use crate::rng::{derive_seed, run_batches, tag};
use crate::space::{Exponent, NormedSpace, SpaceDescriptor};
use crate::special::{gaussian_norm_mean, ln_gamma};

/// M(X) = average of ‖z‖_X over S^{n−1}, computed as E‖G‖_X / E‖G‖₂ with the exact denominator.
pub fn mean_width_dual(space: &NormedSpace, samples: usize, seed: u64) -> MonteCarloEstimate {
    let n = space.dim();
    let node = space.node();
    let parts = run_batches(seed, tag::GAUSS, samples, |rng, len, _| {
        let mut g = vec![0.0; n];
        let mut acc = WeightedMean::default();
        for _ in 0..len {
            g.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            acc.push(node.norm(&g), 1.0);
        }
        acc
    });
    merge_all(&parts).estimate(seed).scale(1.0 / gaussian_norm_mean(n))
}

#[derive(Debug, Clone, Serialize)]
pub struct CauchyCheck {
    /// vol_{n−1}(∂B)/vol(B) = n E‖∇‖₂.
    pub lhs: MonteCarloEstimate,
    /// (2√πΓ((n+1)/2)/Γ(n/2)) · average projection volume / vol(B).
    pub rhs: MonteCarloEstimate,
    pub residual: f64,
    pub combined_stderr: f64,
}

/// Both sides of the Cauchy surface-area formula on independent samples. Everything is
/// divided by vol(B_X), which leaves the relative residual unchanged.
pub fn cauchy_surface_identity_check(space: &NormedSpace, samples: usize, seed: u64) -> CauchyCheck {
    let n = space.dim();
    let nf = n as f64;
    let lhs = cone_expectation(space, samples, derive_seed(seed, 1), |_, g| {
        g.iter().map(|v| v * v).sum::<f64>().sqrt()
    })
    .scale(nf);
    let c = 2.0 * std::f64::consts::PI.sqrt() * (ln_gamma(0.5 * (nf + 1.0)) - ln_gamma(0.5 * nf)).exp();
    let rhs = cone_expectation_rng(space, samples, derive_seed(seed, 2), |_, g, rng| {
        let z = random_unit(rng, g.len());
        z.iter().zip(g).map(|(a, b)| a * b).sum::<f64>().abs()
    })
    .scale(0.5 * nf * c);
    let residual = (lhs.value - rhs.value) / lhs.value;
    let combined_stderr = (lhs.stderr.powi(2) + rhs.stderr.powi(2)).sqrt() / lhs.value;
    CauchyCheck {
        lhs,
        rhs,
        residual,
        combined_stderr,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntersectReport {
    pub descriptor: SpaceDescriptor,
    pub r: f64,
    pub mean_width: MonteCarloEstimate,
    pub volume: MonteCarloEstimate,
    /// vol(L)^{1/n}·M(X)·√n, bounded below by a constant.
    pub volume_ratio: f64,
    /// MaxProj(L)/vol(L)^{(n−1)/n}, bounded above by a constant.
    pub maxproj_ratio: f64,
}

/// L = B_X ∩ rB_2 with r = 1/(2M(X)) by default.
pub fn intersect_construction(
    space: &NormedSpace,
    r: Option<f64>,
    samples: usize,
    restarts: usize,
    seed: u64,
) -> Result<(NormedSpace, IntersectReport)> {
    let n = space.dim();
    let mw = mean_width_dual(space, samples, derive_seed(seed, 1));
    let r = r.unwrap_or(1.0 / (2.0 * mw.value));
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::input("/r", "r must be positive"));
    }
    let l = NormedSpace::new(SpaceDescriptor::intersect_ball(space.descriptor().clone(), r))?;
    let vol = volume_mc(&l, samples, derive_seed(seed, 2), false)?;
    let mp = maxproj(&l, restarts, samples, derive_seed(seed, 3))?;
    let nf = n as f64;
    let report = IntersectReport {
        descriptor: l.descriptor().clone(),
        r,
        mean_width: mw,
        volume: vol,
        volume_ratio: vol.value.powf(1.0 / nf) * mw.value * nf.sqrt(),
        maxproj_ratio: mp.value.value / vol.value.powf((nf - 1.0) / nf),
    };
    Ok((l, report))
}

/// iq of [−1,1]ⁿ ∩ rB_2 for each radius.
pub fn cube_ball_iq_scan(n: usize, radii: &[f64], samples: usize, seed: u64) -> Result<Vec<(f64, MonteCarloEstimate)>> {
    radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let l = NormedSpace::new(SpaceDescriptor::intersect_ball(SpaceDescriptor::lp(n, Exponent::Inf), r))?;
            Ok((r, iq(&l, samples, derive_seed(seed, i as u64))?))
        })
        .collect()
}
