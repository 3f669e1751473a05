//! Explicit lower bound from the external volume ratio and the two-norm upper bound.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::MonteCarloEstimate;
use crate::geometry::psi::{standard_starts, PsiModel};
use crate::geometry::volume::{ln_volume, volume_mc};
use crate::optimize::sphere_maximize;
use crate::rng::derive_seed;
use crate::space::NormedSpace;
use crate::special::{ln_euclidean_ball_volume, ln_factorial, ln_gamma};

/// 2(n!)^{1/(2n)} Γ(1+n/2)^{1/n} / √(πn), the factor multiplying evr(X).
pub fn evr_constant(n: usize) -> f64 {
    let nf = n as f64;
    let ln = 2f64.ln() + ln_factorial(n as u64) / (2.0 * nf) + ln_gamma(1.0 + 0.5 * nf) / nf
        - 0.5 * (std::f64::consts::PI * nf).ln();
    ln.exp()
}

/// √2/(e√π), the limit of the lower bound over √n for the Euclidean family.
pub fn evr_constant_limit() -> f64 {
    2f64.sqrt() / (std::f64::consts::E * std::f64::consts::PI.sqrt())
}

#[derive(Debug, Clone, Serialize)]
pub struct SepLower {
    pub value: MonteCarloEstimate,
    pub evr: MonteCarloEstimate,
    pub circumradius: f64,
}

fn require_canonical(space: &NormedSpace) -> Result<f64> {
    space.circumradius().map_err(|_| {
        Error::unsupported(
            "is_canonically_positioned",
            "the volume-ratio lower bound needs a canonically positioned space (lp, block_lp over equal blocks, orlicz_beta, schatten)",
        )
    })
}

/// SEP(X) ≥ evr(X)·2(n!)^{1/(2n)}Γ(1+n/2)^{1/n}/√(πn) with evr = (vol(R·B₂)/vol(B_X))^{1/n},
/// R the circumradius. Exact whenever the volume is.
pub fn sep_lower_evr(space: &NormedSpace) -> Result<f64> {
    let r = require_canonical(space)?;
    let lv = ln_volume(space.node()).ok_or_else(|| {
        Error::unsupported("has_exact_volume", "use sep_lower_evr_estimate for Monte Carlo volumes")
    })?;
    let n = space.dim() as f64;
    let evr = ((ln_euclidean_ball_volume(space.dim()) + n * r.ln() - lv) / n).exp();
    Ok(evr * evr_constant(space.dim()))
}

/// As [`sep_lower_evr`], falling back to a Monte Carlo volume when no closed form exists.
pub fn sep_lower_evr_estimate(space: &NormedSpace, trials: usize, seed: u64) -> Result<SepLower> {
    let r = require_canonical(space)?;
    let n = space.dim();
    let nf = n as f64;
    let (lv, rel) = match ln_volume(space.node()) {
        Some(lv) => (lv, 0.0),
        None => {
            let v = volume_mc(space, trials, seed, false)?;
            (v.value.ln(), v.stderr / v.value)
        }
    };
    let evr_v = ((ln_euclidean_ball_volume(n) + nf * r.ln() - lv) / nf).exp();
    // d(V^{−1/n})/V^{−1/n} = −dV/(nV).
    let evr = MonteCarloEstimate {
        value: evr_v,
        stderr: evr_v * rel / nf,
        trials: if rel == 0.0 { 0 } else { trials as u64 },
        seed,
    };
    Ok(SepLower {
        value: evr.scale(evr_constant(n)),
        evr,
        circumradius: r,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SepUpper {
    /// 4·s·ψ_Y(z) at the best boundary point z of B_X, with fresh samples.
    pub value: MonteCarloEstimate,
    /// s = sup ‖y‖_X/‖y‖_Y, the factor that rescales B_Y into B_X.
    pub scale: f64,
    /// Maximizing point, normalized to ‖z‖_X = 1.
    pub direction: Vec<f64>,
    pub dispersion: f64,
    pub restarts: usize,
    /// Suprema come from multi-restart ascent.
    pub heuristic: bool,
}

/// An orthogonal change of coordinates applied to both spaces: X' = Q X, Y' = Q Y.
/// `None` is the identity.
pub type Rotation<'a> = Option<&'a [Vec<f64>]>;

fn rotate_t(q: Rotation, y: &[f64]) -> Vec<f64> {
    match q {
        // Qᵀy
        Some(q) => (0..y.len()).map(|j| (0..y.len()).map(|i| q[i][j] * y[i]).sum()).collect(),
        None => y.to_vec(),
    }
}

fn rotate(q: Rotation, y: &[f64]) -> Vec<f64> {
    match q {
        Some(q) => q.iter().map(|row| row.iter().zip(y).map(|(a, b)| a * b).sum()).collect(),
        None => y.to_vec(),
    }
}

/// ∇ of ‖Qᵀy‖ is Q∇‖·‖(Qᵀy).
fn norm_grad(space: &NormedSpace, q: Rotation, y: &[f64]) -> (f64, Vec<f64>) {
    let z = rotate_t(q, y);
    let mut g = vec![0.0; z.len()];
    space.node().gradient_into(&z, &mut g);
    (space.norm(&z), rotate(q, &g))
}

/// SEP(X) ≤ 4·sup_{z∈∂B_X} ψ_{Y'}(z) where Y' is Y rescaled so that B_{Y'} ⊂ B_X.
pub fn sep_upper_two_norm(
    x: &NormedSpace,
    y: &NormedSpace,
    restarts: usize,
    samples: usize,
    seed: u64,
) -> Result<SepUpper> {
    sep_upper_two_norm_rotated(x, y, None, restarts, samples, seed)
}

/// [`sep_upper_two_norm`] for the pair (QX, QY).
pub fn sep_upper_two_norm_rotated(
    x: &NormedSpace,
    y: &NormedSpace,
    q: Rotation,
    restarts: usize,
    samples: usize,
    seed: u64,
) -> Result<SepUpper> {
    let n = x.dim();
    if y.dim() != n {
        return Err(Error::input("/space_y/n", format!("dimension {} differs from X's {}", y.dim(), n)));
    }
    if let Some(q) = q {
        if q.len() != n || q.iter().any(|r| r.len() != n) {
            return Err(Error::input("/rotation", "rotation must be an n×n matrix"));
        }
    }
    let starts: Vec<Vec<f64>> = standard_starts(n).iter().map(|s| rotate(q, s)).collect();
    let (scale, scale_dispersion) = if x.descriptor() == y.descriptor() {
        (1.0, 0.0)
    } else {
        let r = sphere_maximize(n, restarts, derive_seed(seed, 1), &starts, |v| {
            let (nx, gx) = norm_grad(x, q, v);
            let (ny, gy) = norm_grad(y, q, v);
            let g = gx.iter().zip(&gy).map(|(a, b)| a / ny - nx * b / (ny * ny)).collect();
            (nx / ny, g)
        });
        (r.value, r.dispersion)
    };
    let model = PsiModel::new(y, samples, derive_seed(seed, 2));
    let search = sphere_maximize(n, restarts, derive_seed(seed, 3), &starts, |v| {
        let (p, gp) = model.value_grad(&rotate_t(q, v));
        let gp = rotate(q, &gp);
        let (nx, gx) = norm_grad(x, q, v);
        let g = gp.iter().zip(&gx).map(|(a, b)| a / nx - p * b / (nx * nx)).collect();
        (p / nx, g)
    });
    let nx = norm_grad(x, q, &search.argmax).0;
    let z: Vec<f64> = search.argmax.iter().map(|v| v / nx).collect();
    let fresh = PsiModel::new(y, samples, derive_seed(seed, 4));
    let value = fresh.estimate(&rotate_t(q, &z)).scale(4.0 * scale);
    Ok(SepUpper {
        value,
        scale,
        direction: z,
        dispersion: 4.0 * (scale * search.dispersion + scale_dispersion * search.value),
        restarts: search.restarts,
        heuristic: true,
    })
}
