use rand::Rng as _;

use crate::error::{Error, Result};
use crate::estimate::MonteCarloEstimate;
use crate::rng::{run_batches, tag};
use crate::space::{Exponent, NormedSpace, Node};
use crate::special::{ln_factorial, ln_gamma, poisson_upper_tail};

/// Hit-or-miss is refused above this dimension unless overridden.
pub const MAX_MC_DIM: usize = 20;

/// ln vol(B_X) for spaces with a closed form.
pub fn ln_volume(node: &Node) -> Option<f64> {
    match node {
        // (2Γ(1+1/p))^n / Γ(1+n/p)
        Node::Lp { n, p } => {
            let n = *n as f64;
            Some(match p {
                Exponent::Inf => n * 2f64.ln(),
                Exponent::Finite(p) => n * (2.0f64.ln() + ln_gamma(1.0 + 1.0 / p)) - ln_gamma(1.0 + n / p),
            })
        }
        // 2^m Pr[Poisson(β) ≥ m] = 2^m (1 − e^{−β} Σ_{j<m} β^j/j!)
        Node::Orlicz { m, beta } => {
            Some(*m as f64 * 2f64.ln() + poisson_upper_tail(*beta, *m as u64).ln())
        }
        // Π Γ(1+m_j/p) vol(B_j) / Γ(1+Σm_j/p); a plain product for p = ∞
        Node::Block { p, blocks, .. } => {
            let mut s = 0.0;
            let mut total = 0usize;
            for b in blocks {
                s += ln_volume(b)?;
                total += b.dim();
                if let Exponent::Finite(p) = p {
                    s += ln_gamma(1.0 + b.dim() as f64 / p);
                }
            }
            if let Exponent::Finite(p) = p {
                s -= ln_gamma(1.0 + total as f64 / p);
            }
            Some(s)
        }
        Node::Schatten { .. } | Node::Intersect { .. } => None,
    }
}

pub fn volume_exact(space: &NormedSpace) -> Result<f64> {
    ln_volume(space.node()).map(f64::exp).ok_or_else(|| {
        Error::unsupported(
            "has_exact_volume",
            format!("no closed-form volume for {}, use volume_mc", space.descriptor().kind.as_str()),
        )
    })
}

/// The asymptotic form (2β)^m/(e^β m!) of vol(B_{Ω_β^m}).
pub fn orlicz_volume_asymptotic(m: usize, beta: f64) -> f64 {
    (m as f64 * (2.0 * beta).ln() - beta - ln_factorial(m as u64)).exp()
}

/// Hit-or-miss volume estimate over the box [−R∞, R∞]ⁿ.
pub fn volume_mc(space: &NormedSpace, trials: usize, seed: u64, allow_high_dim: bool) -> Result<MonteCarloEstimate> {
    let n = space.dim();
    if n > MAX_MC_DIM && !allow_high_dim {
        return Err(Error::Diagnostic(format!(
            "hit-or-miss in dimension {n} > {MAX_MC_DIM} has a vanishing hit rate; pass the override to proceed"
        )));
    }
    if trials == 0 {
        return Err(Error::input("/trials", "trials must be positive"));
    }
    let r = space.linf_radius();
    let node = space.node();
    let hits: u64 = run_batches(seed, tag::VOLUME, trials, |rng, len, _| {
        let mut x = vec![0.0; n];
        let mut h = 0u64;
        for _ in 0..len {
            for v in x.iter_mut() {
                *v = r * (2.0 * rng.random::<f64>() - 1.0);
            }
            h += node.within(&x, 1.0) as u64;
        }
        h
    })
    .into_iter()
    .sum();
    let box_vol = (2.0 * r).powi(n as i32);
    let ph = hits as f64 / trials as f64;
    Ok(MonteCarloEstimate {
        value: box_vol * ph,
        stderr: box_vol * (ph * (1.0 - ph) / trials as f64).sqrt(),
        trials: trials as u64,
        seed,
    })
}

/// Exact volume when available, otherwise hit-or-miss.
pub fn volume_any(space: &NormedSpace, trials: usize, seed: u64) -> Result<MonteCarloEstimate> {
    match volume_exact(space) {
        Ok(v) => Ok(MonteCarloEstimate::exact(v)),
        Err(_) => volume_mc(space, trials, seed, false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceDescriptor;

    #[test]
    fn closed_forms() {
        assert!((volume_exact(&NormedSpace::lp(3, 1.0)).unwrap() - 4.0 / 3.0).abs() < 1e-14);
        assert!((volume_exact(&NormedSpace::lp(2, 2.0)).unwrap() - std::f64::consts::PI).abs() < 1e-14);
        let om = NormedSpace::new(SpaceDescriptor::orlicz(1, 2f64.ln())).unwrap();
        assert!((volume_exact(&om).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn block_of_lines_is_lp() {
        // ℓ3 over five copies of ℓ3^1 is ℓ3^5.
        let leaf = SpaceDescriptor::lp(1, Exponent::Finite(3.0));
        let b = NormedSpace::new(SpaceDescriptor::block_lp(Exponent::Finite(3.0), vec![leaf; 5])).unwrap();
        let v = volume_exact(&b).unwrap();
        assert!((v - volume_exact(&NormedSpace::lp(5, 3.0)).unwrap()).abs() < 1e-12 * v);
    }
}
