//! Companion spaces: a norm equivalent to ℓ_p^n, up to reported constants, whose ball has
//! small projections.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::{Exponent, Node, NormedSpace, SpaceDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompanionRule {
    /// p ≤ 2: the space itself.
    Itself,
    /// ℓ_p^k(Ω_{(m−1)/2}^m) with n = km.
    Blocks,
    /// ℓ_p^k(Ω^m) ⊕_∞ Ω^r with n = km + r, 0 < r < m.
    Patched,
    /// p = ∞ or p > n: a single Ω_{(n−1)/2}^n.
    Orlicz,
    /// ℓ_{ln n} when no block size is admissible.
    LogFallback,
}

#[derive(Debug, Clone, Serialize)]
pub struct Companion {
    pub descriptor: SpaceDescriptor,
    pub rule: CompanionRule,
    /// Block size m, number of full blocks k, remainder r.
    pub m: usize,
    pub k: usize,
    pub r: usize,
    pub beta: Option<f64>,
    /// lower·‖x‖_X ≤ ‖x‖_Y ≤ upper·‖x‖_X.
    pub lower: f64,
    pub upper: f64,
}

impl Companion {
    pub fn space(&self) -> NormedSpace {
        NormedSpace::new(self.descriptor.clone()).expect("companion descriptors are valid")
    }
}

/// β = (m−1)/2, or 1 for a one-dimensional block.
pub fn block_beta(m: usize) -> f64 {
    if m > 1 {
        0.5 * (m as f64 - 1.0)
    } else {
        1.0
    }
}

/// Sup of ‖x‖_∞-to-Ω ratio: ‖x‖_Ω ≤ ‖x‖_∞/(1−e^{−β/m}).
fn orlicz_upper(m: usize, beta: f64) -> f64 {
    1.0 / -(-beta / m as f64).exp_m1()
}

/// Largest admissible block size: a divisor of n in [max(2,p), min(⌊e^p⌋, n)].
pub fn admissible_block(n: usize, p: f64) -> Option<usize> {
    let lo = p.max(2.0).ceil() as usize;
    let hi = (p.exp().floor().min(n as f64)) as usize;
    (lo..=hi).rev().find(|m| n % m == 0)
}

/// The companion Y of ℓ_p^n.
pub fn companion_space(x: &NormedSpace) -> Result<Companion> {
    let (n, p) = match x.node() {
        Node::Lp { n, p } => (*n, *p),
        _ => {
            return Err(Error::unsupported(
                "lp",
                "companion spaces are defined for lp descriptors",
            ))
        }
    };
    let itself = |rule| Companion {
        descriptor: x.descriptor().clone(),
        rule,
        m: 1,
        k: n,
        r: 0,
        beta: None,
        lower: 1.0,
        upper: 1.0,
    };
    let orlicz = |n: usize| {
        let beta = block_beta(n);
        Companion {
            descriptor: SpaceDescriptor::orlicz(n, beta),
            rule: CompanionRule::Orlicz,
            m: n,
            k: 1,
            r: 0,
            beta: Some(beta),
            lower: 1.0 / (n as f64).powf(p.recip()),
            upper: orlicz_upper(n, beta),
        }
    };
    let pf = match p {
        Exponent::Inf => return Ok(orlicz(n)),
        Exponent::Finite(p) if p <= 2.0 || n < 2 => return Ok(itself(CompanionRule::Itself)),
        Exponent::Finite(p) if p > n as f64 => return Ok(orlicz(n)),
        Exponent::Finite(p) => p,
    };
    if let Some(m) = admissible_block(n, pf) {
        let k = n / m;
        if k == 1 {
            return Ok(orlicz(n));
        }
        let beta = block_beta(m);
        return Ok(Companion {
            descriptor: SpaceDescriptor::block_lp(p, vec![SpaceDescriptor::orlicz(m, beta); k]),
            rule: CompanionRule::Blocks,
            m,
            k,
            r: 0,
            beta: Some(beta),
            lower: (m as f64).powf(-1.0 / pf),
            upper: orlicz_upper(m, beta),
        });
    }
    let lo = pf.max(2.0).ceil() as usize;
    let hi = (pf.exp().floor().min(n as f64)) as usize;
    if lo > hi {
        let q = (n as f64).ln().max(1.0);
        let mut c = itself(CompanionRule::LogFallback);
        c.descriptor = SpaceDescriptor::lp(n, Exponent::Finite(q));
        let (a, b) = (1.0 / pf, 1.0 / q);
        // ‖x‖_q ∈ [1, n^{1/q−1/p}]·‖x‖_p for q ≤ p.
        c.lower = 1f64.min((n as f64).powf(b - a));
        c.upper = 1f64.max((n as f64).powf(b - a));
        return Ok(c);
    }
    let m = hi;
    let (k, r) = (n / m, n % m);
    let beta = block_beta(m);
    let beta_r = block_beta(r);
    let main = if k == 1 {
        SpaceDescriptor::orlicz(m, beta)
    } else {
        SpaceDescriptor::block_lp(p, vec![SpaceDescriptor::orlicz(m, beta); k])
    };
    let descriptor = SpaceDescriptor::block_lp(Exponent::Inf, vec![main, SpaceDescriptor::orlicz(r, beta_r)]);
    Ok(Companion {
        descriptor,
        rule: CompanionRule::Patched,
        m,
        k,
        r,
        beta: Some(beta),
        lower: 2f64.powf(-1.0 / pf) * (m as f64).powf(-1.0 / pf).min((r as f64).powf(-1.0 / pf)),
        upper: orlicz_upper(m, beta).max(orlicz_upper(r, beta_r)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules() {
        assert_eq!(companion_space(&NormedSpace::lp(10, 2.0)).unwrap().rule, CompanionRule::Itself);
        let c = companion_space(&NormedSpace::lp(42, f64::INFINITY)).unwrap();
        assert_eq!((c.rule, c.m, c.beta), (CompanionRule::Orlicz, 42, Some(20.5)));
        // p = 3: divisors of 12 in [3, 12] → m = 12, k = 1.
        let c = companion_space(&NormedSpace::lp(12, 3.0)).unwrap();
        assert_eq!((c.rule, c.m), (CompanionRule::Orlicz, 12));
        // p = 3, n = 60: largest divisor ≤ ⌊e³⌋ = 20 is 20.
        let c = companion_space(&NormedSpace::lp(60, 3.0)).unwrap();
        assert_eq!((c.rule, c.m, c.k), (CompanionRule::Blocks, 20, 3));
        // n = 23 prime, p = 2.5: range [3, 12] has no divisor.
        let c = companion_space(&NormedSpace::lp(23, 2.5)).unwrap();
        assert_eq!((c.rule, c.m, c.k, c.r), (CompanionRule::Patched, 12, 1, 11));
        assert_eq!(c.descriptor.n, 23);
    }
}
