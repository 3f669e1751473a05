//! Cone-measure samplers, uniform ball sampling and hit-and-run.
//!
//! Direct samplers exist for ℓp leaves, Ω_β and block compositions of those. ℓp leaves use
//! the Schechtman–Zinn representation, Ω_β uses importance sampling from κ_{ℓ1} with weight
//! Σ(e^{β|τ_i|}−1) normalized by its exact mean, and blocks draw per-block radii.
//! An intersection whose base has a direct sampler is sampled exactly by rejection from the
//! base ball. Other spaces fall back to hit-and-run with radial projection.

use rand::Rng as _;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{batch_means, KahanSum, MonteCarloEstimate, WeightedMean};
use crate::optimize::random_unit;
use crate::rng::{run_batches, substream, tag, Rng};
use crate::space::norms::lp_norm;
use crate::space::{Exponent, NormedSpace, Node};

/// A point of ∂B_X drawn from the cone measure, with its importance weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeSample {
    pub point: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedPoint {
    pub point: Vec<f64>,
    pub weight: f64,
}

/// Direct cone-measure sampler compiled from a [`Node`].
#[derive(Debug, Clone)]
pub enum ConeSampler {
    Lp {
        n: usize,
        p: Exponent,
        gamma: Option<Gamma<f64>>,
    },
    Orlicz {
        m: usize,
        beta: f64,
        mean_weight: f64,
    },
    Block {
        p: Exponent,
        parts: Vec<ConeSampler>,
        offsets: Vec<usize>,
        radius: Vec<Option<Gamma<f64>>>,
    },
}

/// E_{κ_{ℓ1^m}} Σ(e^{β|τ_i|}−1) = m Σ_{k≥1} β^k (m−1)!/(m−1+k)!.
pub fn orlicz_mean_weight(m: usize, beta: f64) -> f64 {
    let mut term = beta / m as f64;
    let mut sum = 0.0;
    let mut k = 1usize;
    while term > 1e-18 * sum || k < 3 {
        sum += term;
        k += 1;
        term *= beta / (m - 1 + k) as f64;
        if k > 100_000 {
            break;
        }
    }
    m as f64 * sum
}

fn sgn(rng: &mut Rng) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

impl ConeSampler {
    pub fn new(node: &Node) -> Option<ConeSampler> {
        Some(match node {
            Node::Lp { n, p } => ConeSampler::Lp {
                n: *n,
                p: *p,
                gamma: match p {
                    Exponent::Finite(q) if *q != 1.0 && *q != 2.0 => Some(Gamma::new(1.0 / q, 1.0).ok()?),
                    _ => None,
                },
            },
            Node::Orlicz { m, beta } => ConeSampler::Orlicz {
                m: *m,
                beta: *beta,
                mean_weight: orlicz_mean_weight(*m, *beta),
            },
            Node::Block { p, blocks, offsets } => {
                let parts = blocks.iter().map(ConeSampler::new).collect::<Option<Vec<_>>>()?;
                let radius = blocks
                    .iter()
                    .map(|b| match p {
                        Exponent::Finite(q) => Gamma::new(b.dim() as f64 / q, 1.0).ok(),
                        Exponent::Inf => None,
                    })
                    .collect();
                ConeSampler::Block {
                    p: *p,
                    parts,
                    offsets: offsets.clone(),
                    radius,
                }
            }
            Node::Schatten { .. } | Node::Intersect { .. } => return None,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConeSampler::Lp { n, .. } => *n,
            ConeSampler::Orlicz { m, .. } => *m,
            ConeSampler::Block { offsets, .. } => *offsets.last().unwrap(),
        }
    }

    /// Largest possible weight, for exact rejection sampling.
    pub fn weight_bound(&self) -> f64 {
        match self {
            ConeSampler::Lp { .. } => 1.0,
            ConeSampler::Orlicz {
                beta, mean_weight, ..
            } => beta.exp_m1() / mean_weight,
            ConeSampler::Block { parts, .. } => parts.iter().map(|s| s.weight_bound()).product(),
        }
    }

    pub fn is_weighted(&self) -> bool {
        match self {
            ConeSampler::Lp { .. } => false,
            ConeSampler::Orlicz { .. } => true,
            ConeSampler::Block { parts, .. } => parts.iter().any(|s| s.is_weighted()),
        }
    }

    /// Draw θ ~ κ_X into `theta`, the norm gradient at θ into `grad`; returns the weight.
    pub fn draw(&self, rng: &mut Rng, theta: &mut [f64], grad: &mut [f64]) -> f64 {
        match self {
            ConeSampler::Lp { n, p, gamma } => {
                match p {
                    Exponent::Inf => {
                        let mut j = 0;
                        for i in 0..*n {
                            theta[i] = rng.random::<f64>() * 2.0 - 1.0;
                            if theta[i].abs() > theta[j].abs() {
                                j = i;
                            }
                        }
                        let m = theta[j].abs();
                        theta.iter_mut().for_each(|v| *v /= m);
                        grad.iter_mut().for_each(|v| *v = 0.0);
                        grad[j] = theta[j].signum();
                    }
                    Exponent::Finite(q) if *q == 2.0 => {
                        let mut s = 0.0;
                        for t in theta.iter_mut() {
                            *t = rng.sample(StandardNormal);
                            s += *t * *t;
                        }
                        let s = s.sqrt();
                        for (t, g) in theta.iter_mut().zip(grad.iter_mut()) {
                            *t /= s;
                            *g = *t;
                        }
                    }
                    Exponent::Finite(q) if *q == 1.0 => {
                        let mut s = 0.0;
                        for (t, g) in theta.iter_mut().zip(grad.iter_mut()) {
                            let e: f64 = rng.sample(Exp1);
                            *g = sgn(rng);
                            *t = e;
                            s += e;
                        }
                        for (t, g) in theta.iter_mut().zip(grad.iter()) {
                            *t = *g * *t / s;
                        }
                    }
                    Exponent::Finite(q) => {
                        let gamma = gamma.as_ref().unwrap();
                        let mut s = 0.0;
                        for (t, g) in theta.iter_mut().zip(grad.iter_mut()) {
                            *t = gamma.sample(rng);
                            *g = sgn(rng);
                            s += *t;
                        }
                        // θ_i = ±(G_i/ΣG)^{1/q}, ∇_i = ±(G_i/ΣG)^{(q−1)/q}
                        for (t, g) in theta.iter_mut().zip(grad.iter_mut()) {
                            let u = *t / s;
                            let sign = *g;
                            *t = sign * u.powf(1.0 / q);
                            *g = sign * u.powf(1.0 - 1.0 / q);
                        }
                    }
                }
                1.0
            }
            ConeSampler::Orlicz {
                beta, mean_weight, ..
            } => {
                let mut s = 0.0;
                for t in theta.iter_mut() {
                    *t = rng.sample(Exp1);
                    s += *t;
                }
                // θ_i = ±(1 − e^{−βτ_i}), ∇_i = ±e^{βτ_i} / Σ_j(e^{βτ_j} − 1)
                let mut w = KahanSum::default();
                for (t, g) in theta.iter_mut().zip(grad.iter_mut()) {
                    let bt = *beta * *t / s;
                    let sign = sgn(rng);
                    *t = -sign * (-bt).exp_m1();
                    *g = sign * bt.exp();
                    w.add(bt.exp_m1());
                }
                let w = w.value();
                grad.iter_mut().for_each(|g| *g /= w);
                w / mean_weight
            }
            ConeSampler::Block {
                p,
                parts,
                offsets,
                radius,
            } => {
                let k = parts.len();
                let mut weight = 1.0;
                let mut r = vec![0.0; k];
                for j in 0..k {
                    let rng_j = offsets[j]..offsets[j + 1];
                    weight *= parts[j].draw(rng, &mut theta[rng_j.clone()], &mut grad[rng_j]);
                    r[j] = match (p, &radius[j]) {
                        (Exponent::Finite(q), Some(g)) => g.sample(rng).powf(1.0 / q),
                        _ => rng.random::<f64>().powf(1.0 / parts[j].dim() as f64),
                    };
                }
                let total = lp_norm(&r, *p);
                let jmax = (0..k).fold(0, |a, j| if r[j] > r[a] { j } else { a });
                for j in 0..k {
                    let c = match p {
                        Exponent::Inf => {
                            if j == jmax {
                                1.0
                            } else {
                                0.0
                            }
                        }
                        Exponent::Finite(q) if *q == 1.0 => 1.0,
                        Exponent::Finite(q) => (r[j] / total).powf(q - 1.0),
                    };
                    for i in offsets[j]..offsets[j + 1] {
                        theta[i] *= r[j] / total;
                        grad[i] *= c;
                    }
                }
                weight
            }
        }
    }

    /// Exactly uniform point of the unit ball (rejection on the weight when weighted).
    pub fn uniform_ball(&self, rng: &mut Rng, x: &mut [f64], scratch: &mut [f64]) {
        let bound = self.weight_bound();
        let n = self.dim() as f64;
        loop {
            let w = self.draw(rng, x, scratch);
            if bound <= 1.0 || rng.random::<f64>() * bound <= w {
                let u = rng.random::<f64>().powf(1.0 / n);
                x.iter_mut().for_each(|v| *v *= u);
                return;
            }
        }
    }
}

/// Smallest acceptance rate at which rejection from the base ball beats hit-and-run.
const MIN_CLIP_RATE: f64 = 1e-3;
const PILOT_DRAWS: usize = 4096;

/// Exactly uniform points of B_X.
#[derive(Debug, Clone)]
pub enum BallSampler {
    Direct(ConeSampler),
    /// B_base ∩ rB₂, by rejection from B_base.
    Clipped { base: ConeSampler, r: f64 },
}

impl BallSampler {
    pub fn new(node: &Node) -> Option<BallSampler> {
        if let Some(s) = ConeSampler::new(node) {
            return Some(BallSampler::Direct(s));
        }
        let Node::Intersect { base, r } = node else {
            return None;
        };
        let base = ConeSampler::new(base)?;
        // A fixed-seed pilot keeps the choice deterministic.
        let mut rng = substream(0, tag::PILOT, 0);
        let n = base.dim();
        let (mut x, mut s) = (vec![0.0; n], vec![0.0; n]);
        let hits = (0..PILOT_DRAWS)
            .filter(|_| {
                base.uniform_ball(&mut rng, &mut x, &mut s);
                lp_norm(&x, Exponent::Finite(2.0)) <= *r
            })
            .count();
        (hits as f64 >= MIN_CLIP_RATE * PILOT_DRAWS as f64).then_some(BallSampler::Clipped { base, r: *r })
    }

    pub fn dim(&self) -> usize {
        match self {
            BallSampler::Direct(s) | BallSampler::Clipped { base: s, .. } => s.dim(),
        }
    }

    pub fn uniform_ball(&self, rng: &mut Rng, x: &mut [f64], scratch: &mut [f64]) {
        match self {
            BallSampler::Direct(s) => s.uniform_ball(rng, x, scratch),
            BallSampler::Clipped { base, r } => loop {
                base.uniform_ball(rng, x, scratch);
                if lp_norm(x, Exponent::Finite(2.0)) <= *r {
                    return;
                }
            },
        }
    }
}

/// Uniform points of B_X for spaces without a direct cone sampler: exact rejection samples
/// when available (`correlated = false`), hit-and-run chains otherwise.
pub(crate) fn fallback_points(node: &Node, count: usize, seed: u64) -> (Vec<Vec<f64>>, bool) {
    match BallSampler::new(node) {
        Some(b) => {
            let n = node.dim();
            let pts = run_batches(seed, tag::CONE, count, |rng, len, _| {
                let mut s = vec![0.0; n];
                (0..len)
                    .map(|_| {
                        let mut x = vec![0.0; n];
                        b.uniform_ball(rng, &mut x, &mut s);
                        x
                    })
                    .collect::<Vec<_>>()
            });
            (pts.into_iter().flatten().collect(), false)
        }
        None => {
            let (b, thin) = hit_and_run_defaults(node.dim());
            (chains(node, count, b, thin, seed), true)
        }
    }
}

/// Mean of per-point values, with batch means for chain output.
pub(crate) fn fallback_mean(vals: &[f64], correlated: bool, seed: u64) -> MonteCarloEstimate {
    if correlated {
        batch_means(vals, HR_BATCHES, seed)
    } else {
        let mut acc = WeightedMean::default();
        vals.iter().for_each(|&v| acc.push(v, 1.0));
        acc.estimate(seed)
    }
}

/// Hit-and-run chain in a norm ball, started at the origin.
pub struct HitAndRun<'a> {
    node: &'a Node,
    pub x: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> HitAndRun<'a> {
    pub fn new(node: &'a Node) -> Self {
        let n = node.dim();
        HitAndRun {
            node,
            x: vec![0.0; n],
            scratch: vec![0.0; n],
        }
    }

    /// Largest t ≥ 0 with x + t·d in the ball, by doubling then bisection to 1e-12.
    fn chord_end(&mut self, d: &[f64], sign: f64) -> f64 {
        let inside = |s: &mut Vec<f64>, x: &[f64], t: f64, node: &Node| {
            for i in 0..x.len() {
                s[i] = x[i] + sign * t * d[i];
            }
            node.within(s, 1.0)
        };
        let mut hi = 1.0;
        while inside(&mut self.scratch, &self.x, hi, self.node) {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        while hi - lo > 1e-12 * hi {
            let mid = 0.5 * (lo + hi);
            if inside(&mut self.scratch, &self.x, mid, self.node) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn step(&mut self, rng: &mut Rng) {
        let d = random_unit(rng, self.x.len());
        let tp = self.chord_end(&d, 1.0);
        let tm = self.chord_end(&d, -1.0);
        let t = -tm + rng.random::<f64>() * (tp + tm);
        for (xi, di) in self.x.iter_mut().zip(&d) {
            *xi += t * di;
        }
    }
}

pub const HR_CHAINS: usize = 8;
pub const HR_BATCHES: usize = 32;

/// Burn-in 100·dim, thinning dim.
pub fn hit_and_run_defaults(dim: usize) -> (usize, usize) {
    (100 * dim, dim)
}

fn chain_points(node: &Node, count: usize, burn_in: usize, thin: usize, seed: u64, chain: usize) -> Vec<Vec<f64>> {
    let mut rng = substream(seed, tag::HIT_AND_RUN, chain as u64);
    let mut hr = HitAndRun::new(node);
    for _ in 0..burn_in {
        hr.step(&mut rng);
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        for _ in 0..thin.max(1) {
            hr.step(&mut rng);
        }
        out.push(hr.x.clone());
    }
    out
}

/// Split `count` draws over independent chains, returning them in chain order.
fn chains(node: &Node, count: usize, burn_in: usize, thin: usize, seed: u64) -> Vec<Vec<f64>> {
    use rayon::prelude::*;
    let per = count.div_ceil(HR_CHAINS);
    let parts: Vec<Vec<Vec<f64>>> = (0..HR_CHAINS)
        .into_par_iter()
        .map(|c| {
            let len = per.min(count.saturating_sub(c * per));
            chain_points(node, len, burn_in, thin, seed, c)
        })
        .collect();
    parts.into_iter().flatten().collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct HitAndRunResult {
    pub points: Vec<Vec<f64>>,
    /// Mean of ‖x‖_X along the chains; n/(n+1) for a uniform sample.
    pub radial_mean: MonteCarloEstimate,
    pub radial_target: f64,
}

pub fn hit_and_run_sample(space: &NormedSpace, count: usize, burn_in: Option<usize>, seed: u64) -> Result<HitAndRunResult> {
    if count == 0 {
        return Err(Error::input("/count", "count must be positive"));
    }
    let n = space.dim();
    let (b, thin) = hit_and_run_defaults(n);
    let points = chains(space.node(), count, burn_in.unwrap_or(b), thin, seed);
    let radii: Vec<f64> = points.iter().map(|x| space.norm(x)).collect();
    Ok(HitAndRunResult {
        points,
        radial_mean: batch_means(&radii, HR_BATCHES, seed),
        radial_target: n as f64 / (n as f64 + 1.0),
    })
}

pub fn cone_sample(space: &NormedSpace, count: usize, seed: u64) -> Result<Vec<ConeSample>> {
    let n = space.dim();
    match ConeSampler::new(space.node()) {
        Some(s) => Ok(run_batches(seed, tag::CONE, count, |rng, len, _| {
            let mut g = vec![0.0; n];
            (0..len)
                .map(|_| {
                    let mut x = vec![0.0; n];
                    let weight = s.draw(rng, &mut x, &mut g);
                    ConeSample { point: x, weight }
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect()),
        None => {
            Ok(fallback_points(space.node(), count, seed)
                .0
                .into_iter()
                .map(|x| {
                    let r = space.norm(&x);
                    ConeSample {
                        point: x.iter().map(|v| v / r).collect(),
                        weight: 1.0,
                    }
                })
                .collect())
        }
    }
}

pub fn uniform_ball_sample(space: &NormedSpace, count: usize, seed: u64) -> Result<Vec<WeightedPoint>> {
    let n = space.dim();
    match ConeSampler::new(space.node()) {
        Some(s) => Ok(run_batches(seed, tag::CONE, count, |rng, len, _| {
            let mut g = vec![0.0; n];
            (0..len)
                .map(|_| {
                    let mut x = vec![0.0; n];
                    let weight = s.draw(rng, &mut x, &mut g);
                    let u = rng.random::<f64>().powf(1.0 / n as f64);
                    x.iter_mut().for_each(|v| *v *= u);
                    WeightedPoint { point: x, weight }
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect()),
        None => {
            Ok(fallback_points(space.node(), count, seed)
                .0
                .into_iter()
                .map(|point| WeightedPoint { point, weight: 1.0 })
                .collect())
        }
    }
}

/// Stored gradient samples ∇‖·‖(θ), θ ~ κ_X, for repeated evaluation of cone-measure
/// expectations. Chains (no direct sampler) are flagged `correlated` and use batch means.
#[derive(Debug, Clone)]
pub struct GradientSamples {
    pub dim: usize,
    pub grads: Vec<f64>,
    pub weights: Vec<f64>,
    pub correlated: bool,
    pub seed: u64,
}

impl GradientSamples {
    pub fn generate(space: &NormedSpace, count: usize, seed: u64) -> GradientSamples {
        let n = space.dim();
        match ConeSampler::new(space.node()) {
            Some(s) => {
                let parts = run_batches(seed, tag::CONE, count, |rng, len, _| {
                    let mut th = vec![0.0; n];
                    let mut g = vec![0.0; n * len];
                    let mut w = Vec::with_capacity(len);
                    for k in 0..len {
                        w.push(s.draw(rng, &mut th, &mut g[k * n..(k + 1) * n]));
                    }
                    (g, w)
                });
                let mut grads = Vec::with_capacity(count * n);
                let mut weights = Vec::with_capacity(count);
                for (g, w) in parts {
                    grads.extend(g);
                    weights.extend(w);
                }
                GradientSamples {
                    dim: n,
                    grads,
                    weights,
                    correlated: false,
                    seed,
                }
            }
            None => {
                let (pts, correlated) = fallback_points(space.node(), count, seed);
                let mut grads = vec![0.0; pts.len() * n];
                for (k, x) in pts.iter().enumerate() {
                    space.node().gradient_into(x, &mut grads[k * n..(k + 1) * n]);
                }
                GradientSamples {
                    dim: n,
                    weights: vec![1.0; pts.len()],
                    grads,
                    correlated,
                    seed,
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn grad(&self, k: usize) -> &[f64] {
        &self.grads[k * self.dim..(k + 1) * self.dim]
    }

    /// Weighted mean of `f(∇)` with the appropriate standard error.
    pub fn mean(&self, f: impl Fn(&[f64]) -> f64) -> MonteCarloEstimate {
        if self.correlated {
            let vals: Vec<f64> = (0..self.len()).map(|k| f(self.grad(k))).collect();
            batch_means(&vals, HR_BATCHES, self.seed)
        } else {
            let mut acc = WeightedMean::default();
            for k in 0..self.len() {
                acc.push(f(self.grad(k)), self.weights[k]);
            }
            acc.estimate(self.seed)
        }
    }

    /// Kish effective sample size over the count.
    pub fn ess_fraction(&self) -> f64 {
        let s: f64 = self.weights.iter().sum();
        let s2: f64 = self.weights.iter().map(|w| w * w).sum();
        s * s / s2 / self.len() as f64
    }
}

/// Streaming weighted mean of `f(θ, ∇)` over κ_X without storing the samples.
pub fn cone_expectation(
    space: &NormedSpace,
    count: usize,
    seed: u64,
    f: impl Fn(&[f64], &[f64]) -> f64 + Sync,
) -> MonteCarloEstimate {
    cone_expectation_rng(space, count, seed, |th, g, _| f(th, g))
}

/// As [`cone_expectation`], with an auxiliary random stream passed to the integrand.
pub fn cone_expectation_rng(
    space: &NormedSpace,
    count: usize,
    seed: u64,
    f: impl Fn(&[f64], &[f64], &mut Rng) -> f64 + Sync,
) -> MonteCarloEstimate {
    let n = space.dim();
    match ConeSampler::new(space.node()) {
        Some(s) => {
            let parts = run_batches(seed, tag::CONE, count, |rng, len, b| {
                let mut aux = substream(seed, tag::SPHERE, b as u64);
                let mut th = vec![0.0; n];
                let mut g = vec![0.0; n];
                let mut acc = WeightedMean::default();
                for _ in 0..len {
                    let w = s.draw(rng, &mut th, &mut g);
                    acc.push(f(&th, &g, &mut aux), w);
                }
                acc
            });
            crate::estimate::merge_all(&parts).estimate(seed)
        }
        None => {
            let (pts, correlated) = fallback_points(space.node(), count, seed);
            let mut aux = substream(seed, tag::SPHERE, 0);
            let mut g = vec![0.0; n];
            let vals: Vec<f64> = pts
                .iter()
                .map(|x| {
                    let r = space.norm(x);
                    let th: Vec<f64> = x.iter().map(|v| v / r).collect();
                    space.node().gradient_into(&th, &mut g);
                    f(&th, &g, &mut aux)
                })
                .collect();
            fallback_mean(&vals, correlated, seed)
        }
    }
}
