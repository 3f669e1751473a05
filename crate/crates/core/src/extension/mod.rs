//! Lipschitz extension from a finite anchor set through a gentle partition of unity.
//!
//! F(x) = Σ_k λ_k(x) · (1/R) Σ_r f(γ_{k,r}(x)) where λ_k is the normalized bump weight of the
//! dyadic scale 2^k and γ_{k,r}(x) is the anchor nearest to the center of the cluster of x in
//! the r-th independent partition of diameter 2^k.
//!
//! Each partition is iterative ball carving driven by a space-time Poisson process: cell-hashed
//! substreams emit centers with arrival times, and x joins the earliest center within 2^{k−1}.
//! Restricted to any bounded box this is the i.i.d.-uniform window model, and it is defined on
//! all of ℝⁿ, so every scale and every query point uses the same realization.

use rand::Rng as _;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::psi::PsiModel;
use crate::geometry::volume::ln_volume;
use crate::optimize::random_unit;
use crate::rng::{derive_seed, substream, tag};
use crate::space::{NormedSpace, SpaceDescriptor};

pub const DEFAULT_MC_ROUNDS: usize = 64;
const EPOCH_CAP: u64 = 1_000_000;

/// Frozen Lipschitz calibration constant: the largest ratio ‖F(x)−F(y)‖/𝔡(x,y) seen on the
/// fixed-seed calibration corpus (see the acceptance suite).
pub const K0: f64 = 2.371;

/// ψ(t): t−1 on [1,2], 1 on [2,3], 4−t on [3,4], 0 elsewhere.
pub fn bump(t: f64) -> f64 {
    if t <= 1.0 || t >= 4.0 {
        0.0
    } else if t < 2.0 {
        t - 1.0
    } else if t <= 3.0 {
        1.0
    } else {
        4.0 - t
    }
}

/// Scales k with φ_k(d) = ψ(d/2^k) > 0, i.e. 2^k ∈ (d/4, d).
pub fn active_scales(d: f64) -> Vec<(i32, f64)> {
    if !(d > 0.0 && d.is_finite()) {
        return Vec::new();
    }
    let top = d.log2().ceil() as i32;
    (top - 3..=top)
        .filter_map(|k| {
            let phi = bump(d / 2f64.powi(k));
            (phi > 0.0).then_some((k, phi))
        })
        .collect()
}

/// (k, λ_k) for the point at distance `d` from C; empty for d = 0.
pub fn scale_weights(d: f64) -> Vec<(i32, f64)> {
    let act = active_scales(d);
    let total: f64 = act.iter().map(|a| a.1).sum();
    act.into_iter().map(|(k, phi)| (k, phi / total)).collect()
}

fn nearest(space: &NormedSpace, anchors: &[Vec<f64>], x: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, a) in anchors.iter().enumerate() {
        let d = space.dist(x, a);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

/// λ_k(x): 0 on C, otherwise φ_k(x)/Σ_j φ_j(x).
pub fn bump_weights(space: &NormedSpace, x: &[f64], anchors: &[Vec<f64>], k: i32) -> Result<f64> {
    check_point(space, x, "/x")?;
    if anchors.is_empty() {
        return Err(Error::input("/anchors", "anchor set must be nonempty"));
    }
    let d = nearest(space, anchors, x).1;
    Ok(scale_weights(d).into_iter().find(|s| s.0 == k).map_or(0.0, |s| s.1))
}

fn check_point(space: &NormedSpace, x: &[f64], path: &str) -> Result<()> {
    if x.len() != space.dim() {
        return Err(Error::input(path, format!("length {} differs from dimension {}", x.len(), space.dim())));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::input(path, "non-finite coordinate"));
    }
    Ok(())
}

/// Serializable operator state; rebuilding from it reproduces the operator exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionState {
    pub space: SpaceDescriptor,
    pub target: SpaceDescriptor,
    pub anchors: Vec<Vec<f64>>,
    pub values: Vec<Vec<f64>>,
    pub mc_rounds: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct ExtensionOperator {
    space: NormedSpace,
    target: NormedSpace,
    anchors: Vec<Vec<f64>>,
    values: Vec<Vec<f64>>,
    mc_rounds: usize,
    seed: u64,
    /// Anchor diameter.
    diameter: f64,
    /// Scales strictly below `k_min` select the nearest anchor with probability one.
    k_min: i32,
    k_max: i32,
    /// Points per cell and epoch of the center process.
    intensity: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Evaluation {
    pub value: Vec<f64>,
    /// Convex weights over the anchors.
    pub weights: Vec<f64>,
    /// Ensemble standard error of `value` (Euclidean length of the per-coordinate errors).
    pub stderr: f64,
}

impl ExtensionOperator {
    pub fn state(&self) -> ExtensionState {
        ExtensionState {
            space: self.space.descriptor().clone(),
            target: self.target.descriptor().clone(),
            anchors: self.anchors.clone(),
            values: self.values.clone(),
            mc_rounds: self.mc_rounds,
            seed: self.seed,
        }
    }

    pub fn from_state(s: &ExtensionState) -> Result<Self> {
        build_extension(
            &NormedSpace::new(s.space.clone())?,
            &s.anchors,
            &s.values,
            Some(s.target.clone()),
            s.mc_rounds,
            s.seed,
        )
    }

    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    pub fn target(&self) -> &NormedSpace {
        &self.target
    }

    pub fn anchors(&self) -> &[Vec<f64>] {
        &self.anchors
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn mc_rounds(&self) -> usize {
        self.mc_rounds
    }

    /// Scales that need partitions for points within distance `diameter` of C.
    pub fn scale_range(&self) -> (i32, i32) {
        (self.k_min, self.k_max)
    }

    pub fn with_rounds(&self, mc_rounds: usize) -> Result<Self> {
        let mut s = self.state();
        s.mc_rounds = mc_rounds;
        Self::from_state(&s)
    }

    fn cell_side(&self, k: i32) -> f64 {
        self.space.linf_radius() * 2f64.powi(k)
    }

    /// Anchor selected at scale k, round r: nearest anchor to the earliest center within 2^{k−1}.
    fn select(&self, k: i32, r: usize, x: &[f64]) -> Result<usize> {
        if k < self.k_min {
            return Ok(nearest(&self.space, &self.anchors, x).0);
        }
        let n = x.len();
        let radius = 2f64.powi(k - 1);
        let h = self.cell_side(k);
        let reach = radius * self.space.linf_radius();
        let lo: Vec<i64> = x.iter().map(|v| ((v - reach) / h).floor() as i64).collect();
        let hi: Vec<i64> = x.iter().map(|v| ((v + reach) / h).floor() as i64).collect();
        let base = derive_seed(derive_seed(self.seed, k as i64 as u64), r as u64);
        let poisson = Poisson::new(self.intensity).expect("positive intensity");
        let mut center = vec![0.0; n];
        let mut diff = vec![0.0; n];
        for epoch in 0..EPOCH_CAP {
            let mut best: Option<(f64, Vec<f64>)> = None;
            let mut cell = lo.clone();
            loop {
                let mut s = derive_seed(base, epoch);
                for &c in &cell {
                    s = derive_seed(s, c as u64);
                }
                let mut rng = substream(s, tag::EXTENSION, 0);
                let count = poisson.sample(&mut rng) as u64;
                for _ in 0..count {
                    let t: f64 = rng.random();
                    for i in 0..n {
                        center[i] = (cell[i] as f64 + rng.random::<f64>()) * h;
                        diff[i] = x[i] - center[i];
                    }
                    if best.as_ref().is_none_or(|b| t < b.0) && self.space.within(&diff, radius) {
                        best = Some((t, center.clone()));
                    }
                }
                // odometer over the cell box
                let mut i = 0;
                while i < n {
                    if cell[i] < hi[i] {
                        cell[i] += 1;
                        break;
                    }
                    cell[i] = lo[i];
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
            if let Some((_, c)) = best {
                return Ok(nearest(&self.space, &self.anchors, &c).0);
            }
        }
        Err(Error::Diagnostic(format!("no center reached the query within {EPOCH_CAP} epochs")))
    }

    /// F(x) with its convex weights. Anchors map to their own values exactly.
    pub fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        check_point(&self.space, x, "/x")?;
        let m = self.values[0].len();
        let (near, d) = nearest(&self.space, &self.anchors, x);
        let mut weights = vec![0.0; self.anchors.len()];
        if d == 0.0 {
            weights[near] = 1.0;
            return Ok(Evaluation {
                value: self.values[near].clone(),
                weights,
                stderr: 0.0,
            });
        }
        let rounds = self.mc_rounds as f64;
        let mut var = 0.0;
        for (k, lambda) in scale_weights(d) {
            let picks: Vec<usize> = (0..self.mc_rounds)
                .map(|r| self.select(k, r, x))
                .collect::<Result<_>>()?;
            let mut mean = vec![0.0; m];
            for &a in &picks {
                weights[a] += lambda / rounds;
                for (j, v) in self.values[a].iter().enumerate() {
                    mean[j] += v / rounds;
                }
            }
            if self.mc_rounds > 1 {
                let ss: f64 = picks
                    .iter()
                    .map(|&a| self.values[a].iter().zip(&mean).map(|(v, mu)| (v - mu).powi(2)).sum::<f64>())
                    .sum();
                var += lambda * lambda * ss / (rounds - 1.0) / rounds;
            }
        }
        // Clamping to the coordinate range of the supporting values only removes rounding.
        let value = (0..m)
            .map(|j| {
                let support = || weights.iter().zip(&self.values).filter(|(w, _)| **w > 0.0).map(|(_, v)| v[j]);
                let lo = support().fold(f64::INFINITY, f64::min);
                let hi = support().fold(f64::NEG_INFINITY, f64::max);
                let v: f64 = weights.iter().zip(&self.values).map(|(w, v)| w * v[j]).sum();
                v.clamp(lo, hi)
            })
            .collect();
        Ok(Evaluation {
            value,
            weights,
            stderr: var.sqrt(),
        })
    }
}

/// Build the operator. Duplicate anchors keep their first value and add a warning.
pub fn build_extension(
    space: &NormedSpace,
    anchors: &[Vec<f64>],
    values: &[Vec<f64>],
    target: Option<SpaceDescriptor>,
    mc_rounds: usize,
    seed: u64,
) -> Result<ExtensionOperator> {
    if anchors.is_empty() {
        return Err(Error::input("/anchors", "anchor set must be nonempty"));
    }
    if values.len() != anchors.len() {
        return Err(Error::input("/values", "one value per anchor is required"));
    }
    if mc_rounds == 0 {
        return Err(Error::input("/mc_rounds", "mc_rounds must be positive"));
    }
    let m = values[0].len();
    if m == 0 {
        return Err(Error::input("/values/0", "values must be nonempty vectors"));
    }
    for (i, a) in anchors.iter().enumerate() {
        check_point(space, a, &format!("/anchors/{i}"))?;
        if values[i].len() != m || values[i].iter().any(|v| !v.is_finite()) {
            return Err(Error::input(format!("/values/{i}"), format!("values must be finite vectors of length {m}")));
        }
    }
    let target = NormedSpace::new(target.unwrap_or_else(|| SpaceDescriptor::lp(m, crate::space::Exponent::Finite(2.0))))?;
    if target.dim() != m {
        return Err(Error::input("/target/n", format!("target dimension {} differs from value length {m}", target.dim())));
    }
    let mut kept_a: Vec<Vec<f64>> = Vec::new();
    let mut kept_v: Vec<Vec<f64>> = Vec::new();
    let mut warnings = Vec::new();
    for (i, a) in anchors.iter().enumerate() {
        if let Some(j) = kept_a.iter().position(|b| b == a) {
            warnings.push(format!("anchor {i} duplicates anchor {j}; keeping the first value"));
        } else {
            kept_a.push(a.clone());
            kept_v.push(values[i].clone());
        }
    }
    let mut gap = f64::INFINITY;
    let mut diameter: f64 = 0.0;
    for i in 0..kept_a.len() {
        for j in i + 1..kept_a.len() {
            let d = space.dist(&kept_a[i], &kept_a[j]);
            gap = gap.min(d);
            diameter = diameter.max(d);
        }
    }
    // A center within 2^{k−1} < d/2 of x selects the anchor nearest to x once d < gap/3;
    // scale k is only active for d < 2^{k+2}.
    let k_min = if gap.is_finite() {
        (gap / 12.0).log2().floor() as i32
    } else {
        i32::MIN
    };
    let k_max = if diameter > 0.0 { diameter.log2().ceil() as i32 + 2 } else { k_min.max(0) };
    // One expected ball hit per epoch: cell volume over ball volume.
    let n = space.dim() as f64;
    let intensity = ln_volume(space.node()).map_or(1.0, |lv| (n * (2.0 * space.linf_radius()).ln() - lv).exp().max(1.0));
    Ok(ExtensionOperator {
        space: space.clone(),
        target,
        anchors: kept_a,
        values: kept_v,
        mc_rounds,
        seed,
        diameter,
        k_min,
        k_max,
        intensity,
        warnings,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzScan {
    pub max_ratio: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Index of the maximizing pair in the scan order.
    pub pair: usize,
    pub pairs: usize,
}

/// Random pair around the anchors' bounding box. Off C the separation is within [d/16, 4d],
/// d = d(x, C): far below the local scale a finite ensemble is piecewise constant and the
/// ratio is dominated by single-round cluster jumps. From an anchor, any separation is used.
fn random_pair(op: &ExtensionOperator, seed: u64, i: usize) -> (Vec<f64>, Vec<f64>) {
    let n = op.space.dim();
    let mut rng = substream(seed, tag::SCAN, i as u64);
    let span = op.diameter.max(1.0);
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for a in &op.anchors {
        for j in 0..n {
            lo[j] = lo[j].min(a[j] - 0.5 * span);
            hi[j] = hi[j].max(a[j] + 0.5 * span);
        }
    }
    let x: Vec<f64> = if i % 4 == 0 {
        op.anchors[rng.random_range(0..op.anchors.len())].clone()
    } else {
        (0..n).map(|j| lo[j] + (hi[j] - lo[j]) * rng.random::<f64>()).collect()
    };
    let u = random_unit(&mut rng, n);
    let d = nearest(&op.space, &op.anchors, &x).1;
    let t = if d > 0.0 {
        d * 2f64.powf(2.0 - 6.0 * rng.random::<f64>())
    } else {
        span * 2f64.powf(-12.0 * rng.random::<f64>())
    };
    let y = x.iter().zip(&u).map(|(a, b)| a + t * b).collect();
    (x, y)
}

/// max ‖F(x)−F(y)‖_Z / 𝔡(x,y) over `pair_count` random pairs, 𝔡 = 4ψ_X(x−y).
pub fn lipschitz_ratio_scan(op: &ExtensionOperator, pair_count: usize, seed: u64) -> Result<LipschitzScan> {
    if pair_count == 0 {
        return Err(Error::input("/pairs", "pair_count must be positive"));
    }
    let psi = PsiModel::new(&op.space, 20_000, derive_seed(seed, 1));
    let ratios: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..pair_count)
        .into_par_iter()
        .map(|i| {
            let (x, y) = random_pair(op, seed, i);
            let fx = op.evaluate(&x)?.value;
            let fy = op.evaluate(&y)?.value;
            let diff: Vec<f64> = fx.iter().zip(&fy).map(|(a, b)| a - b).collect();
            let w: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            let profile = 4.0 * psi.value(&w);
            let ratio = if profile > 0.0 { op.target.norm(&diff) / profile } else { 0.0 };
            Ok((ratio, x, y))
        })
        .collect::<Result<_>>()?;
    let (pair, best) = ratios
        .iter()
        .enumerate()
        .fold((0, &ratios[0]), |acc, (i, r)| if r.0 > acc.1 .0 { (i, r) } else { acc });
    Ok(LipschitzScan {
        max_ratio: best.0,
        x: best.1.clone(),
        y: best.2.clone(),
        pair,
        pairs: pair_count,
    })
}

/// A calibration instance: 8 anchors in [0,1]^n of ℓ_∞^3 (even seeds) or ℓ_2^2 (odd seeds), with
/// a 1-Lipschitz map into ℓ_2^2: f(c) = (d(c,a), d(c,b))/√2 for random a, b.
pub fn calibration_instance(seed: u64, mc_rounds: usize) -> Result<ExtensionOperator> {
    let space = if seed % 2 == 0 {
        NormedSpace::lp(3, f64::INFINITY)
    } else {
        NormedSpace::lp(2, 2.0)
    };
    let n = space.dim();
    let mut rng = substream(seed, tag::SCAN, 1 << 30);
    let mut point = || -> Vec<f64> { (0..n).map(|_| rng.random::<f64>()).collect() };
    let anchors: Vec<Vec<f64>> = (0..8).map(|_| point()).collect();
    let (a, b) = (point(), point());
    let values: Vec<Vec<f64>> = anchors
        .iter()
        .map(|c| vec![space.dist(c, &a) / 2f64.sqrt(), space.dist(c, &b) / 2f64.sqrt()])
        .collect();
    build_extension(&space, &anchors, &values, None, mc_rounds, derive_seed(seed, 2))
}
