//! Finite-window iterative ball partitioning.
//!
//! Centers are i.i.d. uniform in an axis box containing every query's (Δ/2)-ball; each query
//! joins the first center within X-distance Δ/2. Internally everything is rescaled to Δ = 2.
//!
//! Two proposal modes realize the same law. `Window` draws every center in the box.
//! `Relevant` only draws the subsequence of centers that land in the union of the balls of
//! still-unassigned queries: that subsequence is i.i.d. uniform on the union, which is
//! sampled by picking a ball uniformly, drawing a uniform point in it and accepting with
//! probability 1/(number of balls containing the point). `Relevant` needs an exact uniform
//! ball sampler and is used when the box is much larger than the balls.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::sampling::BallSampler;
use crate::geometry::volume::ln_volume;
use crate::rng::{substream, tag, Rng};
use crate::space::{NormedSpace, Node};

pub const PROPOSAL_CAP: u64 = 1_000_000_000;

/// Expected window proposals per capture above which `Auto` switches to `Relevant`.
pub const AUTO_THRESHOLD: f64 = 4096.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Proposal {
    Window,
    Relevant,
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Window {
    /// Bounding box of `points` inflated by `pad` on every side.
    pub fn around(points: &[Vec<f64>], pad: f64) -> Window {
        let n = points[0].len();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for p in points {
            for i in 0..n {
                lo[i] = lo[i].min(p[i] - pad);
                hi[i] = hi[i].max(p[i] + pad);
            }
        }
        Window { lo, hi }
    }

    pub fn ln_volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a).ln()).sum()
    }

    fn scaled(&self, c: f64) -> Window {
        Window {
            lo: self.lo.iter().map(|v| v * c).collect(),
            hi: self.hi.iter().map(|v| v * c).collect(),
        }
    }
}

/// One realization of the partition restricted to a query set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSample {
    pub delta: f64,
    pub queries: Vec<Vec<f64>>,
    /// Centers that captured at least one query, in order of arrival.
    pub centers: Vec<Vec<f64>>,
    /// `assignment[q]` indexes `centers`.
    pub assignment: Vec<usize>,
    pub window: Window,
    /// Window proposals drawn (`Window` mode) or relevant centers drawn (`Relevant` mode).
    pub proposals: u64,
    pub mode: Proposal,
    pub seed: u64,
}

/// Reusable sampler state for one space.
pub struct Carver<'a> {
    node: &'a Node,
    sampler: Option<BallSampler>,
    n: usize,
    radius_inf: f64,
    ln_ball: Option<f64>,
    diff: Vec<f64>,
    point: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> Carver<'a> {
    pub fn new(space: &'a NormedSpace) -> Self {
        let node = space.node();
        let n = space.dim();
        let sampler = BallSampler::new(node);
        Carver {
            node,
            ln_ball: ln_volume(node),
            sampler,
            n,
            radius_inf: space.linf_radius(),
            diff: vec![0.0; n],
            point: vec![0.0; n],
            scratch: vec![0.0; n],
        }
    }

    /// Window of the unit-radius problem for scaled queries.
    pub fn window_for(&self, scaled: &[Vec<f64>]) -> Window {
        Window::around(scaled, self.radius_inf)
    }

    /// Resolve `Auto` given the unit-radius window and a per-ball radius.
    pub fn resolve(&self, mode: Proposal, window: &Window, radius: f64) -> Proposal {
        match mode {
            Proposal::Relevant if self.sampler.is_some() => Proposal::Relevant,
            Proposal::Auto if self.sampler.is_some() => {
                let ln_ball = self.ln_ball.unwrap_or(f64::NEG_INFINITY) + self.n as f64 * radius.ln();
                if window.ln_volume() - ln_ball > AUTO_THRESHOLD.ln() {
                    Proposal::Relevant
                } else {
                    Proposal::Window
                }
            }
            _ => Proposal::Window,
        }
    }

    fn hits(&mut self, q: &[f64], c: &[f64], radius: f64) -> bool {
        for i in 0..self.n {
            self.diff[i] = q[i] - c[i];
        }
        self.node.within(&self.diff, radius)
    }

    fn propose_window(&mut self, rng: &mut Rng, window: &Window) {
        for i in 0..self.n {
            self.point[i] = window.lo[i] + (window.hi[i] - window.lo[i]) * rng.random::<f64>();
        }
    }

    /// Run the partition process for unit-radius balls. Fills `assignment` with center indices,
    /// optionally records the capturing centers, and returns the number of proposals.
    pub fn carve(
        &mut self,
        queries: &[Vec<f64>],
        window: &Window,
        mode: Proposal,
        rng: &mut Rng,
        assignment: &mut [usize],
        mut centers: Option<&mut Vec<Vec<f64>>>,
    ) -> Result<u64> {
        let k = queries.len();
        let mut open: Vec<usize> = (0..k).collect();
        let mut proposals = 0u64;
        let mut next_center = 0usize;
        let mut captured = Vec::with_capacity(k);
        while !open.is_empty() {
            proposals += 1;
            if proposals > PROPOSAL_CAP {
                return Err(Error::Diagnostic(format!(
                    "partition sampler exceeded {PROPOSAL_CAP} proposals"
                )));
            }
            match mode {
                Proposal::Relevant => {
                    let sampler = self.sampler.as_ref().expect("relevant mode needs a sampler");
                    let j = open[rng.random_range(0..open.len())];
                    sampler.uniform_ball(rng, &mut self.point, &mut self.scratch);
                    for i in 0..self.n {
                        self.point[i] += queries[j][i];
                    }
                    let c = self.point.clone();
                    let mult = open.iter().filter(|&&i| self.hits(&queries[i], &c, 1.0)).count();
                    if mult > 1 && rng.random::<f64>() * mult as f64 >= 1.0 {
                        proposals -= 1;
                        continue;
                    }
                }
                _ => self.propose_window(rng, window),
            }
            captured.clear();
            let c = self.point.clone();
            for &i in &open {
                if self.hits(&queries[i], &c, 1.0) {
                    captured.push(i);
                }
            }
            if captured.is_empty() {
                continue;
            }
            for &i in &captured {
                assignment[i] = next_center;
            }
            open.retain(|i| !captured.contains(i));
            if let Some(cs) = centers.as_deref_mut() {
                cs.push(c);
            }
            next_center += 1;
        }
        Ok(proposals)
    }

    /// Padding event for the query at the origin: the first center within 1+ρ lies within 1−ρ.
    pub fn padded(&mut self, rho: f64, window: &Window, mode: Proposal, rng: &mut Rng) -> Result<bool> {
        let outer = 1.0 + rho;
        match mode {
            Proposal::Relevant => {
                let sampler = self.sampler.as_ref().expect("relevant mode needs a sampler");
                sampler.uniform_ball(rng, &mut self.point, &mut self.scratch);
                self.point.iter_mut().for_each(|v| *v *= outer);
            }
            _ => {
                let mut proposals = 0u64;
                loop {
                    proposals += 1;
                    if proposals > PROPOSAL_CAP {
                        return Err(Error::Diagnostic(format!(
                            "padding sampler exceeded {PROPOSAL_CAP} proposals"
                        )));
                    }
                    self.propose_window(rng, window);
                    if self.node.within(&self.point, outer) {
                        break;
                    }
                }
            }
        }
        Ok(self.node.within(&self.point, 1.0 - rho))
    }
}

pub(crate) fn check_points(space: &NormedSpace, pts: &[Vec<f64>], path: &str) -> Result<()> {
    if pts.is_empty() {
        return Err(Error::input(path, "query set must be nonempty"));
    }
    for (i, p) in pts.iter().enumerate() {
        if p.len() != space.dim() {
            return Err(Error::input(
                format!("{path}/{i}"),
                format!("point has length {}, space dimension is {}", p.len(), space.dim()),
            ));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::input(format!("{path}/{i}"), "non-finite coordinate"));
        }
    }
    Ok(())
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::input("/delta", format!("delta must be positive, got {delta}")));
    }
    Ok(())
}

/// Sample the partition on the literal window model.
pub fn sample_partition(space: &NormedSpace, delta: f64, queries: &[Vec<f64>], seed: u64) -> Result<PartitionSample> {
    sample_partition_with(space, delta, queries, seed, Proposal::Window)
}

pub fn sample_partition_with(
    space: &NormedSpace,
    delta: f64,
    queries: &[Vec<f64>],
    seed: u64,
    mode: Proposal,
) -> Result<PartitionSample> {
    check_delta(delta)?;
    check_points(space, queries, "/queries")?;
    let s = 2.0 / delta;
    let scaled: Vec<Vec<f64>> = queries.iter().map(|q| q.iter().map(|v| v * s).collect()).collect();
    let mut carver = Carver::new(space);
    let window = carver.window_for(&scaled);
    let mode = carver.resolve(mode, &window, 1.0);
    let mut rng = substream(seed, tag::PARTITION, 0);
    let mut assignment = vec![0; queries.len()];
    let mut centers = Vec::new();
    let proposals = carver.carve(&scaled, &window, mode, &mut rng, &mut assignment, Some(&mut centers))?;
    Ok(PartitionSample {
        delta,
        queries: queries.to_vec(),
        centers: centers
            .into_iter()
            .map(|c| c.into_iter().map(|v| v / s).collect())
            .collect(),
        assignment,
        window: window.scaled(1.0 / s),
        proposals,
        mode,
        seed,
    })
}
