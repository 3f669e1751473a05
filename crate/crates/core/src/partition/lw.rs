//! Discrete Loomis–Whitney checks on finite subsets of ℤⁿ.

use std::collections::{HashMap, HashSet};

use rand::Rng as _;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{substream, tag};

pub type GridPoint = Vec<i64>;

fn shifted(x: &[i64], i: usize) -> GridPoint {
    let mut y = x.to_vec();
    y[i] += 1;
    y
}

fn dimension(set: &[GridPoint]) -> Result<usize> {
    let n = set
        .first()
        .map(|p| p.len())
        .ok_or_else(|| Error::input("/set", "set must be nonempty"))?;
    if n == 0 || set.iter().any(|p| p.len() != n) {
        return Err(Error::input("/set", "points must share a positive dimension"));
    }
    Ok(n)
}

/// |Γ ∖ (Γ − e_i)| for each direction i.
pub fn directed_boundaries(set: &[GridPoint]) -> Result<Vec<usize>> {
    let n = dimension(set)?;
    let members: HashSet<&[i64]> = set.iter().map(|p| p.as_slice()).collect();
    Ok((0..n)
        .map(|i| {
            members
                .iter()
                .filter(|x| !members.contains(shifted(x, i).as_slice()))
                .count()
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct LwCheck {
    /// (1/n) Σ_i |Γ ∖ (Γ − e_i)|.
    pub boundary: f64,
    /// |Γ|^{(n−1)/n}.
    pub bound: f64,
    pub holds: bool,
}

/// (1/n) Σ_i |Γ ∖ (Γ − e_i)| ≥ |Γ|^{(n−1)/n}.
pub fn loomis_whitney_boundary(set: &[GridPoint]) -> Result<LwCheck> {
    let n = dimension(set)?;
    let distinct: HashSet<&GridPoint> = set.iter().collect();
    if distinct.len() != set.len() {
        return Err(Error::input("/set", "points must be distinct"));
    }
    let b = directed_boundaries(set)?;
    let boundary = b.iter().sum::<usize>() as f64 / n as f64;
    let bound = (set.len() as f64).powf((n as f64 - 1.0) / n as f64);
    Ok(LwCheck {
        boundary,
        bound,
        holds: boundary >= bound * (1.0 - 1e-12),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionBoundCheck {
    /// (1/n) Σ_i |{x ∈ Ω ∩ (Ω − e_i) : P(x) ≠ P(x + e_i)}|.
    pub cut: f64,
    /// |Ω|/M^{1/n} − (1/n) Σ_i |Ω ∖ (Ω − e_i)|.
    pub bound: f64,
    pub holds: bool,
}

/// Checks the cut inequality for a partition of Ω (labels per point) into parts of size ≤ `m`.
pub fn deterministic_partition_bound_check(omega: &[GridPoint], labels: &[usize], m: usize) -> Result<PartitionBoundCheck> {
    let n = dimension(omega)?;
    if labels.len() != omega.len() {
        return Err(Error::input("/labels", "one label per point is required"));
    }
    let mut sizes: HashMap<usize, usize> = HashMap::new();
    for &l in labels {
        *sizes.entry(l).or_default() += 1;
    }
    if m == 0 || sizes.values().any(|&s| s > m) {
        return Err(Error::input("/m", "a part exceeds the cardinality bound M"));
    }
    let label: HashMap<&[i64], usize> = omega.iter().map(|p| p.as_slice()).zip(labels.iter().copied()).collect();
    let mut cut = 0usize;
    for i in 0..n {
        for (x, &lx) in &label {
            if let Some(&ly) = label.get(shifted(x, i).as_slice()) {
                cut += (lx != ly) as usize;
            }
        }
    }
    let b = directed_boundaries(omega)?;
    let nf = n as f64;
    let cut = cut as f64 / nf;
    let bound = omega.len() as f64 / (m as f64).powf(1.0 / nf) - b.iter().sum::<usize>() as f64 / nf;
    Ok(PartitionBoundCheck {
        cut,
        bound,
        holds: cut >= bound - 1e-12 * bound.abs(),
    })
}

/// All set partitions of `k` labelled elements with parts of size ≤ `max_part`, as restricted
/// growth strings.
pub fn set_partitions(k: usize, max_part: usize) -> Vec<Vec<usize>> {
    fn rec(s: &mut Vec<usize>, sizes: &mut Vec<usize>, k: usize, cap: usize, out: &mut Vec<Vec<usize>>) {
        if s.len() == k {
            out.push(s.clone());
            return;
        }
        for b in 0..=sizes.len() {
            if b == sizes.len() {
                sizes.push(0);
            }
            if sizes[b] < cap {
                sizes[b] += 1;
                s.push(b);
                rec(s, sizes, k, cap, out);
                s.pop();
                sizes[b] -= 1;
            }
            if sizes[b] == 0 {
                sizes.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut Vec::new(), k, max_part, &mut out);
    out
}

/// The grid {0, …, side−1}ⁿ in lexicographic order.
pub fn grid(side: i64, n: usize) -> Vec<GridPoint> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: GridPoint| {
                (0..side).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ExhaustiveResult {
    pub partitions: usize,
    pub violations: usize,
    /// Smallest cut − bound over all partitions.
    pub min_slack: f64,
}

/// Every partition of {0,…,side−1}ⁿ into parts of size ≤ `max_part`, each checked with M = `max_part`.
pub fn exhaustive_grid_check(side: i64, n: usize, max_part: usize) -> Result<ExhaustiveResult> {
    let omega = grid(side, n);
    let parts = set_partitions(omega.len(), max_part);
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for labels in &parts {
        let c = deterministic_partition_bound_check(&omega, labels, max_part)?;
        violations += (!c.holds) as usize;
        min_slack = min_slack.min(c.cut - c.bound);
    }
    Ok(ExhaustiveResult {
        partitions: parts.len(),
        violations,
        min_slack,
    })
}

/// A random subset of {0,…,side−1}ⁿ with `size` distinct points.
pub fn random_subset(n: usize, side: i64, size: usize, seed: u64, index: u64) -> Vec<GridPoint> {
    let mut rng = substream(seed, tag::SCAN, index);
    let cap = (side as usize).pow(n as u32);
    let size = size.min(cap);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(size);
    while out.len() < size {
        let p: GridPoint = (0..n).map(|_| rng.random_range(0..side)).collect();
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        // Unrestricted partitions of 5 elements: B5 = 52.
        assert_eq!(set_partitions(5, 5).len(), 52);
        // Parts of size ≤ 1: only the singletons.
        assert_eq!(set_partitions(4, 1).len(), 1);
    }

    #[test]
    fn box_is_an_equality_case() {
        let g = grid(4, 3);
        let c = loomis_whitney_boundary(&g).unwrap();
        assert_eq!(c.boundary, 16.0);
        assert!((c.bound - 16.0).abs() < 1e-9);
        assert!(c.holds);
        let single = loomis_whitney_boundary(&[vec![3, -2]]).unwrap();
        assert_eq!((single.boundary, single.bound), (1.0, 1.0));
    }

    #[test]
    fn singletons_are_tight() {
        let omega = grid(3, 2);
        let labels: Vec<usize> = (0..omega.len()).collect();
        let c = deterministic_partition_bound_check(&omega, &labels, 1).unwrap();
        assert!((c.cut - c.bound).abs() < 1e-12);
    }
}
