//! Log-lacunary factorizations `n = n_1 n_2 … n_k + remainder`.
//!
//! Admissible chains satisfy `n_1 ∈ {6, 7}`, `n_i < n_{i+1}` and
//! `n_{i+1} ≤ 2^{n_i} ≤ n_{i+1}³`. The base candidate is the inductive `y_i` sequence
//! with a final-factor adjustment; we additionally try the same adjustment on every
//! short admissible prefix and keep the smallest remainder.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub factors: Vec<u64>,
    pub remainder: u64,
}

/// `b ≤ 2^a`.
fn le_pow2(b: u64, a: u64) -> bool {
    a >= 64 || b <= 1u64 << a
}

/// `2^a ≤ b³`.
fn pow2_le_cube(a: u64, b: u64) -> bool {
    if a >= 127 {
        return a as f64 <= 3.0 * (b as f64).log2();
    }
    match (b as u128).checked_mul(b as u128).and_then(|s| s.checked_mul(b as u128)) {
        Some(c) => (1u128 << a) <= c,
        None => true,
    }
}

/// `2 log₂ m ≤ a`, i.e. `m² ≤ 2^a`.
fn sq_le_pow2(m: u64, a: u64) -> bool {
    a >= 128 || (m as u128) * (m as u128) <= 1u128 << a
}

pub fn admissible_step(a: u64, b: u64) -> bool {
    a < b && le_pow2(b, a) && pow2_le_cube(a, b)
}

fn product(ch: &[u64]) -> u128 {
    ch.iter()
        .fold(1u128, |acc, &f| acc.saturating_mul(f as u128))
}

/// Checks every chain constraint and `product ≤ n`.
pub fn is_admissible(ch: &[u64], n: u64) -> bool {
    if ch.is_empty() {
        return true;
    }
    if ch[0] != 6 && ch[0] != 7 {
        return false;
    }
    ch.windows(2).all(|w| admissible_step(w[0], w[1])) && product(ch) <= n as u128
}

/// One step of the inductive sequence y_1 = (7), y_2 = (6, 8), …
fn y_next(ch: &[u64]) -> Vec<u64> {
    let k = ch.len();
    let mut m = vec![0u64; k];
    m[k - 1] = ch[k - 1] + 1;
    for j in (0..k - 1).rev() {
        m[j] = if sq_le_pow2(m[j + 1], ch[j]) {
            ch[j]
        } else {
            ch[j] + 1
        };
    }
    if m[0] == 6 || m[0] == 7 {
        m
    } else {
        let mut v = vec![6];
        v.extend(m);
        v
    }
}

/// Largest L with L² ≤ 2^a.
fn sqrt_pow2(a: u64) -> u64 {
    if a >= 128 {
        return u64::MAX;
    }
    let mut l = (2f64.powf(a as f64 / 2.0)).min(u64::MAX as f64) as u64;
    while l > 0 && !sq_le_pow2(l, a) {
        l -= 1;
    }
    while l < u64::MAX && sq_le_pow2(l + 1, a) {
        l += 1;
    }
    l
}

/// The last y_i with product ≤ n. Runs in which only the last factor grows are skipped in one
/// jump: the other factors are recomputed from identical inputs until (L+1)² > 2^{y[k−2]}.
fn y_below(n: u64) -> Option<Vec<u64>> {
    let mut ch = vec![7u64];
    if 7 > n {
        return None;
    }
    loop {
        let next = y_next(&ch);
        if product(&next) > n as u128 {
            return Some(ch);
        }
        let k = next.len();
        if k == ch.len() && k >= 2 && next[..k - 1] == ch[..k - 1] {
            let pre = product(&next[..k - 1]) as u64;
            let jump = sqrt_pow2(next[k - 2]).min(n / pre);
            ch = next;
            ch[k - 1] = ch[k - 1].max(jump);
        } else {
            ch = next;
        }
    }
}

fn construct(n: u64) -> Option<Vec<u64>> {
    let best = y_below(n)?;
    let y = product(&best) as u64;
    let pre = product(&best[..best.len() - 1]) as u64;
    if y >= n - pre {
        return Some(best);
    }
    let mut ch = best[..best.len() - 1].to_vec();
    ch.push(n / pre);
    Some(ch)
}

fn prefixes(bound: u64) -> Vec<Vec<u64>> {
    fn rec(ch: &mut Vec<u64>, prod: u64, bound: u64, out: &mut Vec<Vec<u64>>) {
        out.push(ch.clone());
        let last = *ch.last().unwrap();
        let mut b = last + 1;
        while prod.saturating_mul(b) <= bound && le_pow2(b, last) {
            if admissible_step(last, b) {
                ch.push(b);
                rec(ch, prod * b, bound, out);
                ch.pop();
            }
            b += 1;
        }
    }
    let mut out = vec![vec![]];
    for a in [6u64, 7] {
        if a <= bound {
            rec(&mut vec![a], a, bound, &mut out);
        }
    }
    out
}

fn adjust(pre: &[u64], n: u64) -> Option<Vec<u64>> {
    if pre.is_empty() {
        return Some([7u64, 6].into_iter().find(|&a| a <= n).into_iter().collect());
    }
    let p = product(pre) as u64;
    let mut ch = pre.to_vec();
    ch.push(n / p);
    is_admissible(&ch, n).then_some(ch)
}

/// Smallest-remainder admissible factorization among the candidates described above.
pub fn loglacunary_decompose(n: u64) -> Result<Decomposition> {
    if n < 3 {
        return Err(Error::input("/n", format!("n must be at least 3, got {n}")));
    }
    let ln = (n as f64).ln();
    let bound = (36.0f64).max(4.0 * ln * ln) as u64;
    Ok(decompose_with(n, &prefixes(bound)))
}

fn decompose_with(n: u64, prefixes: &[Vec<u64>]) -> Decomposition {
    let mut cands: Vec<Vec<u64>> = Vec::new();
    if n >= 7 {
        if let Some(c) = construct(n) {
            if is_admissible(&c, n) {
                cands.push(c);
            }
        }
    }
    cands.extend(prefixes.iter().filter_map(|p| adjust(p, n)));
    cands.push(vec![]);
    let best = cands
        .into_iter()
        .min_by_key(|c| n - product(c) as u64)
        .unwrap();
    let remainder = n - product(&best) as u64;
    Decomposition {
        factors: best,
        remainder,
    }
}

/// Decompose every n in `[lo, hi]`, sharing the candidate tables.
pub fn decompose_range(lo: u64, hi: u64) -> Result<Vec<Decomposition>> {
    if lo < 3 {
        return Err(Error::input("/n", format!("n must be at least 3, got {lo}")));
    }
    let ln = (hi as f64).ln();
    let all = prefixes((36.0f64).max(4.0 * ln * ln) as u64);
    Ok((lo..=hi)
        .map(|n| {
            let ln = (n as f64).ln();
            let b = (36.0f64).max(4.0 * ln * ln) as u64;
            let pre: Vec<Vec<u64>> = all
                .iter()
                .filter(|p| product(p) <= b as u128)
                .cloned()
                .collect();
            decompose_with(n, &pre)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y_sequence(limit: u64) -> Vec<Vec<u64>> {
        let mut out = vec![vec![7u64]];
        while product(out.last().unwrap()) <= limit as u128 {
            let next = y_next(out.last().unwrap());
            out.push(next);
        }
        out
    }

    #[test]
    fn y_below_matches_walk() {
        let ys = y_sequence(100_000_000);
        let mut n = 7u64;
        while n < 99_000_000 {
            n += 1 + n / 997;
            let walk = ys.iter().take_while(|c| product(c) <= n as u128).last().cloned();
            assert_eq!(y_below(n), walk, "n = {n}");
        }
    }

    #[test]
    fn y_sequence_start() {
        let ys = y_sequence(1000);
        assert_eq!(ys[0], vec![7]);
        assert_eq!(ys[1], vec![6, 8]);
        assert_eq!(ys[2], vec![7, 9]);
        assert!(ys.iter().all(|c| is_admissible(c, u64::MAX)));
    }

    #[test]
    fn known_values() {
        let d = loglacunary_decompose(42).unwrap();
        assert_eq!((d.factors, d.remainder), (vec![6, 7], 0));
        let d = loglacunary_decompose(45).unwrap();
        assert_eq!((d.factors, d.remainder), (vec![6, 7], 3));
        let d = loglacunary_decompose(1_000_000).unwrap();
        assert_eq!((d.factors, d.remainder), (vec![7, 9, 11, 1443], 1));
        let d = loglacunary_decompose(1_000_000_000).unwrap();
        assert_eq!((d.factors, d.remainder), (vec![6, 33, 5050505], 10));
        assert!(loglacunary_decompose(2).is_err());
    }

    #[test]
    fn range_matches_pointwise() {
        let r = decompose_range(3, 400).unwrap();
        for (i, d) in r.iter().enumerate() {
            assert_eq!(*d, loglacunary_decompose(3 + i as u64).unwrap());
        }
    }
}
