#![allow(dead_code)]

use normpart::{Exponent, Kind, NormedSpace, SpaceDescriptor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn exponent(r: &mut ChaCha8Rng) -> Exponent {
    match r.random_range(0..5) {
        0 => Exponent::Finite(1.0),
        1 => Exponent::Finite(2.0),
        2 => Exponent::Inf,
        _ => Exponent::Finite(1.0 + 5.0 * r.random::<f64>()),
    }
}

fn leaf(r: &mut ChaCha8Rng, n: usize) -> SpaceDescriptor {
    if r.random_bool(0.7) {
        SpaceDescriptor::lp(n, exponent(r))
    } else {
        SpaceDescriptor::orlicz(n, 0.3 + 3.0 * r.random::<f64>())
    }
}

/// A random descriptor of the given kind with dimension ≤ `max_dim` (≥ 2; schatten is 2×2).
pub fn descriptor_of(kind: Kind, r: &mut ChaCha8Rng, max_dim: usize) -> SpaceDescriptor {
    let n = r.random_range(2..=max_dim);
    match kind {
        Kind::Lp => SpaceDescriptor::lp(n, exponent(r)),
        Kind::OrliczBeta => SpaceDescriptor::orlicz(n, 0.3 + 3.0 * r.random::<f64>()),
        Kind::BlockLp => {
            let n = n.max(2);
            let cut = r.random_range(1..n);
            SpaceDescriptor::block_lp(exponent(r), vec![leaf(r, cut), leaf(r, n - cut)])
        }
        Kind::Schatten => SpaceDescriptor::schatten(2, exponent(r)),
        Kind::IntersectBall => SpaceDescriptor::intersect_ball(leaf(r, n), 0.5 + r.random::<f64>()),
    }
}

pub const KINDS: [Kind; 5] = [Kind::Lp, Kind::BlockLp, Kind::OrliczBeta, Kind::Schatten, Kind::IntersectBall];

pub fn random_descriptor(r: &mut ChaCha8Rng, max_dim: usize) -> SpaceDescriptor {
    let k = KINDS[r.random_range(0..KINDS.len())];
    descriptor_of(k, r, max_dim)
}

pub fn space(d: SpaceDescriptor) -> NormedSpace {
    NormedSpace::new(d).unwrap()
}

pub fn gaussian_vec(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.sample::<f64, _>(rand_distr::StandardNormal)).collect()
}

pub fn unit_vec(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v = gaussian_vec(r, n);
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / s).collect()
}

fn lp(x: &[f64], p: Exponent) -> f64 {
    match p {
        Exponent::Inf => x.iter().fold(0.0, |m, v| m.max(v.abs())),
        Exponent::Finite(p) => x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p),
    }
}

/// Luxemburg norm by bisection on Σ −ln(1 − |x_i|/s)/β = 1.
fn orlicz(x: &[f64], beta: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let f = |s: f64| x.iter().map(|v| -(1.0 - v.abs() / s).ln() / beta).sum::<f64>();
    let (mut lo, mut hi) = (m, m);
    while f(hi) > 1.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// 2×2 singular values from the Frobenius norm and the determinant.
fn singular_2x2(x: &[f64]) -> (f64, f64) {
    let f2 = x.iter().map(|v| v * v).sum::<f64>();
    let det = (x[0] * x[3] - x[1] * x[2]).abs();
    let disc = (f2 * f2 - 4.0 * det * det).max(0.0).sqrt();
    let s1 = (0.5 * (f2 + disc)).sqrt();
    let s2 = (0.5 * (f2 - disc)).max(0.0).sqrt();
    (s1, s2)
}

/// Reference norm written independently of the library.
pub fn norm_oracle(d: &SpaceDescriptor, x: &[f64]) -> f64 {
    match d.kind {
        Kind::Lp => lp(x, d.p.unwrap()),
        Kind::OrliczBeta => orlicz(x, d.beta.unwrap()),
        Kind::BlockLp => {
            let mut at = 0;
            let inner: Vec<f64> = d
                .blocks
                .as_ref()
                .unwrap()
                .iter()
                .map(|b| {
                    let v = norm_oracle(b, &x[at..at + b.n]);
                    at += b.n;
                    v
                })
                .collect();
            lp(&inner, d.p.unwrap())
        }
        Kind::Schatten => {
            assert_eq!(d.n, 4, "oracle covers 2×2 only");
            let (a, b) = singular_2x2(x);
            lp(&[a, b], d.p.unwrap())
        }
        Kind::IntersectBall => {
            let e = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            norm_oracle(d.base.as_ref().unwrap(), x).max(e / d.r.unwrap())
        }
    }
}

/// Lens oracle: vol(B ∩ (w + B))/vol(B) for two unit discs at distance t.
pub fn disc_overlap(t: f64) -> f64 {
    let h = 0.5 * t;
    (2.0 / std::f64::consts::PI) * (h.acos() - h * (1.0 - h * h).sqrt())
}

/// Overlap of the cube [−1,1]ⁿ with its translate by w.
pub fn cube_overlap(w: &[f64]) -> f64 {
    w.iter().map(|v| (1.0 - 0.5 * v.abs()).max(0.0)).product()
}

/// Pr[sep] from the overlap fraction t: (2 − 2t)/(2 − t).
pub fn sep_from_overlap(t: f64) -> f64 {
    (2.0 - 2.0 * t) / (2.0 - t)
}

/// Least-squares slope of ln y against ln x.
pub fn loglog(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}
