//! Evaluation tree for the supported norms.

use super::descriptor::{Exponent, Kind, SpaceDescriptor};
use super::svd::{singular_values, svd};

/// Validated, evaluation-ready form of a [`SpaceDescriptor`].
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Lp { n: usize, p: Exponent },
    /// Outer ℓp over consecutive coordinate blocks. `offsets` has one more entry than `blocks`.
    Block { p: Exponent, blocks: Vec<Node>, offsets: Vec<usize> },
    Orlicz { m: usize, beta: f64 },
    /// k×k matrices in row-major order.
    Schatten { k: usize, p: Exponent },
    Intersect { base: Box<Node>, r: f64 },
}

impl Node {
    pub fn from_descriptor(d: &SpaceDescriptor) -> Node {
        match d.kind {
            Kind::Lp => Node::Lp {
                n: d.n,
                p: d.p.unwrap(),
            },
            Kind::BlockLp => {
                let blocks: Vec<Node> = d
                    .blocks
                    .as_ref()
                    .unwrap()
                    .iter()
                    .map(Node::from_descriptor)
                    .collect();
                let mut offsets = vec![0];
                for b in &blocks {
                    offsets.push(offsets.last().unwrap() + b.dim());
                }
                Node::Block {
                    p: d.p.unwrap(),
                    blocks,
                    offsets,
                }
            }
            Kind::OrliczBeta => Node::Orlicz {
                m: d.n,
                beta: d.beta.unwrap(),
            },
            Kind::Schatten => Node::Schatten {
                k: (d.n as f64).sqrt().round() as usize,
                p: d.p.unwrap(),
            },
            Kind::IntersectBall => Node::Intersect {
                base: Box::new(Node::from_descriptor(d.base.as_ref().unwrap())),
                r: d.r.unwrap(),
            },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Node::Lp { n, .. } => *n,
            Node::Block { offsets, .. } => *offsets.last().unwrap(),
            Node::Orlicz { m, .. } => *m,
            Node::Schatten { k, .. } => k * k,
            Node::Intersect { base, .. } => base.dim(),
        }
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        match self {
            Node::Lp { p, .. } => lp_norm(x, *p),
            Node::Block { p, blocks, offsets } => {
                let inner: Vec<f64> = blocks
                    .iter()
                    .enumerate()
                    .map(|(i, b)| b.norm(&x[offsets[i]..offsets[i + 1]]))
                    .collect();
                lp_norm(&inner, *p)
            }
            Node::Orlicz { beta, .. } => orlicz_norm(x, *beta),
            Node::Schatten { k, p } => lp_norm(&singular_values(x, *k), *p),
            Node::Intersect { base, r } => base.norm(x).max(lp_norm(x, Exponent::Finite(2.0)) / r),
        }
    }

    /// `‖x‖ ≤ r`, exiting early where the norm allows it.
    pub fn within(&self, x: &[f64], r: f64) -> bool {
        match self {
            Node::Lp { p, .. } => lp_within(x, *p, r),
            Node::Orlicz { beta, .. } => {
                let mut s = 0.0;
                for &xi in x {
                    let t = xi.abs() / r;
                    if t >= 1.0 {
                        return false;
                    }
                    s += psi_beta(t, *beta);
                    if s > 1.0 {
                        return false;
                    }
                }
                true
            }
            Node::Intersect { base, r: rad } => {
                x.iter().map(|v| v * v).sum::<f64>() <= (r * rad) * (r * rad) && base.within(x, r)
            }
            _ => self.norm(x) <= r,
        }
    }

    /// Writes a (sub)gradient of the norm at `x ≠ 0` into `out`; returns `true` at a non-smooth point.
    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) -> bool {
        match self {
            Node::Lp { p, .. } => lp_gradient(x, *p, out),
            Node::Orlicz { beta, .. } => {
                let s = orlicz_norm(x, *beta);
                orlicz_gradient_at(x, s, out)
            }
            Node::Block { p, blocks, offsets } => {
                let inner: Vec<f64> = blocks
                    .iter()
                    .enumerate()
                    .map(|(i, b)| b.norm(&x[offsets[i]..offsets[i + 1]]))
                    .collect();
                out.iter_mut().for_each(|v| *v = 0.0);
                let mut flag = false;
                match p {
                    Exponent::Inf => {
                        let (j, tie) = argmax_abs(&inner);
                        flag |= tie;
                        let rng = offsets[j]..offsets[j + 1];
                        flag |= blocks[j].gradient_into(&x[rng.clone()], &mut out[rng]);
                    }
                    Exponent::Finite(p) => {
                        let total = lp_norm(&inner, Exponent::Finite(*p));
                        for (i, b) in blocks.iter().enumerate() {
                            let rng = offsets[i]..offsets[i + 1];
                            if inner[i] == 0.0 {
                                flag |= *p == 1.0;
                                continue;
                            }
                            flag |= b.gradient_into(&x[rng.clone()], &mut out[rng.clone()]);
                            let c = if *p == 1.0 {
                                1.0
                            } else {
                                (inner[i] / total).powf(p - 1.0)
                            };
                            out[rng].iter_mut().for_each(|v| *v *= c);
                        }
                    }
                }
                flag
            }
            Node::Schatten { k, p } => schatten_gradient(x, *k, *p, out),
            Node::Intersect { base, r } => {
                let b = base.norm(x);
                let e2 = lp_norm(x, Exponent::Finite(2.0));
                let e = e2 / r;
                if b >= e {
                    base.gradient_into(x, out) | (b == e)
                } else {
                    for (o, &v) in out.iter_mut().zip(x) {
                        *o = v / (r * e2);
                    }
                    false
                }
            }
        }
    }

    /// max ‖x‖_∞ over the unit ball.
    pub fn linf_radius(&self) -> f64 {
        match self {
            Node::Lp { .. } | Node::Schatten { .. } => 1.0,
            Node::Block { blocks, .. } => blocks.iter().map(|b| b.linf_radius()).fold(0.0, f64::max),
            Node::Orlicz { beta, .. } => -(-beta).exp_m1(),
            Node::Intersect { base, r } => base.linf_radius().min(*r),
        }
    }

    /// Canonically positioned classes: ℓp, Ω_β, Schatten, and block ℓp over identical canonical blocks.
    pub fn canonical(&self) -> bool {
        match self {
            Node::Lp { .. } | Node::Orlicz { .. } | Node::Schatten { .. } => true,
            Node::Block { blocks, .. } => blocks[0].canonical() && blocks.iter().all(|b| *b == blocks[0]),
            Node::Intersect { .. } => false,
        }
    }

    /// ℓp leaves, Ω_β and block compositions of those.
    pub fn has_cone_sampler(&self) -> bool {
        match self {
            Node::Lp { .. } | Node::Orlicz { .. } => true,
            Node::Block { blocks, .. } => blocks.iter().all(|b| b.has_cone_sampler()),
            Node::Schatten { .. } | Node::Intersect { .. } => false,
        }
    }

    /// max ‖x‖₂ over the unit ball, for canonically positioned spaces.
    pub fn l2_radius(&self) -> Option<f64> {
        let growth = |d: usize, p: Exponent| (d as f64).powf((0.5 - p.recip()).max(0.0));
        match self {
            Node::Lp { n, p } => Some(growth(*n, *p)),
            Node::Schatten { k, p } => Some(growth(*k, *p)),
            Node::Orlicz { m, beta } => Some(orlicz_l2_radius(*m, *beta)),
            Node::Block { p, blocks, .. } if self.canonical() => {
                Some(blocks[0].l2_radius()? * growth(blocks.len(), *p))
            }
            _ => None,
        }
    }
}

pub fn lp_norm(x: &[f64], p: Exponent) -> f64 {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    match p {
        Exponent::Inf => m,
        _ if m == 0.0 || !m.is_finite() => m,
        Exponent::Finite(p) if p == 1.0 => x.iter().map(|v| v.abs()).sum(),
        Exponent::Finite(p) if p == 2.0 => m * x.iter().map(|v| (v / m) * (v / m)).sum::<f64>().sqrt(),
        Exponent::Finite(p) => m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p),
    }
}

fn lp_within(x: &[f64], p: Exponent, r: f64) -> bool {
    match p {
        Exponent::Inf => x.iter().all(|v| v.abs() <= r),
        Exponent::Finite(p) if p == 1.0 => {
            let mut s = 0.0;
            for v in x {
                s += v.abs();
                if s > r {
                    return false;
                }
            }
            true
        }
        Exponent::Finite(p) if p == 2.0 => {
            let r2 = r * r;
            let mut s = 0.0;
            for v in x {
                s += v * v;
                if s > r2 {
                    return false;
                }
            }
            true
        }
        Exponent::Finite(p) => {
            let mut s = 0.0;
            for v in x {
                let t = v.abs() / r;
                if t > 1.0 {
                    return false;
                }
                s += t.powf(p);
                if s > 1.0 {
                    return false;
                }
            }
            true
        }
    }
}

/// Index of the first maximal |x_i| and whether the maximum is tied.
fn argmax_abs(x: &[f64]) -> (usize, bool) {
    let mut j = 0;
    let mut tie = false;
    for i in 1..x.len() {
        let (a, b) = (x[i].abs(), x[j].abs());
        if a > b {
            j = i;
            tie = false;
        } else if a == b {
            tie = true;
        }
    }
    (j, tie)
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn lp_gradient(x: &[f64], p: Exponent, out: &mut [f64]) -> bool {
    match p {
        Exponent::Inf => {
            out.iter_mut().for_each(|v| *v = 0.0);
            let (j, tie) = argmax_abs(x);
            out[j] = sign(x[j]);
            tie
        }
        Exponent::Finite(p) if p == 1.0 => {
            let mut flag = false;
            for (o, &v) in out.iter_mut().zip(x) {
                *o = sign(v);
                flag |= v == 0.0;
            }
            flag
        }
        Exponent::Finite(p) => {
            let nrm = lp_norm(x, Exponent::Finite(p));
            for (o, &v) in out.iter_mut().zip(x) {
                *o = sign(v) * (v.abs() / nrm).powf(p - 1.0);
            }
            false
        }
    }
}

/// ψ_β(t) = −ln(1−t)/β.
pub fn psi_beta(t: f64, beta: f64) -> f64 {
    -(-t).ln_1p() / beta
}

/// Luxemburg norm of Ω_β: the root s of Σψ_β(|x_i|/s) = 1, bracketed by
/// `[‖x‖_∞, ‖x‖_∞/(1−e^{−β/m})]` and bisected to machine precision.
pub fn orlicz_norm(x: &[f64], beta: f64) -> f64 {
    let a = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if a == 0.0 || !a.is_finite() {
        return a;
    }
    let m = x.len() as f64;
    let f = |s: f64| x.iter().map(|v| psi_beta(v.abs() / s, beta)).sum::<f64>();
    let mut lo = a;
    let mut hi = a / -(-beta / m).exp_m1();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    hi
}

/// Gradient of the Ω_β norm at `x` with known norm `s`:
/// `g_i = sign(x_i)/(1−t_i) / Σ_j t_j/(1−t_j)`, `t = |x|/s`.
pub fn orlicz_gradient_at(x: &[f64], s: f64, out: &mut [f64]) -> bool {
    let mut denom = 0.0;
    let mut flag = false;
    for (o, &v) in out.iter_mut().zip(x) {
        let t = (v.abs() / s).min(1.0 - f64::EPSILON);
        let q = 1.0 / (1.0 - t);
        denom += t * q;
        *o = sign(v) * q;
        flag |= v == 0.0;
    }
    out.iter_mut().for_each(|v| *v /= denom);
    flag
}

fn schatten_gradient(x: &[f64], k: usize, p: Exponent, out: &mut [f64]) -> bool {
    let s = svd(x, k);
    let smax = s.sigma[0];
    let tiny = 1e-12 * smax;
    let mut coef = vec![0.0; k];
    let mut flag = false;
    match p {
        Exponent::Inf => {
            coef[0] = 1.0;
            flag = k > 1 && s.sigma[1] >= smax * (1.0 - 1e-12);
        }
        Exponent::Finite(p) if p == 1.0 => {
            for j in 0..k {
                if s.sigma[j] > tiny {
                    coef[j] = 1.0;
                } else {
                    flag = true;
                }
            }
        }
        Exponent::Finite(p) => {
            let nrm = lp_norm(&s.sigma, Exponent::Finite(p));
            for j in 0..k {
                coef[j] = (s.sigma[j] / nrm).powf(p - 1.0);
            }
        }
    }
    for a in 0..k {
        for b in 0..k {
            out[a * k + b] = (0..k).map(|c| coef[c] * s.u[a * k + c] * s.v[b * k + c]).sum();
        }
    }
    flag
}

/// max ‖x‖₂ over B_{Ω_β^m}. At a maximizer every nonzero |x_i| solves t(1−t) = c, so it
/// takes one of two values τ, 1−τ; enumerate the counts (j, l) of each and solve
/// jψ(τ) + lψ(1−τ) = 1 for τ.
pub fn orlicz_l2_radius(m: usize, beta: f64) -> f64 {
    let mut best = 0.0f64;
    for j in 1..=m {
        for l in 0..=(m - j) {
            let (jf, lf) = (j as f64, l as f64);
            let g = |t: f64| jf * psi_beta(t, beta) + lf * psi_beta(1.0 - t, beta) - 1.0;
            let val = |t: f64| (jf * t * t + lf * (1.0 - t) * (1.0 - t)).sqrt();
            if l == 0 {
                best = best.max(val(-(-beta / jf).exp_m1()));
                continue;
            }
            // g is convex on (0,1) and blows up at both ends; locate its minimum.
            let (mut a, mut b) = (0.0, 1.0);
            for _ in 0..200 {
                let m1 = a + (b - a) / 3.0;
                let m2 = b - (b - a) / 3.0;
                if g(m1) < g(m2) {
                    b = m2;
                } else {
                    a = m1;
                }
            }
            let tmin = 0.5 * (a + b);
            if g(tmin) > 0.0 {
                continue;
            }
            for (inside, outside) in [(tmin, 0.0), (tmin, 1.0)] {
                let (mut lo, mut hi) = (inside, outside);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if g(mid) <= 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                best = best.max(val(lo));
            }
        }
    }
    best
}
