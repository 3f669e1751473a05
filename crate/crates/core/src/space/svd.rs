//! One-sided Jacobi SVD for small square matrices.

/// `A = U diag(σ) Vᵀ` with σ sorted in decreasing order. Matrices are row-major k×k.
#[derive(Debug, Clone)]
pub struct Svd {
    pub k: usize,
    pub sigma: Vec<f64>,
    /// Left singular vectors as columns, row-major.
    pub u: Vec<f64>,
    /// Right singular vectors as columns, row-major.
    pub v: Vec<f64>,
}

const TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 60;

pub fn singular_values(a: &[f64], k: usize) -> Vec<f64> {
    match k {
        1 => vec![a[0].abs()],
        2 => {
            // σ₁,₂ = (√((a+d)² + (b−c)²) ± √((a−d)² + (b+c)²))/2
            let (a, b, c, d) = (a[0], a[1], a[2], a[3]);
            let s = (a + d).hypot(b - c);
            let t = (a - d).hypot(b + c);
            vec![0.5 * (s + t), 0.5 * (s - t).abs()]
        }
        _ => svd(a, k).sigma,
    }
}

pub fn svd(a: &[f64], k: usize) -> Svd {
    debug_assert_eq!(a.len(), k * k);
    // Work on columns: w[j] is column j of A·V.
    let mut w: Vec<Vec<f64>> = (0..k).map(|j| (0..k).map(|i| a[i * k + j]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..k)
        .map(|j| (0..k).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..k {
                    alpha += w[p][i] * w[p][i];
                    beta += w[q][i] * w[q][i];
                    gamma += w[p][i] * w[q][i];
                }
                if gamma == 0.0 || gamma.abs() <= TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..k {
                    let (wp, wq) = (w[p][i], w[q][i]);
                    w[p][i] = c * wp - s * wq;
                    w[q][i] = s * wp + c * wq;
                    let (vp, vq) = (v[p][i], v[q][i]);
                    v[p][i] = c * vp - s * vq;
                    v[q][i] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(usize, f64)> = w
        .iter()
        .enumerate()
        .map(|(j, col)| (j, col.iter().map(|x| x * x).sum::<f64>().sqrt()))
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1));

    let mut sigma = Vec::with_capacity(k);
    let mut u = vec![0.0; k * k];
    let mut vv = vec![0.0; k * k];
    for (col, &(j, s)) in order.iter().enumerate() {
        sigma.push(s);
        for i in 0..k {
            u[i * k + col] = if s > 0.0 { w[j][i] / s } else { 0.0 };
            vv[i * k + col] = v[j][i];
        }
    }
    Svd { k, sigma, u, v: vv }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstructs_matrix() {
        let a = [2.0, -1.0, 0.5, 0.3, 4.0, 1.0, -2.0, 0.0, 1.5];
        let s = svd(&a, 3);
        for i in 0..3 {
            for j in 0..3 {
                let r: f64 = (0..3).map(|c| s.u[i * 3 + c] * s.sigma[c] * s.v[j * 3 + c]).sum();
                assert!((r - a[i * 3 + j]).abs() < 1e-12);
            }
        }
        assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn identity_and_rank_one() {
        assert_eq!(singular_values(&[1.0, 0.0, 0.0, 1.0], 2), vec![1.0, 1.0]);
        let s = singular_values(&[1.0, 1.0, 1.0, 1.0], 2);
        assert!((s[0] - 2.0).abs() < 1e-14 && s[1].abs() < 1e-14);
    }
}
