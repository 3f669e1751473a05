//! Gamma-function helpers and Euclidean ball volumes.

use std::f64::consts::PI;

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// ln vol(B_{ℓ2^n}) = (n/2) ln π − ln Γ(1 + n/2).
pub fn ln_euclidean_ball_volume(n: usize) -> f64 {
    0.5 * n as f64 * PI.ln() - ln_gamma(1.0 + 0.5 * n as f64)
}

pub fn euclidean_ball_volume(n: usize) -> f64 {
    ln_euclidean_ball_volume(n).exp()
}

/// E‖G‖₂ for a standard Gaussian vector in ℝⁿ.
pub fn gaussian_norm_mean(n: usize) -> f64 {
    std::f64::consts::SQRT_2 * (ln_gamma(0.5 * (n as f64 + 1.0)) - ln_gamma(0.5 * n as f64)).exp()
}

/// E|z₁| for z uniform on S^{n−1}: Γ(n/2) / (√π Γ((n+1)/2)).
pub fn sphere_abs_coordinate_mean(n: usize) -> f64 {
    (ln_gamma(0.5 * n as f64) - ln_gamma(0.5 * (n as f64 + 1.0))).exp() / PI.sqrt()
}

/// Poisson upper tail Pr[Poisson(β) ≥ m], summed on whichever side avoids cancellation.
pub fn poisson_upper_tail(beta: f64, m: u64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    if beta < m as f64 {
        // e^{-β} Σ_{j≥m} β^j/j!
        let mut term = (-beta + m as f64 * beta.ln() - ln_factorial(m)).exp();
        let mut sum = 0.0;
        let mut j = m;
        while term > sum * 1e-18 {
            sum += term;
            j += 1;
            term *= beta / j as f64;
            if j > m + 10_000 {
                break;
            }
        }
        sum
    } else {
        // 1 − e^{-β} Σ_{j<m} β^j/j!
        let mut term = (-beta).exp();
        let mut head = 0.0;
        for j in 0..m {
            head += term;
            term *= beta / (j + 1) as f64;
        }
        1.0 - head
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert!((euclidean_ball_volume(2) - PI).abs() < 1e-13);
        assert!((euclidean_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((euclidean_ball_volume(1) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn poisson_tail_both_branches() {
        // Pr[Poisson(2) ≥ 1] = 1 − e^{-2}
        assert!((poisson_upper_tail(2.0, 1) - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
        // Pr[Poisson(0.5) ≥ 2] = 1 − e^{-0.5}(1 + 0.5)
        let want = 1.0 - (-0.5f64).exp() * 1.5;
        assert!((poisson_upper_tail(0.5, 2) - want).abs() < 1e-15);
    }

    #[test]
    fn sphere_coordinate_mean_small_n() {
        // n = 2: E|cos U| = 2/π; n = 3: E|z₁| = 1/2
        assert!((sphere_abs_coordinate_mean(2) - 2.0 / PI).abs() < 1e-14);
        assert!((sphere_abs_coordinate_mean(3) - 0.5).abs() < 1e-14);
    }
}
