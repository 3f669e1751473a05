//! Recomputes the Lipschitz calibration constant: worst ratio over the 50-instance corpus.

use normpart::extension::{calibration_instance, lipschitz_ratio_scan, K0};

fn main() {
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let op = calibration_instance(seed, 64).expect("instance");
        worst = worst.max(lipschitz_ratio_scan(&op, 400, seed).expect("scan").max_ratio);
    }
    println!("corpus max ratio {worst:.6} (frozen K0 = {K0})");
}
