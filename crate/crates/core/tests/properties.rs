mod common;

use common::*;
use normpart::extension::build_extension;
use normpart::partition::separation_bracket;
use normpart::sepmod::companion_space;
use normpart::space::loglacunary_decompose;
use normpart::NormedSpace;
use proptest::prelude::*;

fn scale(x: &[f64], c: f64) -> Vec<f64> {
    x.iter().map(|v| v * c).collect()
}

fn add(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

proptest! {
    #[test]
    fn norm_matches_reference(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = random_descriptor(&mut r, 8);
        let s = space(d.clone());
        let x = gaussian_vec(&mut r, s.dim());
        let a = s.norm(&x);
        let b = norm_oracle(&d, &x);
        prop_assert!((a - b).abs() <= 1e-9 * b.max(1.0), "{a} vs {b} for {}", d.to_json());
    }

    #[test]
    fn homogeneous_and_subadditive(seed in any::<u64>(), c in -5.0f64..5.0) {
        let mut r = rng(seed);
        let s = space(random_descriptor(&mut r, 8));
        let x = gaussian_vec(&mut r, s.dim());
        let y = gaussian_vec(&mut r, s.dim());
        let nx = s.norm(&x);
        prop_assert!((s.norm(&scale(&x, c)) - c.abs() * nx).abs() <= 1e-9 * nx.max(1.0));
        prop_assert!(s.norm(&add(&x, &y)) <= nx + s.norm(&y) + 1e-9);
        prop_assert!(nx > 0.0);
    }

    #[test]
    fn gradient_is_euler_and_directional(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = random_descriptor(&mut r, 6);
        let s = space(d.clone());
        let x = gaussian_vec(&mut r, s.dim());
        let g = s.norm_gradient(&x).unwrap();
        let dot: f64 = g.g.iter().zip(&x).map(|(a, b)| a * b).sum();
        let nx = s.norm(&x);
        prop_assert!((dot - nx).abs() <= 1e-7 * nx.max(1.0), "euler {dot} vs {nx}");
        if !g.nonsmooth {
            let e = unit_vec(&mut r, s.dim());
            let h = 1e-6;
            let fd = (norm_oracle(&d, &add(&x, &scale(&e, h))) - norm_oracle(&d, &add(&x, &scale(&e, -h)))) / (2.0 * h);
            let an: f64 = g.g.iter().zip(&e).map(|(a, b)| a * b).sum();
            prop_assert!((fd - an).abs() <= 1e-4 * (1.0 + fd.abs()), "fd {fd} vs {an} for {}", d.to_json());
        }
    }

    #[test]
    fn companion_sandwich(n in 2usize..64, p in 1.0f64..8.0, inf in any::<bool>(), seed in any::<u64>()) {
        let x_space = NormedSpace::lp(n, if inf { f64::INFINITY } else { p });
        let c = companion_space(&x_space).unwrap();
        prop_assert!(c.lower > 0.0 && c.lower <= 1.0 + 1e-12 && c.upper >= 1.0 - 1e-12);
        let mut r = rng(seed);
        for _ in 0..8 {
            let x = gaussian_vec(&mut r, n);
            let nx = norm_oracle(x_space.descriptor(), &x);
            let ny = norm_oracle(&c.descriptor, &x);
            prop_assert!(c.lower * nx <= ny * (1.0 + 1e-9), "lower: {} {nx} {ny}", c.lower);
            prop_assert!(ny <= c.upper * nx * (1.0 + 1e-9), "upper: {} {nx} {ny}", c.upper);
        }
    }

    #[test]
    fn separation_bracket_is_ordered(psi in 0.0f64..50.0) {
        let (lo, hi) = separation_bracket(psi);
        prop_assert!(lo >= 0.0 && hi <= 2.0);
        prop_assert!(lo <= hi + 1e-15);
        prop_assert!(lo <= 1.0);
    }

    #[test]
    fn decomposition_is_admissible(n in 3u64..1_000_000_000_000) {
        let d = loglacunary_decompose(n).unwrap();
        let prod: u128 = d.factors.iter().map(|&f| f as u128).product();
        prop_assert_eq!(prod + d.remainder as u128, n as u128);
        if let Some(&first) = d.factors.first() {
            prop_assert!(first == 6 || first == 7);
        }
        for w in d.factors.windows(2) {
            let (a, b) = (w[0] as f64, w[1] as f64);
            prop_assert!(a < b && b <= a.exp2() && a.exp2() <= b * b * b, "{:?}", d.factors);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extension_weights_are_convex(seed in any::<u64>(), inf in any::<bool>()) {
        let mut r = rng(seed);
        let s = if inf { NormedSpace::lp(3, f64::INFINITY) } else { NormedSpace::lp(2, 2.0) };
        let n = s.dim();
        let k = 2 + (seed % 6) as usize;
        let anchors: Vec<Vec<f64>> = (0..k).map(|_| gaussian_vec(&mut r, n)).collect();
        let values: Vec<Vec<f64>> = (0..k).map(|_| gaussian_vec(&mut r, 2)).collect();
        let op = build_extension(&s, &anchors, &values, None, 16, seed).unwrap();
        for (a, v) in anchors.iter().zip(&values) {
            prop_assert_eq!(&op.evaluate(a).unwrap().value, v);
        }
        for _ in 0..4 {
            let x = scale(&gaussian_vec(&mut r, n), 2.0);
            let e = op.evaluate(&x).unwrap();
            prop_assert!(e.weights.iter().all(|&w| w >= 0.0));
            prop_assert!((e.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            for j in 0..2 {
                let mix: f64 = e.weights.iter().zip(&values).map(|(w, v)| w * v[j]).sum();
                prop_assert!((mix - e.value[j]).abs() <= 1e-9 * (1.0 + mix.abs()));
            }
        }
    }
}
