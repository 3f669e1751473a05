use serde::{Deserialize, Serialize};

/// Value, standard error, trial count and seed of a stochastic result.
/// Exact results carry `stderr = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

impl MonteCarloEstimate {
    pub fn exact(value: f64) -> Self {
        MonteCarloEstimate {
            value,
            stderr: 0.0,
            trials: 1,
            seed: 0,
        }
    }

    pub fn scale(self, c: f64) -> Self {
        MonteCarloEstimate {
            value: self.value * c,
            stderr: self.stderr * c.abs(),
            ..self
        }
    }

    /// `|value - target| <= k * stderr`, with a floating-point floor for exact results.
    pub fn within_sigma(&self, target: f64, k: f64) -> bool {
        let slack = k * self.stderr + 1e-12 * target.abs().max(self.value.abs()).max(1e-300);
        (self.value - target).abs() <= slack
    }
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Accumulator for self-normalized weighted means. With unit weights it reduces
/// to the sample mean with stderr `sd / sqrt(n)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct WeightedMean {
    n: u64,
    w: KahanSum,
    wf: KahanSum,
    w2: KahanSum,
    w2f: KahanSum,
    w2f2: KahanSum,
}

impl WeightedMean {
    pub fn push(&mut self, f: f64, w: f64) {
        self.n += 1;
        self.w.add(w);
        self.wf.add(w * f);
        self.w2.add(w * w);
        self.w2f.add(w * w * f);
        self.w2f2.add(w * w * f * f);
    }

    pub fn merge(&mut self, o: &WeightedMean) {
        self.n += o.n;
        self.w.add(o.w.value());
        self.wf.add(o.wf.value());
        self.w2.add(o.w2.value());
        self.w2f.add(o.w2f.value());
        self.w2f2.add(o.w2f2.value());
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        let w = self.w.value();
        if w > 0.0 {
            self.wf.value() / w
        } else {
            0.0
        }
    }

    /// Delta-method standard error of the ratio estimator, with the `n/(n-1)`
    /// correction so the unit-weight case matches the usual sample formula.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let w = self.w.value();
        let m = self.mean();
        let num = self.w2f2.value() - 2.0 * m * self.w2f.value() + m * m * self.w2.value();
        let n = self.n as f64;
        (num.max(0.0) * n / (n - 1.0)).sqrt() / w
    }

    /// Kish effective sample size.
    pub fn ess(&self) -> f64 {
        let w2 = self.w2.value();
        if w2 > 0.0 {
            let w = self.w.value();
            w * w / w2
        } else {
            0.0
        }
    }

    pub fn estimate(&self, seed: u64) -> MonteCarloEstimate {
        MonteCarloEstimate {
            value: self.mean(),
            stderr: self.stderr(),
            trials: self.n,
            seed,
        }
    }
}

pub fn merge_all<'a>(parts: impl IntoIterator<Item = &'a WeightedMean>) -> WeightedMean {
    let mut acc = WeightedMean::default();
    for p in parts {
        acc.merge(p);
    }
    acc
}

/// Batch-means estimate for a correlated chain.
pub fn batch_means(values: &[f64], batches: usize, seed: u64) -> MonteCarloEstimate {
    let n = values.len();
    let b = batches.clamp(2, n.max(2));
    let len = n / b;
    if len == 0 {
        let mut acc = WeightedMean::default();
        values.iter().for_each(|&v| acc.push(v, 1.0));
        return acc.estimate(seed);
    }
    let mut means = WeightedMean::default();
    for i in 0..b {
        let chunk = &values[i * len..(i + 1) * len];
        let mut s = KahanSum::default();
        chunk.iter().for_each(|&v| s.add(v));
        means.push(s.value() / len as f64, 1.0);
    }
    MonteCarloEstimate {
        value: means.mean(),
        stderr: means.stderr(),
        trials: n as u64,
        seed,
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len()) as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
