use serde::Serialize;

/// Two-sided 95% standard-normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Failures below which outage intervals switch to Wilson.
pub const WILSON_BELOW_FAILURES: u64 = 1000;

/// A Monte Carlo mean with its 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricEstimate {
    pub value: f64,
    pub n: u64,
    pub half_width: f64,
    pub lower: f64,
    pub upper: f64,
    pub seed: u64,
}

impl MetricEstimate {
    /// Normal-approximation interval for a sample mean.
    pub fn mean(stats: &RunningStats, seed: u64) -> Self {
        let hw = if stats.n > 1 {
            Z95 * (stats.variance() / stats.n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            value: stats.mean,
            n: stats.n,
            half_width: hw,
            lower: stats.mean - hw,
            upper: stats.mean + hw,
            seed,
        }
    }

    /// Binomial proportion: Wilson score interval for few failures, normal
    /// approximation otherwise. Bounds are clipped to `[0, 1]`.
    pub fn proportion(failures: u64, n: u64, seed: u64) -> Self {
        if n == 0 {
            return Self {
                value: 0.0,
                n,
                half_width: 0.0,
                lower: 0.0,
                upper: 1.0,
                seed,
            };
        }
        let nf = n as f64;
        let p = failures as f64 / nf;
        let (lower, upper) = if failures < WILSON_BELOW_FAILURES {
            wilson(failures, n)
        } else {
            let hw = Z95 * (p * (1.0 - p) / nf).sqrt();
            ((p - hw).max(0.0), (p + hw).min(1.0))
        };
        Self {
            value: p,
            n,
            half_width: 0.5 * (upper - lower),
            lower,
            upper,
            seed,
        }
    }

    pub fn overlaps(&self, other: &MetricEstimate) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }

    /// True when this interval lies strictly above `other`'s.
    pub fn separated_above(&self, other: &MetricEstimate) -> bool {
        self.lower > other.upper
    }

    pub fn value_db(&self) -> f64 {
        10.0 * self.value.log10()
    }

    /// Half-width mapped to dB by first-order propagation.
    pub fn half_width_db(&self) -> f64 {
        10.0 / std::f64::consts::LN_10 * self.half_width / self.value
    }
}

/// Wilson score interval for `failures` out of `n`.
pub fn wilson(failures: u64, n: u64) -> (f64, f64) {
    let nf = n as f64;
    let p = failures as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let hw = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lower = if failures == 0 { 0.0 } else { (center - hw).max(0.0) };
    let upper = if failures == n { 1.0 } else { (center + hw).min(1.0) };
    (lower, upper)
}

/// Streaming mean/variance (Welford), mergeable with Chan's update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: RunningStats) -> RunningStats {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let (na, nb) = (self.n as f64, other.n as f64);
        let delta = other.mean - self.mean;
        RunningStats {
            n,
            mean: self.mean + delta * nb / n as f64,
            m2: self.m2 + other.m2 + delta * delta * na * nb / n as f64,
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = RunningStats::default();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// One-sample Kolmogorov–Smirnov statistic of `samples` against `cdf`.
/// Sorts `samples` in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample KS statistic; both inputs are sorted in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let s: RunningStats = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((s.mean - mean).abs() < 1e-12);
        assert!((s.variance() - var).abs() < 1e-10);
        let (a, b) = xs.split_at(333);
        let merged = a
            .iter()
            .copied()
            .collect::<RunningStats>()
            .merge(b.iter().copied().collect());
        assert!((merged.variance() - var).abs() < 1e-10);
        assert_eq!(merged.n, 1000);
    }

    #[test]
    fn wilson_handles_zero_failures() {
        let (lo, hi) = wilson(0, 1000);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.01);
        let e = MetricEstimate::proportion(0, 1000, 1);
        assert_eq!(e.value, 0.0);
        assert!(e.half_width > 0.0);
    }

    #[test]
    fn proportion_bounds_clip() {
        let e = MetricEstimate::proportion(1000, 1000, 1);
        assert_eq!(e.value, 1.0);
        assert!(e.upper <= 1.0 && e.lower >= 0.0);
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let mut xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_statistic(&mut xs, |x| x) <= 0.0005 + 1e-12);
    }
}
