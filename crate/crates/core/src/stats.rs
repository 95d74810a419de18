//! Small numerical helpers: compensated sums, log-sum-exp, batch means,
//! proportion intervals and log-log fits.

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

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

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// `log Σ exp(x_i)`, stable for large magnitudes. `-inf` entries are
/// ignored; an all `-inf` input yields `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let s: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Estimate {
    /// `sqrt(se_a² + se_b²)`, the standard error of a difference of two
    /// estimates treated as independent.
    pub fn combined_stderr(&self, other: &Estimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

/// Number of batches used for batch-means standard errors.
pub const BATCHES: usize = 32;

/// Batch boundaries for `n` items split into `batches` contiguous groups.
pub(crate) fn batch_bounds(n: usize, batches: usize) -> Vec<(usize, usize)> {
    (0..batches).map(|b| (b * n / batches, (b + 1) * n / batches)).collect()
}

/// Batch-means estimate from per-batch sums. The overall mean is the grand
/// total over `n`; the standard error comes from the spread of the batch
/// means.
pub(crate) fn estimate_from_batches(sums: &[f64], counts: &[usize]) -> Estimate {
    let n: usize = counts.iter().sum();
    let total: KahanSum = sums.iter().copied().collect();
    let mean = total.value() / n as f64;
    let b = sums.len();
    let stderr = if b < 2 {
        0.0
    } else {
        let ss: KahanSum = sums
            .iter()
            .zip(counts)
            .map(|(&s, &c)| {
                let d = s / c as f64 - mean;
                d * d
            })
            .collect();
        (ss.value() / (b * (b - 1)) as f64).sqrt()
    };
    Estimate { value: mean, stderr, n }
}

/// Batch-means estimate of the mean of `values` (in the given order).
pub fn batch_means(values: &[f64], batches: usize) -> Estimate {
    assert!(!values.is_empty(), "batch_means of an empty sample");
    let b = batches.clamp(1, values.len());
    let (sums, counts): (Vec<f64>, Vec<usize>) = batch_bounds(values.len(), b)
        .into_iter()
        .map(|(lo, hi)| {
            let s: KahanSum = values[lo..hi].iter().copied().collect();
            (s.value(), hi - lo)
        })
        .unzip();
    estimate_from_batches(&sums, &counts)
}

/// Wilson score interval for `k` successes in `n` trials at `z` standard
/// deviations. Returns `(center, half_width)`.
pub fn wilson(k: usize, n: usize, z: f64) -> (f64, f64) {
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (center, half)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut s = KahanSum::new();
        s.add(1.0);
        for _ in 0..10_000 {
            s.add(1e-16);
        }
        assert_relative_eq!(s.value(), 1.0 + 1e-12, max_relative = 1e-15);
    }

    #[test]
    fn lse_matches_naive_and_handles_extremes() {
        let xs = [0.1, -2.0, 1.5];
        let naive: f64 = xs.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert_relative_eq!(log_sum_exp(&xs), naive, max_relative = 1e-14);
        assert_relative_eq!(log_sum_exp(&[1000.0, 1000.0]), 1000.0 + 2f64.ln());
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, 0.0]), 0.0);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }

    #[test]
    fn batch_means_of_constant_has_zero_error() {
        let e = batch_means(&[0.25; 100], BATCHES);
        assert_eq!(e.value, 0.25);
        assert_eq!(e.stderr, 0.0);
        assert_eq!(e.n, 100);
    }

    #[test]
    fn batch_means_close_to_iid_stderr() {
        // alternating ±1 within every batch: batch means are all 0
        let v: Vec<f64> = (0..64).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let e = batch_means(&v, 32);
        assert_eq!(e.value, 0.0);
        assert_eq!(e.stderr, 0.0);
        let w: Vec<f64> = (0..64).map(|i| (i / 2) as f64).collect();
        let e = batch_means(&w, 32);
        assert_relative_eq!(e.value, 15.5);
        // batch means 0..31, sd = sqrt(88), stderr = sd / sqrt(32)
        assert_relative_eq!(e.stderr, (88.0f64 / 32.0).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn wilson_bounds() {
        let (c, h) = wilson(0, 10_000, 1.0);
        assert!(c > 0.0 && h > 0.0 && h < 1e-3);
        let (c, h) = wilson(5, 10, 1.0);
        assert_relative_eq!(c, 0.5);
        assert!(h <= 0.5);
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.5)).collect();
        assert_relative_eq!(loglog_slope(&xs, &ys), 1.5, max_relative = 1e-12);
    }
}
