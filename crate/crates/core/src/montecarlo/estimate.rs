use alloc::vec::Vec;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials` at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // Clamp so that the interval always brackets p̂ exactly at 0 and 1.
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

/// Monte Carlo estimate of one event probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub master_seed: u64,
    pub discarded_degenerate: u64,
}

impl TailEstimate {
    pub fn new(successes: u64, trials: u64, discarded_degenerate: u64, master_seed: u64) -> Self {
        assert!(successes <= trials, "successes {successes} exceed trials {trials}");
        let (ci_low, ci_high) = wilson_interval(successes, trials);
        let p_hat = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        Self { trials, successes, p_hat, ci_low, ci_high, master_seed, discarded_degenerate }
    }

    /// Pools two estimates of the same event drawn from disjoint streams.
    pub fn merge(&self, other: &Self) -> Self {
        Self::new(
            self.successes + other.successes,
            self.trials + other.trials,
            self.discarded_degenerate + other.discarded_degenerate,
            self.master_seed,
        )
    }

    /// `3/trials` when no event was observed.
    pub fn rule_of_three(&self) -> Option<f64> {
        (self.successes == 0 && self.trials > 0).then(|| 3.0 / self.trials as f64)
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// Estimate at one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPoint {
    pub threshold: f64,
    pub estimate: TailEstimate,
}

pub(crate) fn check_thresholds(thresholds: &[f64]) -> crate::Result<()> {
    let finite = thresholds.iter().all(|t| t.is_finite());
    let increasing = thresholds.windows(2).all(|w| w[0] < w[1]);
    if thresholds.is_empty() || !finite || !increasing {
        return Err(crate::Error::UnsortedThresholds);
    }
    Ok(())
}

pub(crate) fn points(thresholds: &[f64], estimates: Vec<TailEstimate>) -> Vec<TailPoint> {
    thresholds.iter().zip(estimates).map(|(&threshold, estimate)| TailPoint { threshold, estimate }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_brackets_estimate() {
        for (s, t) in [(0, 10), (10, 10), (3, 10), (1, 1_000_000), (0, 1)] {
            let e = TailEstimate::new(s, t, 0, 0);
            assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high, "{e:?}");
            assert!(e.ci_low >= 0.0 && e.ci_high <= 1.0);
        }
    }

    #[test]
    fn known_wilson_value() {
        // 5 of 10 at 95%: centre 0.5, half-width 0.2893
        let (lo, hi) = wilson_interval(5, 10);
        assert!((lo - 0.236_593).abs() < 1e-5, "{lo}");
        assert!((hi - 0.763_407).abs() < 1e-5, "{hi}");
        let (lo0, hi0) = wilson_interval(0, 100);
        assert_eq!(lo0, 0.0);
        assert!((hi0 - 0.036_995).abs() < 1e-5, "{hi0}");
    }

    #[test]
    fn merge_pools_counts() {
        let a = TailEstimate::new(3, 100, 1, 7);
        let b = TailEstimate::new(5, 50, 0, 7);
        let m = a.merge(&b);
        assert_eq!((m.successes, m.trials, m.discarded_degenerate), (8, 150, 1));
        assert_eq!(m, b.merge(&a));
        assert_eq!(TailEstimate::new(0, 1000, 0, 0).rule_of_three(), Some(0.003));
        assert_eq!(TailEstimate::new(1, 1000, 0, 0).rule_of_three(), None);
    }
}
