use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

/// Proportion estimate with its Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinomialEstimate {
    pub estimate: f64,
    pub successes: u64,
    pub trials: u64,
    pub std_err: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl BinomialEstimate {
    pub fn new(successes: u64, trials: u64) -> Self {
        let p = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        let std_err = if trials == 0 { 0.0 } else { (p * (1.0 - p) / trials as f64).sqrt() };
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z_95);
        Self { estimate: p, successes, trials, std_err, ci_low, ci_high }
    }
}

pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}
