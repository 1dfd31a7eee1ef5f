//! Confidence-radius estimates, rate comparisons and the Rademacher oracle.

pub mod rademacher;
pub mod rates;

use serde::{Deserialize, Serialize};

use crate::distributions::joint::JointDistribution;
use crate::distributions::stream::{label, RandomnessStream};
use crate::domain::hypothesis::RandomizedHypothesis;
use crate::error::{Error, Result};
use crate::exec;

pub use rademacher::{empirical_rademacher, rademacher_complexity, RademacherMode, SupForm};
pub use rates::{compare_rates, compare_rates_at, z_critical, RateComparison, RateReport};

/// A point estimate with a confidence half-width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub radius: f64,
    pub level: f64,
    pub count: u64,
    pub mode: String,
}

impl Estimate {
    pub fn contains(&self, truth: f64) -> bool {
        (self.value - truth).abs() <= self.radius
    }
}

/// Sample mean and unbiased variance of a batch of values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub count: u64,
}

impl Moments {
    /// Values are summed in slice order.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let variance = if n > 1 { values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        Moments { mean, variance, count: n as u64 }
    }

    pub fn std_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

impl From<RateReport> for Moments {
    fn from(r: RateReport) -> Self {
        let n = r.trials as f64;
        let p = r.rate();
        let variance = if r.trials > 1 { p * (1.0 - p) * n / (n - 1.0) } else { 0.0 };
        Moments { mean: p, variance, count: r.trials }
    }
}

/// Standard error of a difference of independent estimates.
pub fn pooled_std_error(parts: &[f64]) -> f64 {
    parts.iter().map(|s| s * s).sum::<f64>().sqrt()
}

/// Hoeffding half-width for the mean of `n` variables with the given range.
pub fn hoeffding_radius(range: f64, n: usize, level: f64) -> f64 {
    range * ((2.0 / (1.0 - level)).ln() / (2.0 * n as f64)).sqrt()
}

/// Mean of y·v(x) over `count` fresh draws, v the `k`-smoothed value of `h`.
pub fn estimate_correlation(
    h: &dyn RandomizedHypothesis,
    j: &JointDistribution,
    count: usize,
    k: usize,
    rs: &RandomnessStream,
) -> Result<Estimate> {
    if count < 2 {
        return Err(Error::Argument("correlation estimate needs at least two draws".into()));
    }
    if h.dimension() != j.dimension() {
        return Err(Error::Config("hypothesis and joint dimensions differ".into()));
    }
    let terms = exec::try_map_range(count, |i| -> Result<f64> {
        let draw = rs.child(i as u64);
        let e = j.draw(&mut draw.rng())?;
        Ok(e.label.as_f64() * h.smoothed_with(&e.point, k, &draw.child(label::SMOOTHING))?)
    })?;
    Ok(Estimate {
        value: terms.iter().sum::<f64>() / count as f64,
        radius: hoeffding_radius(2.0, count, 0.95),
        level: 0.95,
        count: count as u64,
        mode: "monte_carlo".into(),
    })
}
