use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Two-sided standard-normal critical value at confidence `level`.
pub fn z_critical(level: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    n.inverse_cdf(0.5 + level / 2.0)
}

/// Successes out of trials for one Bernoulli rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateReport {
    pub successes: u64,
    pub trials: u64,
}

impl RateReport {
    pub fn new(successes: u64, trials: u64) -> Self {
        debug_assert!(successes <= trials);
        RateReport { successes, trials }
    }

    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            return f64::NAN;
        }
        self.successes as f64 / self.trials as f64
    }

    /// Wilson score interval.
    pub fn wilson(&self, level: f64) -> (f64, f64) {
        if self.trials == 0 {
            return (0.0, 1.0);
        }
        let n = self.trials as f64;
        let p = self.rate();
        let z = z_critical(level);
        let z2 = z * z;
        let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        ((centre - half).max(0.0), (centre + half).min(1.0))
    }

    pub fn wilson95(&self) -> (f64, f64) {
        self.wilson(0.95)
    }

    /// Binomial standard error of the rate.
    pub fn std_error(&self) -> f64 {
        let p = self.rate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateComparison {
    AGreater,
    BGreater,
    Indistinguishable,
}

/// Pooled two-proportion z-test at significance 0.05.
pub fn compare_rates(a: &RateReport, b: &RateReport) -> Result<RateComparison> {
    compare_rates_at(a, b, 0.05)
}

pub fn compare_rates_at(a: &RateReport, b: &RateReport, significance: f64) -> Result<RateComparison> {
    if a.trials < 30 || b.trials < 30 {
        return Err(Error::Argument(format!("rate comparison needs at least 30 trials per side, got {} and {}", a.trials, b.trials)));
    }
    if a.successes > a.trials || b.successes > b.trials {
        return Err(Error::Argument("more successes than trials".into()));
    }
    let (na, nb) = (a.trials as f64, b.trials as f64);
    let pooled = (a.successes + b.successes) as f64 / (na + nb);
    let se = (pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb)).sqrt();
    if se == 0.0 {
        return Ok(RateComparison::Indistinguishable);
    }
    let z = (a.rate() - b.rate()) / se;
    let crit = z_critical(1.0 - significance);
    Ok(if z > crit {
        RateComparison::AGreater
    } else if z < -crit {
        RateComparison::BGreater
    } else {
        RateComparison::Indistinguishable
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_value() {
        assert!((z_critical(0.95) - 1.959964).abs() < 1e-5);
    }

    #[test]
    fn wilson_matches_reference_values() {
        // reference: p = 0.5, n = 100 gives roughly [0.4038, 0.5962]
        let (lo, hi) = RateReport::new(50, 100).wilson95();
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        let (lo, hi) = RateReport::new(300, 300).wilson95();
        assert!(lo > 0.98 && (hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn comparisons() {
        let a = RateReport::new(900, 1000);
        let b = RateReport::new(100, 1000);
        assert_eq!(compare_rates(&a, &b).unwrap(), RateComparison::AGreater);
        assert_eq!(compare_rates(&b, &a).unwrap(), RateComparison::BGreater);
        assert_eq!(compare_rates(&a, &a).unwrap(), RateComparison::Indistinguishable);
        // z = 0.04 / sqrt(0.5 * 0.5 * 0.02) = 0.566
        let c = RateReport::new(52, 100);
        let d = RateReport::new(48, 100);
        assert_eq!(compare_rates(&c, &d).unwrap(), RateComparison::Indistinguishable);
        assert!(compare_rates(&RateReport::new(1, 10), &d).is_err());
        let all = RateReport::new(40, 40);
        assert_eq!(compare_rates(&all, &all).unwrap(), RateComparison::Indistinguishable);
    }
}
