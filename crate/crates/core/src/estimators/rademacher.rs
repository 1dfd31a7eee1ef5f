//! Rademacher complexity of an enumerable class:
//! E over x-tuples and sign vectors of the class supremum of (1/m)·|Σ σᵢ c(xᵢ)|.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{hoeffding_radius, Estimate};
use crate::distributions::marginal::MarginalDistribution;
use crate::distributions::stream::{label, RandomnessStream};
use crate::domain::class::ConceptClass;
use crate::domain::point::Point;
use crate::error::{Error, Result};
use crate::exec;

/// Largest m for which all 2^m sign vectors are enumerated.
pub const MAX_EXACT_SAMPLE: usize = 24;
/// x-tuples are integrated exactly up to this many tuples, otherwise sampled.
pub const MAX_EXACT_TUPLES: u128 = 1 << 16;
/// x-tuples drawn when the tuple space is too large to enumerate.
pub const SAMPLED_TUPLES: usize = 4096;
const MAX_EXACT_WORK: u128 = 1 << 34;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RademacherMode {
    Exact,
    MonteCarlo { trials: usize },
}

/// Supremum of |Σσc| (the default) or of Σσc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupForm {
    #[default]
    Absolute,
    Signed,
}

/// Bit i set iff c(points[i]) = −1.
fn concept_masks(class: &ConceptClass, points: &[Point]) -> Vec<u32> {
    class.iter().map(|c| points.iter().enumerate().fold(0u32, |acc, (i, x)| if c.eval(x).is_plus() { acc } else { acc | 1 << i })).collect()
}

#[inline]
fn sup_for_signs(masks: &[u32], sigma: u32, m: usize, form: SupForm) -> i64 {
    masks
        .iter()
        .map(|&cm| {
            let s = m as i64 - 2 * (sigma ^ cm).count_ones() as i64;
            match form {
                SupForm::Absolute => s.abs(),
                SupForm::Signed => s,
            }
        })
        .max()
        .expect("non-empty class")
}

/// Empirical Rademacher complexity of the class on a fixed x-tuple, exact over all sign vectors.
pub fn empirical_rademacher(class: &ConceptClass, points: &[Point], form: SupForm) -> Result<f64> {
    let m = points.len();
    if m == 0 {
        return Err(Error::Argument("empty x-tuple".into()));
    }
    if m > MAX_EXACT_SAMPLE {
        return Err(Error::SizeCap { what: "sign vectors".into(), size: 1u128 << m, cap: 1u128 << MAX_EXACT_SAMPLE });
    }
    if let Some(x) = points.iter().find(|x| x.dimension() != class.dimension()) {
        return Err(Error::Config(format!("point {x} has the wrong dimension for {}", class.name())));
    }
    let masks = concept_masks(class, points);
    let total: i64 = (0..(1u32 << m)).map(|s| sup_for_signs(&masks, s, m, form)).sum();
    Ok(total as f64 / (1u64 << m) as f64 / m as f64)
}

/// Rademacher complexity at sample size `m` under marginal `d`.
///
/// Exact mode enumerates every sign vector; x-tuples are integrated by
/// enumeration when the marginal has at most 2¹⁶ tuples of length m and are
/// otherwise sampled ([`SAMPLED_TUPLES`] of them), which the returned mode records.
pub fn rademacher_complexity(
    class: &ConceptClass,
    d: &MarginalDistribution,
    m: usize,
    mode: RademacherMode,
    form: SupForm,
    rs: &RandomnessStream,
) -> Result<Estimate> {
    if d.dimension() != class.dimension() {
        return Err(Error::Config("class and marginal dimensions differ".into()));
    }
    if m == 0 {
        return Err(Error::Argument("sample size must be positive".into()));
    }
    let range = match form {
        SupForm::Absolute => 1.0,
        SupForm::Signed => 2.0,
    };
    match mode {
        RademacherMode::Exact => {
            if m > MAX_EXACT_SAMPLE {
                return Err(Error::SizeCap { what: "sign vectors".into(), size: 1u128 << m, cap: 1u128 << MAX_EXACT_SAMPLE });
            }
            let tuples = d.support_size().checked_pow(m as u32).unwrap_or(u128::MAX);
            if tuples <= MAX_EXACT_TUPLES {
                let work = tuples * (1u128 << m) * class.len() as u128;
                if work > MAX_EXACT_WORK {
                    return Err(Error::SizeCap { what: "exact Rademacher enumeration".into(), size: work, cap: MAX_EXACT_WORK });
                }
                let support: Vec<(Point, f64)> = d.support()?;
                let k = support.len();
                let parts = exec::try_map_range(tuples as usize, |code| {
                    let mut rest = code;
                    let mut prob = 1.0;
                    let mut points = Vec::with_capacity(m);
                    for _ in 0..m {
                        let (x, p) = support[rest % k];
                        rest /= k;
                        prob *= p;
                        points.push(x);
                    }
                    if prob == 0.0 {
                        return Ok::<f64, crate::Error>(0.0);
                    }
                    Ok(prob * empirical_rademacher(class, &points, form)?)
                })?;
                Ok(Estimate {
                    value: parts.iter().sum(),
                    radius: 0.0,
                    level: 1.0,
                    count: (tuples * (1u128 << m)) as u64,
                    mode: "exact".into(),
                })
            } else {
                let work = SAMPLED_TUPLES as u128 * (1u128 << m) * class.len() as u128;
                if work > MAX_EXACT_WORK {
                    return Err(Error::SizeCap { what: "exact Rademacher enumeration".into(), size: work, cap: MAX_EXACT_WORK });
                }
                let values = exec::try_map_range(SAMPLED_TUPLES, |t| {
                    let mut rng = rs.child(label::POINTS).child(t as u64).rng();
                    let points: Vec<Point> = (0..m).map(|_| d.draw(&mut rng)).collect();
                    empirical_rademacher(class, &points, form)
                })?;
                let n = values.len();
                Ok(Estimate {
                    value: values.iter().sum::<f64>() / n as f64,
                    radius: hoeffding_radius(range, n, 0.95),
                    level: 0.95,
                    count: n as u64,
                    mode: format!("exact_sigma_sampled_x({n})"),
                })
            }
        }
        RademacherMode::MonteCarlo { trials } => {
            if trials == 0 {
                return Err(Error::Argument("trials must be positive".into()));
            }
            if m > 32 {
                return Err(Error::Argument("Monte Carlo mode supports m <= 32".into()));
            }
            let values = exec::map_range(trials, |t| {
                let mut rng = rs.child(t as u64).rng();
                let points: Vec<Point> = (0..m).map(|_| d.draw(&mut rng)).collect();
                let sigma: u32 = if m == 32 { rng.gen() } else { rng.gen::<u32>() & ((1 << m) - 1) };
                let masks = concept_masks(class, &points);
                sup_for_signs(&masks, sigma, m, form) as f64 / m as f64
            });
            Ok(Estimate {
                value: values.iter().sum::<f64>() / trials as f64,
                radius: hoeffding_radius(range, trials, 0.95),
                level: 0.95,
                count: trials as u64,
                mode: format!("monte_carlo({trials})"),
            })
        }
    }
}
