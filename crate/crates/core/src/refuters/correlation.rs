use std::sync::Arc;

use super::{check_delta, check_sample, Decision, Refuter, Verdict};
use crate::distributions::stream::RandomnessStream;
use crate::domain::class::ConceptClass;
use crate::domain::point::LabeledExample;
use crate::error::{Error, Result};

/// Refutes by the largest empirical correlation over the class.
///
/// Structure iff max over c of (1/m) Σ σᵢ c(xᵢ) ≥ δ/2. Uses no internal coins.
#[derive(Debug, Clone)]
pub struct CorrelationRefuter {
    class: Arc<ConceptClass>,
    delta: f64,
    m: usize,
    /// Point-major ±1 truth table, `rows[x·|C| + c] = c(x)`, for small domains.
    rows: Option<Vec<i8>>,
}

const TABLE_CAP: usize = 1 << 22;

/// Smallest m with |C|·exp(−mδ²/8) ≤ 1/6, i.e. ceil(8·(ln|C| + ln 6)/δ²).
///
/// By Hoeffding and a union bound the noise-regime supremum then stays below
/// δ/2 with probability at least 5/6.
pub fn correlation_required_sample_size(class_size: usize, delta: f64) -> usize {
    (8.0 * ((class_size as f64).ln() + 6f64.ln()) / (delta * delta)).ceil() as usize
}

/// Checked constructor: rejects sample sizes below [`correlation_required_sample_size`].
pub fn correlation_refuter(class: Arc<ConceptClass>, delta: f64, m: usize) -> Result<CorrelationRefuter> {
    check_delta(delta)?;
    let required = correlation_required_sample_size(class.len(), delta);
    if m < required {
        return Err(Error::Config(format!("correlation refuter for {} at delta {delta} needs m >= {required}, got {m}", class.name())));
    }
    CorrelationRefuter::new_unchecked(class, delta, m)
}

impl CorrelationRefuter {
    /// Any m ≥ 1. Soundness below the certified size must be measured, e.g. with endpoint rates.
    pub fn new_unchecked(class: Arc<ConceptClass>, delta: f64, m: usize) -> Result<Self> {
        check_delta(delta)?;
        if m == 0 {
            return Err(Error::Config("sample size must be positive".into()));
        }
        let n = class.dimension();
        let rows = (n <= 20 && class.len() << n <= TABLE_CAP).then(|| {
            let mut rows = Vec::with_capacity(class.len() << n);
            for bits in 0..1u32 << n {
                let x = crate::domain::point::Point::from_bits(bits, n);
                rows.extend(class.iter().map(|c| c.eval(&x).value() as i8));
            }
            rows
        });
        Ok(CorrelationRefuter { class, delta, m, rows })
    }

    pub fn class(&self) -> &ConceptClass {
        &self.class
    }

    /// max over the class of (1/m) Σ σᵢ c(xᵢ).
    pub fn max_correlation(&self, sample: &[LabeledExample]) -> i64 {
        if let Some(rows) = &self.rows {
            let k = self.class.len();
            let mut acc = vec![0i32; k];
            for e in sample {
                let row = &rows[e.point.bits() as usize * k..][..k];
                let y = e.label.value();
                for (a, &v) in acc.iter_mut().zip(row) {
                    *a += y * v as i32;
                }
            }
            return *acc.iter().max().expect("non-empty class") as i64;
        }
        self.class
            .iter()
            .map(|c| sample.iter().map(|e| (c.eval(&e.point) * e.label).value() as i64).sum::<i64>())
            .max()
            .expect("non-empty class")
    }
}

impl Refuter for CorrelationRefuter {
    fn sample_size(&self) -> usize {
        self.m
    }

    fn delta(&self) -> f64 {
        self.delta
    }

    fn decide(&self, sample: &[LabeledExample], _rs: &RandomnessStream) -> Result<Decision> {
        check_sample(sample, self.m)?;
        if let Some(e) = sample.iter().find(|e| e.point.dimension() != self.class.dimension()) {
            return Err(Error::Config(format!("example {} has the wrong dimension", e.point)));
        }
        let best = self.max_correlation(sample);
        let cor = best as f64 / self.m as f64;
        // compare sums, not ratios: 2·best ≥ δ·m
        let verdict = if 2.0 * best as f64 >= self.delta * self.m as f64 { Verdict::Structure } else { Verdict::Noise };
        Ok(Decision::new(verdict, Some(cor)))
    }

    fn describe(&self) -> String {
        format!("correlation({}, delta={}, m={})", self.class.name(), self.delta, self.m)
    }
}
