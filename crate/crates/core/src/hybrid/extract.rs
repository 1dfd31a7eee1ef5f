use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ContextMode, HybridEvaluator};
use crate::distributions::source::ExampleSource;
use crate::distributions::stream::{label, RandomnessStream};
use crate::domain::hypothesis::{check_point, round_value, RandomizedHypothesis};
use crate::domain::point::{Point, Sign};
use crate::error::{Error, Result};
use crate::estimators::{hoeffding_radius, RateReport};
use crate::exec;
use crate::refuters::SharedRefuter;

use super::rates::endpoint_rates;

pub const DEFAULT_SELECTION_CONSTANT: f64 = 48.0;

/// (γ, α) guarantee of the extracted learner: γ = 2/(3m), α = δγ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakLearnerSpec {
    pub gamma: f64,
    pub alpha: f64,
    pub delta: f64,
}

impl WeakLearnerSpec {
    pub fn for_refuter(m: usize, delta: f64) -> Self {
        let gamma = 2.0 / (3.0 * m as f64);
        WeakLearnerSpec { gamma, alpha: delta * gamma, delta }
    }

    /// γ·opt_cor − α.
    pub fn target(&self, opt_correlation: f64) -> f64 {
        self.gamma * opt_correlation - self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractConfig {
    /// Selection sample size; raised to ⌈c_sel·ln(m+1)⌉ when smaller.
    pub selection: usize,
    pub selection_constant: f64,
    /// Smoothing budget K. In frozen mode this is also the frozen context count.
    pub k: usize,
    pub mode: ContextMode,
    /// Trials per endpoint-rate check; 0 skips the check.
    pub endpoint_trials: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            selection: 0,
            selection_constant: DEFAULT_SELECTION_CONSTANT,
            k: 8,
            mode: ContextMode::Frozen(8),
            endpoint_trials: 0,
        }
    }
}

impl ExtractConfig {
    pub fn frozen(k: usize) -> Self {
        ExtractConfig { k, mode: ContextMode::Frozen(k), ..Default::default() }
    }

    pub fn selection_size(&self, m: usize) -> usize {
        let floor = (self.selection_constant * ((m + 1) as f64).ln()).ceil() as usize;
        self.selection.max(floor).max(2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotDiagnostics {
    pub slot: usize,
    /// Mean of W_{i,y}(x) over the selection sample.
    pub a_hat: f64,
    /// Mean of (W_{i,+1}(x) + W_{i,−1}(x))/2 over the selection points.
    pub b_hat: f64,
    /// Mean of y·h_i(x); equals 2(Â_i − B̂_i) on the same evaluations.
    pub correlation: f64,
    pub radius: f64,
    /// Structured draws spent on this slot's contexts.
    pub samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionDiagnostics {
    pub slots: Vec<SlotDiagnostics>,
    pub selected: usize,
    pub selection_size: usize,
    /// Structured draws for contexts and selection together.
    pub structured_draws: u64,
    pub w0: Option<RateReport>,
    pub wend: Option<RateReport>,
}

impl ExtractionDiagnostics {
    pub fn selected_slot(&self) -> &SlotDiagnostics {
        &self.slots[self.selected - 1]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("slot,a_hat,b_hat,correlation,radius,samples\n");
        for s in &self.slots {
            writeln!(out, "{},{},{},{},{},{}", s.slot, s.a_hat, s.b_hat, s.correlation, s.radius, s.samples).unwrap();
        }
        out
    }
}

/// h_{i*} smoothed over K contexts, rounded to ±1 with probability (1 + v)/2.
pub struct HybridHypothesis {
    evaluator: Arc<HybridEvaluator>,
    slot: usize,
    k: usize,
}

impl HybridHypothesis {
    pub fn new(evaluator: Arc<HybridEvaluator>, slot: usize, k: usize) -> Result<Self> {
        super::check_slot(slot, evaluator.m())?;
        if k == 0 {
            return Err(Error::Argument("smoothing budget must be at least 1".into()));
        }
        Ok(HybridHypothesis { evaluator, slot, k })
    }

    pub fn slot(&self) -> usize {
        self.slot
    }

    pub fn evaluator(&self) -> &HybridEvaluator {
        &self.evaluator
    }

    /// The smoothed value v(x) ∈ [−1, 1]. Frozen evaluators ignore `rs`.
    pub fn value(&self, x: &Point, rs: &RandomnessStream) -> Result<f64> {
        self.evaluator.eval_h(self.slot, x, self.k, rs)
    }
}

impl RandomizedHypothesis for HybridHypothesis {
    fn dimension(&self) -> usize {
        self.evaluator.dimension()
    }

    fn budget(&self) -> usize {
        self.k
    }

    fn sample(&self, x: &Point, rs: &RandomnessStream) -> Result<Sign> {
        check_point(self.dimension(), x)?;
        let v = self.value(x, &rs.child(label::EVAL))?;
        Ok(round_value(v, &rs.child(label::ROUNDING)))
    }

    /// With frozen contexts this is the exact conditional mean of [`Self::sample`].
    fn smoothed(&self, x: &Point, rs: &RandomnessStream) -> Result<f64> {
        check_point(self.dimension(), x)?;
        self.value(x, &rs.child(label::EVAL))
    }

    fn describe(&self) -> String {
        format!("hybrid(slot={}, k={}, {}, {})", self.slot, self.k, self.evaluator.mode(), self.evaluator.refuter().describe())
    }
}

pub struct Extraction {
    pub hypothesis: Arc<HybridHypothesis>,
    pub spec: WeakLearnerSpec,
    pub diagnostics: ExtractionDiagnostics,
}

/// Builds the hybrid evaluator, scores every candidate h_1..h_m on a fresh
/// selection sample and keeps the best (smallest slot on ties).
///
/// Streams: contexts from `rs`, selection points from `rs.child(SELECTION)`,
/// fresh-mode evaluation coins from `rs.child(EVAL)`, endpoint checks from
/// `rs.child(NOISE)`.
pub fn extract_weak_learner(
    refuter: SharedRefuter,
    source: Arc<dyn ExampleSource>,
    cfg: &ExtractConfig,
    rs: &RandomnessStream,
) -> Result<Extraction> {
    if cfg.k == 0 {
        return Err(Error::Config("smoothing budget must be at least 1".into()));
    }
    let m = refuter.sample_size();
    let delta = refuter.delta();
    let evaluator = Arc::new(HybridEvaluator::new(refuter.clone(), source.clone(), cfg.mode, rs)?);
    let n = cfg.selection_size(m);
    let sel = rs.child(label::SELECTION);
    let points = exec::try_map_range(n, |j| source.draw(&sel.child(j as u64)))?;

    let eval_rs = rs.child(label::EVAL);
    let counts = exec::try_map_range(m * n, |idx| {
        let (i, j) = (idx / n + 1, idx % n);
        evaluator.w_counts(i, &points[j].point, cfg.k, &eval_rs.child(i as u64).child(j as u64))
    })?;

    let kf = cfg.k as f64;
    let radius = hoeffding_radius(2.0, n, 0.95);
    let mut slots = Vec::with_capacity(m);
    for i in 1..=m {
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for (j, ex) in points.iter().enumerate() {
            let (plus, minus) = counts[(i - 1) * n + j];
            let (plus, minus) = (plus as f64 / kf, minus as f64 / kf);
            a += if ex.label.is_plus() { plus } else { minus };
            b += (plus + minus) / 2.0;
            c += ex.label.as_f64() * (plus - minus);
        }
        let context_draws = match cfg.mode {
            ContextMode::Frozen(k) => (k * (m - i)) as u64,
            ContextMode::Fresh => (n * cfg.k * (m - i)) as u64,
        };
        slots.push(SlotDiagnostics {
            slot: i,
            a_hat: a / n as f64,
            b_hat: b / n as f64,
            correlation: c / n as f64,
            radius,
            samples: context_draws,
        });
    }
    let mut selected = 1;
    for s in &slots {
        if s.correlation > slots[selected - 1].correlation {
            selected = s.slot;
        }
    }

    let (w0, wend) = if cfg.endpoint_trials > 0 {
        let (w0, wend) = endpoint_rates(refuter.as_ref(), source.as_ref(), cfg.endpoint_trials, &rs.child(label::NOISE))?;
        (Some(w0), Some(wend))
    } else {
        (None, None)
    };
    let structured_draws = slots.iter().map(|s| s.samples).sum::<u64>() + n as u64;
    let hypothesis = Arc::new(HybridHypothesis::new(evaluator, selected, cfg.k)?);
    Ok(Extraction {
        hypothesis,
        spec: WeakLearnerSpec::for_refuter(m, delta),
        diagnostics: ExtractionDiagnostics { slots, selected, selection_size: n, structured_draws, w0, wend },
    })
}
