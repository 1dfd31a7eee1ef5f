//! Hybrid functions W_{i,b}: run a refuter on a sample whose slots 1..i−1
//! are noise pairs, slot i holds a planted pair (x, b) and slots i+1..m are
//! structured pairs. Candidate weak learners are h_i = W_{i,+1} − W_{i,−1}.

mod extract;
mod rates;

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::joint::{sample_joint, JointDistribution};
use crate::distributions::source::{draw_many, ExampleSource};
use crate::distributions::stream::{label, RandomnessStream};
use crate::domain::point::{LabeledExample, Point, Sign};
use crate::error::{Error, Result};
use crate::exec;
use crate::refuters::{SharedRefuter, Verdict};

pub use extract::{
    extract_weak_learner, ExtractConfig, Extraction, ExtractionDiagnostics, HybridHypothesis, SlotDiagnostics, WeakLearnerSpec,
    DEFAULT_SELECTION_CONSTANT,
};
pub use rates::{endpoint_rates, label_correlation, planted_noise_rate, planted_structured_rate, unplanted_rate};

/// How contexts are obtained for each evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ContextMode {
    /// Redraw every context per evaluation.
    Fresh,
    /// Pre-draw this many contexts per slot and reuse them.
    Frozen(usize),
}

impl Default for ContextMode {
    fn default() -> Self {
        ContextMode::Frozen(8)
    }
}

impl fmt::Display for ContextMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContextMode::Fresh => f.write_str("fresh"),
            ContextMode::Frozen(k) => write!(f, "frozen({k})"),
        }
    }
}

impl FromStr for ContextMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "fresh" {
            return Ok(ContextMode::Fresh);
        }
        if s == "frozen" {
            return Ok(ContextMode::default());
        }
        let k = s
            .strip_prefix("frozen(")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|k| k.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("unknown context mode `{s}`")))?;
        if k == 0 {
            return Err(Error::Config("frozen context count must be positive".into()));
        }
        Ok(ContextMode::Frozen(k))
    }
}

impl TryFrom<String> for ContextMode {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ContextMode> for String {
    fn from(m: ContextMode) -> String {
        m.to_string()
    }
}

/// One hybrid context for a slot: the m-sample with the planted position left
/// open, plus the refuter's coins.
#[derive(Debug, Clone)]
pub struct Context {
    slot: usize,
    sample: Vec<LabeledExample>,
    coins: RandomnessStream,
}

impl Context {
    /// i−1 noise pairs from 𝒟 × 𝒰₁, then m−i structured pairs from the source.
    pub fn draw(source: &dyn ExampleSource, m: usize, slot: usize, rs: &RandomnessStream) -> Result<Self> {
        check_slot(slot, m)?;
        let mut sample = Vec::with_capacity(m);
        if slot > 1 {
            let noise = JointDistribution::rademacher(source.marginal().clone());
            sample.extend(sample_joint(&noise, &rs.child(label::NOISE), slot - 1)?);
        }
        let filler = Point::new(0, source.dimension())?;
        sample.push(LabeledExample::new(filler, Sign::Plus));
        sample.extend(draw_many(source, &rs.child(label::STRUCTURED), m - slot)?);
        Ok(Context { slot, sample, coins: rs.child(label::REFUTER) })
    }

    pub fn slot(&self) -> usize {
        self.slot
    }

    pub fn noise_pairs(&self) -> &[LabeledExample] {
        &self.sample[..self.slot - 1]
    }

    pub fn structured_pairs(&self) -> &[LabeledExample] {
        &self.sample[self.slot..]
    }

    /// The full refuter input with (x, b) at the planted position.
    pub fn planted(&self, x: Point, b: Sign) -> Vec<LabeledExample> {
        let mut s = self.sample.clone();
        s[self.slot - 1] = LabeledExample::new(x, b);
        s
    }
}

pub(crate) fn check_slot(slot: usize, m: usize) -> Result<()> {
    if slot == 0 || slot > m {
        return Err(Error::Argument(format!("slot {slot} outside 1..={m}")));
    }
    Ok(())
}

/// Evaluates W_{i,b}(x) and h_i(x) for every slot of one refuter.
pub struct HybridEvaluator {
    refuter: SharedRefuter,
    source: Arc<dyn ExampleSource>,
    mode: ContextMode,
    /// `frozen[i - 1][k]`; empty in fresh mode.
    frozen: Vec<Vec<Context>>,
}

impl HybridEvaluator {
    /// Frozen contexts for slot i, index k come from `rs.child(CONTEXTS).child(i).child(k)`.
    pub fn new(refuter: SharedRefuter, source: Arc<dyn ExampleSource>, mode: ContextMode, rs: &RandomnessStream) -> Result<Self> {
        let m = refuter.sample_size();
        if m == 0 {
            return Err(Error::Config("refuter sample size must be positive".into()));
        }
        let frozen = match mode {
            ContextMode::Fresh => Vec::new(),
            ContextMode::Frozen(k) => {
                if k == 0 {
                    return Err(Error::Config("frozen context count must be positive".into()));
                }
                let base = rs.child(label::CONTEXTS);
                let flat = exec::try_map_range(m * k, |n| {
                    let (i, j) = (n / k + 1, n % k);
                    Context::draw(source.as_ref(), m, i, &base.child(i as u64).child(j as u64))
                })?;
                let mut it = flat.into_iter();
                (0..m).map(|_| it.by_ref().take(k).collect()).collect()
            }
        };
        Ok(HybridEvaluator { refuter, source, mode, frozen })
    }

    pub fn m(&self) -> usize {
        self.refuter.sample_size()
    }

    pub fn mode(&self) -> ContextMode {
        self.mode
    }

    pub fn refuter(&self) -> &SharedRefuter {
        &self.refuter
    }

    pub fn source(&self) -> &Arc<dyn ExampleSource> {
        &self.source
    }

    pub fn dimension(&self) -> usize {
        self.source.dimension()
    }

    /// Contexts per h-evaluation: K when frozen, 1 when fresh unless overridden by the caller.
    pub fn contexts_per_slot(&self) -> Option<usize> {
        match self.mode {
            ContextMode::Fresh => None,
            ContextMode::Frozen(k) => Some(k),
        }
    }

    pub fn frozen_contexts(&self, slot: usize) -> Result<&[Context]> {
        check_slot(slot, self.m())?;
        self.frozen.get(slot - 1).map(Vec::as_slice).ok_or_else(|| Error::Argument("fresh evaluator has no frozen contexts".into()))
    }

    /// Context number `k` for an evaluation: the frozen one (cyclically) or a fresh draw from `rs`.
    pub fn context(&self, slot: usize, k: usize, rs: &RandomnessStream) -> Result<Cow<'_, Context>> {
        check_slot(slot, self.m())?;
        match self.mode {
            ContextMode::Fresh => Ok(Cow::Owned(Context::draw(self.source.as_ref(), self.m(), slot, rs)?)),
            ContextMode::Frozen(kk) => Ok(Cow::Borrowed(&self.frozen[slot - 1][k % kk])),
        }
    }

    /// Runs the refuter once on `ctx` with (x, b) planted; 1 on Structure.
    pub fn w_in(&self, ctx: &Context, x: &Point, b: Sign) -> Result<bool> {
        if x.dimension() != self.dimension() {
            return Err(Error::Config(format!("point {x} has the wrong dimension")));
        }
        let d = self.refuter.decide(&ctx.planted(*x, b), &ctx.coins)?;
        Ok(d.verdict == Verdict::Structure)
    }

    /// W_{i,b}(x). Fresh mode draws the context from `rs`; frozen mode uses `rs` to pick one frozen context.
    pub fn eval_w(&self, slot: usize, x: &Point, b: Sign, rs: &RandomnessStream) -> Result<bool> {
        let k = match self.mode {
            ContextMode::Fresh => 0,
            ContextMode::Frozen(k) => rs.rng().gen_range(0..k),
        };
        let ctx = self.context(slot, k, rs)?;
        self.w_in(&ctx, x, b)
    }

    /// (#W_{i,+1}, #W_{i,−1}) over `k` contexts. Both signs see the same context and coins.
    pub fn w_counts(&self, slot: usize, x: &Point, k: usize, rs: &RandomnessStream) -> Result<(usize, usize)> {
        let (mut plus, mut minus) = (0, 0);
        for j in 0..k {
            let ctx = self.context(slot, j, &rs.child(j as u64))?;
            plus += self.w_in(&ctx, x, Sign::Plus)? as usize;
            minus += self.w_in(&ctx, x, Sign::Minus)? as usize;
        }
        Ok((plus, minus))
    }

    /// h_i(x) smoothed over `k` contexts: (1/k) Σ [W_{i,+1} − W_{i,−1}].
    pub fn eval_h(&self, slot: usize, x: &Point, k: usize, rs: &RandomnessStream) -> Result<f64> {
        if k == 0 {
            return Err(Error::Argument("smoothing budget must be at least 1".into()));
        }
        let (plus, minus) = self.w_counts(slot, x, k, rs)?;
        Ok((plus as f64 - minus as f64) / k as f64)
    }

    /// Structured draws behind one h-evaluation at `slot` with `k` contexts (0 when frozen).
    pub fn draws_per_eval(&self, slot: usize, k: usize) -> u64 {
        match self.mode {
            ContextMode::Fresh => (k * (self.m() - slot)) as u64,
            ContextMode::Frozen(_) => 0,
        }
    }
}
