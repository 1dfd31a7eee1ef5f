use std::sync::Arc;

use crate::distributions::source::{draw_many, ExampleSource};
use crate::distributions::stream::RandomnessStream;
use crate::domain::class::ConceptClass;
use crate::domain::hypothesis::{ScaledConcept, SharedHypothesis};
use crate::domain::learner::{AgnosticLearner, ErmLearner};
use crate::error::{Error, Result};
use crate::hybrid::{extract_weak_learner, ExtractConfig, WeakLearnerSpec};
use crate::refuters::SharedRefuter;

pub struct WeakOutput {
    pub hypothesis: SharedHypothesis,
    /// The learner's own estimate (or exact value) of its correlation on the source.
    pub correlation: Option<f64>,
}

/// Produces one weak hypothesis per boosting round from a label source.
pub trait WeakLearnerFactory: Send + Sync {
    fn learn(&self, source: Arc<dyn ExampleSource>, rs: &RandomnessStream) -> Result<WeakOutput>;

    fn describe(&self) -> String;
}

/// The refuter-to-weak-learner extraction.
pub struct HybridFactory {
    refuter: SharedRefuter,
    cfg: ExtractConfig,
}

impl HybridFactory {
    pub fn new(refuter: SharedRefuter, cfg: ExtractConfig) -> Self {
        HybridFactory { refuter, cfg }
    }

    pub fn spec(&self) -> WeakLearnerSpec {
        WeakLearnerSpec::for_refuter(self.refuter.sample_size(), self.refuter.delta())
    }
}

impl WeakLearnerFactory for HybridFactory {
    fn learn(&self, source: Arc<dyn ExampleSource>, rs: &RandomnessStream) -> Result<WeakOutput> {
        let ex = extract_weak_learner(self.refuter.clone(), source, &self.cfg, rs)?;
        Ok(WeakOutput { correlation: Some(ex.diagnostics.selected_slot().correlation), hypothesis: ex.hypothesis })
    }

    fn describe(&self) -> String {
        format!("hybrid({})", self.refuter.describe())
    }
}

/// ERM on a fixed number of relabeled draws; a (1, 0)-weak learner on realizable data.
pub struct ErmFactory {
    learner: Arc<ErmLearner>,
    round_sample: usize,
}

impl ErmFactory {
    pub fn new(learner: Arc<ErmLearner>, round_sample: usize) -> Self {
        ErmFactory { learner, round_sample }
    }
}

impl WeakLearnerFactory for ErmFactory {
    fn learn(&self, source: Arc<dyn ExampleSource>, rs: &RandomnessStream) -> Result<WeakOutput> {
        let sample = draw_many(source.as_ref(), rs, self.round_sample)?;
        let i = self.learner.fit(&sample)?;
        let errors = self.learner.empirical_errors(&sample)[i];
        let n = sample.len() as f64;
        Ok(WeakOutput { hypothesis: self.learner.train(&sample, 1.0)?, correlation: Some((n - 2.0 * errors as f64) / n) })
    }

    fn describe(&self) -> String {
        format!("erm({}, n={})", self.learner.class().name(), self.round_sample)
    }
}

/// Returns the same hypothesis every round without looking at the source.
pub struct FixedFactory {
    hypothesis: SharedHypothesis,
}

impl FixedFactory {
    pub fn new(hypothesis: SharedHypothesis) -> Self {
        FixedFactory { hypothesis }
    }
}

impl WeakLearnerFactory for FixedFactory {
    fn learn(&self, _source: Arc<dyn ExampleSource>, _rs: &RandomnessStream) -> Result<WeakOutput> {
        Ok(WeakOutput { hypothesis: self.hypothesis.clone(), correlation: None })
    }

    fn describe(&self) -> String {
        format!("fixed({})", self.hypothesis.describe())
    }
}

/// Meets the (γ, α) contract with equality: returns λ·c* where c* is the best
/// concept on the current source and λ·opt = γ·opt − α. Needs a source with an
/// exact conditional and an enumerable support.
pub struct ContractStub {
    class: Arc<ConceptClass>,
    gamma: f64,
    alpha: f64,
}

impl ContractStub {
    pub fn new(class: Arc<ConceptClass>, gamma: f64, alpha: f64) -> Self {
        ContractStub { class, gamma, alpha }
    }

    /// (opt correlation, index of c*) under the source's exact conditional.
    pub fn best(&self, source: &dyn ExampleSource) -> Result<(f64, usize)> {
        let support = source.marginal().support()?;
        let mut bias = Vec::with_capacity(support.len());
        for (x, p) in &support {
            let q = source.plus_probability(x).ok_or_else(|| Error::Learner("contract stub needs an exact label conditional".into()))?;
            bias.push((*x, p * (2.0 * q - 1.0)));
        }
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, c) in self.class.iter().enumerate() {
            let cor: f64 = bias.iter().map(|(x, b)| b * c.eval(x).as_f64()).sum();
            if cor > best.0 {
                best = (cor, i);
            }
        }
        Ok(best)
    }
}

impl WeakLearnerFactory for ContractStub {
    fn learn(&self, source: Arc<dyn ExampleSource>, _rs: &RandomnessStream) -> Result<WeakOutput> {
        let (opt, i) = self.best(source.as_ref())?;
        let target = self.gamma * opt - self.alpha;
        let scale = if opt > 0.0 { (target / opt).clamp(-1.0, 1.0) } else { 0.0 };
        Ok(WeakOutput { hypothesis: Arc::new(ScaledConcept::new(self.class.get(i).clone(), scale)?), correlation: Some(scale * opt) })
    }

    fn describe(&self) -> String {
        format!("contract_stub(gamma={}, alpha={})", self.gamma, self.alpha)
    }
}
