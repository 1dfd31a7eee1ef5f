use std::sync::Arc;

use super::class::ConceptClass;
use super::hypothesis::{ConceptHypothesis, SharedHypothesis};
use super::point::LabeledExample;
use crate::error::{Error, Result};

/// An ε-agnostic learner for a class over a fixed marginal.
pub trait AgnosticLearner: Send + Sync {
    fn dimension(&self) -> usize;

    fn train(&self, sample: &[LabeledExample], epsilon: f64) -> Result<SharedHypothesis>;

    /// S(n, 1/ε): examples needed for the agnostic guarantee at accuracy ε.
    fn sample_requirement(&self, epsilon: f64) -> usize;

    /// Informal running-time tag T(n, 1/ε).
    fn declared_time(&self) -> String;
}

/// Brute-force empirical risk minimisation over an enumerable class.
#[derive(Debug, Clone)]
pub struct ErmLearner {
    class: Arc<ConceptClass>,
}

pub fn erm_learner(class: Arc<ConceptClass>) -> ErmLearner {
    ErmLearner { class }
}

impl ErmLearner {
    pub fn class(&self) -> &ConceptClass {
        &self.class
    }

    /// Number of mistakes of every concept on `sample`, in enumeration order.
    pub fn empirical_errors(&self, sample: &[LabeledExample]) -> Vec<usize> {
        self.class.iter().map(|c| sample.iter().filter(|e| c.eval(&e.point) != e.label).count()).collect()
    }

    /// Index of the empirical-error minimiser; ties go to the lowest index.
    pub fn fit(&self, sample: &[LabeledExample]) -> Result<usize> {
        if sample.is_empty() {
            return Err(Error::Argument("ERM needs a non-empty sample".into()));
        }
        let dim = self.class.dimension();
        if let Some(e) = sample.iter().find(|e| e.point.dimension() != dim) {
            return Err(Error::Config(format!("example {} has dimension {} not {dim}", e.point, e.point.dimension())));
        }
        let errors = self.empirical_errors(sample);
        let mut best = 0;
        for (i, &e) in errors.iter().enumerate() {
            if e < errors[best] {
                best = i;
            }
        }
        Ok(best)
    }
}

impl AgnosticLearner for ErmLearner {
    fn dimension(&self) -> usize {
        self.class.dimension()
    }

    fn train(&self, sample: &[LabeledExample], _epsilon: f64) -> Result<SharedHypothesis> {
        let i = self.fit(sample)?;
        Ok(Arc::new(ConceptHypothesis(self.class.get(i).clone())))
    }

    /// ceil(8·(ln|C| + ln 8)/ε²): Hoeffding plus a union bound over the class,
    /// enough for the agnostic guarantee with probability at least 3/4.
    fn sample_requirement(&self, epsilon: f64) -> usize {
        let size = self.class.len() as f64;
        (8.0 * (size.ln() + 8f64.ln()) / (epsilon * epsilon)).ceil() as usize
    }

    fn declared_time(&self) -> String {
        format!("O(|C|·S) with |C| = {}", self.class.len())
    }
}
