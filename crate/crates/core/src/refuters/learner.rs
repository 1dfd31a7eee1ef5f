use std::sync::Arc;

use super::{check_delta, check_sample, Decision, Refuter, Verdict};
use crate::distributions::stream::{label, RandomnessStream};
use crate::domain::learner::AgnosticLearner;
use crate::domain::point::LabeledExample;
use crate::error::{Error, Result};

/// Wraps an agnostic learner as a refuter.
///
/// On a 2m-sample with m = S(n, δ/4) + ⌈64/δ²⌉: train on the first half at
/// ε = δ/4, measure cor_h on the second half (one evaluation of h per point)
/// and answer Structure iff cor_h ≥ δ/2.
pub struct LearnerRefuter<L: ?Sized> {
    learner: Arc<L>,
    delta: f64,
    half: usize,
}

pub fn learner_to_refuter<L: AgnosticLearner + ?Sized>(learner: Arc<L>, delta: f64) -> Result<LearnerRefuter<L>> {
    check_delta(delta)?;
    let half = learner.sample_requirement(delta / 4.0) + (64.0 / (delta * delta)).ceil() as usize;
    Ok(LearnerRefuter { learner, delta, half })
}

impl<L: AgnosticLearner + ?Sized> LearnerRefuter<L> {
    /// m; the refuter consumes 2m examples.
    pub fn half_size(&self) -> usize {
        self.half
    }

    pub fn learner(&self) -> &L {
        &self.learner
    }
}

impl<L: AgnosticLearner + ?Sized> Refuter for LearnerRefuter<L> {
    fn sample_size(&self) -> usize {
        2 * self.half
    }

    fn delta(&self) -> f64 {
        self.delta
    }

    fn decide(&self, sample: &[LabeledExample], rs: &RandomnessStream) -> Result<Decision> {
        check_sample(sample, 2 * self.half)?;
        let (train, holdout) = sample.split_at(self.half);
        let h = self.learner.train(train, self.delta / 4.0).map_err(|e| Error::Learner(e.to_string()))?;
        let coins = rs.child(label::HOLDOUT);
        let mut total = 0i64;
        for (i, e) in holdout.iter().enumerate() {
            total += (h.sample(&e.point, &coins.child(i as u64))? * e.label).value() as i64;
        }
        let cor = total as f64 / self.half as f64;
        let verdict = if 2.0 * total as f64 >= self.delta * self.half as f64 { Verdict::Structure } else { Verdict::Noise };
        Ok(Decision::new(verdict, Some(cor)))
    }

    fn describe(&self) -> String {
        format!("learner_refuter(delta={}, m={})", self.delta, self.half)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::class::{enumerate_class, ClassSpec};
    use crate::domain::hypothesis::SharedHypothesis;
    use crate::domain::learner::erm_learner;
    use crate::domain::point::{Point, Sign};

    #[test]
    fn sample_accounting_is_exact() {
        let class = Arc::new(enumerate_class(&ClassSpec::DictatorsWithNegations(8)).unwrap());
        let learner = Arc::new(erm_learner(class));
        let r = learner_to_refuter(learner.clone(), 0.5).unwrap();
        assert_eq!(r.sample_size(), 2 * (learner.sample_requirement(0.125) + 256));
        assert_eq!(r.sample_size(), 2 * (2485 + 256));
    }

    #[test]
    fn constant_class_on_constant_labels_is_structure() {
        let class = Arc::new(enumerate_class(&"explicit(3;const:+1)".parse().unwrap()).unwrap());
        let r = learner_to_refuter(Arc::new(erm_learner(class)), 1.0).unwrap();
        let x = Point::from_values(&[1, -1, 1]).unwrap();
        let s = vec![LabeledExample::new(x, Sign::Plus); r.sample_size()];
        let d = r.decide(&s, &RandomnessStream::new(0)).unwrap();
        assert_eq!(d.verdict, Verdict::Structure);
        assert_eq!(d.statistic, Some(1.0));
    }

    struct Failing;
    impl AgnosticLearner for Failing {
        fn dimension(&self) -> usize {
            1
        }
        fn train(&self, _: &[LabeledExample], _: f64) -> Result<SharedHypothesis> {
            Err(Error::Argument("no".into()))
        }
        fn sample_requirement(&self, _: f64) -> usize {
            1
        }
        fn declared_time(&self) -> String {
            "-".into()
        }
    }

    #[test]
    fn learner_failure_propagates() {
        let r = learner_to_refuter(Arc::new(Failing), 1.0).unwrap();
        let x = Point::from_values(&[1]).unwrap();
        let s = vec![LabeledExample::new(x, Sign::Plus); r.sample_size()];
        assert!(matches!(r.decide(&s, &RandomnessStream::new(0)), Err(Error::Learner(_))));
    }
}
