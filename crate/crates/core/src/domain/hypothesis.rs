use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::concept::Concept;
use super::point::{Point, Sign};
use crate::distributions::stream::RandomnessStream;
use crate::error::{Error, Result};

/// A stochastic map x ↦ ±1.
///
/// `sample` is one evaluation with internal coins taken from `rs`; the same
/// stream always gives the same answer. `smoothed` is the K-sample average
/// used wherever a variance-controlled value in [−1, 1] is needed.
pub trait RandomizedHypothesis: Send + Sync {
    fn dimension(&self) -> usize;

    /// Number of internal re-evaluations K behind [`Self::smoothed`].
    fn budget(&self) -> usize {
        1
    }

    fn sample(&self, x: &Point, rs: &RandomnessStream) -> Result<Sign>;

    fn smoothed_with(&self, x: &Point, k: usize, rs: &RandomnessStream) -> Result<f64> {
        if k == 0 {
            return Err(Error::Argument("smoothing budget must be at least 1".into()));
        }
        let mut total = 0i64;
        for j in 0..k {
            total += self.sample(x, &rs.child(j as u64))?.value() as i64;
        }
        Ok(total as f64 / k as f64)
    }

    fn smoothed(&self, x: &Point, rs: &RandomnessStream) -> Result<f64> {
        self.smoothed_with(x, self.budget(), rs)
    }

    fn describe(&self) -> String;
}

pub type SharedHypothesis = Arc<dyn RandomizedHypothesis>;

impl fmt::Debug for dyn RandomizedHypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Round v ∈ [−1, 1] to +1 with probability (1 + v)/2.
pub fn round_value(v: f64, rs: &RandomnessStream) -> Sign {
    let p = ((1.0 + v) / 2.0).clamp(0.0, 1.0);
    Sign::from_bool(rs.rng().gen::<f64>() < p)
}

pub(crate) fn check_point(dim: usize, x: &Point) -> Result<()> {
    if x.dimension() != dim {
        return Err(Error::Config(format!("point of dimension {} given to hypothesis of dimension {dim}", x.dimension())));
    }
    Ok(())
}

/// A concept viewed as a (degenerate) randomized hypothesis.
#[derive(Debug, Clone)]
pub struct ConceptHypothesis(pub Concept);

impl RandomizedHypothesis for ConceptHypothesis {
    fn dimension(&self) -> usize {
        self.0.dimension()
    }

    fn sample(&self, x: &Point, _rs: &RandomnessStream) -> Result<Sign> {
        self.0.evaluate(x)
    }

    fn smoothed_with(&self, x: &Point, _k: usize, _rs: &RandomnessStream) -> Result<f64> {
        Ok(self.0.evaluate(x)?.as_f64())
    }

    fn describe(&self) -> String {
        self.0.to_string()
    }
}

/// Outputs a fair coin regardless of x.
#[derive(Debug, Clone)]
pub struct FairCoin {
    pub dim: usize,
    pub budget: usize,
}

impl RandomizedHypothesis for FairCoin {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn budget(&self) -> usize {
        self.budget
    }

    fn sample(&self, x: &Point, rs: &RandomnessStream) -> Result<Sign> {
        check_point(self.dim, x)?;
        Ok(Sign::from_bool(rs.rng().gen::<bool>()))
    }

    fn describe(&self) -> String {
        format!("coin(K={})", self.budget)
    }
}

/// λ·c(x), rounded to ±1 on sampling. λ ∈ [−1, 1].
#[derive(Debug, Clone)]
pub struct ScaledConcept {
    concept: Concept,
    scale: f64,
}

impl ScaledConcept {
    pub fn new(concept: Concept, scale: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&scale) {
            return Err(Error::Argument(format!("scale {scale} outside [-1, 1]")));
        }
        Ok(ScaledConcept { concept, scale })
    }
}

impl RandomizedHypothesis for ScaledConcept {
    fn dimension(&self) -> usize {
        self.concept.dimension()
    }

    fn sample(&self, x: &Point, rs: &RandomnessStream) -> Result<Sign> {
        let v = self.smoothed_with(x, 1, rs)?;
        Ok(round_value(v, rs))
    }

    fn smoothed_with(&self, x: &Point, _k: usize, _rs: &RandomnessStream) -> Result<f64> {
        Ok(self.scale * self.concept.evaluate(x)?.as_f64())
    }

    fn describe(&self) -> String {
        format!("{}*{}", self.scale, self.concept)
    }
}
