//! δ-refuters: decide Structure vs Noise from an m-sample of labelled points.

mod amplify;
mod correlation;
mod learner;
pub mod stubs;
mod trials;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distributions::stream::RandomnessStream;
use crate::domain::point::LabeledExample;
use crate::error::{Error, Result};

pub use amplify::{Amplified, Metered};
pub use correlation::{correlation_refuter, correlation_required_sample_size, CorrelationRefuter};
pub use learner::{learner_to_refuter, LearnerRefuter};
pub use trials::{run_refuter_trials, Regime, TrialRecord, TrialReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Structure,
    Noise,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Structure => "structure",
            Verdict::Noise => "noise",
        })
    }
}

/// A verdict plus the statistic it was thresholded from, when there is one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub verdict: Verdict,
    pub statistic: Option<f64>,
}

impl Decision {
    pub fn new(verdict: Verdict, statistic: Option<f64>) -> Self {
        Decision { verdict, statistic }
    }
}

pub trait Refuter: Send + Sync {
    /// The exact sample length m accepted by [`Refuter::decide`].
    fn sample_size(&self) -> usize;

    fn delta(&self) -> f64;

    /// Decide on `sample`; internal coins come from `rs`.
    fn decide(&self, sample: &[LabeledExample], rs: &RandomnessStream) -> Result<Decision>;

    fn describe(&self) -> String;
}

pub type SharedRefuter = Arc<dyn Refuter>;

pub(crate) fn check_sample(sample: &[LabeledExample], m: usize) -> Result<()> {
    if sample.len() != m {
        return Err(Error::Argument(format!("refuter expects {m} examples, got {}", sample.len())));
    }
    Ok(())
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Config(format!("delta {delta} outside (0, 1]")));
    }
    Ok(())
}
