use std::sync::Arc;

use super::{Decision, Refuter, SharedRefuter, Verdict};
use crate::distributions::source::SampleLedger;
use crate::distributions::stream::RandomnessStream;
use crate::domain::point::LabeledExample;
use crate::error::{Error, Result};

/// Majority vote of `r` base runs on the same sample, run j using `rs.child(j)`.
///
/// The statistic is the fraction of Structure votes.
pub struct Amplified {
    base: SharedRefuter,
    r: usize,
}

impl Amplified {
    pub fn new(base: SharedRefuter, r: usize) -> Result<Self> {
        if r == 0 || r.is_multiple_of(2) {
            return Err(Error::Config(format!("amplification count must be odd and positive, got {r}")));
        }
        Ok(Amplified { base, r })
    }

    pub fn repetitions(&self) -> usize {
        self.r
    }
}

impl Refuter for Amplified {
    fn sample_size(&self) -> usize {
        self.base.sample_size()
    }

    fn delta(&self) -> f64 {
        self.base.delta()
    }

    fn decide(&self, sample: &[LabeledExample], rs: &RandomnessStream) -> Result<Decision> {
        let mut votes = 0usize;
        for j in 0..self.r {
            if self.base.decide(sample, &rs.child(j as u64))?.verdict == Verdict::Structure {
                votes += 1;
            }
        }
        let verdict = if 2 * votes > self.r { Verdict::Structure } else { Verdict::Noise };
        Ok(Decision::new(verdict, Some(votes as f64 / self.r as f64)))
    }

    fn describe(&self) -> String {
        format!("majority({}, r={})", self.base.describe(), self.r)
    }
}

/// Counts every invocation on a ledger.
pub struct Metered {
    base: SharedRefuter,
    ledger: Arc<SampleLedger>,
}

impl Metered {
    pub fn new(base: SharedRefuter, ledger: Arc<SampleLedger>) -> Self {
        Metered { base, ledger }
    }
}

impl Refuter for Metered {
    fn sample_size(&self) -> usize {
        self.base.sample_size()
    }

    fn delta(&self) -> f64 {
        self.base.delta()
    }

    fn decide(&self, sample: &[LabeledExample], rs: &RandomnessStream) -> Result<Decision> {
        self.ledger.charge_refuter_call();
        self.base.decide(sample, rs)
    }

    fn describe(&self) -> String {
        self.base.describe()
    }
}
