//! Label-blind refuters with known behaviour, for oracles and plumbing tests.

use rand::Rng;

use super::{check_sample, Decision, Refuter, Verdict};
use crate::distributions::stream::RandomnessStream;
use crate::domain::point::LabeledExample;
use crate::error::{Error, Result};

/// Always answers the same verdict.
#[derive(Debug, Clone)]
pub struct ConstantRefuter {
    verdict: Verdict,
    m: usize,
}

impl ConstantRefuter {
    pub fn new(verdict: Verdict, m: usize) -> Self {
        ConstantRefuter { verdict, m }
    }

    pub fn structure(m: usize) -> Self {
        Self::new(Verdict::Structure, m)
    }
}

impl Refuter for ConstantRefuter {
    fn sample_size(&self) -> usize {
        self.m
    }

    fn delta(&self) -> f64 {
        1.0
    }

    fn decide(&self, sample: &[LabeledExample], _rs: &RandomnessStream) -> Result<Decision> {
        check_sample(sample, self.m)?;
        Ok(Decision::new(self.verdict, None))
    }

    fn describe(&self) -> String {
        format!("constant({}, m={})", self.verdict, self.m)
    }
}

/// Answers Structure with probability `p` from its own coins.
#[derive(Debug, Clone)]
pub struct CoinFlipRefuter {
    p: f64,
    m: usize,
}

impl CoinFlipRefuter {
    pub fn new(p: f64, m: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("coin bias {p} outside [0, 1]")));
        }
        Ok(CoinFlipRefuter { p, m })
    }
}

impl Refuter for CoinFlipRefuter {
    fn sample_size(&self) -> usize {
        self.m
    }

    fn delta(&self) -> f64 {
        1.0
    }

    fn decide(&self, sample: &[LabeledExample], rs: &RandomnessStream) -> Result<Decision> {
        check_sample(sample, self.m)?;
        let hit = rs.rng().gen_bool(self.p);
        Ok(Decision::new(if hit { Verdict::Structure } else { Verdict::Noise }, None))
    }

    fn describe(&self) -> String {
        format!("coin_flip(p={}, m={})", self.p, self.m)
    }
}
