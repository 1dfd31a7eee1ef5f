//! Metered sample access to 𝒟′.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use super::joint::JointDistribution;
use super::marginal::MarginalDistribution;
use super::stream::RandomnessStream;
use crate::domain::point::{LabeledExample, Point};
use crate::error::{Error, Result};

/// Counts every draw from 𝒟′ and every refuter invocation in a pipeline.
#[derive(Debug, Default)]
pub struct SampleLedger {
    joint_draws: AtomicU64,
    refuter_calls: AtomicU64,
    budget: Option<u64>,
}

impl SampleLedger {
    pub fn new() -> Arc<Self> {
        Arc::new(SampleLedger::default())
    }

    pub fn with_budget(budget: u64) -> Arc<Self> {
        Arc::new(SampleLedger { budget: Some(budget), ..Default::default() })
    }

    /// Record one draw, failing without recording once the budget is spent.
    pub fn charge_draw(&self) -> Result<()> {
        match self.budget {
            None => {
                self.joint_draws.fetch_add(1, Ordering::Relaxed);
                Ok(())
            }
            Some(budget) => self
                .joint_draws
                .fetch_update(Ordering::Relaxed, Ordering::Relaxed, |used| (used < budget).then_some(used + 1))
                .map(|_| ())
                .map_err(|used| Error::SampleBudget { used, budget }),
        }
    }

    pub fn charge_refuter_call(&self) {
        self.refuter_calls.fetch_add(1, Ordering::Relaxed);
    }

    pub fn joint_draws(&self) -> u64 {
        self.joint_draws.load(Ordering::Relaxed)
    }

    pub fn refuter_calls(&self) -> u64 {
        self.refuter_calls.load(Ordering::Relaxed)
    }
}

/// Stream-driven access to labelled examples whose x-marginal is [`ExampleSource::marginal`].
///
/// `draw` is pure given the stream apart from ledger accounting, so sources can
/// be shared across parallel workers.
pub trait ExampleSource: Send + Sync {
    fn marginal(&self) -> &MarginalDistribution;

    fn dimension(&self) -> usize {
        self.marginal().dimension()
    }

    fn draw(&self, rs: &RandomnessStream) -> Result<LabeledExample>;

    /// Exact P(y = +1 | x) when the source can compute it.
    fn plus_probability(&self, _x: &Point) -> Option<f64> {
        None
    }
}

/// Draws from a known joint distribution and charges the ledger.
#[derive(Debug, Clone)]
pub struct JointSource {
    joint: JointDistribution,
    ledger: Arc<SampleLedger>,
}

impl JointSource {
    pub fn new(joint: JointDistribution, ledger: Arc<SampleLedger>) -> Self {
        JointSource { joint, ledger }
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    pub fn ledger(&self) -> &Arc<SampleLedger> {
        &self.ledger
    }
}

impl ExampleSource for JointSource {
    fn marginal(&self) -> &MarginalDistribution {
        self.joint.marginal()
    }

    fn draw(&self, rs: &RandomnessStream) -> Result<LabeledExample> {
        self.ledger.charge_draw()?;
        self.joint.draw(&mut rs.rng())
    }

    fn plus_probability(&self, x: &Point) -> Option<f64> {
        self.joint.plus_probability(x).ok()
    }
}

/// Draw `count` examples using children `0..count` of `rs`.
pub fn draw_many(source: &dyn ExampleSource, rs: &RandomnessStream, count: usize) -> Result<Vec<LabeledExample>> {
    (0..count).map(|i| source.draw(&rs.child(i as u64))).collect()
}
