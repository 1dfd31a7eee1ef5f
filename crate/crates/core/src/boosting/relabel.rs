use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::marginal::MarginalDistribution;
use crate::distributions::source::ExampleSource;
use crate::distributions::stream::{label, RandomnessStream};
use crate::domain::hypothesis::SharedHypothesis;
use crate::domain::point::{LabeledExample, Point, Sign};
use crate::error::{Error, Result};

/// How a relabeled source realises the weights w(x, y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelabelMode {
    /// Keep y with probability w, otherwise emit a fair coin. The x-marginal is untouched.
    #[default]
    Flip,
    /// Accept (x, y) with probability w. Perturbs the x-marginal.
    Reject,
}

/// w(x, y) = min(1, exp(−y·H(x))), kept strictly positive.
pub fn weight(y: Sign, score: f64) -> f64 {
    (-y.as_f64() * score).exp().clamp(f64::MIN_POSITIVE, 1.0)
}

const FIXED_POINT: f64 = (1u64 << 32) as f64;

#[derive(Clone)]
pub(crate) struct Component {
    pub hypothesis: SharedHypothesis,
    pub weight: f64,
    pub stream: RandomnessStream,
}

impl Component {
    fn value(&self, x: &Point) -> Result<f64> {
        self.hypothesis.smoothed(x, &self.stream.child(x.bits() as u64))
    }
}

/// The components of H and a per-point cache of its prefix sums.
///
/// H(x) is always accumulated left to right in component order, so cached
/// and fresh values agree bit for bit.
#[derive(Default)]
pub struct ScoreTable {
    components: RwLock<Vec<Component>>,
    cache: Mutex<HashMap<u32, (usize, f64)>>,
}

impl ScoreTable {
    pub fn len(&self) -> usize {
        self.components.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub(crate) fn push(&self, c: Component) {
        self.components.write().unwrap().push(c);
    }

    pub(crate) fn components(&self) -> Vec<Component> {
        self.components.read().unwrap().clone()
    }

    /// Σ_{s < upto} η_s·v_s(x).
    pub fn score(&self, x: &Point, upto: usize) -> Result<f64> {
        let (start, mut h) = match self.cache.lock().unwrap().get(&x.bits()) {
            Some(&(n, h)) if n <= upto => (n, h),
            _ => (0, 0.0),
        };
        if start == upto {
            return Ok(h);
        }
        let comps: Vec<Component> = self.components.read().unwrap()[start..upto].to_vec();
        for c in &comps {
            h += c.weight * c.value(x)?;
        }
        let mut cache = self.cache.lock().unwrap();
        let entry = cache.entry(x.bits()).or_insert((0, 0.0));
        if entry.0 < upto {
            *entry = (upto, h);
        }
        Ok(h)
    }
}

/// 𝒟′ with labels re-randomised by the current weights. Points always come
/// from the base source; there is no other way to produce one.
pub struct RelabeledSource {
    base: Arc<dyn ExampleSource>,
    table: Arc<ScoreTable>,
    upto: usize,
    mode: RelabelMode,
    max_attempts: usize,
    weight_sum: AtomicU64,
    base_draws: AtomicU64,
    emitted: AtomicU64,
}

impl RelabeledSource {
    pub fn new(base: Arc<dyn ExampleSource>, table: Arc<ScoreTable>, mode: RelabelMode, max_attempts: usize) -> Self {
        let upto = table.len();
        RelabeledSource {
            base,
            table,
            upto,
            mode,
            max_attempts: max_attempts.max(1),
            weight_sum: AtomicU64::new(0),
            base_draws: AtomicU64::new(0),
            emitted: AtomicU64::new(0),
        }
    }

    fn record(&self, w: f64) {
        self.weight_sum.fetch_add((w * FIXED_POINT).round() as u64, Ordering::Relaxed);
        self.base_draws.fetch_add(1, Ordering::Relaxed);
    }

    /// Mean of w over base draws so far; the expected acceptance rate.
    /// Accumulated in fixed point so the result is independent of draw order.
    pub fn mean_weight(&self) -> Option<f64> {
        let n = self.base_draws.load(Ordering::Relaxed);
        (n > 0).then(|| self.weight_sum.load(Ordering::Relaxed) as f64 / FIXED_POINT / n as f64)
    }

    pub fn base_draws(&self) -> u64 {
        self.base_draws.load(Ordering::Relaxed)
    }

    pub fn emitted(&self) -> u64 {
        self.emitted.load(Ordering::Relaxed)
    }

    pub fn score(&self, x: &Point) -> Result<f64> {
        self.table.score(x, self.upto)
    }
}

impl ExampleSource for RelabeledSource {
    fn marginal(&self) -> &MarginalDistribution {
        self.base.marginal()
    }

    fn draw(&self, rs: &RandomnessStream) -> Result<LabeledExample> {
        match self.mode {
            RelabelMode::Flip => {
                let ex = self.base.draw(&rs.child(label::POINTS))?;
                let w = weight(ex.label, self.score(&ex.point)?);
                self.record(w);
                let keep = rs.child(label::LABELS).rng().gen::<f64>() < (1.0 + w) / 2.0;
                self.emitted.fetch_add(1, Ordering::Relaxed);
                Ok(LabeledExample::new(ex.point, if keep { ex.label } else { -ex.label }))
            }
            RelabelMode::Reject => {
                for a in 0..self.max_attempts {
                    let ars = rs.child(a as u64);
                    let ex = self.base.draw(&ars.child(label::POINTS))?;
                    let w = weight(ex.label, self.score(&ex.point)?);
                    self.record(w);
                    if ars.child(label::LABELS).rng().gen::<f64>() < w {
                        self.emitted.fetch_add(1, Ordering::Relaxed);
                        return Ok(ex);
                    }
                }
                Err(Error::Learner(format!("relabeled source rejected {} draws in a row", self.max_attempts)))
            }
        }
    }

    /// P(ŷ = +1 | x) of the emitted stream, when the base source knows its own conditional.
    fn plus_probability(&self, x: &Point) -> Option<f64> {
        let q = self.base.plus_probability(x)?;
        let h = self.score(x).ok()?;
        let (wp, wm) = (weight(Sign::Plus, h), weight(Sign::Minus, h));
        Some(match self.mode {
            RelabelMode::Flip => q * (1.0 + wp) / 2.0 + (1.0 - q) * (1.0 - wm) / 2.0,
            RelabelMode::Reject => q * wp / (q * wp + (1.0 - q) * wm),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::joint::JointDistribution;
    use crate::distributions::source::{draw_many, JointSource, SampleLedger};
    use crate::domain::concept::Concept;
    use crate::domain::hypothesis::ConceptHypothesis;

    fn table_with(concept: Concept, eta: f64, rounds: usize) -> Arc<ScoreTable> {
        let t = Arc::new(ScoreTable::default());
        for s in 0..rounds {
            t.push(Component {
                hypothesis: Arc::new(ConceptHypothesis(concept.clone())),
                weight: eta,
                stream: RandomnessStream::new(0).child(s as u64),
            });
        }
        t
    }

    #[test]
    fn weights_in_unit_interval() {
        for h in [-800.0, -3.0, 0.0, 0.5, 800.0] {
            for y in Sign::both() {
                let w = weight(y, h);
                assert!(w > 0.0 && w <= 1.0);
            }
        }
        assert_eq!(weight(Sign::Plus, -1.0), 1.0);
        assert!((weight(Sign::Plus, 1.0) - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn score_cache_matches_fresh_sums() {
        let c = Concept::dictator(1, Sign::Plus, 2).unwrap();
        let t = table_with(c, 0.1, 7);
        let x = Point::new(0, 2).unwrap();
        let partial = t.score(&x, 3).unwrap();
        let full = t.score(&x, 7).unwrap();
        let fresh = table_with(Concept::dictator(1, Sign::Plus, 2).unwrap(), 0.1, 7).score(&x, 7).unwrap();
        assert_eq!(full, fresh);
        assert!((partial - 0.3).abs() < 1e-12);
        // a shorter prefix than the cached one is recomputed, not truncated
        assert_eq!(t.score(&x, 3).unwrap(), partial);
    }

    #[test]
    fn flip_mode_keeps_points_and_matches_conditional() {
        let c = Concept::dictator(1, Sign::Plus, 2).unwrap();
        let j = JointDistribution::concept_noisy(MarginalDistribution::uniform(2).unwrap(), c.clone(), 0.1).unwrap();
        let ledger = SampleLedger::new();
        let base: Arc<dyn ExampleSource> = Arc::new(JointSource::new(j.clone(), ledger.clone()));
        let src = RelabeledSource::new(base.clone(), table_with(c, 0.5, 2), RelabelMode::Flip, 1);
        let rs = RandomnessStream::new(4);
        let out = draw_many(&src, &rs, 20_000).unwrap();
        assert_eq!(ledger.joint_draws(), 20_000);
        for (i, e) in out.iter().enumerate() {
            let orig = base.draw(&rs.child(i as u64).child(label::POINTS)).unwrap();
            assert_eq!(e.point, orig.point);
        }
        let x = Point::new(0, 2).unwrap();
        let q = src.plus_probability(&x).unwrap();
        // H = 1 on x = (+,+): E[ŷ] = 0.9 e^{-1} - 0.1
        assert!((2.0 * q - 1.0 - (0.9 * (-1f64).exp() - 0.1)).abs() < 1e-12);
        let hits: Vec<_> = out.iter().filter(|e| e.point == x).collect();
        let rate = hits.iter().filter(|e| e.label.is_plus()).count() as f64 / hits.len() as f64;
        let se = (q * (1.0 - q) / hits.len() as f64).sqrt();
        assert!((rate - q).abs() < 4.0 * se, "{rate} vs {q}");
        assert!(src.mean_weight().unwrap() > 0.0);
    }

    #[test]
    fn reject_mode_starvation_is_a_learner_error() {
        let c = Concept::dictator(1, Sign::Plus, 1).unwrap();
        let j = JointDistribution::concept_noisy(MarginalDistribution::uniform(1).unwrap(), c.clone(), 0.0).unwrap();
        let base: Arc<dyn ExampleSource> = Arc::new(JointSource::new(j, SampleLedger::new()));
        let src = RelabeledSource::new(base, table_with(c, 100.0, 7), RelabelMode::Reject, 3);
        assert!(matches!(src.draw(&RandomnessStream::new(0)), Err(Error::Learner(_))));
    }
}
