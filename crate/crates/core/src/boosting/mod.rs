//! Distribution-specific agnostic boosting by label-only relabeling.
//!
//! Round t feeds the weak learner a source whose points come straight from
//! 𝒟′ and whose labels are re-randomised by w(x, y) = min(1, exp(−y·H(x))),
//! where H is the running sum of η-weighted smoothed components. The output
//! is sign(H), ties to +1.

mod factories;
mod relabel;

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distributions::exact::exact_value_error;
use crate::distributions::joint::JointDistribution;
use crate::distributions::source::ExampleSource;
use crate::distributions::stream::{label, RandomnessStream};
use crate::domain::hypothesis::{check_point, RandomizedHypothesis};
use crate::domain::point::{Point, Sign};
use crate::error::{Error, Result};
use crate::estimators::RateReport;
use crate::exec;
use crate::hybrid::WeakLearnerSpec;

pub use factories::{ContractStub, ErmFactory, FixedFactory, HybridFactory, WeakLearnerFactory, WeakOutput};
pub use relabel::{weight, RelabelMode, RelabeledSource, ScoreTable};

use relabel::Component;

/// Tag of the weight function used by the relabeler.
pub const POTENTIAL: &str = "min(1,exp(-y*H))";

pub const DEFAULT_C_T: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostConfig {
    pub epsilon: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub rounds: usize,
    pub eta: f64,
    pub relabel_mode: RelabelMode,
    /// Base draws a rejecting source may spend on one emitted example.
    pub max_attempts: usize,
}

impl BoostConfig {
    /// T = ⌈2/(γ²ε²)⌉, η = γ/2, flip relabeling.
    pub fn new(epsilon: f64, gamma: f64, alpha: f64) -> Result<Self> {
        Self::with_c_t(epsilon, gamma, alpha, DEFAULT_C_T)
    }

    pub fn with_c_t(epsilon: f64, gamma: f64, alpha: f64, c_t: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon {epsilon} outside (0, 1)")));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Config(format!("gamma {gamma} outside (0, 1]")));
        }
        if !(alpha >= 0.0) || !(c_t > 0.0) {
            return Err(Error::Config("alpha must be non-negative and c_T positive".into()));
        }
        Ok(BoostConfig {
            epsilon,
            gamma,
            alpha,
            rounds: rounds_for(c_t, gamma, epsilon),
            eta: gamma / 2.0,
            relabel_mode: RelabelMode::Flip,
            max_attempts: 1 << 16,
        })
    }

    pub fn for_spec(spec: &WeakLearnerSpec, epsilon: f64) -> Result<Self> {
        Self::new(epsilon, spec.gamma, spec.alpha)
    }

    /// Skipped rounds tolerated before the run counts as failed.
    pub fn max_skips(&self) -> usize {
        self.rounds / 4
    }

    /// opt + α/γ + ε.
    pub fn error_bound(&self, opt_error: f64) -> f64 {
        opt_error + self.alpha / self.gamma + self.epsilon
    }
}

pub fn rounds_for(c_t: f64, gamma: f64, epsilon: f64) -> usize {
    // rounding guards against 2/(γ²ε²) landing a hair above an integer
    let t = c_t / (gamma * gamma * epsilon * epsilon);
    let r = t.round();
    (if (t - r).abs() < 1e-9 * t { r } else { t.ceil() }) as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    pub round: usize,
    pub skipped: bool,
    /// Mean relabeling weight over this round's base draws.
    pub acceptance: Option<f64>,
    pub base_draws: u64,
    pub weak_correlation: Option<f64>,
    /// Exact error of sign(H) after this round, when a monitor joint was given.
    pub error: Option<f64>,
}

/// sign(Σ η_s·v_s(x)), ties to +1.
#[derive(Clone)]
pub struct BoostedHypothesis {
    table: Arc<ScoreTable>,
    dim: usize,
    upto: usize,
}

impl BoostedHypothesis {
    pub fn score(&self, x: &Point) -> Result<f64> {
        check_point(self.dim, x)?;
        self.table.score(x, self.upto)
    }

    pub fn predict(&self, x: &Point) -> Result<Sign> {
        Ok(Sign::of(self.score(x)?))
    }

    pub fn components(&self) -> usize {
        self.upto
    }

    /// (weight, description) per component.
    pub fn component_summary(&self) -> Vec<(f64, String)> {
        self.table.components()[..self.upto].iter().map(|c| (c.weight, c.hypothesis.describe())).collect()
    }
}

impl RandomizedHypothesis for BoostedHypothesis {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn sample(&self, x: &Point, _rs: &RandomnessStream) -> Result<Sign> {
        self.predict(x)
    }

    fn smoothed_with(&self, x: &Point, _k: usize, _rs: &RandomnessStream) -> Result<f64> {
        Ok(self.predict(x)?.as_f64())
    }

    fn describe(&self) -> String {
        format!("boosted({} components)", self.upto)
    }
}

pub struct BoostOutcome {
    pub hypothesis: BoostedHypothesis,
    pub log: Vec<RoundLog>,
    pub skipped: usize,
}

impl BoostOutcome {
    pub fn log_csv(&self) -> String {
        let mut out = String::from("round,skipped,acceptance_rate,base_draws,weak_correlation,error\n");
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
        for r in &self.log {
            writeln!(out, "{},{},{},{},{},{}", r.round, r.skipped, opt(r.acceptance), r.base_draws, opt(r.weak_correlation), opt(r.error))
                .unwrap();
        }
        out
    }
}

/// Runs `cfg.rounds` rounds. Round t uses `rs.child(ROUNDS).child(t)` for the
/// weak learner and `rs.child(SMOOTHING).child(t)` for its component's coins.
///
/// A failing weak learner skips its round; more than T/4 skips is a boost
/// failure. Sample-budget errors abort at once. With `monitor` the exact error
/// of sign(H) is logged each round.
pub fn boost(
    weak: &dyn WeakLearnerFactory,
    source: Arc<dyn ExampleSource>,
    cfg: &BoostConfig,
    rs: &RandomnessStream,
    monitor: Option<&JointDistribution>,
) -> Result<BoostOutcome> {
    if cfg.rounds == 0 || !(cfg.eta > 0.0) {
        return Err(Error::Config("boosting needs at least one round and a positive step".into()));
    }
    let dim = source.dimension();
    let table = Arc::new(ScoreTable::default());
    let mut log = Vec::with_capacity(cfg.rounds);
    let mut skipped = 0;
    for t in 0..cfg.rounds {
        let relabeled = Arc::new(RelabeledSource::new(source.clone(), table.clone(), cfg.relabel_mode, cfg.max_attempts));
        let out = weak.learn(relabeled.clone(), &rs.child(label::ROUNDS).child(t as u64));
        let weak_correlation = match out {
            Ok(out) => {
                if out.hypothesis.dimension() != dim {
                    return Err(Error::Config("weak hypothesis has the wrong dimension".into()));
                }
                table.push(Component { hypothesis: out.hypothesis, weight: cfg.eta, stream: rs.child(label::SMOOTHING).child(t as u64) });
                Some(out.correlation)
            }
            Err(e @ Error::SampleBudget { .. }) => return Err(e),
            Err(_) => {
                skipped += 1;
                if skipped > cfg.max_skips() {
                    return Err(Error::BoostFailure { skipped, rounds: cfg.rounds });
                }
                None
            }
        };
        let error = match monitor {
            Some(j) => {
                let h = BoostedHypothesis { table: table.clone(), dim, upto: table.len() };
                Some(boosted_exact_error(&h, j)?)
            }
            None => None,
        };
        log.push(RoundLog {
            round: t + 1,
            skipped: weak_correlation.is_none(),
            acceptance: relabeled.mean_weight(),
            base_draws: relabeled.base_draws(),
            weak_correlation: weak_correlation.flatten(),
            error,
        });
    }
    let upto = table.len();
    Ok(BoostOutcome { hypothesis: BoostedHypothesis { table, dim, upto }, log, skipped })
}

fn boosted_exact_error(h: &BoostedHypothesis, j: &JointDistribution) -> Result<f64> {
    let support = j.marginal().support()?;
    // warm the score cache in parallel; the sum below stays sequential
    exec::try_map_range(support.len(), |i| h.score(&support[i].0))?;
    exact_value_error(j, |x| Ok(h.predict(x)?.as_f64()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMode {
    Exact,
    MonteCarlo { count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub value: f64,
    /// Wilson 95% interval in Monte Carlo mode.
    pub interval: Option<(f64, f64)>,
    pub count: u64,
    pub mode: String,
}

/// Pr[h(x) ≠ y]. Exact mode sums over the support using the smoothed value of
/// h as its rounding probability; Monte Carlo mode samples h once per draw.
pub fn evaluate_error(
    h: &dyn RandomizedHypothesis,
    j: &JointDistribution,
    mode: ErrorMode,
    rs: &RandomnessStream,
) -> Result<ErrorEstimate> {
    if h.dimension() != j.dimension() {
        return Err(Error::Config("hypothesis and joint dimensions differ".into()));
    }
    match mode {
        ErrorMode::Exact => {
            let support = j.marginal().support()?;
            let ers = rs.child(label::EVAL);
            let values = exec::try_map_range(support.len(), |i| {
                let x = &support[i].0;
                h.smoothed(x, &ers.child(x.bits() as u64))
            })?;
            let lookup: std::collections::HashMap<u32, f64> = support.iter().zip(values).map(|((x, _), v)| (x.bits(), v)).collect();
            let value = exact_value_error(j, |x| Ok(lookup[&x.bits()]))?;
            Ok(ErrorEstimate { value, interval: None, count: support.len() as u64, mode: "exact".into() })
        }
        ErrorMode::MonteCarlo { count } => {
            if count == 0 {
                return Err(Error::Argument("Monte Carlo error needs at least one draw".into()));
            }
            let wrong = exec::try_map_range(count, |i| -> Result<bool> {
                let drs = rs.child(i as u64);
                let e = j.draw(&mut drs.child(label::POINTS).rng())?;
                Ok(h.sample(&e.point, &drs.child(label::EVAL))? != e.label)
            })?;
            let r = RateReport::new(wrong.iter().filter(|&&w| w).count() as u64, count as u64);
            Ok(ErrorEstimate { value: r.rate(), interval: Some(r.wilson95()), count: count as u64, mode: format!("monte_carlo({count})") })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::exact::exact_opt_error;
    use crate::distributions::marginal::MarginalDistribution;
    use crate::distributions::source::{JointSource, SampleLedger};
    use crate::domain::class::{enumerate_class, ClassSpec};
    use crate::domain::concept::Concept;
    use crate::domain::hypothesis::{ConceptHypothesis, FairCoin};
    use crate::domain::learner::erm_learner;

    fn uniform_noisy(n: usize, c: &Concept, p: f64) -> JointDistribution {
        JointDistribution::concept_noisy(MarginalDistribution::uniform(n).unwrap(), c.clone(), p).unwrap()
    }

    #[test]
    fn round_count_and_defaults() {
        let cfg = BoostConfig::new(0.3, 1.0 / 24.0, 0.6 / 24.0).unwrap();
        assert_eq!(cfg.rounds, 12800);
        assert!((cfg.eta - 1.0 / 48.0).abs() < 1e-15);
        assert_eq!(cfg.relabel_mode, RelabelMode::Flip);
        assert_eq!(BoostConfig::new(0.1, 0.25, 0.05).unwrap().rounds, 3200);
        assert!(BoostConfig::new(0.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn exact_error_examples() {
        let c = Concept::dictator(2, Sign::Plus, 3).unwrap();
        let rs = RandomnessStream::new(0);
        let j = uniform_noisy(3, &c, 0.1);
        let e = evaluate_error(&ConceptHypothesis(c.clone()), &j, ErrorMode::Exact, &rs).unwrap();
        assert!((e.value - 0.1).abs() < 1e-12);
        let coin = JointDistribution::rademacher(MarginalDistribution::uniform(3).unwrap());
        let plus = ConceptHypothesis(Concept::constant(Sign::Plus, 3).unwrap());
        assert_eq!(evaluate_error(&plus, &coin, ErrorMode::Exact, &rs).unwrap().value, 0.5);
        let neg = ConceptHypothesis(Concept::dictator(2, Sign::Minus, 3).unwrap());
        assert_eq!(evaluate_error(&neg, &uniform_noisy(3, &c, 0.0), ErrorMode::Exact, &rs).unwrap().value, 1.0);
        let mc = evaluate_error(&ConceptHypothesis(c), &j, ErrorMode::MonteCarlo { count: 4000 }, &rs).unwrap();
        let (lo, hi) = mc.interval.unwrap();
        assert!(lo <= 0.1 && 0.1 <= hi);
    }

    #[test]
    fn perfect_weak_learner_is_exact_after_one_round() {
        let c = Concept::dictator(1, Sign::Minus, 4).unwrap();
        let j = uniform_noisy(4, &c, 0.0);
        let src: Arc<dyn ExampleSource> = Arc::new(JointSource::new(j.clone(), SampleLedger::new()));
        let weak = FixedFactory::new(Arc::new(ConceptHypothesis(c)));
        let cfg = BoostConfig { rounds: 5, ..BoostConfig::new(0.5, 1.0, 0.0).unwrap() };
        let out = boost(&weak, src, &cfg, &RandomnessStream::new(0), Some(&j)).unwrap();
        assert!(out.log.iter().all(|r| r.error == Some(0.0)));
        assert_eq!(out.hypothesis.components(), 5);
    }

    #[test]
    fn null_weak_learner_does_not_crash() {
        let j = JointDistribution::rademacher(MarginalDistribution::uniform(3).unwrap());
        let src: Arc<dyn ExampleSource> = Arc::new(JointSource::new(j.clone(), SampleLedger::new()));
        let weak = FixedFactory::new(Arc::new(FairCoin { dim: 3, budget: 4 }));
        let cfg = BoostConfig { rounds: 20, ..BoostConfig::new(0.5, 0.5, 0.0).unwrap() };
        let out = boost(&weak, src, &cfg, &RandomnessStream::new(1), None).unwrap();
        let err = evaluate_error(&out.hypothesis, &j, ErrorMode::Exact, &RandomnessStream::new(0)).unwrap().value;
        assert_eq!(err, 0.5);
    }

    #[test]
    fn erm_boosting_is_monotone_on_realizable_data() {
        let class = Arc::new(enumerate_class(&ClassSpec::DictatorsWithNegations(4)).unwrap());
        let c = class.get(3).clone();
        let j = uniform_noisy(4, &c, 0.0);
        let ledger = SampleLedger::new();
        let src: Arc<dyn ExampleSource> = Arc::new(JointSource::new(j.clone(), ledger.clone()));
        let weak = ErmFactory::new(Arc::new(erm_learner(class.clone())), 64);
        let cfg = BoostConfig::new(0.2, 1.0, 0.0).unwrap();
        let out = boost(&weak, src, &cfg, &RandomnessStream::new(2), Some(&j)).unwrap();
        let first = out.log[0].error.unwrap();
        let last = out.log.last().unwrap().error.unwrap();
        assert!(last <= first + 0.01);
        assert_eq!(ledger.joint_draws(), 64 * cfg.rounds as u64);
        assert!(out.log.iter().all(|r| r.acceptance.unwrap() > 0.0 && r.acceptance.unwrap() <= 1.0));
        assert!(exact_opt_error(&j, &class).unwrap() == 0.0);
    }

    #[test]
    fn acceptance_never_starves() {
        let class = Arc::new(enumerate_class(&ClassSpec::DictatorsWithNegations(3)).unwrap());
        let j = uniform_noisy(3, class.get(0), 0.2);
        let src: Arc<dyn ExampleSource> = Arc::new(JointSource::new(j, SampleLedger::new()));
        let weak = ErmFactory::new(Arc::new(erm_learner(class)), 32);
        let cfg = BoostConfig { rounds: 40, ..BoostConfig::new(0.3, 0.5, 0.0).unwrap() };
        let out = boost(&weak, src, &cfg, &RandomnessStream::new(3), None).unwrap();
        for r in &out.log {
            let floor = (-((r.round - 1) as f64) * cfg.eta).exp();
            assert!(r.acceptance.unwrap() >= floor - 1e-9);
        }
    }

    struct Failing;
    impl WeakLearnerFactory for Failing {
        fn learn(&self, _: Arc<dyn ExampleSource>, _: &RandomnessStream) -> Result<WeakOutput> {
            Err(Error::Learner("no".into()))
        }
        fn describe(&self) -> String {
            "failing".into()
        }
    }

    #[test]
    fn too_many_skips_fail_the_run() {
        let j = JointDistribution::rademacher(MarginalDistribution::uniform(2).unwrap());
        let src: Arc<dyn ExampleSource> = Arc::new(JointSource::new(j, SampleLedger::new()));
        let cfg = BoostConfig { rounds: 8, ..BoostConfig::new(0.5, 0.5, 0.0).unwrap() };
        let err = boost(&Failing, src, &cfg, &RandomnessStream::new(0), None).err().unwrap();
        assert_eq!(err, Error::BoostFailure { skipped: 3, rounds: 8 });
    }
}
