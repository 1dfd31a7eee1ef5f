//! Every draw from the joint source is charged to the ledger exactly once.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use reflab::boosting::{boost, BoostConfig, HybridFactory};
use reflab::distributions::{ExampleSource, JointSource, MarginalDistribution, RandomnessStream, SampleLedger};
use reflab::domain::{enumerate_class, ClassSpec, LabeledExample, Point};
use reflab::hybrid::{endpoint_rates, extract_weak_learner, ContextMode, ExtractConfig};
use reflab::refuters::{run_refuter_trials, CorrelationRefuter, Metered, Regime, SharedRefuter};
use reflab::Result;

struct Counting {
    inner: JointSource,
    draws: AtomicU64,
}

impl ExampleSource for Counting {
    fn marginal(&self) -> &MarginalDistribution {
        self.inner.marginal()
    }

    fn draw(&self, rs: &RandomnessStream) -> Result<LabeledExample> {
        self.draws.fetch_add(1, Ordering::Relaxed);
        self.inner.draw(rs)
    }

    fn plus_probability(&self, x: &Point) -> Option<f64> {
        self.inner.plus_probability(x)
    }
}

#[test]
fn ledger_matches_an_instrumented_source() {
    let ledger = SampleLedger::new();
    let j = "joint{marginal=uniform(4), labels=concept_noisy(\"dict:+2\", 0.1)}".parse().unwrap();
    let src = Arc::new(Counting { inner: JointSource::new(j, ledger.clone()), draws: AtomicU64::new(0) });
    let dyn_src: Arc<dyn ExampleSource> = src.clone();
    let class = Arc::new(enumerate_class(&ClassSpec::DictatorsWithNegations(4)).unwrap());
    let m = 10;
    let base: SharedRefuter = Arc::new(CorrelationRefuter::new_unchecked(class, 0.5, m).unwrap());
    let r: SharedRefuter = Arc::new(Metered::new(base, ledger.clone()));
    let rs = RandomnessStream::new(41);
    let same = || assert_eq!(src.draws.load(Ordering::Relaxed), ledger.joint_draws());

    run_refuter_trials(r.as_ref(), &Regime::Structure(dyn_src.clone()), 100, &rs.child(0)).unwrap();
    assert_eq!(ledger.joint_draws(), 100 * m as u64);
    assert_eq!(ledger.refuter_calls(), 100);
    same();

    endpoint_rates(r.as_ref(), dyn_src.as_ref(), 100, &rs.child(1)).unwrap();
    same();

    for (i, mode) in [ContextMode::Frozen(4), ContextMode::Fresh].into_iter().enumerate() {
        let before = ledger.joint_draws();
        let cfg = ExtractConfig { mode, k: 4, ..ExtractConfig::default() };
        let ex = extract_weak_learner(r.clone(), dyn_src.clone(), &cfg, &rs.child(2).child(i as u64)).unwrap();
        assert_eq!(ledger.joint_draws() - before, ex.diagnostics.structured_draws, "{mode:?}");
        same();
    }

    let factory = HybridFactory::new(r, ExtractConfig::frozen(4));
    let mut cfg = BoostConfig::for_spec(&factory.spec(), 0.3).unwrap();
    cfg.rounds = 4;
    let before = ledger.joint_draws();
    let out = boost(&factory, dyn_src, &cfg, &rs.child(3), None).unwrap();
    let base_draws: u64 = out.log.iter().map(|l| l.base_draws).sum();
    assert_eq!(ledger.joint_draws() - before, base_draws);
    same();
}
