//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Pass criterion numbers as arguments to run a subset.

use std::sync::{Arc, OnceLock};
use std::time::Instant;

use reflab::boosting::{boost, evaluate_error, BoostConfig, ContractStub, ErrorMode};
use reflab::distributions::{
    exact_opt_error, ExampleSource, JointDistribution, JointSource, LabelLaw, MarginalDistribution, RandomnessStream, SampleLedger,
};
use reflab::domain::{enumerate_class, erm_learner, AgnosticLearner, ConceptClass, Point};
use reflab::estimators::{pooled_std_error, rademacher_complexity, Moments, RademacherMode, SupForm};
use reflab::harness::{run_experiment, Experiment, ExperimentConfig, ExperimentReport};
use reflab::hybrid::{
    endpoint_rates, label_correlation, planted_noise_rate, planted_structured_rate, unplanted_rate, ContextMode, HybridEvaluator,
};
use reflab::refuters::{correlation_refuter, CorrelationRefuter, SharedRefuter};
use reflab::Result;

const REFUTE: &str = r#"
seed = 1
class = "dictators_with_negations(8)"
joint = 'joint{marginal=uniform(8), labels=concept_noisy("dict:+1", 0.2)}'
delta = 0.5
trials = 300
"#;

const EXTRACT: &str = r#"
seed = 5
class = "dictators_with_negations(6)"
joint = 'joint{marginal=uniform(6), labels=concept_noisy("dict:+1", 0.05)}'
delta = 0.5
m = 64
context_mode = "frozen(8)"
trials = 10
"#;

const END2END: &str = r#"
seed = 8
class = "dictators_with_negations(6)"
joint = 'joint{marginal=uniform(6), labels=concept_noisy("dict:+1", 0.1)}'
delta = 0.6
epsilon = 0.3
m = 16
context_mode = "frozen(8)"
"#;

const EVALUATIONS: usize = 10_000;

static END2END_REPLAY: OnceLock<String> = OnceLock::new();

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn experiment(text: &str, exp: Experiment) -> Result<ExperimentReport> {
    let report = run_experiment(&ExperimentConfig::from_toml(text, Some(exp))?).report;
    match &report.error {
        Some(e) => Err(reflab::Error::Argument(format!("{exp} failed: {e}"))),
        None => Ok(report),
    }
}

fn metric(r: &ExperimentReport, name: &str) -> f64 {
    r.metric(name).map_or(f64::NAN, |m| m.value())
}

fn class(spec: &str) -> Result<Arc<ConceptClass>> {
    Ok(Arc::new(enumerate_class(&spec.parse()?)?))
}

fn joint(text: &str) -> Result<JointDistribution> {
    text.parse()
}

fn refute_joint() -> Result<JointDistribution> {
    joint(r#"joint{marginal=uniform(8), labels=concept_noisy("dict:+1", 0.2)}"#)
}

fn c1_refuter_rates() -> Result<Outcome> {
    let r = experiment(&format!("{REFUTE}m = 256\n"), Experiment::RefuteTest)?;
    outcome(
        r.verdict.pass && metric(&r, "m") == 256.0,
        format!("m={} structure={:.3} noise={:.3}", metric(&r, "m"), metric(&r, "structure_rate"), metric(&r, "noise_rate")),
    )
}

fn c2_learner_as_refuter() -> Result<Outcome> {
    let r = experiment(REFUTE, Experiment::LearnerAsRefuter)?;
    let erm = erm_learner(class("dictators_with_negations(8)")?);
    let expected = 2 * (erm.sample_requirement(0.5 / 4.0) + (64.0f64 / 0.25).ceil() as usize);
    let size = metric(&r, "sample_size");
    outcome(
        r.verdict.pass && size == expected as f64,
        format!(
            "sample_size={size} (expected {expected}) structure={:.3} noise={:.3} cor<delta/2={:.3}",
            metric(&r, "structure_rate"),
            metric(&r, "noise_rate"),
            metric(&r, "noise_cor_below_half_delta")
        ),
    )
}

fn c3_endpoint_gap() -> Result<Outcome> {
    let r = correlation_refuter(class("dictators_with_negations(8)")?, 0.5, 256)?;
    let src = JointSource::new(refute_joint()?, SampleLedger::new());
    let (w0, wend) = endpoint_rates(&r, &src, 1000, &RandomnessStream::new(3))?;
    let (lo, _) = w0.wilson95();
    let (_, hi) = wend.wilson95();
    outcome(lo >= 2.0 / 3.0 && hi <= 1.0 / 3.0, format!("w0={:.3} (low {lo:.3}) wend={:.3} (high {hi:.3})", w0.rate(), wend.rate()))
}

fn c4_planting_identity() -> Result<Outcome> {
    let m = 32;
    let r: SharedRefuter = Arc::new(CorrelationRefuter::new_unchecked(class("dictators_with_negations(8)")?, 0.5, m)?);
    let src = Arc::new(JointSource::new(refute_joint()?, SampleLedger::new()));
    let rs = RandomnessStream::new(4);
    let ev = HybridEvaluator::new(r.clone(), src.clone(), ContextMode::Fresh, &rs)?;
    let mut pass = true;
    let mut parts = Vec::new();
    for slot in [1, m.div_ceil(2), m] {
        let srs = rs.child(slot as u64);
        let planted = planted_noise_rate(&ev, slot, EVALUATIONS, &srs.child(0))?;
        let direct = Moments::from(unplanted_rate(r.as_ref(), src.as_ref(), slot, EVALUATIONS, &srs.child(1))?);
        let sigma = pooled_std_error(&[planted.std_error(), direct.std_error()]);
        let diff = (planted.mean - direct.mean).abs();
        pass &= diff <= 3.0 * sigma;
        parts.push(format!("i={slot}: {:.4} vs {:.4} ({:.2}σ)", planted.mean, direct.mean, diff / sigma.max(f64::MIN_POSITIVE)));
    }
    outcome(pass, parts.join("; "))
}

fn c5_weak_learner() -> Result<Outcome> {
    let r = experiment(EXTRACT, Experiment::WeakExtract)?;
    let target = metric(&r, "target_correlation");
    let success = match r.metric("extraction_success") {
        Some(reflab::harness::Metric::Rate { successes, .. }) => *successes,
        _ => 0,
    };
    outcome(
        r.verdict.pass && success >= 8 && (target - 0.4 * 2.0 / 192.0).abs() < 1e-12,
        format!("{success}/10 extractions reach target {target:.5}"),
    )
}

fn c6_correlation_identity() -> Result<Outcome> {
    let m = 16;
    let k = 8;
    let r: SharedRefuter = Arc::new(CorrelationRefuter::new_unchecked(class("dictators_with_negations(6)")?, 0.6, m)?);
    let src =
        Arc::new(JointSource::new(joint(r#"joint{marginal=uniform(6), labels=concept_noisy("dict:+1", 0.1)}"#)?, SampleLedger::new()));
    let rs = RandomnessStream::new(6);
    let ev = HybridEvaluator::new(r, src, ContextMode::Frozen(k), &rs)?;
    let mut worst = 0.0f64;
    let mut pass = true;
    for slot in 1..=m {
        let srs = rs.child(slot as u64);
        let cor = label_correlation(&ev, slot, k, EVALUATIONS, &srs.child(0))?;
        let a = planted_structured_rate(&ev, slot, EVALUATIONS, &srs.child(1))?;
        let b = planted_noise_rate(&ev, slot, EVALUATIONS, &srs.child(2))?;
        let sigma = pooled_std_error(&[cor.std_error(), 2.0 * a.std_error(), 2.0 * b.std_error()]);
        let diff = (cor.mean - 2.0 * (a.mean - b.mean)).abs();
        pass &= diff <= 3.0 * sigma;
        worst = worst.max(diff / sigma.max(f64::MIN_POSITIVE));
    }
    outcome(pass, format!("{m} slots, worst deviation {worst:.2}σ"))
}

fn c7_contract() -> Result<Outcome> {
    let plus: Point = "+".parse()?;
    let minus: Point = "-".parse()?;
    let marginal = MarginalDistribution::explicit(1, vec![(plus, 0.7), (minus, 0.3)])?;
    let j = JointDistribution::new(marginal, LabelLaw::Conditional([(plus, 0.8), (minus, 0.4)].into_iter().collect()))?;
    let class = class("explicit(1;dict:+1;dict:-1;const:+1;const:-1)")?;
    let src: Arc<dyn ExampleSource> = Arc::new(JointSource::new(j.clone(), SampleLedger::new()));
    let cfg = BoostConfig::new(0.1, 0.25, 0.05)?;
    let out = boost(&ContractStub::new(class.clone(), 0.25, 0.05), src, &cfg, &RandomnessStream::new(7), None)?;
    let err = evaluate_error(&out.hypothesis, &j, ErrorMode::Exact, &RandomnessStream::new(7))?.value;
    let bound = cfg.error_bound(exact_opt_error(&j, &class)?);
    outcome(err <= bound, format!("error {err:.4} <= bound {bound:.4} after {} rounds", cfg.rounds))
}

fn c8_end_to_end() -> Result<Outcome> {
    let r = experiment(END2END, Experiment::End2end)?;
    let err = metric(&r, "boosted_error");
    let reference = r.ledger.reference.unwrap_or(f64::NAN);
    let pass = r.verdict.pass && err <= 0.57 && err <= 0.45 && (reference - 16f64.powi(3) / 0.09).abs() < 1e-6;
    let _ = END2END_REPLAY.set(r.replay_json());
    outcome(
        pass,
        format!(
            "error {err:.4} (opt 0.1, bound 0.57, margin {:.4}); {} draws = {:.1} x m^3/eps^2 ({reference:.0})",
            metric(&r, "baseline_margin"),
            r.ledger.joint_draws,
            r.ledger.constant.unwrap_or(f64::NAN)
        ),
    )
}

fn c9_rademacher() -> Result<Outcome> {
    let class = class("explicit(1;dict:+1)")?;
    let d = MarginalDistribution::uniform(1)?;
    let mut pass = true;
    let mut parts = Vec::new();
    for (m, expected) in [(2, 0.5), (4, 0.375), (8, 0.2734375)] {
        let v = rademacher_complexity(&class, &d, m, RademacherMode::Exact, SupForm::default(), &RandomnessStream::new(9))?.value;
        pass &= (v - expected).abs() <= 1e-12;
        parts.push(format!("m={m}: {v}"));
    }
    outcome(pass, parts.join(", "))
}

fn c10_replay() -> Result<Outcome> {
    let first = match END2END_REPLAY.get() {
        Some(s) => s.clone(),
        None => experiment(END2END, Experiment::End2end)?.replay_json(),
    };
    let second = experiment(END2END, Experiment::End2end)?.replay_json();
    outcome(first == second, format!("{} bytes, identical: {}", first.len(), first == second))
}

type Check = fn() -> Result<Outcome>;

const CRITERIA: [(u32, &str, Option<f64>, Check); 10] = [
    (1, "refuter completeness and soundness", Some(30.0), c1_refuter_rates),
    (2, "learner as refuter", Some(120.0), c2_learner_as_refuter),
    (3, "endpoint gap", None, c3_endpoint_gap),
    (4, "planting identity", None, c4_planting_identity),
    (5, "weak learner guarantee", Some(300.0), c5_weak_learner),
    (6, "correlation identity", None, c6_correlation_identity),
    (7, "boosting contract", Some(10.0), c7_contract),
    (8, "end to end", Some(600.0), c8_end_to_end),
    (9, "rademacher oracle", None, c9_rademacher),
    (10, "replay", None, c10_replay),
];

fn main() {
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, limit, check) in CRITERIA {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match result {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = limit.is_none_or(|l| secs <= l);
        let pass = pass && in_time;
        let limit = limit.map_or(String::new(), |l| format!(" / {l:.0}s"));
        println!("criterion {n:>2} {}: {name}: {detail} [{secs:.1}s{limit}]", if pass { "PASS" } else { "FAIL" });
        failed += !pass as usize;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
