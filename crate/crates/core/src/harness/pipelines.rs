use std::fmt::Write as _;
use std::sync::Arc;

use super::config::{Experiment, ExperimentConfig};
use super::Collector;
use crate::boosting::{boost, evaluate_error, BoostConfig, ErrorMode, HybridFactory};
use crate::distributions::exact::{exact_opt_correlation, exact_opt_error, exact_value_correlation};
use crate::distributions::source::{ExampleSource, JointSource, SampleLedger};
use crate::distributions::stream::{label, RandomnessStream};
use crate::domain::class::{enumerate_class, ConceptClass};
use crate::domain::hypothesis::RandomizedHypothesis;
use crate::domain::learner::{erm_learner, AgnosticLearner};
use crate::error::{Error, Result};
use crate::estimators::{rademacher_complexity, RateReport};
use crate::hybrid::{endpoint_rates, extract_weak_learner, ExtractConfig, WeakLearnerSpec};
use crate::refuters::{
    correlation_refuter, correlation_required_sample_size, learner_to_refuter, run_refuter_trials, Amplified, CorrelationRefuter, Metered,
    Refuter, Regime, SharedRefuter, TrialReport,
};

const TWO_THIRDS: f64 = 2.0 / 3.0;
/// Fixed Monte Carlo slack in the end-to-end error predicate.
pub const END2END_SLACK: f64 = 0.02;

pub(super) fn run(cfg: &ExperimentConfig, c: &mut Collector) -> Result<()> {
    let ledger = match cfg.sample_budget {
        Some(b) => SampleLedger::with_budget(b),
        None => SampleLedger::new(),
    };
    let result = match cfg.experiment {
        Experiment::RefuteTest => refute_test(cfg, &ledger, c),
        Experiment::LearnerAsRefuter => learner_as_refuter(cfg, &ledger, c),
        Experiment::WeakExtract => weak_extract(cfg, &ledger, c),
        Experiment::Rademacher => rademacher(cfg, c),
        Experiment::End2end => end2end(cfg, &ledger, c),
    };
    c.ledger.joint_draws = ledger.joint_draws();
    c.ledger.refuter_calls = ledger.refuter_calls();
    if let Some(reference) = c.ledger.reference {
        c.ledger.constant = Some(c.ledger.joint_draws as f64 / reference);
    }
    result
}

fn class(cfg: &ExperimentConfig) -> Result<Arc<ConceptClass>> {
    Ok(Arc::new(enumerate_class(&cfg.class)?))
}

fn source(cfg: &ExperimentConfig, ledger: &Arc<SampleLedger>) -> Arc<dyn ExampleSource> {
    Arc::new(JointSource::new(cfg.joint.clone(), ledger.clone()))
}

fn amplify(base: SharedRefuter, cfg: &ExperimentConfig) -> Result<SharedRefuter> {
    Ok(if cfg.amplification > 1 { Arc::new(Amplified::new(base, cfg.amplification)?) } else { base })
}

fn meter(r: SharedRefuter, ledger: &Arc<SampleLedger>) -> SharedRefuter {
    Arc::new(Metered::new(r, ledger.clone()))
}

fn default_m(cfg: &ExperimentConfig, class: &ConceptClass) -> usize {
    cfg.m.unwrap_or_else(|| correlation_required_sample_size(class.len(), cfg.delta))
}

fn both_regimes(
    cfg: &ExperimentConfig,
    r: &SharedRefuter,
    ledger: &Arc<SampleLedger>,
    c: &mut Collector,
) -> Result<(TrialReport, TrialReport)> {
    let rs = RandomnessStream::new(cfg.seed);
    let structure = run_refuter_trials(r.as_ref(), &Regime::Structure(source(cfg, ledger)), cfg.trials, &rs.child(0))?;
    let noise = run_refuter_trials(r.as_ref(), &Regime::Noise(cfg.joint.marginal().clone()), cfg.trials, &rs.child(1))?;
    c.rate("structure_rate", structure.structure);
    c.rate("noise_rate", noise.noise);
    c.count("failed_trials", structure.failed + noise.failed);
    c.table("trials_structure.csv", structure.to_csv());
    c.table("trials_noise.csv", noise.to_csv());
    Ok((structure, noise))
}

fn rates_pass(structure: &TrialReport, noise: &TrialReport) -> bool {
    structure.structure.wilson95().0 >= TWO_THIRDS && noise.noise.wilson95().0 >= TWO_THIRDS
}

fn refute_test(cfg: &ExperimentConfig, ledger: &Arc<SampleLedger>, c: &mut Collector) -> Result<()> {
    let class = class(cfg)?;
    let m = default_m(cfg, &class);
    c.count("m", m as u64);
    c.count("required_m", correlation_required_sample_size(class.len(), cfg.delta) as u64);
    if let Ok((opt, _)) = exact_opt_correlation(&cfg.joint, &class) {
        c.value("opt_correlation", opt);
    }
    let r = meter(amplify(Arc::new(correlation_refuter(class, cfg.delta, m)?), cfg)?, ledger);
    c.predicate = "wilson95_low(structure_rate) >= 2/3 and wilson95_low(noise_rate) >= 2/3".into();
    let (structure, noise) = both_regimes(cfg, &r, ledger, c)?;
    c.pass = rates_pass(&structure, &noise);
    Ok(())
}

fn learner_as_refuter(cfg: &ExperimentConfig, ledger: &Arc<SampleLedger>, c: &mut Collector) -> Result<()> {
    let class = class(cfg)?;
    if let Ok((opt, _)) = exact_opt_correlation(&cfg.joint, &class) {
        c.value("opt_correlation", opt);
    }
    let learner = Arc::new(erm_learner(class));
    let base = learner_to_refuter(learner.clone(), cfg.delta)?;
    let size = base.sample_size();
    if let Some(m) = cfg.m {
        if m != size {
            return Err(Error::Config(format!("learner refuter needs exactly {size} examples, config says m = {m}")));
        }
    }
    c.count("sample_size", size as u64);
    c.count("learner_requirement", learner.sample_requirement(cfg.delta / 4.0) as u64);
    let r = meter(amplify(Arc::new(base), cfg)?, ledger);
    c.predicate = "wilson95_low(structure_rate) >= 2/3 and wilson95_low(noise_rate) >= 2/3 and \
                   fraction of noise trials with cor_h < delta/2 >= 0.9"
        .into();
    let (structure, noise) = both_regimes(cfg, &r, ledger, c)?;
    let stats: Vec<f64> = noise.records.iter().filter_map(|r| r.statistic).collect();
    let below = stats.iter().filter(|&&s| s < cfg.delta / 2.0).count() as u64;
    let below = RateReport::new(below, stats.len() as u64);
    c.rate("noise_cor_below_half_delta", below);
    c.pass = rates_pass(&structure, &noise) && below.trials > 0 && below.rate() >= 0.9;
    Ok(())
}

fn extract_config(cfg: &ExperimentConfig) -> ExtractConfig {
    ExtractConfig {
        selection: cfg.selection,
        selection_constant: cfg.selection_constant,
        k: cfg.smoothing,
        mode: cfg.context_mode,
        endpoint_trials: 0,
    }
}

/// Endpoint rates on a separate ledger so the learning ledger counts only learning draws.
fn endpoints(cfg: &ExperimentConfig, r: &SharedRefuter, c: &mut Collector) -> Result<()> {
    if cfg.endpoint_trials < 100 {
        return Ok(());
    }
    let diag = SampleLedger::new();
    let (w0, wend) =
        endpoint_rates(r.as_ref(), source(cfg, &diag).as_ref(), cfg.endpoint_trials, &RandomnessStream::new(cfg.seed).child(label::NOISE))?;
    c.rate("w0", w0);
    c.rate("wend", wend);
    c.value("endpoint_gap", w0.rate() - wend.rate());
    c.count("diagnostic_draws", diag.joint_draws());
    Ok(())
}

fn weak_extract(cfg: &ExperimentConfig, ledger: &Arc<SampleLedger>, c: &mut Collector) -> Result<()> {
    let class = class(cfg)?;
    let m = default_m(cfg, &class);
    let base = amplify(Arc::new(CorrelationRefuter::new_unchecked(class.clone(), cfg.delta, m)?), cfg)?;
    endpoints(cfg, &base, c)?;
    let r = meter(base, ledger);
    let (opt, _) = exact_opt_correlation(&cfg.joint, &class)?;
    let spec = WeakLearnerSpec::for_refuter(m, cfg.delta);
    let target = spec.target(opt);
    c.count("m", m as u64);
    c.value("opt_correlation", opt);
    c.value("gamma", spec.gamma);
    c.value("alpha", spec.alpha);
    c.value("target_correlation", target);
    c.predicate = "extracted exact correlation >= gamma*opt - alpha in at least 80% of extractions".into();

    let src = source(cfg, ledger);
    let ecfg = extract_config(cfg);
    let rs = RandomnessStream::new(cfg.seed).child(1);
    let mut rows = String::from("extraction,selected_slot,selection_correlation,exact_correlation,target,pass\n");
    let mut hits = 0u64;
    for e in 0..cfg.trials {
        let ers = rs.child(e as u64);
        let ex = extract_weak_learner(r.clone(), src.clone(), &ecfg, &ers)?;
        let h = ex.hypothesis.clone();
        let vrs = ers.child(label::EVAL);
        let exact = exact_value_correlation(&cfg.joint, |x| h.smoothed(x, &vrs.child(x.bits() as u64)))?;
        let pass = exact >= target;
        hits += pass as u64;
        let sel = ex.diagnostics.selected_slot();
        writeln!(rows, "{e},{},{},{exact},{target},{pass}", sel.slot, sel.correlation).unwrap();
        if e == 0 {
            c.table("slots.csv", ex.diagnostics.to_csv());
            c.count("selection_size", ex.diagnostics.selection_size as u64);
        }
    }
    c.table("extractions.csv", rows);
    let rate = RateReport::new(hits, cfg.trials as u64);
    c.rate("extraction_success", rate);
    c.pass = hits as f64 >= 0.8 * cfg.trials as f64;
    Ok(())
}

fn rademacher(cfg: &ExperimentConfig, c: &mut Collector) -> Result<()> {
    let class = class(cfg)?;
    let m = cfg.m.expect("validated");
    let est =
        rademacher_complexity(&class, cfg.joint.marginal(), m, cfg.rademacher_mode()?, cfg.sup_form, &RandomnessStream::new(cfg.seed))?;
    c.table(
        "rademacher.csv",
        format!("m,value,radius,level,count,mode\n{m},{},{},{},{},{}\n", est.value, est.radius, est.level, est.count, est.mode),
    );
    match cfg.expected {
        Some(x) => {
            c.predicate = format!("|value - {x}| <= max(radius, 1e-12)");
            c.pass = (est.value - x).abs() <= est.radius.max(1e-12);
        }
        None => {
            c.predicate = "value computed".into();
            c.pass = est.value.is_finite();
        }
    }
    c.estimate("rademacher", est);
    Ok(())
}

fn end2end(cfg: &ExperimentConfig, ledger: &Arc<SampleLedger>, c: &mut Collector) -> Result<()> {
    let class = class(cfg)?;
    let m = default_m(cfg, &class);
    let base = amplify(Arc::new(CorrelationRefuter::new_unchecked(class.clone(), cfg.delta, m)?), cfg)?;
    endpoints(cfg, &base, c)?;
    let r = meter(base, ledger);
    let factory = HybridFactory::new(r, extract_config(cfg));
    let spec = factory.spec();
    let mut bcfg = BoostConfig::with_c_t(cfg.epsilon, spec.gamma, spec.alpha, cfg.boost.c_t.unwrap_or(crate::boosting::DEFAULT_C_T))?;
    if let Some(t) = cfg.boost.rounds {
        bcfg.rounds = t;
    }
    if let Some(eta) = cfg.boost.eta {
        bcfg.eta = eta;
    }
    if let Some(mode) = cfg.boost.relabel_mode {
        bcfg.relabel_mode = mode;
    }
    let opt_error = exact_opt_error(&cfg.joint, &class)?;
    let bound = opt_error + cfg.delta / 2.0 + cfg.epsilon / 2.0 + END2END_SLACK;
    c.count("m", m as u64);
    c.value("gamma", spec.gamma);
    c.value("alpha", spec.alpha);
    c.value("eta", bcfg.eta);
    c.count("rounds", bcfg.rounds as u64);
    c.value("opt_error", opt_error);
    c.value("error_bound", bound);
    c.predicate = format!("boosted exact error <= opt_error + delta/2 + epsilon/2 + {END2END_SLACK}");
    c.ledger.reference = Some((m as f64).powi(3) / (cfg.epsilon * cfg.epsilon));

    let rs = RandomnessStream::new(cfg.seed).child(1);
    let outcome = boost(&factory, source(cfg, ledger), &bcfg, &rs, Some(&cfg.joint))?;
    let err = evaluate_error(&outcome.hypothesis, &cfg.joint, ErrorMode::Exact, &rs.child(label::EVAL))?.value;
    c.count("skipped_rounds", outcome.skipped as u64);
    if let Some(first) = outcome.log.first().and_then(|l| l.error) {
        c.value("first_round_error", first);
    }
    if let Some(acc) = outcome.log.last().and_then(|l| l.acceptance) {
        c.value("final_acceptance", acc);
    }
    c.value("boosted_error", err);
    c.value("baseline_margin", 0.5 - err);
    c.table("rounds.csv", outcome.log_csv());
    c.pass = err <= bound;
    Ok(())
}
