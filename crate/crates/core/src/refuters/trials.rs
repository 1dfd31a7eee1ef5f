use std::fmt::Write as _;
use std::sync::Arc;

use super::{Refuter, Verdict};
use crate::distributions::joint::{sample_joint, JointDistribution};
use crate::distributions::marginal::MarginalDistribution;
use crate::distributions::source::{draw_many, ExampleSource};
use crate::distributions::stream::{label, RandomnessStream};
use crate::error::{Error, Result};
use crate::estimators::RateReport;
use crate::exec;

/// The sampling regime of a trial batch.
#[derive(Clone)]
pub enum Regime {
    /// i.i.d. pairs from 𝒟′.
    Structure(Arc<dyn ExampleSource>),
    /// Points from 𝒟 with independent fair-coin labels.
    Noise(MarginalDistribution),
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Structure(_) => "structure",
            Regime::Noise(_) => "noise",
        }
    }

    /// The m-sample of one trial: structured pairs from `rs.child(STRUCTURED)`,
    /// noise pairs from `rs.child(NOISE)`.
    pub fn sample(&self, m: usize, rs: &RandomnessStream) -> Result<Vec<crate::domain::point::LabeledExample>> {
        match self {
            Regime::Structure(src) => draw_many(src.as_ref(), &rs.child(label::STRUCTURED), m),
            Regime::Noise(d) => sample_joint(&JointDistribution::rademacher(d.clone()), &rs.child(label::NOISE), m),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub index: usize,
    /// `None` when the refuter failed on this trial.
    pub verdict: Option<Verdict>,
    pub statistic: Option<f64>,
    pub path: String,
}

#[derive(Debug, Clone)]
pub struct TrialReport {
    pub regime: &'static str,
    pub records: Vec<TrialRecord>,
    pub structure: RateReport,
    pub noise: RateReport,
    pub failed: u64,
}

impl TrialReport {
    pub fn structure_rate(&self) -> f64 {
        self.structure.rate()
    }

    pub fn noise_rate(&self) -> f64 {
        self.noise.rate()
    }

    /// Rate of the verdict that is correct for this regime.
    pub fn correct(&self) -> RateReport {
        if self.regime == "structure" {
            self.structure
        } else {
            self.noise
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,regime,verdict,statistic,seed_path\n");
        for r in &self.records {
            let verdict = r.verdict.map_or("failed".to_string(), |v| v.to_string());
            let stat = r.statistic.map_or(String::new(), |s| s.to_string());
            writeln!(out, "{},{},{},{},{}", r.index, self.regime, verdict, stat, r.path).unwrap();
        }
        out
    }
}

/// Runs `trials` independent trials; trial t samples from `rs.child(t)` and
/// gives the refuter `rs.child(t).child(REFUTER)`.
///
/// Learner failures mark the trial as failed; any other error aborts.
pub fn run_refuter_trials(r: &dyn Refuter, regime: &Regime, trials: usize, rs: &RandomnessStream) -> Result<TrialReport> {
    if trials == 0 {
        return Err(Error::Argument("trials must be at least 1".into()));
    }
    let m = r.sample_size();
    let records = exec::try_map_range(trials, |t| -> Result<TrialRecord> {
        let trs = rs.child(t as u64);
        let sample = regime.sample(m, &trs)?;
        let path = trs.to_string();
        match r.decide(&sample, &trs.child(label::REFUTER)) {
            Ok(d) => Ok(TrialRecord { index: t, verdict: Some(d.verdict), statistic: d.statistic, path }),
            Err(Error::Learner(_)) => Ok(TrialRecord { index: t, verdict: None, statistic: None, path }),
            Err(e) => Err(e),
        }
    })?;
    let structure = records.iter().filter(|r| r.verdict == Some(Verdict::Structure)).count() as u64;
    let noise = records.iter().filter(|r| r.verdict == Some(Verdict::Noise)).count() as u64;
    let decided = structure + noise;
    Ok(TrialReport {
        regime: regime.name(),
        structure: RateReport::new(structure, decided),
        noise: RateReport::new(noise, decided),
        failed: trials as u64 - decided,
        records,
    })
}
