use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::boosting::RelabelMode;
use crate::distributions::joint::JointDistribution;
use crate::domain::class::ClassSpec;
use crate::error::{Error, Result};
use crate::estimators::{RademacherMode, SupForm};
use crate::hybrid::{ContextMode, DEFAULT_SELECTION_CONSTANT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    RefuteTest,
    LearnerAsRefuter,
    WeakExtract,
    Rademacher,
    End2end,
}

impl Experiment {
    pub const ALL: [Experiment; 5] =
        [Experiment::RefuteTest, Experiment::LearnerAsRefuter, Experiment::WeakExtract, Experiment::Rademacher, Experiment::End2end];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::RefuteTest => "refute-test",
            Experiment::LearnerAsRefuter => "learner-as-refuter",
            Experiment::WeakExtract => "weak-extract",
            Experiment::Rademacher => "rademacher",
            Experiment::End2end => "end2end",
        }
    }

    fn default_trials(self) -> usize {
        match self {
            Experiment::RefuteTest | Experiment::LearnerAsRefuter => 300,
            Experiment::WeakExtract => 10,
            Experiment::Rademacher => 2000,
            Experiment::End2end => 1,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| Error::Parse(format!("unknown experiment `{s}`")))
    }
}

/// Optional overrides of the booster's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoostOverrides {
    pub c_t: Option<f64>,
    pub rounds: Option<usize>,
    pub eta: Option<f64>,
    pub relabel_mode: Option<RelabelMode>,
}

/// The config file as written: everything optional except what the
/// experiment cannot do without.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<Experiment>,
    pub seed: Option<u64>,
    pub class: Option<ClassSpec>,
    pub joint: Option<JointDistribution>,
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
    pub m: Option<usize>,
    pub trials: Option<usize>,
    pub smoothing: Option<usize>,
    pub context_mode: Option<ContextMode>,
    pub amplification: Option<usize>,
    pub selection: Option<usize>,
    pub selection_constant: Option<f64>,
    pub endpoint_trials: Option<usize>,
    pub rademacher_mode: Option<String>,
    pub sup_form: Option<SupForm>,
    pub expected: Option<f64>,
    pub sample_budget: Option<u64>,
    #[serde(default)]
    pub boost: BoostOverrides,
}

/// A fully resolved configuration; echoed verbatim into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub class: ClassSpec,
    pub joint: JointDistribution,
    pub delta: f64,
    pub epsilon: f64,
    /// Refuter sample size; `None` means derived by the pipeline.
    pub m: Option<usize>,
    pub trials: usize,
    pub smoothing: usize,
    pub context_mode: ContextMode,
    pub amplification: usize,
    pub selection: usize,
    pub selection_constant: f64,
    pub endpoint_trials: usize,
    pub rademacher_mode: String,
    pub sup_form: SupForm,
    pub expected: Option<f64>,
    pub sample_budget: Option<u64>,
    pub boost: BoostOverrides,
}

pub const DEFAULT_SEED: u64 = 0;

impl ConfigFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    /// Fill defaults. `experiment` overrides (and must agree with) the file's own.
    pub fn resolve(self, experiment: Option<Experiment>) -> Result<ExperimentConfig> {
        let experiment = match (self.experiment, experiment) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!("config names experiment {a} but {b} was requested")));
            }
            (a, b) => b.or(a).ok_or_else(|| Error::Config("no experiment given".into()))?,
        };
        let class = self.class.ok_or_else(|| Error::Config("`class` is required".into()))?;
        let joint = match self.joint {
            Some(j) => j,
            None if experiment == Experiment::Rademacher => {
                JointDistribution::rademacher(crate::distributions::MarginalDistribution::uniform(class.dimension())?)
            }
            None => return Err(Error::Config("`joint` is required".into())),
        };
        let context_mode = match (self.context_mode, self.smoothing) {
            (Some(ContextMode::Frozen(k)), Some(s)) if k != s => {
                return Err(Error::Config(format!("frozen({k}) contexts disagree with smoothing = {s}")));
            }
            (Some(mode), _) => mode,
            (None, Some(s)) => ContextMode::Frozen(s),
            (None, None) => ContextMode::default(),
        };
        let smoothing = self.smoothing.unwrap_or(match context_mode {
            ContextMode::Frozen(k) => k,
            ContextMode::Fresh => 8,
        });
        let cfg = ExperimentConfig {
            experiment,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            class,
            joint,
            delta: self.delta.unwrap_or(0.5),
            epsilon: self.epsilon.unwrap_or(0.1),
            m: self.m,
            trials: self.trials.unwrap_or(experiment.default_trials()),
            smoothing,
            context_mode,
            amplification: self.amplification.unwrap_or(1),
            selection: self.selection.unwrap_or(0),
            selection_constant: self.selection_constant.unwrap_or(DEFAULT_SELECTION_CONSTANT),
            endpoint_trials: self.endpoint_trials.unwrap_or(1000),
            rademacher_mode: self.rademacher_mode.unwrap_or_else(|| "exact".into()),
            sup_form: self.sup_form.unwrap_or_default(),
            expected: self.expected,
            sample_budget: self.sample_budget,
            boost: self.boost,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, experiment: Option<Experiment>) -> Result<Self> {
        ConfigFile::from_toml(text)?.resolve(experiment)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.class.dimension() != self.joint.dimension() {
            return Err(Error::Config(format!(
                "class dimension {} differs from joint dimension {}",
                self.class.dimension(),
                self.joint.dimension()
            )));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::Config(format!("delta {} outside (0, 1]", self.delta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon {} outside (0, 1)", self.epsilon)));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        if self.smoothing == 0 {
            return Err(Error::Config("smoothing must be positive".into()));
        }
        if self.amplification.is_multiple_of(2) {
            return Err(Error::Config("amplification must be odd".into()));
        }
        if self.m == Some(0) {
            return Err(Error::Config("m must be positive".into()));
        }
        if self.experiment == Experiment::Rademacher && self.m.is_none() {
            return Err(Error::Config("rademacher needs `m`".into()));
        }
        self.rademacher_mode()?;
        Ok(())
    }

    /// `exact` or `monte_carlo(<trials>)`.
    pub fn rademacher_mode(&self) -> Result<RademacherMode> {
        let s = self.rademacher_mode.trim();
        if s == "exact" {
            return Ok(RademacherMode::Exact);
        }
        s.strip_prefix("monte_carlo(")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|t| t.trim().parse().ok())
            .filter(|&t: &usize| t > 0)
            .map(|trials| RademacherMode::MonteCarlo { trials })
            .ok_or_else(|| Error::Config(format!("unknown rademacher mode `{s}`")))
    }
}
