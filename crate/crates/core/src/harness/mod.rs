//! Named pipelines, seeded reports and their on-disk form.

mod config;
mod pipelines;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{Estimate, RateReport};

pub use config::{BoostOverrides, ConfigFile, Experiment, ExperimentConfig, DEFAULT_SEED};

/// One reported quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    Value { value: f64 },
    Count { value: u64 },
    Estimate(Estimate),
    Rate { successes: u64, trials: u64, rate: f64, wilson_low: f64, wilson_high: f64 },
}

impl Metric {
    pub fn rate(r: RateReport) -> Self {
        let (lo, hi) = r.wilson95();
        Metric::Rate { successes: r.successes, trials: r.trials, rate: r.rate(), wilson_low: lo, wilson_high: hi }
    }

    /// The headline number.
    pub fn value(&self) -> f64 {
        match self {
            Metric::Value { value } => *value,
            Metric::Count { value } => *value as f64,
            Metric::Estimate(e) => e.value,
            Metric::Rate { rate, .. } => *rate,
        }
    }
}

/// Sample consumption. The O(m³/ε²) budget is reported as a measured constant.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Ledger {
    pub joint_draws: u64,
    pub refuter_calls: u64,
    /// m³/ε² for pipelines that boost.
    pub reference: Option<f64>,
    /// joint_draws / reference.
    pub constant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub predicate: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub metrics: BTreeMap<String, Metric>,
    pub ledger: Ledger,
    pub verdict: Verdict,
    pub error: Option<String>,
    pub wall_time_secs: f64,
}

impl ExperimentReport {
    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.get(name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// The JSON report with wall time zeroed; equal across replays.
    pub fn replay_json(&self) -> String {
        ExperimentReport { wall_time_secs: 0.0, ..self.clone() }.to_json()
    }

    pub fn metrics_csv(&self) -> String {
        let mut out = String::from("metric,kind,value,radius,low,high,count\n");
        for (name, m) in &self.metrics {
            let row = match m {
                Metric::Value { value } => format!("{name},value,{value},,,,"),
                Metric::Count { value } => format!("{name},count,{value},,,,"),
                Metric::Estimate(e) => format!("{name},estimate,{},{},,,{}", e.value, e.radius, e.count),
                Metric::Rate { successes: _, trials, rate, wilson_low, wilson_high } => {
                    format!("{name},rate,{rate},,{wilson_low},{wilson_high},{trials}")
                }
            };
            out.push_str(&row);
            out.push('\n');
        }
        out
    }
}

/// A report plus the plot-ready tables produced alongside it.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub report: ExperimentReport,
    /// (file name, CSV text).
    pub tables: Vec<(String, String)>,
}

impl ExperimentRun {
    /// Writes `report.json`, `metrics.csv` and every table into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.report.to_json())?;
        fs::write(dir.join("metrics.csv"), self.report.metrics_csv())?;
        for (name, csv) in &self.tables {
            fs::write(dir.join(name), csv)?;
        }
        Ok(())
    }
}

/// Shared by the pipelines while they run.
#[derive(Default)]
pub(crate) struct Collector {
    pub metrics: BTreeMap<String, Metric>,
    pub tables: Vec<(String, String)>,
    pub ledger: Ledger,
    pub predicate: String,
    pub pass: bool,
}

impl Collector {
    pub fn value(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.into(), Metric::Value { value });
    }

    pub fn count(&mut self, name: &str, value: u64) {
        self.metrics.insert(name.into(), Metric::Count { value });
    }

    pub fn rate(&mut self, name: &str, r: RateReport) {
        self.metrics.insert(name.into(), Metric::rate(r));
    }

    pub fn estimate(&mut self, name: &str, e: Estimate) {
        self.metrics.insert(name.into(), Metric::Estimate(e));
    }

    pub fn table(&mut self, name: &str, csv: String) {
        self.tables.push((name.into(), csv));
    }
}

/// Runs the configured pipeline. Failures inside the pipeline produce a
/// failing report carrying the error, never a panic or a missing report.
pub fn run_experiment(cfg: &ExperimentConfig) -> ExperimentRun {
    let start = Instant::now();
    let mut c = Collector::default();
    let error = cfg.validate().and_then(|_| pipelines::run(cfg, &mut c)).err();
    if error.is_some() {
        c.pass = false;
    }
    ExperimentRun {
        report: ExperimentReport {
            config: cfg.clone(),
            metrics: c.metrics,
            ledger: c.ledger,
            verdict: Verdict { pass: c.pass, predicate: c.predicate },
            error: error.map(|e| e.to_string()),
            wall_time_secs: start.elapsed().as_secs_f64(),
        },
        tables: c.tables,
    }
}

/// Parses a TOML config file and resolves it.
pub fn load_config(path: &Path, experiment: Option<Experiment>) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ExperimentConfig::from_toml(&text, experiment)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str, exp: Experiment) -> ExperimentConfig {
        ExperimentConfig::from_toml(text, Some(exp)).unwrap()
    }

    const SMALL: &str = r#"
seed = 3
class = "dictators_with_negations(4)"
joint = 'joint{marginal=uniform(4), labels=concept_noisy("dict:+2", 0.1)}'
delta = 0.5
"#;

    #[test]
    fn rademacher_matches_expected() {
        let c = cfg("class = \"explicit(3;dict:+1)\"\nm = 4\nexpected = 0.375\n", Experiment::Rademacher);
        let run = run_experiment(&c);
        assert!(run.report.verdict.pass, "{:?}", run.report);
        assert!((run.report.metric("rademacher").unwrap().value() - 0.375).abs() < 1e-12);
    }

    #[test]
    fn refute_test_passes_and_charges_ledger() {
        let c = cfg(&format!("{SMALL}trials = 60\n"), Experiment::RefuteTest);
        let run = run_experiment(&c);
        assert!(run.report.error.is_none(), "{:?}", run.report.error);
        assert!(run.report.verdict.pass);
        let m = run.report.metric("m").unwrap().value() as u64;
        assert_eq!(run.report.ledger.refuter_calls, 120);
        assert_eq!(run.report.ledger.joint_draws, 60 * m);
        assert!(run.tables.iter().any(|(n, _)| n == "trials_noise.csv"));
    }

    #[test]
    fn failures_become_failing_reports() {
        let c = cfg(&format!("{SMALL}m = 10\n"), Experiment::LearnerAsRefuter);
        let run = run_experiment(&c);
        assert!(!run.report.verdict.pass);
        assert!(run.report.error.as_deref().unwrap().contains("exactly"));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let c = cfg(&format!("{SMALL}trials = 60\nsample_budget = 100\n"), Experiment::RefuteTest);
        let run = run_experiment(&c);
        assert!(!run.report.verdict.pass);
        assert!(run.report.error.is_some());
    }

    #[test]
    fn small_end2end_replays_and_writes() {
        let text = format!("{SMALL}m = 8\nepsilon = 0.3\nendpoint_trials = 0\n[boost]\nrounds = 4\n");
        let c = cfg(&text, Experiment::End2end);
        let a = run_experiment(&c);
        let b = run_experiment(&c);
        assert!(a.report.error.is_none(), "{:?}", a.report.error);
        assert_eq!(a.report.replay_json(), b.report.replay_json());
        assert_eq!(a.report.metric("rounds").unwrap().value(), 4.0);
        assert!(a.report.ledger.constant.is_some());
        let dir = tempfile::tempdir().unwrap();
        a.write(dir.path()).unwrap();
        let json = fs::read_to_string(dir.path().join("report.json")).unwrap();
        let back: ExperimentReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a.report);
        assert!(dir.path().join("rounds.csv").exists());
        assert!(fs::read_to_string(dir.path().join("metrics.csv")).unwrap().starts_with("metric,"));
    }
}
