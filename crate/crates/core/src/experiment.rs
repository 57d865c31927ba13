//! Batch experiments: generate instances, resolve them under several rules
//! and average the metrics.
//!
//! Configurations are TOML:
//!
//! ```toml
//! seed = 7
//! instances = 100
//! rules = ["dfd", "bfd", "minsum", "leximax", "diffusion", "borda"]
//! truncation = [0, 1, 2, 3, 4, 5]
//!
//! [generator]
//! method = "friendship"
//! n = 200
//! p_c = 0.2
//! avg_degree = 4
//! alpha = 2
//! ```

use std::path::PathBuf;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::EdgeList;
use crate::generate::{generate, isolated_fraction, GenConfig};
use crate::metrics::{aggregate, compute_metrics, csv_mean_row, MeanRecord, MetricsRecord, CSV_HEADER};
use crate::model::{Instance, Rank};
use crate::num::{fmt_sig6, to_f64};
use crate::rng::child_seed;
use crate::rule::Rule;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub instances: usize,
    /// Rule names; all six shipped rules when absent.
    #[serde(default)]
    pub rules: Option<Vec<String>>,
    /// Out-degree caps for the isolated-voter sweep.
    #[serde(default)]
    pub truncation: Vec<Rank>,
    /// Edge-list file for base-graph generators, relative to the config file.
    #[serde(default)]
    pub base: Option<PathBuf>,
    pub generator: GenConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.generator.validate()?;
        if cfg.instances == 0 {
            return Err(Error::InvalidConfig("at least one instance is required".into()));
        }
        cfg.parsed_rules()?;
        Ok(cfg)
    }

    pub fn parsed_rules(&self) -> Result<Vec<Rule>> {
        match &self.rules {
            None => Ok(Rule::all()),
            Some(names) => names.iter().map(|s| s.parse()).collect(),
        }
    }

    /// Generator settings of the `i`-th instance.
    pub fn instance_config(&self, i: usize) -> GenConfig {
        self.generator.with_seed(child_seed(self.seed, i as u64))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleSummary {
    pub rule: String,
    pub mean: MeanRecord,
    pub records: Vec<MetricsRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncationPoint {
    pub cap: Rank,
    pub mean_isolated_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub instances: usize,
    pub rules: Vec<RuleSummary>,
    /// Instances on which the Borda branching is popular, when Borda ran.
    pub borda_popular: Option<usize>,
    pub truncation: Vec<TruncationPoint>,
}

impl ExperimentReport {
    pub fn summary(&self, rule: &str) -> Option<&RuleSummary> {
        self.rules.iter().find(|s| s.rule == rule)
    }

    pub fn borda_popular_fraction(&self) -> Option<f64> {
        self.borda_popular.map(|k| k as f64 / self.instances as f64)
    }

    /// Header plus one averaged row per rule.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for s in &self.rules {
            out.push_str(&csv_mean_row(&format!("mean{}", self.instances), &s.rule, &s.mean));
            out.push('\n');
        }
        out
    }

    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        if let Some(f) = self.borda_popular_fraction() {
            out.push_str(&format!(
                "borda popular in {} of {} instances ({}%)\n",
                self.borda_popular.unwrap(),
                self.instances,
                fmt_sig6(100.0 * f)
            ));
        }
        for p in &self.truncation {
            out.push_str(&format!("cap {}: isolated fraction {}\n", p.cap, fmt_sig6(p.mean_isolated_fraction)));
        }
        out
    }
}

struct InstanceOutcome {
    records: Vec<MetricsRecord>,
    isolated: Vec<crate::Rational>,
}

fn run_instance(instance: &Instance, rules: &[Rule], caps: &[Rank]) -> Result<InstanceOutcome> {
    let records = rules
        .iter()
        .map(|rule| compute_metrics(instance, &rule.resolve(instance)?, rule.is_confluent()))
        .collect::<Result<Vec<_>>>()?;
    let isolated = caps.iter().map(|&d| isolated_fraction(&instance.truncated(d))).collect();
    Ok(InstanceOutcome { records, isolated })
}

/// Runs the whole batch. Instance `i` uses seed `child_seed(seed, i)`, so
/// results do not depend on the number of worker threads.
pub fn run_experiment(cfg: &ExperimentConfig, base: Option<&EdgeList>) -> Result<ExperimentReport> {
    let rules = cfg.parsed_rules()?;
    let outcomes: Vec<InstanceOutcome> = (0..cfg.instances)
        .into_par_iter()
        .map(|i| {
            let inst = generate(&cfg.instance_config(i), base)?;
            run_instance(&inst, &rules, &cfg.truncation)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summaries = Vec::new();
    let mut borda_popular = None;
    for (k, rule) in rules.iter().enumerate() {
        let records: Vec<MetricsRecord> = outcomes.iter().map(|o| o.records[k].clone()).collect();
        if matches!(rule, Rule::Borda(_)) {
            borda_popular = Some(records.iter().filter(|r| r.unpop.as_ref().is_some_and(Zero::is_zero)).count());
        }
        summaries.push(RuleSummary { rule: rule.name(), mean: aggregate(&records)?, records });
    }
    let truncation = cfg
        .truncation
        .iter()
        .enumerate()
        .map(|(k, &cap)| {
            let total: f64 = outcomes.iter().map(|o| to_f64(&o.isolated[k])).sum();
            TruncationPoint { cap, mean_isolated_fraction: total / outcomes.len() as f64 }
        })
        .collect();
    Ok(ExperimentReport { instances: cfg.instances, rules: summaries, borda_popular, truncation })
}
