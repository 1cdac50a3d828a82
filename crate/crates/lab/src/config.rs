//! Experiment configuration: a TOML file mirroring the CLI flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use subquery_core::graph::{builtin_from_spec, parse_graph};
use subquery_core::strategies::STRATEGY_NAMES;
use subquery_core::{PatternGraph, StrategyParams};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub strategy: String,
    /// Builtin spec such as `triforce` or `book:2,3`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    /// Edge-list file; takes precedence over `graph`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_file: Option<PathBuf>,
    pub p: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: StrategyParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Worker threads. Never written to result files.
    #[serde(default = "default_jobs", skip_serializing)]
    pub jobs: usize,
}

fn default_trials() -> u64 {
    100
}

fn default_jobs() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(strategy: &str, graph: &str, p: Vec<f64>, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            strategy: strategy.to_string(),
            graph: Some(graph.to_string()),
            graph_file: None,
            p,
            trials,
            seed,
            params: StrategyParams::default(),
            out: None,
            jobs: 1,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !STRATEGY_NAMES.contains(&self.strategy.as_str()) {
            return Err(LabError::Config(format!(
                "unknown strategy `{}` (expected one of {})",
                self.strategy,
                STRATEGY_NAMES.join(", ")
            )));
        }
        if self.graph.is_none() && self.graph_file.is_none() {
            return Err(LabError::Config("no graph given".into()));
        }
        if self.p.is_empty() {
            return Err(LabError::Config("p grid is empty".into()));
        }
        if let Some(p) = self.p.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(LabError::Config(format!("p must lie in (0, 1), got {p}")));
        }
        if self.trials == 0 {
            return Err(LabError::Config("trials must be >= 1".into()));
        }
        if self.jobs == 0 {
            return Err(LabError::Config("jobs must be >= 1".into()));
        }
        self.params
            .validate()
            .map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn load_graph(&self) -> Result<PatternGraph> {
        if let Some(path) = &self.graph_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
            let parsed = parse_graph(&text)
                .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
            return Ok(parsed.graph);
        }
        let spec = self.graph.as_deref().unwrap_or_default();
        builtin_from_spec(spec).map_err(|e| LabError::Config(format!("graph `{spec}`: {e}")))
    }

    /// Short label of the graph for metadata lines.
    pub fn graph_label(&self) -> String {
        match (&self.graph_file, &self.graph) {
            (Some(path), _) => path.display().to_string(),
            (None, Some(spec)) => spec.clone(),
            (None, None) => String::new(),
        }
    }
}

/// Parses `0.001`, `1/1024` or `2^-10`.
pub fn parse_probability(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let v = if let Some(e) = s.strip_prefix("2^") {
        let e: i32 = e.parse().map_err(|_| format!("bad exponent in `{s}`"))?;
        2f64.powi(e)
    } else if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in `{s}`"))?;
        let b: f64 = b
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in `{s}`"))?;
        a / b
    } else {
        s.parse().map_err(|_| format!("bad probability `{s}`"))?
    };
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("p must lie in (0, 1), got {s}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let text = r#"
            strategy = "trivial"
            graph = "triforce"
            p = [0.0078125, 0.00390625]
            trials = 20
            seed = 7
            jobs = 4
            [params]
            max_restarts = 8
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.jobs, 4);
        assert_eq!(cfg.params.max_restarts, 8);
        assert_eq!(
            cfg.params.pool_multiplier,
            StrategyParams::default().pool_multiplier
        );
        let out = toml::to_string(&cfg).unwrap();
        assert!(!out.contains("jobs"));
        let back = ExperimentConfig::from_toml(&out).unwrap();
        assert_eq!(back.p, cfg.p);
        assert_eq!(back.jobs, 1);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = ExperimentConfig::new("trivial", "triforce", vec![0.5], 1, 0);
        cfg.validate().unwrap();
        cfg.p.clear();
        assert!(matches!(cfg.validate(), Err(LabError::Config(_))));
        cfg.p = vec![1.0];
        assert!(cfg.validate().is_err());
        cfg.p = vec![0.5];
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
        cfg.trials = 1;
        cfg.strategy = "magic".into();
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::from_toml("strategy = 1").is_err());
    }

    #[test]
    fn probabilities() {
        assert_eq!(parse_probability("2^-10"), Ok(1.0 / 1024.0));
        assert_eq!(parse_probability("1/8"), Ok(0.125));
        assert_eq!(parse_probability("0.25"), Ok(0.25));
        assert!(parse_probability("2^3").is_err());
        assert!(parse_probability("0").is_err());
        assert!(parse_probability("x").is_err());
    }
}
