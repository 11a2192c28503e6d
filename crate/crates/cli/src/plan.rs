//! Multi-day experiment plans.

use std::path::PathBuf;

use iqdisc::annealer::{AnnealConfig, Objective, RegionKind, ReturnMode};
use iqdisc::metrics::REPORT_BINS;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classifier {
    Linear,
    Circle,
    Ellipse,
}

impl Classifier {
    pub fn name(&self) -> &'static str {
        match self {
            Classifier::Linear => "linear",
            Classifier::Circle => "circle",
            Classifier::Ellipse => "ellipse",
        }
    }

    pub fn region(&self) -> Option<RegionKind> {
        match self {
            Classifier::Linear => None,
            Classifier::Circle => Some(RegionKind::Circle),
            Classifier::Ellipse => Some(RegionKind::Ellipse),
        }
    }

    /// Seed stream of this classifier within a day.
    pub(crate) fn stream(&self) -> u64 {
        match self {
            Classifier::Linear => 0,
            Classifier::Circle => 1,
            Classifier::Ellipse => 2,
        }
    }
}

fn default_classifiers() -> Vec<Classifier> {
    vec![Classifier::Linear, Classifier::Circle, Classifier::Ellipse]
}

fn default_n_iter() -> u64 {
    AnnealConfig::default().n_iter
}

fn default_t0() -> f64 {
    AnnealConfig::default().t0
}

fn default_alpha() -> f64 {
    AnnealConfig::default().alpha
}

fn default_shots() -> usize {
    1024
}

/// Flat TOML plan. `device`, when given, is a device TOML path relative to
/// the plan file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub days: u32,
    pub drift_scale: f64,
    pub train_count: usize,
    pub val_count: usize,
    #[serde(default = "default_shots")]
    pub shots: usize,
    #[serde(default = "default_classifiers")]
    pub classifiers: Vec<Classifier>,
    #[serde(default)]
    pub objective: Objective,
    #[serde(default = "default_n_iter")]
    pub n_iter: u64,
    #[serde(default = "default_t0")]
    pub t0: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub return_mode: ReturnMode,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<PathBuf>,
}

impl ExperimentPlan {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let plan: Self = toml::from_str(text).map_err(|e| e.message().to_string())?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plans always serialize")
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.days < 1 {
            return Err("days must be at least 1".into());
        }
        for (key, n) in [
            ("train_count", self.train_count),
            ("val_count", self.val_count),
        ] {
            if n == 0 || n % REPORT_BINS != 0 {
                return Err(format!(
                    "{key} {n} must be a positive multiple of {REPORT_BINS}"
                ));
            }
        }
        if self.shots == 0 {
            return Err("shots must be positive".into());
        }
        if !(self.drift_scale.is_finite() && self.drift_scale >= 0.0) {
            return Err("drift_scale must be finite and non-negative".into());
        }
        if self.classifiers.is_empty() {
            return Err("classifiers must not be empty".into());
        }
        let mut seen = self.classifiers.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.classifiers.len() {
            return Err("classifiers contains duplicates".into());
        }
        self.anneal(0).validate().map_err(|e| e.to_string())
    }

    pub fn anneal(&self, seed: u64) -> AnnealConfig {
        AnnealConfig {
            n_iter: self.n_iter,
            t0: self.t0,
            alpha: self.alpha,
            seed,
            objective: self.objective,
            mode: self.return_mode,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLAN: &str = "days = 3\ndrift_scale = 0.05\ntrain_count = 20\nval_count = 10\nseed = 7\n";

    #[test]
    fn defaults_fill_optional_keys() {
        let p = ExperimentPlan::from_toml(PLAN).unwrap();
        assert_eq!(p.shots, 1024);
        assert_eq!(p.classifiers, default_classifiers());
        assert_eq!(p.objective, Objective::MedianPlusSpread);
        assert_eq!(p.anneal(5).n_iter, 20_000);
        assert_eq!(ExperimentPlan::from_toml(&p.to_toml()).unwrap(), p);
    }

    #[test]
    fn invariants() {
        let bad = [
            PLAN.replace("days = 3", "days = 0"),
            PLAN.replace("train_count = 20", "train_count = 25"),
            PLAN.replace("val_count = 10", "val_count = 0"),
            format!("{PLAN}classifiers = []\n"),
            format!("{PLAN}classifiers = [\"circle\", \"circle\"]\n"),
            format!("{PLAN}classifiers = [\"square\"]\n"),
            format!("{PLAN}alpha = 1.5\n"),
            format!("{PLAN}colour = 1\n"),
            PLAN.replace("drift_scale = 0.05", "drift_scale = -1.0"),
        ];
        for text in bad {
            assert!(ExperimentPlan::from_toml(&text).is_err(), "{text}");
        }
    }

    #[test]
    fn objective_key_uses_cli_spelling() {
        let p = ExperimentPlan::from_toml(&format!("{PLAN}objective = \"spread\"\n")).unwrap();
        assert_eq!(p.objective, Objective::Spread);
        let p = ExperimentPlan::from_toml(&format!("{PLAN}objective = \"median-plus-spread\"\n"))
            .unwrap();
        assert_eq!(p.objective, Objective::MedianPlusSpread);
    }
}
