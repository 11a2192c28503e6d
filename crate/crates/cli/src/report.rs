//! Evaluation reports and comparison tables.

use iqdisc::annealer::TrainingSet;
use iqdisc::discriminators::Model;
use iqdisc::metrics::{summarize, ErrorStats, RunError};
use iqdisc::sim::RunRecord;
use iqdisc::Result;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalReport {
    pub classifier: String,
    pub runs: usize,
    pub stats: ErrorStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_run: Option<Vec<RunError>>,
}

/// Per-run errors of `model` on `runs`.
pub fn run_errors(model: &Model, runs: &[RunRecord]) -> Result<Vec<RunError>> {
    let set = TrainingSet::new(runs, model.norm)?;
    Ok(set.run_errors(&model.discriminator))
}

pub fn evaluate(model: &Model, runs: &[RunRecord], per_run: bool) -> Result<EvalReport> {
    let errors = run_errors(model, runs)?;
    Ok(EvalReport {
        classifier: model.discriminator.kind().to_string(),
        runs: errors.len(),
        stats: summarize(&errors)?,
        per_run: per_run.then_some(errors),
    })
}

/// `label,median,p75,spread` rows, one per report.
pub fn comparison_csv<'a>(rows: impl IntoIterator<Item = (&'a str, &'a ErrorStats)>) -> String {
    let mut out = String::from("label,median,p75,spread\n");
    for (label, s) in rows {
        out.push_str(&format!("{},{},{},{}\n", label, s.median, s.p75, s.spread));
    }
    out
}
