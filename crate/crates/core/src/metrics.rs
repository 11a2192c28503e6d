//! Output-error statistics.
//!
//! A run's output error is `|correct_p0 − observed_p0| × 100`. Sets of runs
//! are summarized by their median, 25th/75th percentile and spread
//! (p75 − p25), globally and per correct-probability bin.

use serde::{Deserialize, Serialize};

use crate::qmath::bin_index;
use crate::{Error, Result};

/// Bins used by [`summarize`].
pub const REPORT_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunError {
    pub correct_p0: f64,
    pub observed_p0: f64,
    pub error_pct: f64,
    /// The classifier captured no shot of this run.
    #[serde(default)]
    pub degenerate: bool,
}

impl RunError {
    pub fn new(correct_p0: f64, observed_p0: f64, degenerate: bool) -> Result<Self> {
        Ok(Self {
            correct_p0,
            observed_p0,
            error_pct: run_error(correct_p0, observed_p0)?,
            degenerate,
        })
    }
}

pub fn run_error(correct_p0: f64, observed_p0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&correct_p0) || !(0.0..=1.0).contains(&observed_p0) {
        return Err(Error::invalid(format!(
            "probabilities must lie in [0, 1], got {correct_p0} and {observed_p0}"
        )));
    }
    Ok((correct_p0 - observed_p0).abs() * 100.0)
}

/// Linear interpolation between order statistics at index `p · (n − 1)`
/// (the "type 7" convention).
pub fn percentile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("percentile of an empty list"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "percentile fraction {p} outside [0, 1]"
        )));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("percentile input contains NaN"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(percentile_sorted(&sorted, p))
}

/// [`percentile`] on already-sorted, non-empty input.
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinStats {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// `None` for a bin without runs.
    pub median: Option<f64>,
    pub spread: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorStats {
    pub median: f64,
    pub p25: f64,
    pub p75: f64,
    pub spread: f64,
    pub per_bin: Vec<BinStats>,
    pub degenerate_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Median,
    P25,
    P75,
    Spread,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Median, Metric::P25, Metric::P75, Metric::Spread];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Median => "median",
            Metric::P25 => "p25",
            Metric::P75 => "p75",
            Metric::Spread => "spread",
        }
    }
}

impl ErrorStats {
    pub fn metric(&self, m: Metric) -> f64 {
        match m {
            Metric::Median => self.median,
            Metric::P25 => self.p25,
            Metric::P75 => self.p75,
            Metric::Spread => self.spread,
        }
    }

    /// Largest minus smallest per-bin median over non-empty bins.
    pub fn bin_median_range(&self) -> f64 {
        let medians = self.per_bin.iter().filter_map(|b| b.median);
        let (lo, hi) = medians.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| {
            (lo.min(m), hi.max(m))
        });
        if lo.is_finite() {
            hi - lo
        } else {
            0.0
        }
    }

    pub fn csv_header() -> String {
        let mut cols = vec![
            "median".to_string(),
            "p25".into(),
            "p75".into(),
            "spread".into(),
        ];
        for k in 0..REPORT_BINS {
            cols.push(format!("bin{k}_median"));
            cols.push(format!("bin{k}_spread"));
        }
        cols.push("degenerate_count".into());
        cols.join(",")
    }

    /// Flat CSV row matching [`ErrorStats::csv_header`]; empty bins leave
    /// their fields blank.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut cols = vec![
            self.median.to_string(),
            self.p25.to_string(),
            self.p75.to_string(),
            self.spread.to_string(),
        ];
        for b in &self.per_bin {
            cols.push(opt(b.median));
            cols.push(opt(b.spread));
        }
        cols.push(self.degenerate_count.to_string());
        cols.join(",")
    }
}

struct Quartiles {
    p25: f64,
    median: f64,
    p75: f64,
}

fn quartiles(values: &[f64]) -> Quartiles {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Quartiles {
        p25: percentile_sorted(&sorted, 0.25),
        median: percentile_sorted(&sorted, 0.5),
        p75: percentile_sorted(&sorted, 0.75),
    }
}

pub fn summarize(runs: &[RunError]) -> Result<ErrorStats> {
    if runs.is_empty() {
        return Err(Error::invalid("no runs to summarize"));
    }
    for r in runs {
        if !(0.0..=1.0).contains(&r.correct_p0) || !r.error_pct.is_finite() {
            return Err(Error::invalid(format!(
                "run with correct_p0 {} / error {} cannot be binned",
                r.correct_p0, r.error_pct
            )));
        }
    }
    let all: Vec<f64> = runs.iter().map(|r| r.error_pct).collect();
    let q = quartiles(&all);
    let mut binned: Vec<Vec<f64>> = vec![Vec::new(); REPORT_BINS];
    for r in runs {
        binned[bin_index(r.correct_p0, REPORT_BINS)].push(r.error_pct);
    }
    let per_bin = binned
        .iter()
        .enumerate()
        .map(|(k, errs)| {
            let (median, spread) = if errs.is_empty() {
                (None, None)
            } else {
                let q = quartiles(errs);
                (Some(q.median), Some(q.p75 - q.p25))
            };
            BinStats {
                lo: k as f64 / REPORT_BINS as f64,
                hi: (k + 1) as f64 / REPORT_BINS as f64,
                count: errs.len(),
                median,
                spread,
            }
        })
        .collect();
    Ok(ErrorStats {
        median: q.median,
        p25: q.p25,
        p75: q.p75,
        spread: q.p75 - q.p25,
        per_bin,
        degenerate_count: runs.iter().filter(|r| r.degenerate).count(),
    })
}

/// Spread (p75 − p25) of one metric across days.
pub fn daily_variability(per_day: &[ErrorStats], metric: Metric) -> Result<f64> {
    if per_day.len() < 2 {
        return Err(Error::invalid("daily variability needs at least two days"));
    }
    let values: Vec<f64> = per_day.iter().map(|s| s.metric(metric)).collect();
    let q = quartiles(&values);
    Ok(q.p75 - q.p25)
}

/// Probability that at least one of `gate_count` independent gates fails.
pub fn compound_error(per_gate_error: f64, gate_count: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&per_gate_error) {
        return Err(Error::invalid(format!(
            "per-gate error {per_gate_error} outside [0, 1]"
        )));
    }
    if gate_count == 0 {
        return Err(Error::invalid("gate count must be positive"));
    }
    Ok(1.0 - (1.0 - per_gate_error).powi(gate_count as i32))
}
