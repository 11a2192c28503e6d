//! Multi-day studies.
//!
//! Each day drifts the device, simulates fresh training and validation
//! sets, fits or trains every planned classifier and evaluates it on that
//! day's validation set. Afterwards the best single-day model of each
//! classifier (lowest validation objective on its own day) is applied to
//! every day and compared with the day-specific models.
//!
//! Every unit of work draws from its own derived seed, so days run in
//! parallel and the output tree is identical to a serial run.

use std::path::Path;

use iqdisc::annealer::{anneal, Objective};
use iqdisc::datastore::{device_to_toml, to_json, write_text};
use iqdisc::discriminators::{fit_linear, Model};
use iqdisc::metrics::{daily_variability, summarize, ErrorStats, Metric, RunError, REPORT_BINS};
use iqdisc::qmath::{generate_benchmarks, BenchmarkSet};
use iqdisc::seed::derive_seed;
use iqdisc::sim::{perturb_device, simulate_dataset, DeviceModel, RunRecord};
use iqdisc::Result;
use rayon::prelude::*;
use serde::Serialize;

use crate::plan::{Classifier, ExperimentPlan};
use crate::report::{comparison_csv, run_errors, EvalReport};

const TRAIN_BENCHMARKS: u64 = 0;
const VAL_BENCHMARKS: u64 = 1;
const FIRST_DAY: u64 = 2;

const DAY_DRIFT: u64 = 0;
const DAY_TRAIN: u64 = 1;
const DAY_VAL: u64 = 2;
const DAY_CLASSIFIERS: u64 = 3;

pub const VARIABILITY_NOTE: &str = "daily variability needs at least two days; omitted";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DaySeeds {
    pub day: u32,
    /// Day index handed to the device perturbation (`simulate --day`).
    pub drift_index: u64,
    pub train_seed: u64,
    pub val_seed: u64,
}

impl DaySeeds {
    fn new(root: u64, day: u32) -> Self {
        let s = derive_seed(root, FIRST_DAY + day as u64);
        Self {
            day,
            drift_index: derive_seed(s, DAY_DRIFT),
            train_seed: derive_seed(s, DAY_TRAIN),
            val_seed: derive_seed(s, DAY_VAL),
        }
    }

    fn classifier_seed(&self, root: u64, c: Classifier) -> u64 {
        let s = derive_seed(root, FIRST_DAY + self.day as u64);
        derive_seed(s, DAY_CLASSIFIERS + c.stream())
    }
}

#[derive(Debug, Clone)]
pub struct Trained {
    pub classifier: Classifier,
    pub model: Model,
    pub errors: Vec<RunError>,
    pub stats: ErrorStats,
}

#[derive(Debug, Clone)]
pub struct DayResult {
    pub seeds: DaySeeds,
    pub device: DeviceModel,
    pub validation: Vec<RunRecord>,
    pub trained: Vec<Trained>,
}

impl DayResult {
    pub fn get(&self, c: Classifier) -> Option<&Trained> {
        self.trained.iter().find(|t| t.classifier == c)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedVsFresh {
    pub classifier: Classifier,
    pub fixed_day: u32,
    pub fresh: Vec<ErrorStats>,
    pub fixed: Vec<ErrorStats>,
    pub pooled_fresh: ErrorStats,
    pub pooled_fixed: ErrorStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct Variability {
    pub classifier: Classifier,
    pub median: f64,
    pub p25: f64,
    pub p75: f64,
    pub spread: f64,
}

#[derive(Debug, Clone)]
pub struct StudyResult {
    pub plan: ExperimentPlan,
    pub device: DeviceModel,
    pub train_benchmarks: BenchmarkSet,
    pub val_benchmarks: BenchmarkSet,
    pub days: Vec<DayResult>,
    pub fixed_vs_fresh: Vec<FixedVsFresh>,
    /// `None` for single-day plans.
    pub variability: Option<Vec<Variability>>,
}

pub fn objective_of(stats: &ErrorStats, objective: Objective) -> f64 {
    match objective {
        Objective::Median => stats.median,
        Objective::Spread => stats.spread,
        Objective::MedianPlusSpread => stats.median + stats.spread,
    }
}

fn train_one(
    plan: &ExperimentPlan,
    seeds: &DaySeeds,
    c: Classifier,
    training: &iqdisc::sim::Dataset,
    validation: &[RunRecord],
) -> Result<Trained> {
    let model = match c.region() {
        None => fit_linear(&training.calibration0, &training.calibration1)?,
        Some(kind) => anneal(
            training,
            kind,
            &plan.anneal(seeds.classifier_seed(plan.seed, c)),
        )?
        .model(),
    };
    let errors = run_errors(&model, validation)?;
    let stats = summarize(&errors)?;
    Ok(Trained {
        classifier: c,
        model,
        errors,
        stats,
    })
}

fn run_day(
    plan: &ExperimentPlan,
    base: &DeviceModel,
    train_b: &BenchmarkSet,
    val_b: &BenchmarkSet,
    day: u32,
) -> Result<DayResult> {
    let seeds = DaySeeds::new(plan.seed, day);
    let device = perturb_device(base, seeds.drift_index, plan.drift_scale);
    let training = simulate_dataset(&device, train_b, plan.shots, seeds.train_seed)?;
    let validation = simulate_dataset(&device, val_b, plan.shots, seeds.val_seed)?.runs;
    let trained = plan
        .classifiers
        .par_iter()
        .map(|&c| train_one(plan, &seeds, c, &training, &validation))
        .collect::<Result<Vec<_>>>()?;
    Ok(DayResult {
        seeds,
        device,
        validation,
        trained,
    })
}

fn fixed_vs_fresh(
    plan: &ExperimentPlan,
    days: &[DayResult],
    c: Classifier,
) -> Result<FixedVsFresh> {
    let own = |d: &DayResult| {
        objective_of(
            &d.get(c).expect("every day trains every classifier").stats,
            plan.objective,
        )
    };
    let best = days
        .iter()
        .min_by(|a, b| own(a).total_cmp(&own(b)))
        .expect("plans have at least one day");
    let model = best.get(c).expect("trained").model;
    let fixed_errors = days
        .par_iter()
        .map(|d| run_errors(&model, &d.validation))
        .collect::<Result<Vec<_>>>()?;
    let fresh_errors: Vec<&[RunError]> = days
        .iter()
        .map(|d| &d.get(c).expect("trained").errors[..])
        .collect();
    let pooled = |sets: &mut dyn Iterator<Item = &[RunError]>| -> Result<ErrorStats> {
        summarize(&sets.flat_map(|s| s.iter().copied()).collect::<Vec<_>>())
    };
    Ok(FixedVsFresh {
        classifier: c,
        fixed_day: best.seeds.day,
        fresh: days
            .iter()
            .map(|d| d.get(c).expect("trained").stats.clone())
            .collect(),
        fixed: fixed_errors
            .iter()
            .map(|e| summarize(e))
            .collect::<Result<_>>()?,
        pooled_fresh: pooled(&mut fresh_errors.iter().copied())?,
        pooled_fixed: pooled(&mut fixed_errors.iter().map(|e| &e[..]))?,
    })
}

fn variability(days: &[DayResult], c: Classifier) -> Result<Variability> {
    let stats: Vec<ErrorStats> = days
        .iter()
        .map(|d| d.get(c).expect("trained").stats.clone())
        .collect();
    let v = |m| daily_variability(&stats, m);
    Ok(Variability {
        classifier: c,
        median: v(Metric::Median)?,
        p25: v(Metric::P25)?,
        p75: v(Metric::P75)?,
        spread: v(Metric::Spread)?,
    })
}

/// Run `plan` on `device` (the undrifted device).
pub fn run_study(plan: &ExperimentPlan, device: &DeviceModel) -> Result<StudyResult> {
    plan.validate().map_err(iqdisc::Error::InvalidInput)?;
    device.validate()?;
    let train_b = generate_benchmarks(
        plan.train_count,
        REPORT_BINS,
        derive_seed(plan.seed, TRAIN_BENCHMARKS),
    )?;
    let val_b = generate_benchmarks(
        plan.val_count,
        REPORT_BINS,
        derive_seed(plan.seed, VAL_BENCHMARKS),
    )?;
    let days = (0..plan.days)
        .into_par_iter()
        .map(|d| run_day(plan, device, &train_b, &val_b, d))
        .collect::<Result<Vec<_>>>()?;
    let fixed = plan
        .classifiers
        .iter()
        .map(|&c| fixed_vs_fresh(plan, &days, c))
        .collect::<Result<Vec<_>>>()?;
    let variability = if days.len() >= 2 {
        Some(
            plan.classifiers
                .iter()
                .map(|&c| variability(&days, c))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    Ok(StudyResult {
        plan: plan.clone(),
        device: device.clone(),
        train_benchmarks: train_b,
        val_benchmarks: val_b,
        days,
        fixed_vs_fresh: fixed,
        variability,
    })
}

#[derive(Serialize)]
struct PooledSummary<'a> {
    classifier: Classifier,
    fixed_day: u32,
    pooled_fresh: &'a ErrorStats,
    pooled_fixed: &'a ErrorStats,
}

#[derive(Serialize)]
struct Summary<'a> {
    days: Vec<DaySeeds>,
    fixed_vs_fresh: Vec<PooledSummary<'a>>,
    variability: Option<&'a [Variability]>,
    notes: Vec<&'static str>,
}

impl StudyResult {
    pub fn notes(&self) -> Vec<&'static str> {
        match self.variability {
            Some(_) => vec![],
            None => vec![VARIABILITY_NOTE],
        }
    }

    pub fn days_csv(&self) -> String {
        let mut out = format!("day,classifier,{}\n", ErrorStats::csv_header());
        for d in &self.days {
            for t in &d.trained {
                out.push_str(&format!(
                    "{},{},{}\n",
                    d.seeds.day,
                    t.classifier.name(),
                    t.stats.csv_row()
                ));
            }
        }
        out
    }

    pub fn variability_csv(&self) -> Option<String> {
        let rows = self.variability.as_ref()?;
        let mut out = String::from("classifier,median,p25,p75,spread\n");
        for v in rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                v.classifier.name(),
                v.median,
                v.p25,
                v.p75,
                v.spread
            ));
        }
        Some(out)
    }

    pub fn fixed_vs_fresh_csv(&self) -> String {
        let mut out = String::from(
            "classifier,day,fixed_day,fresh_median,fresh_p75,fresh_spread,fixed_median,fixed_p75,fixed_spread\n",
        );
        let row = |f: &FixedVsFresh, day: String, fresh: &ErrorStats, fixed: &ErrorStats| {
            format!(
                "{},{},{},{},{},{},{},{},{}\n",
                f.classifier.name(),
                day,
                f.fixed_day,
                fresh.median,
                fresh.p75,
                fresh.spread,
                fixed.median,
                fixed.p75,
                fixed.spread
            )
        };
        for f in &self.fixed_vs_fresh {
            for (d, (fresh, fixed)) in f.fresh.iter().zip(&f.fixed).enumerate() {
                out.push_str(&row(f, d.to_string(), fresh, fixed));
            }
            out.push_str(&row(f, "pooled".into(), &f.pooled_fresh, &f.pooled_fixed));
        }
        out
    }

    fn summary_json(&self) -> String {
        to_json(&Summary {
            days: self.days.iter().map(|d| d.seeds).collect(),
            fixed_vs_fresh: self
                .fixed_vs_fresh
                .iter()
                .map(|f| PooledSummary {
                    classifier: f.classifier,
                    fixed_day: f.fixed_day,
                    pooled_fresh: &f.pooled_fresh,
                    pooled_fixed: &f.pooled_fixed,
                })
                .collect(),
            variability: self.variability.as_deref(),
            notes: self.notes(),
        })
    }

    /// Write the output tree under `out`.
    pub fn write(&self, out: &Path) -> Result<()> {
        let w = |rel: &str, text: &str| write_text(&out.join(rel), text);
        w("plan.toml", &self.plan.to_toml())?;
        w("device.toml", &device_to_toml(&self.device))?;
        w("benchmarks/train.json", &to_json(&self.train_benchmarks))?;
        w("benchmarks/val.json", &to_json(&self.val_benchmarks))?;
        for d in &self.days {
            let dir = format!("day-{:02}", d.seeds.day);
            w(&format!("{dir}/device.toml"), &device_to_toml(&d.device))?;
            for t in &d.trained {
                let name = t.classifier.name();
                let report = EvalReport {
                    classifier: name.to_string(),
                    runs: t.errors.len(),
                    stats: t.stats.clone(),
                    per_run: Some(t.errors.clone()),
                };
                w(&format!("{dir}/model-{name}.json"), &to_json(&t.model))?;
                w(&format!("{dir}/report-{name}.json"), &to_json(&report))?;
            }
            let rows = d.trained.iter().map(|t| (t.classifier.name(), &t.stats));
            w(&format!("{dir}/compare.csv"), &comparison_csv(rows))?;
        }
        w("days.csv", &self.days_csv())?;
        if let Some(v) = self.variability_csv() {
            w("variability.csv", &v)?;
        }
        w("fixed_vs_fresh.csv", &self.fixed_vs_fresh_csv())?;
        w("summary.json", &self.summary_json())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(days: u32) -> ExperimentPlan {
        ExperimentPlan::from_toml(&format!(
            "days = {days}\ndrift_scale = 0.05\ntrain_count = 10\nval_count = 10\nshots = 64\nn_iter = 50\nseed = 3\n"
        ))
        .unwrap()
    }

    #[test]
    fn day_seeds_are_distinct() {
        let seeds: Vec<DaySeeds> = (0..10).map(|d| DaySeeds::new(1, d)).collect();
        let mut all: Vec<u64> = seeds
            .iter()
            .flat_map(|s| {
                let mut v = vec![s.drift_index, s.train_seed, s.val_seed];
                v.extend(
                    [Classifier::Linear, Classifier::Circle, Classifier::Ellipse]
                        .map(|c| s.classifier_seed(1, c)),
                );
                v
            })
            .collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 60);
    }

    #[test]
    fn fixed_day_is_its_own_fresh_day() {
        let r = run_study(&tiny(3), &DeviceModel::default()).unwrap();
        assert_eq!(r.days.len(), 3);
        for f in &r.fixed_vs_fresh {
            let k = f.fixed_day as usize;
            assert_eq!(f.fresh[k], f.fixed[k]);
            let own: Vec<f64> = f
                .fresh
                .iter()
                .map(|s| objective_of(s, Objective::MedianPlusSpread))
                .collect();
            assert!(own.iter().all(|&o| o >= own[k]));
        }
        assert_eq!(r.variability.as_ref().unwrap().len(), 3);
        assert!(r.notes().is_empty());
    }

    #[test]
    fn single_day_omits_variability() {
        let r = run_study(&tiny(1), &DeviceModel::default()).unwrap();
        assert!(r.variability.is_none());
        assert!(r.variability_csv().is_none());
        assert_eq!(r.notes(), vec![VARIABILITY_NOTE]);
        let f = &r.fixed_vs_fresh[0];
        assert_eq!(f.pooled_fresh, f.pooled_fixed);
    }

    #[test]
    fn zero_drift_keeps_device() {
        let mut plan = tiny(2);
        plan.drift_scale = 0.0;
        let r = run_study(&plan, &DeviceModel::default()).unwrap();
        assert!(r.days.iter().all(|d| d.device == DeviceModel::default()));
    }
}
