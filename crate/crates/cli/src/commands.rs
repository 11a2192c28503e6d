use std::path::Path;

use iqdisc::annealer::{anneal, AnnealConfig, ReturnMode};
use iqdisc::datastore::{
    benchmarks_from_json, dataset_from_json, device_from_toml, from_json, model_from_json,
    read_text, to_json, to_json_compact, validate_benchmarks, validate_dataset, write_text,
};
use iqdisc::discriminators::fit_linear;
use iqdisc::qmath::generate_benchmarks;
use iqdisc::sim::{perturb_device, simulate_dataset, Dataset, DeviceModel};
use iqdisc::Error;

use crate::args::Command;
use crate::plan::ExperimentPlan;
use crate::report::{comparison_csv, evaluate, EvalReport};
use crate::study::run_study;
use crate::{Failure, OrFail};

type Outcome<T = ()> = Result<T, Failure>;

fn input(path: &Path) -> Outcome<String> {
    read_text(path).or_usage()
}

fn output(path: &Path, text: &str) -> Outcome {
    write_text(path, text).or_usage()
}

fn load_dataset(path: &Path) -> Outcome<Dataset> {
    let ds = dataset_from_json(&input(path)?).or_data()?;
    validate_dataset(&ds).or_data()?;
    Ok(ds)
}

fn load_device(path: Option<&Path>) -> Outcome<DeviceModel> {
    match path {
        None => Ok(DeviceModel::default()),
        Some(p) => device_from_toml(&input(p)?).or_usage(),
    }
}

/// Generation errors caused by the arguments are usage errors.
fn by_kind(e: Error) -> Failure {
    match e {
        Error::InvalidInput(_) | Error::InvalidDevice(_) => Failure::usage(e),
        _ => Failure::data(e),
    }
}

pub fn execute(command: Command) -> Outcome {
    match command {
        Command::Gen {
            count,
            bins,
            seed,
            out,
        } => {
            let set = generate_benchmarks(count, bins, seed).map_err(by_kind)?;
            output(&out, &to_json(&set))
        }
        Command::Simulate {
            benchmarks,
            device,
            shots,
            seed,
            day,
            drift,
            out,
        } => {
            let device = load_device(device.as_deref())?;
            if !(drift.is_finite() && drift >= 0.0) {
                return Err(Failure::usage("--drift must be finite and non-negative"));
            }
            let set = benchmarks_from_json(&input(&benchmarks)?).or_data()?;
            validate_benchmarks(&set).or_data()?;
            let device = perturb_device(&device, day, drift);
            let ds = simulate_dataset(&device, &set, shots, seed).map_err(by_kind)?;
            output(&out, &to_json_compact(&ds))
        }
        Command::Baseline { dataset, out } => {
            let ds = load_dataset(&dataset)?;
            let model = fit_linear(&ds.calibration0, &ds.calibration1).or_data()?;
            output(&out, &to_json(&model))
        }
        Command::Train {
            dataset,
            classifier,
            objective,
            iters,
            temp,
            alpha,
            seed,
            out,
            trace,
        } => {
            let config = AnnealConfig {
                n_iter: iters,
                t0: temp,
                alpha,
                seed,
                objective: objective.into(),
                mode: ReturnMode::BestEver,
            };
            config.validate().or_usage()?;
            let ds = load_dataset(&dataset)?;
            let result = anneal(&ds, classifier.into(), &config).or_data()?;
            output(&out, &to_json(&result.model()))?;
            match trace {
                Some(path) => output(&path, &result.trace_csv()),
                None => Ok(()),
            }
        }
        Command::Eval {
            dataset,
            model,
            out,
            per_run,
        } => {
            let ds = load_dataset(&dataset)?;
            let model = model_from_json(&input(&model)?).or_data()?;
            let report = evaluate(&model, &ds.runs, per_run).or_data()?;
            output(&out, &to_json(&report))
        }
        Command::Compare {
            reports,
            labels,
            out,
        } => {
            if reports.len() != labels.len() {
                return Err(Failure::usage(format!(
                    "{} reports but {} labels",
                    reports.len(),
                    labels.len()
                )));
            }
            if let Some(bad) = labels.iter().find(|l| l.contains([',', '\n', '"'])) {
                return Err(Failure::usage(format!(
                    "label {bad:?} contains a CSV delimiter"
                )));
            }
            let parsed = reports
                .iter()
                .map(|p| from_json::<EvalReport>(&input(p)?).or_data())
                .collect::<Outcome<Vec<_>>>()?;
            let rows = labels
                .iter()
                .map(String::as_str)
                .zip(parsed.iter().map(|r| &r.stats));
            output(&out, &comparison_csv(rows))
        }
        Command::Study { plan, out } => {
            let plan_path = plan;
            let mut plan =
                ExperimentPlan::from_toml(&input(&plan_path)?).map_err(Failure::usage)?;
            let device = match plan.device.take() {
                None => DeviceModel::default(),
                Some(rel) => {
                    let base = plan_path.parent().unwrap_or(Path::new(""));
                    load_device(Some(&base.join(rel)))?
                }
            };
            let result = run_study(&plan, &device).or_data()?;
            for note in result.notes() {
                eprintln!("note: {note}");
            }
            result.write(&out).or_usage()
        }
    }
}
