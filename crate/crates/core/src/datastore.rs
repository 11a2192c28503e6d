//! Reading and writing every on-disk format.
//!
//! JSON documents carry full-precision reals (shortest round-trip
//! formatting on output, exact parsing on input). Parse failures name the
//! offending key path, e.g. `runs[3].shots` or `kind`. Device models are
//! flat TOML key-value files. Raw IQ captures are CSV (`i,q` rows,
//! optional header) or a JSON array of `[i, q]` pairs.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::discriminators::{Discriminator, Model, Normalization};
use crate::qmath::{compute_p0, BenchmarkSet};
use crate::sim::{Dataset, DeviceConfig, DeviceModel, RunRecord};
use crate::{Error, IqPoint, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    kind: String,
    params: Vec<f64>,
    norm: Normalization,
}

impl From<Model> for ModelDoc {
    fn from(m: Model) -> Self {
        ModelDoc {
            kind: m.discriminator.kind().to_string(),
            params: m.discriminator.params(),
            norm: m.norm,
        }
    }
}

impl TryFrom<ModelDoc> for Model {
    type Error = Error;

    fn try_from(doc: ModelDoc) -> Result<Self> {
        let discriminator =
            Discriminator::from_params(&doc.kind, &doc.params).map_err(|e| match e {
                Error::InvalidInput(reason) => Error::schema("params", reason),
                other => other,
            })?;
        doc.norm
            .validate()
            .map_err(|e| Error::schema("norm", e.to_string()))?;
        Ok(Model {
            discriminator,
            norm: doc.norm,
        })
    }
}

impl Serialize for Model {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModelDoc::from(*self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Model {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = ModelDoc::deserialize(d)?;
        Model::try_from(doc).map_err(serde::de::Error::custom)
    }
}

fn schema_error(path: String, inner: impl std::fmt::Display) -> Error {
    let reason = inner.to_string();
    // serde reports a missing field at the parent; name the field itself.
    let missing = reason
        .strip_prefix("missing field `")
        .and_then(|r| r.split('`').next());
    let key = match (path.as_str(), missing) {
        (".", Some(field)) => field.to_string(),
        (_, Some(field)) => format!("{path}.{field}"),
        _ => path,
    };
    Error::schema(key, reason)
}

/// Parse a JSON document, reporting the failing key path on error.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema_error(path, e.into_inner())
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("domain types always serialize")
}

/// Compact form, used for shot-heavy documents.
pub fn to_json_compact<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("domain types always serialize")
}

/// Serialize and parse back.
pub fn round_trip<T: Serialize + DeserializeOwned>(value: &T) -> Result<T> {
    from_json(&to_json(value))
}

/// Parse a model document, naming `kind`, `params` or `norm` on schema errors.
pub fn model_from_json(text: &str) -> Result<Model> {
    let doc: ModelDoc = from_json(text)?;
    Model::try_from(doc)
}

pub fn benchmarks_from_json(text: &str) -> Result<BenchmarkSet> {
    let set: BenchmarkSet = from_json(text)?;
    validate_benchmarks(&set)?;
    Ok(set)
}

pub fn dataset_from_json(text: &str) -> Result<Dataset> {
    let ds: Dataset = from_json(text)?;
    validate_dataset(&ds)?;
    Ok(ds)
}

pub fn validate_benchmarks(set: &BenchmarkSet) -> Result<()> {
    if set.bins == 0 {
        return Err(Error::schema("bins", "must be positive"));
    }
    for (k, b) in set.benchmarks.iter().enumerate() {
        let exact = compute_p0(b.theta, b.phi, b.delta)
            .map_err(|e| Error::schema(format!("benchmarks[{k}]"), e.to_string()))?;
        let in_range = [b.theta, b.phi, b.delta]
            .iter()
            .all(|a| (-std::f64::consts::PI..=std::f64::consts::PI).contains(a));
        if !in_range {
            return Err(Error::schema(
                format!("benchmarks[{k}]"),
                "angle outside [-pi, pi]",
            ));
        }
        if (exact - b.correct_p0).abs() > 1e-12 {
            return Err(Error::schema(
                format!("benchmarks[{k}].correct_p0"),
                format!(
                    "{} disagrees with the rotation angles ({exact})",
                    b.correct_p0
                ),
            ));
        }
    }
    Ok(())
}

pub fn validate_run(run: &RunRecord) -> Result<()> {
    if run.shots.is_empty() {
        return Err(Error::invalid("run has no shots"));
    }
    if !(0.0..=1.0).contains(&run.correct_p0) {
        return Err(Error::invalid(format!(
            "correct_p0 {} outside [0, 1]",
            run.correct_p0
        )));
    }
    if run.shots.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("run contains a non-finite shot"));
    }
    Ok(())
}

pub fn validate_dataset(ds: &Dataset) -> Result<()> {
    if ds.shots_per_run == 0 {
        return Err(Error::schema("shots_per_run", "must be positive"));
    }
    for (key, cal) in [("cal0", &ds.calibration0), ("cal1", &ds.calibration1)] {
        if cal.len() != ds.shots_per_run {
            return Err(Error::schema(
                key,
                format!("has {} points, expected {}", cal.len(), ds.shots_per_run),
            ));
        }
    }
    for (k, run) in ds.runs.iter().enumerate() {
        validate_run(run).map_err(|e| Error::schema(format!("runs[{k}]"), e.to_string()))?;
    }
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn device_from_toml(text: &str) -> Result<DeviceModel> {
    let cfg: DeviceConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        let key = msg
            .split('`')
            .nth(1)
            .map(str::to_string)
            .unwrap_or_else(|| "device".into());
        Error::schema(key, msg)
    })?;
    let device = DeviceModel::from(cfg);
    device.validate()?;
    Ok(device)
}

pub fn device_to_toml(device: &DeviceModel) -> String {
    toml::to_string(&DeviceConfig::from(device)).expect("device config always serializes")
}

pub fn read_device(path: &Path) -> Result<DeviceModel> {
    device_from_toml(&read_text(path)?)
}

fn parse_row(line: &str) -> Option<IqPoint> {
    let mut fields = line.split(',');
    let i = fields.next()?.trim().parse::<f64>().ok()?;
    let q = fields.next()?.trim().parse::<f64>().ok()?;
    if fields.next().is_some() || !i.is_finite() || !q.is_finite() {
        return None;
    }
    Some(IqPoint::new(i, q))
}

/// Shots from raw capture text; see [`import_raw_memory`].
pub fn parse_raw_memory(text: &str) -> Result<Vec<IqPoint>> {
    if text.trim().is_empty() {
        return Err(Error::invalid("raw memory file is empty"));
    }
    if text.trim_start().starts_with('[') {
        let pairs: Vec<[f64; 2]> = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            reason: e.to_string(),
        })?;
        let shots: Vec<IqPoint> = pairs.into_iter().map(IqPoint::from).collect();
        if let Some(k) = shots.iter().position(|p| !p.is_finite()) {
            return Err(Error::Parse {
                line: 1,
                reason: format!("pair {k} is not finite"),
            });
        }
        if shots.is_empty() {
            return Err(Error::invalid("raw memory file has no shots"));
        }
        return Ok(shots);
    }

    let lines: Vec<&str> = text
        .strip_suffix('\n')
        .unwrap_or(text)
        .split('\n')
        .collect();
    let mut shots = Vec::with_capacity(lines.len());
    for (k, raw) in lines.iter().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        match parse_row(line) {
            Some(p) => shots.push(p),
            None if k == 0 && is_header(line) => {}
            None => {
                return Err(Error::Parse {
                    line: k + 1,
                    reason: format!("expected two finite reals `i,q`, got {line:?}"),
                })
            }
        }
    }
    if shots.is_empty() {
        return Err(Error::invalid("raw memory file has no shots"));
    }
    Ok(shots)
}

/// A first row is a header when it has two fields and neither is a number.
fn is_header(line: &str) -> bool {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    fields.len() == 2
        && fields
            .iter()
            .all(|f| !f.is_empty() && f.parse::<f64>().is_err())
}

/// Load an externally captured run. The capture carries no rotation, so
/// the angles are left empty and `correct_p0` is taken from the caller.
pub fn import_raw_memory(path: &Path, correct_p0: f64) -> Result<RunRecord> {
    if !(0.0..=1.0).contains(&correct_p0) {
        return Err(Error::invalid(format!(
            "correct_p0 {correct_p0} outside [0, 1]"
        )));
    }
    let shots = parse_raw_memory(&read_text(path)?)?;
    Ok(RunRecord {
        theta: None,
        phi: None,
        delta: None,
        correct_p0,
        shots,
    })
}

/// Shots as `i,q` CSV with a header row.
pub fn export_raw_memory(shots: &[IqPoint]) -> String {
    let mut out = String::from("i,q\n");
    for p in shots {
        out.push_str(&format!("{},{}\n", p.i, p.q));
    }
    out
}
