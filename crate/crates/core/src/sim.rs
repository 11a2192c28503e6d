//! Synthetic IQ readout device.
//!
//! Each shot's true state is drawn from the benchmark's correct |0⟩
//! probability. The emission source is then one categorical draw: with
//! probability `p_smear` a broad isotropic Gaussian midway between the
//! clusters, with probability `p_relax` (true |1⟩) or `p_excite` (true |0⟩)
//! the opposite state's cluster, otherwise the true state's own cluster.
//! Cluster emissions are bivariate Gaussians.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::qmath::{BenchmarkSet, MicroBenchmark};
use crate::seed::derive_seed;
use crate::{Error, IqPoint, Result};

const DRIFT_STREAM: u64 = 0x0064_7269_6674;

/// Symmetric 2×2 covariance in readout units².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cov2 {
    pub ii: f64,
    pub iq: f64,
    pub qq: f64,
}

impl Cov2 {
    pub fn isotropic(std: f64) -> Self {
        Self {
            ii: std * std,
            iq: 0.0,
            qq: std * std,
        }
    }

    /// Lower Cholesky factor `(l11, l21, l22)`, or `None` unless positive definite.
    pub fn cholesky(&self) -> Option<(f64, f64, f64)> {
        if !(self.ii.is_finite() && self.iq.is_finite() && self.qq.is_finite()) || self.ii <= 0.0 {
            return None;
        }
        let l11 = self.ii.sqrt();
        let l21 = self.iq / l11;
        let rem = self.qq - l21 * l21;
        if rem <= 0.0 {
            return None;
        }
        Some((l11, l21, rem.sqrt()))
    }

    fn from_cholesky(l11: f64, l21: f64, l22: f64) -> Self {
        Self {
            ii: l11 * l11,
            iq: l11 * l21,
            qq: l21 * l21 + l22 * l22,
        }
    }

    /// Root-mean-square per-axis standard deviation, `sqrt(trace / 2)`.
    pub fn rms_std(&self) -> f64 {
        ((self.ii + self.qq) / 2.0).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceModel {
    pub mu0: IqPoint,
    pub mu1: IqPoint,
    pub sigma0: Cov2,
    pub sigma1: Cov2,
    pub p_relax: f64,
    pub p_excite: f64,
    pub p_smear: f64,
    pub smear_scale: f64,
}

impl Default for DeviceModel {
    fn default() -> Self {
        Self {
            mu0: IqPoint::new(0.0, 1.0),
            mu1: IqPoint::new(0.0, -1.0),
            sigma0: Cov2::isotropic(0.55),
            sigma1: Cov2::isotropic(0.55),
            p_relax: 0.08,
            p_excite: 0.01,
            p_smear: 0.10,
            smear_scale: 2.0,
        }
    }
}

/// Flat key-value form of [`DeviceModel`] used by device config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    pub mu0_i: f64,
    pub mu0_q: f64,
    pub mu1_i: f64,
    pub mu1_q: f64,
    pub s0_ii: f64,
    pub s0_iq: f64,
    pub s0_qq: f64,
    pub s1_ii: f64,
    pub s1_iq: f64,
    pub s1_qq: f64,
    pub p_relax: f64,
    pub p_excite: f64,
    pub p_smear: f64,
    pub smear_scale: f64,
}

impl From<&DeviceModel> for DeviceConfig {
    fn from(d: &DeviceModel) -> Self {
        Self {
            mu0_i: d.mu0.i,
            mu0_q: d.mu0.q,
            mu1_i: d.mu1.i,
            mu1_q: d.mu1.q,
            s0_ii: d.sigma0.ii,
            s0_iq: d.sigma0.iq,
            s0_qq: d.sigma0.qq,
            s1_ii: d.sigma1.ii,
            s1_iq: d.sigma1.iq,
            s1_qq: d.sigma1.qq,
            p_relax: d.p_relax,
            p_excite: d.p_excite,
            p_smear: d.p_smear,
            smear_scale: d.smear_scale,
        }
    }
}

impl From<DeviceConfig> for DeviceModel {
    fn from(c: DeviceConfig) -> Self {
        Self {
            mu0: IqPoint::new(c.mu0_i, c.mu0_q),
            mu1: IqPoint::new(c.mu1_i, c.mu1_q),
            sigma0: Cov2 {
                ii: c.s0_ii,
                iq: c.s0_iq,
                qq: c.s0_qq,
            },
            sigma1: Cov2 {
                ii: c.s1_ii,
                iq: c.s1_iq,
                qq: c.s1_qq,
            },
            p_relax: c.p_relax,
            p_excite: c.p_excite,
            p_smear: c.p_smear,
            smear_scale: c.smear_scale,
        }
    }
}

/// Which distribution a simulated shot was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Emitter {
    Zero,
    One,
    Smear,
}

impl DeviceModel {
    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("p_relax", self.p_relax),
            ("p_excite", self.p_excite),
            ("p_smear", self.p_smear),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidDevice(format!("{name} = {p} outside [0, 1]")));
            }
        }
        if self.p_relax + self.p_smear > 1.0 || self.p_excite + self.p_smear > 1.0 {
            return Err(Error::InvalidDevice(
                "p_relax + p_smear and p_excite + p_smear must not exceed 1".into(),
            ));
        }
        if !(self.smear_scale.is_finite() && self.smear_scale > 0.0) {
            return Err(Error::InvalidDevice("smear_scale must be positive".into()));
        }
        if !(self.mu0.is_finite() && self.mu1.is_finite()) {
            return Err(Error::InvalidDevice(
                "cluster centers must be finite".into(),
            ));
        }
        if self.sigma0.cholesky().is_none() {
            return Err(Error::InvalidDevice(
                "sigma0 is not positive definite".into(),
            ));
        }
        if self.sigma1.cholesky().is_none() {
            return Err(Error::InvalidDevice(
                "sigma1 is not positive definite".into(),
            ));
        }
        Ok(())
    }

    /// Std of the isotropic smear distribution: `smear_scale` times the mean
    /// of the two clusters' RMS per-axis std.
    pub fn smear_std(&self) -> f64 {
        self.smear_scale * (self.sigma0.rms_std() + self.sigma1.rms_std()) / 2.0
    }
}

/// A benchmark with its measured shots. Angles are `None` for imported
/// captures whose rotation is unknown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub delta: Option<f64>,
    pub correct_p0: f64,
    pub shots: Vec<IqPoint>,
}

impl RunRecord {
    pub fn from_benchmark(b: &MicroBenchmark, shots: Vec<IqPoint>) -> Self {
        Self {
            theta: Some(b.theta),
            phi: Some(b.phi),
            delta: Some(b.delta),
            correct_p0: b.correct_p0,
            shots,
        }
    }

    pub fn benchmark(&self) -> Option<MicroBenchmark> {
        Some(MicroBenchmark {
            theta: self.theta?,
            phi: self.phi?,
            delta: self.delta?,
            correct_p0: self.correct_p0,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dataset {
    pub shots_per_run: usize,
    pub device_seed: u64,
    #[serde(rename = "cal0")]
    pub calibration0: Vec<IqPoint>,
    #[serde(rename = "cal1")]
    pub calibration1: Vec<IqPoint>,
    pub runs: Vec<RunRecord>,
}

impl Dataset {
    pub fn run_shots(&self) -> impl Iterator<Item = &IqPoint> {
        self.runs.iter().flat_map(|r| r.shots.iter())
    }
}

struct Sampler {
    mu0: IqPoint,
    mu1: IqPoint,
    chol0: (f64, f64, f64),
    chol1: (f64, f64, f64),
    smear_center: IqPoint,
    smear_std: f64,
    p_relax: f64,
    p_excite: f64,
    p_smear: f64,
}

impl Sampler {
    fn new(device: &DeviceModel) -> Result<Self> {
        device.validate()?;
        Ok(Self {
            mu0: device.mu0,
            mu1: device.mu1,
            // validate() has checked both factors exist.
            chol0: device.sigma0.cholesky().unwrap(),
            chol1: device.sigma1.cholesky().unwrap(),
            smear_center: IqPoint::new(
                (device.mu0.i + device.mu1.i) / 2.0,
                (device.mu0.q + device.mu1.q) / 2.0,
            ),
            smear_std: device.smear_std(),
            p_relax: device.p_relax,
            p_excite: device.p_excite,
            p_smear: device.p_smear,
        })
    }

    fn shot<R: Rng>(&self, p0: f64, rng: &mut R) -> (Emitter, IqPoint) {
        let true_zero = rng.random::<f64>() < p0;
        let u = rng.random::<f64>();
        let p_flip = if true_zero {
            self.p_excite
        } else {
            self.p_relax
        };
        let emitter = if u < self.p_smear {
            Emitter::Smear
        } else if u < self.p_smear + p_flip {
            if true_zero {
                Emitter::One
            } else {
                Emitter::Zero
            }
        } else if true_zero {
            Emitter::Zero
        } else {
            Emitter::One
        };
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let point = match emitter {
            Emitter::Smear => IqPoint::new(
                self.smear_center.i + self.smear_std * z1,
                self.smear_center.q + self.smear_std * z2,
            ),
            Emitter::Zero => gaussian(self.mu0, self.chol0, z1, z2),
            Emitter::One => gaussian(self.mu1, self.chol1, z1, z2),
        };
        (emitter, point)
    }

    fn shots(&self, p0: f64, count: usize, seed: u64) -> Vec<(Emitter, IqPoint)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.shot(p0, &mut rng)).collect()
    }
}

fn gaussian(mu: IqPoint, (l11, l21, l22): (f64, f64, f64), z1: f64, z2: f64) -> IqPoint {
    IqPoint::new(mu.i + l11 * z1, mu.q + l21 * z1 + l22 * z2)
}

/// Like [`simulate_run`], but also reports which distribution produced each shot.
pub fn simulate_run_traced(
    device: &DeviceModel,
    benchmark: &MicroBenchmark,
    shots: usize,
    seed: u64,
) -> Result<Vec<(Emitter, IqPoint)>> {
    if shots == 0 {
        return Err(Error::invalid("shot count must be positive"));
    }
    Ok(Sampler::new(device)?.shots(benchmark.correct_p0, shots, seed))
}

pub fn simulate_run(
    device: &DeviceModel,
    benchmark: &MicroBenchmark,
    shots: usize,
    seed: u64,
) -> Result<RunRecord> {
    let traced = simulate_run_traced(device, benchmark, shots, seed)?;
    Ok(RunRecord::from_benchmark(
        benchmark,
        traced.into_iter().map(|(_, p)| p).collect(),
    ))
}

/// Calibration captures and one run per benchmark.
///
/// Stream `0` of `seed` feeds the |0⟩ calibration, stream `1` the |1⟩
/// calibration, and stream `k + 2` the `k`-th benchmark (see [`crate::seed`]).
pub fn simulate_dataset(
    device: &DeviceModel,
    benchmarks: &BenchmarkSet,
    shots: usize,
    seed: u64,
) -> Result<Dataset> {
    if benchmarks.is_empty() {
        return Err(Error::invalid("benchmark set is empty"));
    }
    if shots == 0 {
        return Err(Error::invalid("shot count must be positive"));
    }
    let sampler = Sampler::new(device)?;
    let points = |p0: f64, stream: u64| -> Vec<IqPoint> {
        sampler
            .shots(p0, shots, derive_seed(seed, stream))
            .into_iter()
            .map(|(_, p)| p)
            .collect()
    };
    let calibration0 = points(MicroBenchmark::ground().correct_p0, 0);
    let calibration1 = points(MicroBenchmark::excited().correct_p0, 1);
    let runs = benchmarks
        .benchmarks
        .iter()
        .enumerate()
        .map(|(k, b)| RunRecord::from_benchmark(b, points(b.correct_p0, k as u64 + 2)))
        .collect();
    Ok(Dataset {
        shots_per_run: shots,
        device_seed: seed,
        calibration0,
        calibration1,
        runs,
    })
}

/// A reproducible "another day" version of the device: centers move by
/// Gaussian noise with std `drift_scale` times the center separation, and
/// each covariance's Cholesky factor is jittered (diagonal scaled by
/// `exp(drift_scale * z)`, off-diagonal shifted by `drift_scale * z` times
/// the geometric mean of the diagonal). Error probabilities are unchanged.
pub fn perturb_device(device: &DeviceModel, day_index: u64, drift_scale: f64) -> DeviceModel {
    if drift_scale == 0.0 {
        return device.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(DRIFT_STREAM, day_index));
    let mut z = || -> f64 { rng.sample(StandardNormal) };
    let sep =
        ((device.mu0.i - device.mu1.i).powi(2) + (device.mu0.q - device.mu1.q).powi(2)).sqrt();
    let shift = drift_scale * sep;
    let mut out = device.clone();
    out.mu0 = IqPoint::new(device.mu0.i + shift * z(), device.mu0.q + shift * z());
    out.mu1 = IqPoint::new(device.mu1.i + shift * z(), device.mu1.q + shift * z());
    let mut jitter = |c: Cov2| -> Cov2 {
        match c.cholesky() {
            Some((l11, l21, l22)) => {
                let a = l11 * (drift_scale * z()).exp();
                let d = l22 * (drift_scale * z()).exp();
                let b = l21 + drift_scale * z() * (l11 * l22).sqrt();
                Cov2::from_cholesky(a, b, d)
            }
            None => c,
        }
    };
    out.sigma0 = jitter(device.sigma0);
    out.sigma1 = jitter(device.sigma1);
    out
}
