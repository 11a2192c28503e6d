//! Single-qubit rotation micro-benchmarks.
//!
//! A micro-benchmark applies `Rz(delta) * Ry(phi) * Rx(theta)` to a qubit
//! prepared in |0⟩. Its correct |0⟩ probability is known exactly, which is
//! what lets a classifier be scored on measured shots.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Rejections tolerated per probability bin before generation gives up.
pub const MAX_REJECTIONS_PER_BIN: u64 = 1_000_000;

pub type Unitary = [[Complex64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MicroBenchmark {
    pub theta: f64,
    pub phi: f64,
    pub delta: f64,
    pub correct_p0: f64,
}

impl MicroBenchmark {
    pub fn new(theta: f64, phi: f64, delta: f64) -> Result<Self> {
        for (name, a) in [("theta", theta), ("phi", phi), ("delta", delta)] {
            if !(-PI..=PI).contains(&a) {
                return Err(Error::invalid(format!("{name} = {a} outside [-pi, pi]")));
            }
        }
        Ok(Self {
            theta,
            phi,
            delta,
            correct_p0: compute_p0(theta, phi, delta)?,
        })
    }

    /// Identity benchmark: the qubit stays in |0⟩.
    pub fn ground() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
            delta: 0.0,
            correct_p0: 1.0,
        }
    }

    /// A π pulse about x: the qubit ends in |1⟩.
    pub fn excited() -> Self {
        Self {
            theta: PI,
            phi: 0.0,
            delta: 0.0,
            correct_p0: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSet {
    pub seed: u64,
    pub bins: usize,
    pub benchmarks: Vec<MicroBenchmark>,
}

impl BenchmarkSet {
    pub fn len(&self) -> usize {
        self.benchmarks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.benchmarks.is_empty()
    }

    /// Number of benchmarks whose correct probability falls in each bin.
    pub fn histogram(&self) -> Vec<usize> {
        let mut counts = vec![0; self.bins];
        for b in &self.benchmarks {
            counts[bin_index(b.correct_p0, self.bins)] += 1;
        }
        counts
    }
}

fn rx(theta: f64) -> Unitary {
    let c = Complex64::new((theta / 2.0).cos(), 0.0);
    let s = Complex64::new(0.0, -(theta / 2.0).sin());
    [[c, s], [s, c]]
}

fn ry(phi: f64) -> Unitary {
    let c = Complex64::new((phi / 2.0).cos(), 0.0);
    let s = Complex64::new((phi / 2.0).sin(), 0.0);
    [[c, -s], [s, c]]
}

fn rz(delta: f64) -> Unitary {
    let zero = Complex64::new(0.0, 0.0);
    [
        [Complex64::from_polar(1.0, -delta / 2.0), zero],
        [zero, Complex64::from_polar(1.0, delta / 2.0)],
    ]
}

fn matmul(a: &Unitary, b: &Unitary) -> Unitary {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

/// The benchmark unitary `Rz(delta) * Ry(phi) * Rx(theta)`.
pub fn u3_unitary(theta: f64, phi: f64, delta: f64) -> Unitary {
    matmul(&rz(delta), &matmul(&ry(phi), &rx(theta)))
}

/// Exact probability of measuring |0⟩ after the benchmark rotation.
pub fn compute_p0(theta: f64, phi: f64, delta: f64) -> Result<f64> {
    if !(theta.is_finite() && phi.is_finite() && delta.is_finite()) {
        return Err(Error::invalid("rotation angles must be finite"));
    }
    // Amplitude of |0⟩ in U|0⟩ is the first column's top entry.
    let u = u3_unitary(theta, phi, delta);
    Ok(u[0][0].norm_sqr().clamp(0.0, 1.0))
}

/// Bin of a probability among `bins` half-open bins `[k/bins, (k+1)/bins)`,
/// with the top bin closed at 1.
pub fn bin_index(p: f64, bins: usize) -> usize {
    let k = (p * bins as f64).floor();
    if k < 0.0 {
        0
    } else {
        (k as usize).min(bins - 1)
    }
}

/// Draw `count` benchmarks with uniform angles in `[-pi, pi]`, keeping only
/// those whose correct probability lands in a bin that still needs entries,
/// until every bin holds `count / bins`.
pub fn generate_benchmarks(count: usize, bins: usize, seed: u64) -> Result<BenchmarkSet> {
    if count == 0 || bins == 0 {
        return Err(Error::invalid("count and bins must be positive"));
    }
    if !count.is_multiple_of(bins) {
        return Err(Error::invalid(format!(
            "count {count} is not divisible by bins {bins}"
        )));
    }
    let per_bin = count / bins;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut filled = vec![0usize; bins];
    let mut benchmarks = Vec::with_capacity(count);
    let mut rejections = 0u64;
    let cap = MAX_REJECTIONS_PER_BIN.saturating_mul(bins as u64);

    while benchmarks.len() < count {
        let theta = rng.random_range(-PI..=PI);
        let phi = rng.random_range(-PI..=PI);
        let delta = rng.random_range(-PI..=PI);
        let bench = MicroBenchmark::new(theta, phi, delta)?;
        let k = bin_index(bench.correct_p0, bins);
        if filled[k] < per_bin {
            filled[k] += 1;
            benchmarks.push(bench);
        } else {
            rejections += 1;
            if rejections > cap {
                return Err(Error::GenerationFailure(format!(
                    "exceeded {cap} rejections with bin fill {filled:?}"
                )));
            }
        }
    }
    Ok(BenchmarkSet {
        seed,
        bins,
        benchmarks,
    })
}
