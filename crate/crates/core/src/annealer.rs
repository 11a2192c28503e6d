//! Simulated annealing over circle/ellipse discriminator parameters.
//!
//! The chain keeps a current configuration, proposes a neighbor by moving
//! every parameter by an independent uniform step in `[-1, 1]`, and moves
//! to it when the energy `E = P_current − P_new` is non-negative, or with
//! probability `exp(E / T)` otherwise. The temperature is multiplied by
//! `alpha` after every iteration. Besides the chain's final state the
//! annealer remembers the lowest-objective configuration it ever evaluated,
//! which is what it returns by default.
//!
//! Proposals are kept inside a [`SearchDomain`]: region centers are clamped
//! to the box spanned by the 0.5th and 99.5th percentiles of the normalized
//! training shots and radii/axes to the box diagonal. Outside it regions
//! capture next to nothing, the objective is flat, and zero-energy moves
//! would let the chain wander off indefinitely.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discriminators::{
    fit_normalization, Discriminator, Model, Normalization, ObservedP0, Prepared,
};
use crate::metrics::{percentile_sorted, RunError};
use crate::sim::{Dataset, RunRecord};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Circle,
    Ellipse,
}

impl RegionKind {
    pub fn param_count(&self) -> usize {
        match self {
            RegionKind::Circle => 6,
            RegionKind::Ellipse => 10,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RegionKind::Circle => "circle",
            RegionKind::Ellipse => "ellipse",
        }
    }

    /// Offsets of radius/axis parameters.
    fn extents(&self) -> &'static [usize] {
        match self {
            RegionKind::Circle => &[2, 5],
            RegionKind::Ellipse => &[2, 3, 7, 8],
        }
    }

    fn angles(&self) -> &'static [usize] {
        match self {
            RegionKind::Circle => &[],
            RegionKind::Ellipse => &[4, 9],
        }
    }

    fn centers(&self) -> &'static [(usize, usize)] {
        match self {
            RegionKind::Circle => &[(0, 1), (3, 4)],
            RegionKind::Ellipse => &[(0, 1), (5, 6)],
        }
    }
}

impl std::str::FromStr for RegionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circle" => Ok(RegionKind::Circle),
            "ellipse" => Ok(RegionKind::Ellipse),
            other => Err(Error::invalid(format!("unknown region kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    Median,
    Spread,
    #[default]
    MedianPlusSpread,
}

impl Objective {
    pub fn name(&self) -> &'static str {
        match self {
            Objective::Median => "median",
            Objective::Spread => "spread",
            Objective::MedianPlusSpread => "median-plus-spread",
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(Objective::Median),
            "spread" => Ok(Objective::Spread),
            "median-plus-spread" => Ok(Objective::MedianPlusSpread),
            other => Err(Error::invalid(format!("unknown objective {other:?}"))),
        }
    }
}

/// What [`anneal`] reports as its result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReturnMode {
    /// The lowest-objective configuration evaluated at any point.
    #[default]
    BestEver,
    /// The chain's state after the last iteration.
    FinalState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnealConfig {
    pub n_iter: u64,
    pub t0: f64,
    pub alpha: f64,
    pub seed: u64,
    pub objective: Objective,
    #[serde(default)]
    pub mode: ReturnMode,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            n_iter: 20_000,
            t0: 1.0,
            alpha: 0.9995,
            seed: 0,
            objective: Objective::default(),
            mode: ReturnMode::default(),
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t0 > 0.0) {
            return Err(Error::invalid("initial temperature must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid("cooling coefficient must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Circle or ellipse parameters in normalized IQ units, in field order.
/// Radii and axes are clamped to be non-negative and angles wrapped into
/// `[-pi, pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    pub kind: RegionKind,
    pub values: Vec<f64>,
}

pub fn wrap_angle(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

impl ParamVector {
    pub fn new(kind: RegionKind, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != kind.param_count() {
            return Err(Error::invalid(format!(
                "{} needs {} parameters, got {}",
                kind.name(),
                kind.param_count(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("parameters must be finite"));
        }
        for &k in kind.extents() {
            values[k] = values[k].max(0.0);
        }
        for &k in kind.angles() {
            values[k] = wrap_angle(values[k]);
        }
        Ok(Self { kind, values })
    }

    pub fn discriminator(&self) -> Discriminator {
        // Construction already enforced the invariants from_params checks.
        Discriminator::from_params(self.kind.name(), &self.values)
            .expect("ParamVector invariants hold")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: u64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainResult {
    pub best_params: ParamVector,
    pub best_objective: f64,
    pub objective_trace: Vec<TracePoint>,
    pub evaluations: u64,
    pub norm: Normalization,
}

impl TrainResult {
    pub fn model(&self) -> Model {
        Model {
            discriminator: self.best_params.discriminator(),
            norm: self.norm,
        }
    }

    /// `iteration,objective` rows with a header line.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,objective\n");
        for t in &self.objective_trace {
            out.push_str(&format!("{},{}\n", t.iteration, t.objective));
        }
        out
    }
}

/// Training runs with their shots normalized once, stored as parallel
/// coordinate arrays for fast repeated scoring.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    xs: Vec<f64>,
    ys: Vec<f64>,
    offsets: Vec<usize>,
    correct: Vec<f64>,
    norm: Normalization,
}

impl TrainingSet {
    pub fn new(runs: &[RunRecord], norm: Normalization) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::invalid("training set has no runs"));
        }
        norm.validate()?;
        let total: usize = runs.iter().map(|r| r.shots.len()).sum();
        let mut xs = Vec::with_capacity(total);
        let mut ys = Vec::with_capacity(total);
        let mut offsets = Vec::with_capacity(runs.len() + 1);
        offsets.push(0);
        for r in runs {
            if r.shots.is_empty() {
                return Err(Error::invalid("training run without shots"));
            }
            if !(0.0..=1.0).contains(&r.correct_p0) {
                return Err(Error::invalid("training run correct_p0 outside [0, 1]"));
            }
            for p in &r.shots {
                let (x, y) = norm.apply(*p);
                xs.push(x);
                ys.push(y);
            }
            offsets.push(xs.len());
        }
        Ok(Self {
            xs,
            ys,
            offsets,
            correct: runs.iter().map(|r| r.correct_p0).collect(),
            norm,
        })
    }

    /// Fits the normalization on the pooled run shots of `dataset`.
    pub fn from_dataset(dataset: &Dataset) -> Result<Self> {
        if dataset.runs.is_empty() {
            return Err(Error::invalid("training set has no runs"));
        }
        let norm = fit_normalization(dataset.run_shots().collect::<Vec<_>>())?;
        Self::new(&dataset.runs, norm)
    }

    pub fn norm(&self) -> Normalization {
        self.norm
    }

    pub fn run_count(&self) -> usize {
        self.correct.len()
    }

    /// Per-axis `(tail, 1 - tail)` percentiles of the normalized shots.
    pub fn quantile_bounds(&self, tail: f64) -> [(f64, f64); 2] {
        let q = |v: &[f64]| {
            let mut sorted = v.to_vec();
            sorted.sort_by(f64::total_cmp);
            (
                percentile_sorted(&sorted, tail),
                percentile_sorted(&sorted, 1.0 - tail),
            )
        };
        [q(&self.xs), q(&self.ys)]
    }

    /// Per-axis `(min, max)` of the normalized shots.
    pub fn bounds(&self) -> [(f64, f64); 2] {
        let mm = |v: &[f64]| {
            v.iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                    (lo.min(x), hi.max(x))
                })
        };
        [mm(&self.xs), mm(&self.ys)]
    }

    pub fn observed(&self, d: &Discriminator) -> Vec<ObservedP0> {
        let prepared = Prepared::new(d);
        self.offsets
            .windows(2)
            .map(|w| {
                let (xs, ys) = (&self.xs[w[0]..w[1]], &self.ys[w[0]..w[1]]);
                let (n0, n1) = prepared.tally(xs, ys);
                ObservedP0::from_counts(n0, n1, w[1] - w[0])
            })
            .collect()
    }

    pub fn run_errors(&self, d: &Discriminator) -> Vec<RunError> {
        self.observed(d)
            .iter()
            .zip(&self.correct)
            .map(|(o, &c)| RunError {
                correct_p0: c,
                observed_p0: o.p0,
                error_pct: (c - o.p0).abs() * 100.0,
                degenerate: o.degenerate,
            })
            .collect()
    }

    pub fn objective(&self, d: &Discriminator, objective: Objective) -> f64 {
        let mut errs: Vec<f64> = self.run_errors(d).iter().map(|r| r.error_pct).collect();
        errs.sort_by(f64::total_cmp);
        let median = percentile_sorted(&errs, 0.5);
        let spread = percentile_sorted(&errs, 0.75) - percentile_sorted(&errs, 0.25);
        match objective {
            Objective::Median => median,
            Objective::Spread => spread,
            Objective::MedianPlusSpread => median + spread,
        }
    }
}

/// Objective of `params` over the training runs, in percent.
pub fn objective_value(
    params: &ParamVector,
    training: &Dataset,
    norm: &Normalization,
    objective: Objective,
) -> Result<f64> {
    let set = TrainingSet::new(&training.runs, *norm)?;
    Ok(set.objective(&params.discriminator(), objective))
}

/// Fraction of training shots per side and axis left outside the search box,
/// so sparse outliers do not stretch it.
pub const DOMAIN_TAIL: f64 = 0.005;

/// Feasible parameter region for the annealer, in normalized IQ units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchDomain {
    pub i_range: (f64, f64),
    pub q_range: (f64, f64),
    pub max_extent: f64,
}

impl SearchDomain {
    pub fn from_bounds([i_range, q_range]: [(f64, f64); 2]) -> Self {
        let diag = (i_range.1 - i_range.0).hypot(q_range.1 - q_range.0);
        Self {
            i_range,
            q_range,
            max_extent: diag,
        }
    }

    /// Unbounded domain: centers anywhere, any extent.
    pub fn unbounded() -> Self {
        Self {
            i_range: (f64::NEG_INFINITY, f64::INFINITY),
            q_range: (f64::NEG_INFINITY, f64::INFINITY),
            max_extent: f64::INFINITY,
        }
    }

    fn clamp(&self, kind: RegionKind, values: &mut [f64]) {
        for &(x, y) in kind.centers() {
            values[x] = values[x].clamp(self.i_range.0, self.i_range.1);
            values[y] = values[y].clamp(self.q_range.0, self.q_range.1);
        }
        for &k in kind.extents() {
            values[k] = values[k].clamp(0.0, self.max_extent);
        }
    }
}

/// Step every parameter by an independent uniform draw from `[-1, 1]`,
/// then clamp into `domain` and wrap angles.
pub fn neighbor<R: Rng>(params: &ParamVector, domain: &SearchDomain, rng: &mut R) -> ParamVector {
    let mut values: Vec<f64> = params
        .values
        .iter()
        .map(|v| v + rng.random_range(-1.0..=1.0))
        .collect();
    domain.clamp(params.kind, &mut values);
    ParamVector::new(params.kind, values).expect("finite steps keep parameters finite")
}

/// Metropolis rule: always move downhill or sideways, uphill with
/// probability `exp(E / T)`.
pub fn accept_move<R: Rng>(energy: f64, temperature: f64, rng: &mut R) -> bool {
    energy >= 0.0 || rng.random::<f64>() < (energy / temperature).exp()
}

/// Temperature after `k` cooling steps.
pub fn temperature_after(t0: f64, alpha: f64, k: u64) -> f64 {
    t0 * alpha.powf(k as f64)
}

/// Random starting configuration: centers uniform in the domain's box,
/// radii/axes uniform in `(0, 2]` (capped by the domain), angles uniform in
/// `[-pi, pi]`.
pub fn random_params<R: Rng>(kind: RegionKind, domain: &SearchDomain, rng: &mut R) -> ParamVector {
    let bounds = [domain.i_range, domain.q_range];
    let mut values = vec![0.0; kind.param_count()];
    let uniform = |rng: &mut R, (lo, hi): (f64, f64)| {
        if hi > lo {
            rng.random_range(lo..=hi)
        } else {
            lo
        }
    };
    for &(x, y) in kind.centers() {
        values[x] = uniform(rng, bounds[0]);
        values[y] = uniform(rng, bounds[1]);
    }
    for &k in kind.extents() {
        values[k] = (2.0 * (1.0 - rng.random::<f64>())).min(domain.max_extent);
    }
    for &k in kind.angles() {
        values[k] = rng.random_range(-PI..=PI);
    }
    ParamVector::new(kind, values).expect("sampled parameters are finite")
}

/// Anneal over an already prepared training set.
pub fn anneal_prepared(
    set: &TrainingSet,
    kind: RegionKind,
    config: &AnnealConfig,
) -> Result<TrainResult> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let score = |p: &ParamVector| set.objective(&p.discriminator(), config.objective);

    let domain = SearchDomain::from_bounds(set.quantile_bounds(DOMAIN_TAIL));
    let mut current = random_params(kind, &domain, &mut rng);
    let mut current_obj = score(&current);
    let mut best = current.clone();
    let mut best_obj = current_obj;
    let mut trace = vec![TracePoint {
        iteration: 0,
        objective: current_obj,
    }];
    let mut temperature = config.t0;

    for iteration in 1..=config.n_iter {
        let candidate = neighbor(&current, &domain, &mut rng);
        let candidate_obj = score(&candidate);
        if candidate_obj < best_obj {
            best = candidate.clone();
            best_obj = candidate_obj;
        }
        if accept_move(current_obj - candidate_obj, temperature, &mut rng) {
            current = candidate;
            current_obj = candidate_obj;
            trace.push(TracePoint {
                iteration,
                objective: current_obj,
            });
        }
        temperature *= config.alpha;
    }

    let (best_params, best_objective) = match config.mode {
        ReturnMode::BestEver => (best, best_obj),
        ReturnMode::FinalState => (current, current_obj),
    };
    Ok(TrainResult {
        best_params,
        best_objective,
        objective_trace: trace,
        evaluations: config.n_iter + 1,
        norm: set.norm(),
    })
}

/// Train a region discriminator on `training`, normalizing by its pooled
/// run shots.
pub fn anneal(training: &Dataset, kind: RegionKind, config: &AnnealConfig) -> Result<TrainResult> {
    let set = TrainingSet::from_dataset(training)?;
    anneal_prepared(&set, kind, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::percentile;
    use crate::qmath::generate_benchmarks;
    use crate::sim::{simulate_dataset, DeviceModel};
    use crate::IqPoint;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};

    fn small_dataset(seed: u64) -> Dataset {
        let set = generate_benchmarks(20, 10, seed).unwrap();
        simulate_dataset(&DeviceModel::default(), &set, 128, seed).unwrap()
    }

    #[test]
    fn neighbor_steps_stay_within_one_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = ParamVector::new(
            RegionKind::Ellipse,
            vec![0.0, 0.0, 5.0, 5.0, 0.0, 1.0, 1.0, 5.0, 5.0, 0.5],
        )
        .unwrap();
        for _ in 0..500 {
            let n = neighbor(&p, &SearchDomain::unbounded(), &mut rng);
            for (a, b) in n.values.iter().zip(&p.values) {
                assert!((a - b).abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn neighbor_clamps_and_wraps() {
        let p = ParamVector::new(RegionKind::Circle, vec![0.0, 0.0, 0.2, 0.0, 0.0, 0.2]).unwrap();
        let mut hit = false;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let n = neighbor(&p, &SearchDomain::unbounded(), &mut rng);
            assert!(n.values[2] >= 0.0 && n.values[5] >= 0.0);
            hit |= n.values[2] == 0.0;
        }
        assert!(hit);
        let q = ParamVector::new(RegionKind::Circle, vec![0.0, 0.0, -0.8, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(q.values[2], 0.0);
        let e = ParamVector::new(
            RegionKind::Ellipse,
            vec![0.0, 0.0, 1.0, 1.0, 3.5, 0.0, 0.0, 1.0, 1.0, -3.5],
        )
        .unwrap();
        assert!((e.values[4] - (3.5 - 2.0 * PI)).abs() < 1e-12);
        assert!((e.values[9] - (2.0 * PI - 3.5)).abs() < 1e-12);
        let dom = SearchDomain::unbounded();
        let a = neighbor(&e, &dom, &mut ChaCha8Rng::seed_from_u64(5));
        let b = neighbor(&e, &dom, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }

    #[test]
    fn neighbor_respects_domain() {
        let dom = SearchDomain::from_bounds([(-1.0, 1.0), (-2.0, 0.5)]);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut p = random_params(RegionKind::Ellipse, &dom, &mut rng);
        for _ in 0..2000 {
            p = neighbor(&p, &dom, &mut rng);
            for (x, y) in [(0, 1), (5, 6)] {
                assert!((-1.0..=1.0).contains(&p.values[x]));
                assert!((-2.0..=0.5).contains(&p.values[y]));
            }
            for k in [2, 3, 7, 8] {
                assert!((0.0..=dom.max_extent).contains(&p.values[k]));
            }
        }
    }

    #[test]
    fn empty_regions_fall_back_to_half() {
        let ds = small_dataset(3);
        let set = TrainingSet::from_dataset(&ds).unwrap();
        let p = ParamVector::new(RegionKind::Circle, vec![0.0, 0.0, 0.0, 1.0, 1.0, 0.0]).unwrap();
        let got = objective_value(&p, &ds, &set.norm(), Objective::Median).unwrap();
        let want: Vec<f64> = ds
            .runs
            .iter()
            .map(|r| (r.correct_p0 - 0.5).abs() * 100.0)
            .collect();
        assert_eq!(got, percentile(&want, 0.5).unwrap());
        assert!(set
            .run_errors(&p.discriminator())
            .iter()
            .all(|r| r.degenerate));
    }

    #[test]
    fn combined_objective_decomposes() {
        let ds = small_dataset(4);
        let set = TrainingSet::from_dataset(&ds).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let dom = SearchDomain::from_bounds(set.bounds());
            let d = random_params(RegionKind::Ellipse, &dom, &mut rng).discriminator();
            let m = set.objective(&d, Objective::Median);
            let s = set.objective(&d, Objective::Spread);
            assert_eq!(set.objective(&d, Objective::MedianPlusSpread), m + s);
        }
    }

    #[test]
    fn perfect_regions_on_noiseless_device() {
        let device = DeviceModel {
            p_relax: 0.0,
            p_excite: 0.0,
            p_smear: 0.0,
            sigma0: crate::sim::Cov2::isotropic(0.1),
            sigma1: crate::sim::Cov2::isotropic(0.1),
            ..DeviceModel::default()
        };
        let set = generate_benchmarks(20, 10, 5).unwrap();
        let ds = simulate_dataset(&device, &set, 1024, 5).unwrap();
        let ts = TrainingSet::from_dataset(&ds).unwrap();
        let n = ts.norm();
        let (x0, y0) = n.apply(IqPoint::new(0.0, 1.0));
        let (x1, y1) = n.apply(IqPoint::new(0.0, -1.0));
        // 0.1 raw std is ~0.1 normalized; radius 0.8 covers > 7 sigma.
        let p = ParamVector::new(RegionKind::Circle, vec![x0, y0, 0.8, x1, y1, 0.8]).unwrap();
        let obj = ts.objective(&p.discriminator(), Objective::MedianPlusSpread);
        // Binomial sampling error at 1024 shots: at most 100 * 0.5 / 32 ≈ 1.6 % per run.
        assert!(obj < 3.0, "objective {obj}");
        assert!(ts
            .run_errors(&p.discriminator())
            .iter()
            .all(|r| !r.degenerate));
    }

    #[test]
    fn zero_iterations_returns_initial() {
        let ds = small_dataset(6);
        let cfg = AnnealConfig {
            n_iter: 0,
            seed: 17,
            ..AnnealConfig::default()
        };
        let r = anneal(&ds, RegionKind::Circle, &cfg).unwrap();
        let set = TrainingSet::from_dataset(&ds).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let init = random_params(
            RegionKind::Circle,
            &SearchDomain::from_bounds(set.quantile_bounds(DOMAIN_TAIL)),
            &mut rng,
        );
        assert_eq!(r.best_params, init);
        assert_eq!(
            r.best_objective,
            set.objective(&init.discriminator(), cfg.objective)
        );
        assert_eq!(r.evaluations, 1);
        assert_eq!(r.objective_trace.len(), 1);
    }

    #[test]
    fn best_is_monotone_and_reproducible() {
        let ds = small_dataset(7);
        let cfg = AnnealConfig {
            n_iter: 300,
            seed: 3,
            ..AnnealConfig::default()
        };
        let a = anneal(&ds, RegionKind::Ellipse, &cfg).unwrap();
        assert!(a
            .objective_trace
            .iter()
            .all(|t| a.best_objective <= t.objective));
        assert!(a.best_objective <= a.objective_trace[0].objective);
        let b = anneal(&ds, RegionKind::Ellipse, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evaluations, 301);
        let set = TrainingSet::from_dataset(&ds).unwrap();
        assert_eq!(
            set.objective(&a.best_params.discriminator(), cfg.objective),
            a.best_objective
        );
    }

    #[test]
    fn final_state_mode_reports_chain_end() {
        let ds = small_dataset(8);
        let cfg = AnnealConfig {
            n_iter: 200,
            seed: 4,
            mode: ReturnMode::FinalState,
            ..AnnealConfig::default()
        };
        let r = anneal(&ds, RegionKind::Circle, &cfg).unwrap();
        assert_eq!(
            r.best_objective,
            r.objective_trace.last().unwrap().objective
        );
    }

    #[test]
    fn empty_training_rejected() {
        let mut ds = small_dataset(9);
        ds.runs.clear();
        assert!(anneal(&ds, RegionKind::Circle, &AnnealConfig::default()).is_err());
        let bad = AnnealConfig {
            alpha: 1.0,
            ..AnnealConfig::default()
        };
        assert!(anneal(&small_dataset(9), RegionKind::Circle, &bad).is_err());
    }

    #[test]
    fn downhill_always_accepted() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10_000 {
            assert!(accept_move(0.3, 1e-9, &mut rng));
            assert!(accept_move(0.0, 1e-9, &mut rng));
        }
    }

    #[test]
    fn temperature_closed_form() {
        let mut t = 1.0;
        for k in 0..20_000u64 {
            assert!((t - temperature_after(1.0, 0.9995, k)).abs() < 1e-12);
            t *= 0.9995;
        }
    }

    proptest! {
        #[test]
        fn params_respect_invariants(v in proptest::collection::vec(-10.0f64..10.0, 10), seed in any::<u64>()) {
            let p = ParamVector::new(RegionKind::Ellipse, v).unwrap();
            let n = neighbor(&p, &SearchDomain::unbounded(), &mut ChaCha8Rng::seed_from_u64(seed));
            for q in [&p, &n] {
                prop_assert!(q.values[2] >= 0.0 && q.values[3] >= 0.0);
                prop_assert!((-PI..PI).contains(&q.values[4]));
                prop_assert!(q.discriminator().validate().is_ok());
            }
            prop_assert_eq!(n.values.len(), 10);
        }
    }
}
