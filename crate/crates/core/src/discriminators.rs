//! Linear, circle and ellipse state discriminators.
//!
//! All discriminators work in z-scored IQ coordinates: a [`Normalization`]
//! fitted at training time maps raw points into the space where the
//! discriminator parameters live.
//!
//! Region discriminators label a point `Zero` or `One` only when it falls in
//! the corresponding closed region, and `Ignored` otherwise. When a point
//! lies in both regions the one with the smaller normalized distance wins
//! (distance over radius for circles, the quadratic-form value for
//! ellipses); exact ties go to `Zero`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, IqPoint, Result};

/// Below this separation of calibration means the linear fit is degenerate.
pub const MIN_MEAN_SEPARATION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Normalization {
    pub mean_i: f64,
    pub mean_q: f64,
    pub std_i: f64,
    pub std_q: f64,
}

impl Normalization {
    pub fn identity() -> Self {
        Self {
            mean_i: 0.0,
            mean_q: 0.0,
            std_i: 1.0,
            std_q: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.mean_i.is_finite()
            && self.mean_q.is_finite()
            && self.std_i.is_finite()
            && self.std_q.is_finite()
            && self.std_i > 0.0
            && self.std_q > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(
                "normalization needs finite means and positive stds",
            ))
        }
    }

    #[inline]
    pub fn apply(&self, p: IqPoint) -> (f64, f64) {
        (
            (p.i - self.mean_i) / self.std_i,
            (p.q - self.mean_q) / self.std_q,
        )
    }
}

/// Per-axis mean and population standard deviation of the pooled points.
pub fn fit_normalization<'a, I>(points: I) -> Result<Normalization>
where
    I: IntoIterator<Item = &'a IqPoint>,
    I::IntoIter: Clone,
{
    let iter = points.into_iter();
    let mut n = 0usize;
    let (mut si, mut sq) = (0.0, 0.0);
    for p in iter.clone() {
        n += 1;
        si += p.i;
        sq += p.q;
    }
    if n < 2 {
        return Err(Error::invalid("normalization needs at least two points"));
    }
    let (mean_i, mean_q) = (si / n as f64, sq / n as f64);
    let (mut vi, mut vq) = (0.0, 0.0);
    for p in iter {
        vi += (p.i - mean_i).powi(2);
        vq += (p.q - mean_q).powi(2);
    }
    let (std_i, std_q) = ((vi / n as f64).sqrt(), (vq / n as f64).sqrt());
    if !(std_i > 0.0 && std_q > 0.0) || !(std_i.is_finite() && std_q.is_finite()) {
        return Err(Error::degenerate("zero variance on an IQ axis"));
    }
    Ok(Normalization {
        mean_i,
        mean_q,
        std_i,
        std_q,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Zero,
    One,
    Ignored,
}

/// Decision rule `w · x + b >= 0  =>  Zero`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearDiscriminator {
    pub w: [f64; 2],
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleDiscriminator {
    pub c0: Circle,
    pub c1: Circle,
}

/// `width` and `height` are full axis lengths; `angle` rotates the
/// width axis counter-clockwise from the x axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    pub angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseDiscriminator {
    pub e0: Ellipse,
    pub e1: Ellipse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Discriminator {
    Linear(LinearDiscriminator),
    Circle(CircleDiscriminator),
    Ellipse(EllipseDiscriminator),
}

impl Discriminator {
    pub fn kind(&self) -> &'static str {
        match self {
            Discriminator::Linear(_) => "linear",
            Discriminator::Circle(_) => "circle",
            Discriminator::Ellipse(_) => "ellipse",
        }
    }

    /// Flat parameter list in field order.
    pub fn params(&self) -> Vec<f64> {
        match self {
            Discriminator::Linear(l) => vec![l.w[0], l.w[1], l.b],
            Discriminator::Circle(c) => {
                vec![c.c0.x, c.c0.y, c.c0.r, c.c1.x, c.c1.y, c.c1.r]
            }
            Discriminator::Ellipse(e) => {
                let mut v = Vec::with_capacity(10);
                for el in [e.e0, e.e1] {
                    v.extend_from_slice(&[el.x, el.y, el.width, el.height, el.angle]);
                }
                v
            }
        }
    }

    pub fn from_params(kind: &str, params: &[f64]) -> Result<Self> {
        let want = match kind {
            "linear" => 3,
            "circle" => 6,
            "ellipse" => 10,
            other => {
                return Err(Error::schema(
                    "kind",
                    format!("unknown discriminator kind {other:?}"),
                ))
            }
        };
        if params.len() != want {
            return Err(Error::schema(
                "params",
                format!("{kind} needs {want} parameters, got {}", params.len()),
            ));
        }
        let p = params;
        let d = match kind {
            "linear" => Discriminator::Linear(LinearDiscriminator {
                w: [p[0], p[1]],
                b: p[2],
            }),
            "circle" => Discriminator::Circle(CircleDiscriminator {
                c0: Circle {
                    x: p[0],
                    y: p[1],
                    r: p[2],
                },
                c1: Circle {
                    x: p[3],
                    y: p[4],
                    r: p[5],
                },
            }),
            _ => {
                let el = |o: usize| Ellipse {
                    x: p[o],
                    y: p[o + 1],
                    width: p[o + 2],
                    height: p[o + 3],
                    angle: p[o + 4],
                };
                Discriminator::Ellipse(EllipseDiscriminator {
                    e0: el(0),
                    e1: el(5),
                })
            }
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.params().iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("discriminator parameters must be finite"));
        }
        match self {
            Discriminator::Linear(l) => {
                if l.w[0] == 0.0 && l.w[1] == 0.0 {
                    return Err(Error::invalid("linear normal vector is zero"));
                }
            }
            Discriminator::Circle(c) => {
                if c.c0.r < 0.0 || c.c1.r < 0.0 {
                    return Err(Error::invalid("circle radius is negative"));
                }
            }
            Discriminator::Ellipse(e) => {
                for el in [e.e0, e.e1] {
                    if el.width < 0.0 || el.height < 0.0 {
                        return Err(Error::invalid("ellipse axis is negative"));
                    }
                    if !(-PI..=PI).contains(&el.angle) {
                        return Err(Error::invalid("ellipse angle outside [-pi, pi]"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A closed elliptical region reduced to the quadratic form
/// `((c·dx + s·dy) / a)² + ((c·dy − s·dx) / b)²` with semi-axes `a`, `b`.
/// A circle is the case `a == b == r`, `c == 1`, `s == 0`. Regions with a
/// zero semi-axis contain nothing.
#[derive(Debug, Clone, Copy)]
pub struct Region {
    cx: f64,
    cy: f64,
    cos: f64,
    sin: f64,
    inv_a: f64,
    inv_b: f64,
    active: bool,
}

impl Region {
    pub fn circle(c: &Circle) -> Self {
        Self {
            cx: c.x,
            cy: c.y,
            cos: 1.0,
            sin: 0.0,
            inv_a: 1.0 / c.r,
            inv_b: 1.0 / c.r,
            active: c.r > 0.0,
        }
    }

    pub fn ellipse(e: &Ellipse) -> Self {
        let (a, b) = (e.width / 2.0, e.height / 2.0);
        let (sin, cos) = if e.angle == 0.0 {
            (0.0, 1.0)
        } else {
            e.angle.sin_cos()
        };
        Self {
            cx: e.x,
            cy: e.y,
            cos,
            sin,
            inv_a: 1.0 / a,
            inv_b: 1.0 / b,
            active: a > 0.0 && b > 0.0,
        }
    }

    /// Squared normalized distance; `<= 1` means inside. Infinite for an
    /// empty region.
    #[inline(always)]
    pub fn metric(&self, x: f64, y: f64) -> f64 {
        if !self.active {
            return f64::INFINITY;
        }
        self.form(x, y)
    }

    pub fn is_empty(&self) -> bool {
        !self.active
    }

    /// The quadratic form without the empty-region check.
    #[inline(always)]
    fn form(&self, x: f64, y: f64) -> f64 {
        let (dx, dy) = (x - self.cx, y - self.cy);
        let u = (self.cos * dx + self.sin * dy) * self.inv_a;
        let v = (self.cos * dy - self.sin * dx) * self.inv_b;
        u * u + v * v
    }
}

// Wrapping adds keep the tally loops vectorizable when overflow checks are on.

fn count_inside(r: &Region, xs: &[f64], ys: &[f64]) -> usize {
    xs.iter().zip(ys).fold(0usize, |n, (&x, &y)| {
        n.wrapping_add((r.form(x, y) <= 1.0) as usize)
    })
}

/// Branch-free `(n0, n1)` tally for two non-empty regions.
fn tally_pair(r0: &Region, r1: &Region, xs: &[f64], ys: &[f64]) -> (usize, usize) {
    let (mut n0, mut n1) = (0u64, 0u64);
    for (&x, &y) in xs.iter().zip(ys) {
        let m0 = r0.form(x, y);
        let m1 = r1.form(x, y);
        let in0 = m0 <= 1.0;
        let in1 = m1 <= 1.0;
        let zero = in0 & (!in1 | (m0 <= m1));
        n0 = n0.wrapping_add(zero as u64);
        n1 = n1.wrapping_add((in1 & !zero) as u64);
    }
    (n0 as usize, n1 as usize)
}

#[inline(always)]
fn region_label(m0: f64, m1: f64) -> Label {
    match (m0 <= 1.0, m1 <= 1.0) {
        (true, true) if m0 <= m1 => Label::Zero,
        (true, true) => Label::One,
        (true, false) => Label::Zero,
        (false, true) => Label::One,
        (false, false) => Label::Ignored,
    }
}

/// A discriminator prepared for fast repeated classification of normalized
/// coordinates.
#[derive(Debug, Clone, Copy)]
pub enum Prepared {
    Linear { w: [f64; 2], b: f64 },
    Regions(Region, Region),
}

impl Prepared {
    pub fn new(d: &Discriminator) -> Self {
        match d {
            Discriminator::Linear(l) => Prepared::Linear { w: l.w, b: l.b },
            Discriminator::Circle(c) => {
                Prepared::Regions(Region::circle(&c.c0), Region::circle(&c.c1))
            }
            Discriminator::Ellipse(e) => {
                Prepared::Regions(Region::ellipse(&e.e0), Region::ellipse(&e.e1))
            }
        }
    }

    #[inline(always)]
    pub fn label(&self, x: f64, y: f64) -> Label {
        match self {
            Prepared::Linear { w, b } => {
                if w[0] * x + w[1] * y + b >= 0.0 {
                    Label::Zero
                } else {
                    Label::One
                }
            }
            Prepared::Regions(r0, r1) => region_label(r0.metric(x, y), r1.metric(x, y)),
        }
    }

    /// `(n0, n1)` over normalized coordinates given as parallel slices.
    pub fn tally(&self, xs: &[f64], ys: &[f64]) -> (usize, usize) {
        match self {
            Prepared::Linear { w, b } => {
                let n0 = xs.iter().zip(ys).fold(0usize, |n, (&x, &y)| {
                    n.wrapping_add((w[0] * x + w[1] * y + b >= 0.0) as usize)
                });
                (n0, xs.len() - n0)
            }
            Prepared::Regions(r0, r1) => match (r0.is_empty(), r1.is_empty()) {
                (true, true) => (0, 0),
                (false, true) => (count_inside(r0, xs, ys), 0),
                (true, false) => (0, count_inside(r1, xs, ys)),
                (false, false) => tally_pair(r0, r1, xs, ys),
            },
        }
    }
}

/// A discriminator together with the normalization it was fitted under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    pub discriminator: Discriminator,
    pub norm: Normalization,
}

impl Model {
    pub fn classify(&self, point: IqPoint) -> Label {
        classify(&self.discriminator, &self.norm, point)
    }

    pub fn observed_p0(&self, shots: &[IqPoint]) -> Result<ObservedP0> {
        observed_p0(&self.discriminator, &self.norm, shots)
    }
}

/// Fisher discriminant fitted on the two calibration captures.
///
/// Points are z-scored with the pooled normalization, then
/// `w = S⁻¹ (μ0 − μ1)` with `S` the pooled within-class (population)
/// covariance, and `b` puts the midpoint of the class means on the boundary.
pub fn fit_linear(cal0: &[IqPoint], cal1: &[IqPoint]) -> Result<Model> {
    if cal0.len() < 2 || cal1.len() < 2 {
        return Err(Error::invalid(
            "each calibration capture needs at least two points",
        ));
    }
    let norm = fit_normalization(cal0.iter().chain(cal1))?;
    let moments = |pts: &[IqPoint]| {
        let n = pts.len() as f64;
        let z: Vec<(f64, f64)> = pts.iter().map(|p| norm.apply(*p)).collect();
        let mx = z.iter().map(|p| p.0).sum::<f64>() / n;
        let my = z.iter().map(|p| p.1).sum::<f64>() / n;
        let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
        for (x, y) in &z {
            sxx += (x - mx) * (x - mx);
            sxy += (x - mx) * (y - my);
            syy += (y - my) * (y - my);
        }
        ([mx, my], [sxx, sxy, syy])
    };
    let (m0, s0) = moments(cal0);
    let (m1, s1) = moments(cal1);
    let diff = [m0[0] - m1[0], m0[1] - m1[1]];
    if diff[0].hypot(diff[1]) < MIN_MEAN_SEPARATION {
        return Err(Error::degenerate("calibration class means coincide"));
    }
    let n = (cal0.len() + cal1.len()) as f64;
    let sxx = (s0[0] + s1[0]) / n;
    let sxy = (s0[1] + s1[1]) / n;
    let syy = (s0[2] + s1[2]) / n;
    let det = sxx * syy - sxy * sxy;
    if det.is_nan() || det <= 1e-12 * (sxx + syy).powi(2) {
        return Err(Error::degenerate(
            "pooled calibration covariance is singular",
        ));
    }
    let mut w = [
        (syy * diff[0] - sxy * diff[1]) / det,
        (sxx * diff[1] - sxy * diff[0]) / det,
    ];
    let mid = [(m0[0] + m1[0]) / 2.0, (m0[1] + m1[1]) / 2.0];
    let mut b = -(w[0] * mid[0] + w[1] * mid[1]);
    if w[0] * m0[0] + w[1] * m0[1] + b < 0.0 {
        w = [-w[0], -w[1]];
        b = -b;
    }
    Ok(Model {
        discriminator: Discriminator::Linear(LinearDiscriminator { w, b }),
        norm,
    })
}

pub fn classify(d: &Discriminator, norm: &Normalization, point: IqPoint) -> Label {
    let (x, y) = norm.apply(point);
    Prepared::new(d).label(x, y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedP0 {
    pub p0: f64,
    /// No shot landed in either region; `p0` is the 0.5 fallback.
    pub degenerate: bool,
    pub n0: usize,
    pub n1: usize,
    pub ignored: usize,
}

impl ObservedP0 {
    pub fn from_counts(n0: usize, n1: usize, total: usize) -> Self {
        let captured = n0 + n1;
        let (p0, degenerate) = if captured == 0 {
            (0.5, true)
        } else {
            (n0 as f64 / captured as f64, false)
        };
        Self {
            p0,
            degenerate,
            n0,
            n1,
            ignored: total - captured,
        }
    }
}

/// Fraction of captured (non-ignored) shots labeled `Zero`.
pub fn observed_p0(
    d: &Discriminator,
    norm: &Normalization,
    shots: &[IqPoint],
) -> Result<ObservedP0> {
    if shots.is_empty() {
        return Err(Error::invalid("no shots to classify"));
    }
    let prepared = Prepared::new(d);
    let (mut n0, mut n1) = (0, 0);
    for p in shots {
        let (x, y) = norm.apply(*p);
        match prepared.label(x, y) {
            Label::Zero => n0 += 1,
            Label::One => n1 += 1,
            Label::Ignored => {}
        }
    }
    Ok(ObservedP0::from_counts(n0, n1, shots.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn circles(c0: (f64, f64, f64), c1: (f64, f64, f64)) -> Discriminator {
        Discriminator::Circle(CircleDiscriminator {
            c0: Circle {
                x: c0.0,
                y: c0.1,
                r: c0.2,
            },
            c1: Circle {
                x: c1.0,
                y: c1.1,
                r: c1.2,
            },
        })
    }

    fn cloud(rng: &mut ChaCha8Rng, n: usize, ci: f64, cq: f64, s: f64) -> Vec<IqPoint> {
        (0..n)
            .map(|_| {
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                IqPoint::new(ci + s * a, cq + s * b)
            })
            .collect()
    }

    #[test]
    fn normalization_population_convention() {
        let n = fit_normalization(&[IqPoint::new(0.0, 0.0), IqPoint::new(2.0, 2.0)]).unwrap();
        assert_eq!((n.mean_i, n.mean_q, n.std_i, n.std_q), (1.0, 1.0, 1.0, 1.0));
        assert!(matches!(
            fit_normalization(&[IqPoint::new(1.0, 1.0)]),
            Err(Error::InvalidInput(_))
        ));
        let flat = [IqPoint::new(0.0, 1.0), IqPoint::new(0.0, 2.0)];
        assert!(matches!(
            fit_normalization(&flat),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn normalization_of_standardized_cloud() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts = cloud(&mut rng, 5000, 3.0, -2.0, 0.7);
        let n = fit_normalization(&pts).unwrap();
        let z: Vec<IqPoint> = pts
            .iter()
            .map(|p| {
                let (x, y) = n.apply(*p);
                IqPoint::new(x, y)
            })
            .collect();
        let again = fit_normalization(&z).unwrap();
        assert!(again.mean_i.abs() < 1e-12 && again.mean_q.abs() < 1e-12);
        assert!((again.std_i - 1.0).abs() < 1e-12 && (again.std_q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_calibration_gives_horizontal_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c0 = cloud(&mut rng, 4000, 0.0, 1.0, 0.4);
        // Mirror image of c0 so the problem is exactly symmetric in q.
        let c1: Vec<IqPoint> = c0.iter().map(|p| IqPoint::new(p.i, -p.q)).collect();
        let model = fit_linear(&c0, &c1).unwrap();
        let Discriminator::Linear(l) = model.discriminator else {
            panic!("expected linear")
        };
        assert!(l.w[1] > 0.0);
        assert!(l.w[0].abs() < 1e-9 * l.w[1].abs());
        assert!(l.b.abs() < 1e-9 * l.w[1].abs());
    }

    #[test]
    fn identical_calibrations_are_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = cloud(&mut rng, 100, 0.0, 0.0, 1.0);
        assert!(matches!(fit_linear(&c, &c), Err(Error::DegenerateData(_))));
        assert!(fit_linear(&c[..1], &c).is_err());
    }

    #[test]
    fn separated_clusters_classify_own_calibration() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c0 = cloud(&mut rng, 2000, 1.0, 2.0, 0.5);
        let c1 = cloud(
            &mut rng,
            2000,
            1.0 + 3.0 * 0.5 * 2.0f64.sqrt(),
            2.0 - 1.5 * 2.0f64.sqrt(),
            0.5,
        );
        let model = fit_linear(&c0, &c1).unwrap();
        let ok0 = c0
            .iter()
            .filter(|p| model.classify(**p) == Label::Zero)
            .count();
        let ok1 = c1
            .iter()
            .filter(|p| model.classify(**p) == Label::One)
            .count();
        assert!(ok0 as f64 >= 0.99 * 2000.0 && ok1 as f64 >= 0.99 * 2000.0);
    }

    #[test]
    fn classify_examples() {
        let id = Normalization::identity();
        let d = circles((0.0, 0.0, 1.0), (5.0, 0.0, 1.0));
        assert_eq!(classify(&d, &id, IqPoint::new(0.0, 0.0)), Label::Zero);
        assert_eq!(classify(&d, &id, IqPoint::new(5.0, 0.0)), Label::One);
        assert_eq!(
            classify(&d, &id, IqPoint::new(100.0, 100.0)),
            Label::Ignored
        );
        assert_eq!(classify(&d, &id, IqPoint::new(1.0, 0.0)), Label::Zero);
        let lin = Discriminator::Linear(LinearDiscriminator {
            w: [0.0, 1.0],
            b: 0.0,
        });
        assert_eq!(classify(&lin, &id, IqPoint::new(5.0, -0.2)), Label::One);
        assert_eq!(classify(&lin, &id, IqPoint::new(5.0, 0.0)), Label::Zero);
    }

    #[test]
    fn overlap_tie_break() {
        let id = Normalization::identity();
        // Point at x = 0.5: distance 0.5 / radius 1 for c0, 0.5 / 2 for c1.
        let d = circles((0.0, 0.0, 1.0), (1.0, 0.0, 2.0));
        assert_eq!(classify(&d, &id, IqPoint::new(0.5, 0.0)), Label::One);
        let same = circles((0.0, 0.0, 1.0), (1.0, 0.0, 1.0));
        assert_eq!(classify(&same, &id, IqPoint::new(0.5, 0.0)), Label::Zero);
    }

    #[test]
    fn zero_radius_matches_nothing() {
        let id = Normalization::identity();
        let d = circles((0.0, 0.0, 0.0), (0.0, 0.0, 0.0));
        assert_eq!(classify(&d, &id, IqPoint::new(0.0, 0.0)), Label::Ignored);
        let e = Discriminator::Ellipse(EllipseDiscriminator {
            e0: Ellipse {
                x: 0.0,
                y: 0.0,
                width: 0.0,
                height: 3.0,
                angle: 0.0,
            },
            e1: Ellipse {
                x: 0.0,
                y: 0.0,
                width: 3.0,
                height: 0.0,
                angle: 1.0,
            },
        });
        assert_eq!(classify(&e, &id, IqPoint::new(0.0, 0.0)), Label::Ignored);
    }

    #[test]
    fn rotated_ellipse_membership() {
        let id = Normalization::identity();
        let long_diag = Ellipse {
            x: 0.0,
            y: 0.0,
            width: 4.0,
            height: 1.0,
            angle: PI / 4.0,
        };
        let far = Ellipse {
            x: 50.0,
            y: 50.0,
            width: 1.0,
            height: 1.0,
            angle: 0.0,
        };
        let d = Discriminator::Ellipse(EllipseDiscriminator {
            e0: long_diag,
            e1: far,
        });
        assert_eq!(classify(&d, &id, IqPoint::new(1.2, 1.2)), Label::Zero);
        assert_eq!(classify(&d, &id, IqPoint::new(1.2, -1.2)), Label::Ignored);
    }

    #[test]
    fn observed_p0_examples() {
        // 400 Zero, 500 One, 124 Ignored.
        let id = Normalization::identity();
        let d = circles((0.0, 0.0, 1.0), (10.0, 0.0, 1.0));
        let mut shots = vec![IqPoint::new(0.0, 0.0); 400];
        shots.extend(vec![IqPoint::new(10.0, 0.0); 500]);
        shots.extend(vec![IqPoint::new(5.0, 0.0); 124]);
        let o = observed_p0(&d, &id, &shots).unwrap();
        assert_eq!((o.n0, o.n1, o.ignored), (400, 500, 124));
        assert!((o.p0 - 400.0 / 900.0).abs() < 1e-15);
        assert!(!o.degenerate);

        let lin = Discriminator::Linear(LinearDiscriminator {
            w: [0.0, 1.0],
            b: 0.0,
        });
        let mut shots = vec![IqPoint::new(0.0, 1.0); 548];
        shots.extend(vec![IqPoint::new(0.0, -1.0); 476]);
        let o = observed_p0(&lin, &id, &shots).unwrap();
        assert!((o.p0 - 0.53515625).abs() < 1e-15);

        let o = observed_p0(&d, &id, &[IqPoint::new(5.0, 0.0); 7]).unwrap();
        assert!(o.degenerate);
        assert_eq!(o.p0, 0.5);
        assert!(observed_p0(&d, &id, &[]).is_err());
    }

    #[test]
    fn params_round_trip_and_kind_errors() {
        let d = circles((0.1, 0.2, 0.3), (0.4, 0.5, 0.6));
        assert_eq!(
            Discriminator::from_params("circle", &d.params()).unwrap(),
            d
        );
        let err = Discriminator::from_params("square", &[1.0]).unwrap_err();
        assert!(matches!(err, Error::Schema { ref key, .. } if key == "kind"));
        assert!(Discriminator::from_params("ellipse", &[0.0; 6]).is_err());
        assert!(Discriminator::from_params("circle", &[0.0, 0.0, -1.0, 0.0, 0.0, 1.0]).is_err());
    }

    fn region_oracle(x: f64, y: f64, e: &Ellipse) -> Option<f64> {
        // Independent evaluation via the general conic x^T A x with
        // A = R diag(1/a², 1/b²) R^T.
        let (a, b) = (e.width / 2.0, e.height / 2.0);
        if a <= 0.0 || b <= 0.0 {
            return None;
        }
        let (c, s) = (e.angle.cos(), e.angle.sin());
        let (ia2, ib2) = (1.0 / (a * a), 1.0 / (b * b));
        let axx = c * c * ia2 + s * s * ib2;
        let ayy = s * s * ia2 + c * c * ib2;
        let axy = c * s * (ia2 - ib2);
        let (dx, dy) = (x - e.x, y - e.y);
        let q = axx * dx * dx + 2.0 * axy * dx * dy + ayy * dy * dy;
        Some(q)
    }

    proptest! {
        #[test]
        fn ellipse_matches_conic_oracle(
            params in proptest::collection::vec(-3.0f64..3.0, 10),
            pts in proptest::collection::vec((-4.0f64..4.0, -4.0f64..4.0), 200),
        ) {
            let mut p = params.clone();
            for k in [2, 3, 7, 8] { p[k] = p[k].abs() + 0.05; }
            for k in [4, 9] { p[k] = p[k].clamp(-PI, PI); }
            let d = Discriminator::from_params("ellipse", &p).unwrap();
            let Discriminator::Ellipse(ed) = d else { unreachable!() };
            let id = Normalization::identity();
            for (x, y) in pts {
                let q0 = region_oracle(x, y, &ed.e0).unwrap();
                let q1 = region_oracle(x, y, &ed.e1).unwrap();
                // Skip points within rounding of a boundary or a tie.
                if (q0 - 1.0).abs() < 1e-9 || (q1 - 1.0).abs() < 1e-9 || (q0 - q1).abs() < 1e-9 {
                    continue;
                }
                let want = match (q0 <= 1.0, q1 <= 1.0) {
                    (false, false) => Label::Ignored,
                    (true, false) => Label::Zero,
                    (false, true) => Label::One,
                    (true, true) => if q0 < q1 { Label::Zero } else { Label::One },
                };
                prop_assert_eq!(classify(&d, &id, IqPoint::new(x, y)), want);
            }
        }

        #[test]
        fn circle_region_soundness(
            c in (-2.0f64..2.0, -2.0f64..2.0, 0.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, 0.0f64..2.0),
            x in -4.0f64..4.0, y in -4.0f64..4.0,
        ) {
            let d = circles((c.0, c.1, c.2), (c.3, c.4, c.5));
            let label = classify(&d, &Normalization::identity(), IqPoint::new(x, y));
            let d0 = (x - c.0).hypot(y - c.1);
            let d1 = (x - c.3).hypot(y - c.4);
            if d0 > c.2 * (1.0 + 1e-12) { prop_assert_ne!(label, Label::Zero); }
            if d1 > c.5 * (1.0 + 1e-12) { prop_assert_ne!(label, Label::One); }
        }

        #[test]
        fn ellipse_with_equal_axes_is_circle(
            cx in -2.0f64..2.0, cy in -2.0f64..2.0, r0 in 0.0f64..2.0,
            dx in -2.0f64..2.0, dy in -2.0f64..2.0, r1 in 0.0f64..2.0,
            pts in proptest::collection::vec((-4.0f64..4.0, -4.0f64..4.0), 100),
        ) {
            let circ = circles((cx, cy, r0), (dx, dy, r1));
            let ell = Discriminator::Ellipse(EllipseDiscriminator {
                e0: Ellipse { x: cx, y: cy, width: 2.0 * r0, height: 2.0 * r0, angle: 0.0 },
                e1: Ellipse { x: dx, y: dy, width: 2.0 * r1, height: 2.0 * r1, angle: 0.0 },
            });
            let id = Normalization::identity();
            for (x, y) in pts {
                let p = IqPoint::new(x, y);
                prop_assert_eq!(classify(&circ, &id, p), classify(&ell, &id, p));
            }
        }

        #[test]
        fn linear_uses_every_shot(
            w0 in -2.0f64..2.0, w1 in 0.1f64..2.0, b in -1.0f64..1.0,
            pts in proptest::collection::vec((-4.0f64..4.0, -4.0f64..4.0), 1..300),
        ) {
            let d = Discriminator::Linear(LinearDiscriminator { w: [w0, w1], b });
            let shots: Vec<IqPoint> = pts.iter().map(|&(x, y)| IqPoint::new(x, y)).collect();
            let o = observed_p0(&d, &Normalization::identity(), &shots).unwrap();
            prop_assert_eq!(o.n0 + o.n1, shots.len());
            prop_assert!((0.0..=1.0).contains(&o.p0));
        }

        #[test]
        fn tally_agrees_with_labels(
            params in proptest::collection::vec(-2.0f64..2.0, 6),
            pts in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 0..200),
        ) {
            let mut p = params.clone();
            p[2] = p[2].abs();
            p[5] = p[5].abs();
            let prep = Prepared::new(&Discriminator::from_params("circle", &p).unwrap());
            let xs: Vec<f64> = pts.iter().map(|q| q.0).collect();
            let ys: Vec<f64> = pts.iter().map(|q| q.1).collect();
            let (n0, n1) = prep.tally(&xs, &ys);
            let labels: Vec<Label> = pts.iter().map(|&(x, y)| prep.label(x, y)).collect();
            prop_assert_eq!(n0, labels.iter().filter(|l| **l == Label::Zero).count());
            prop_assert_eq!(n1, labels.iter().filter(|l| **l == Label::One).count());
        }

        /// Shifting every raw point by a constant and refitting the
        /// normalization leaves all labels unchanged. Coordinates are
        /// quarter-integers and the count is a power of two so the refit
        /// is exact.
        #[test]
        fn translation_equivariance(
            raw in proptest::collection::vec((-40i32..40, -40i32..40), 16),
            shift in (-1000i32..1000, -1000i32..1000),
            params in proptest::collection::vec(-2.0f64..2.0, 10),
        ) {
            let pts: Vec<IqPoint> = raw.iter().map(|&(a, b)| IqPoint::new(a as f64 / 4.0, b as f64 / 4.0)).collect();
            let moved: Vec<IqPoint> = pts.iter().map(|p| IqPoint::new(p.i + shift.0 as f64, p.q + shift.1 as f64)).collect();
            let (Ok(n1), Ok(n2)) = (fit_normalization(&pts), fit_normalization(&moved)) else {
                return Ok(());
            };
            let mut p = params.clone();
            for k in [2, 3, 7, 8] { p[k] = p[k].abs(); }
            for k in [4, 9] { p[k] = p[k].clamp(-PI, PI); }
            let d = Discriminator::from_params("ellipse", &p).unwrap();
            for (a, b) in pts.iter().zip(&moved) {
                prop_assert_eq!(classify(&d, &n1, *a), classify(&d, &n2, *b));
            }
        }
    }
}
