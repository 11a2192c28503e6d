use serde::{Deserialize, Serialize};

/// One shot's integrated readout value: `i` is the real (in-phase) part,
/// `q` the imaginary (quadrature) part.
///
/// Serialized as a two-element array `[i, q]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct IqPoint {
    pub i: f64,
    pub q: f64,
}

impl IqPoint {
    pub const fn new(i: f64, q: f64) -> Self {
        Self { i, q }
    }

    pub fn is_finite(&self) -> bool {
        self.i.is_finite() && self.q.is_finite()
    }
}

impl From<[f64; 2]> for IqPoint {
    fn from([i, q]: [f64; 2]) -> Self {
        Self { i, q }
    }
}

impl From<IqPoint> for [f64; 2] {
    fn from(p: IqPoint) -> Self {
        [p.i, p.q]
    }
}
