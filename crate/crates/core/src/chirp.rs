use crate::error::{Error, Result};

/// Chirp parameters `(c1, c2)` reduced to the unit torus `[0, 1)^2`.
///
/// All transforms and closed forms are periodic in both parameters with period 1,
/// so the reduced representative is canonical.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChirpParams {
    c1: f64,
    c2: f64,
}

impl ChirpParams {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !c1.is_finite() || !c2.is_finite() {
            return Err(Error::NonFinite("chirp parameters"));
        }
        Ok(Self {
            c1: wrap_unit(c1),
            c2: wrap_unit(c2),
        })
    }

    /// OFDM corresponds to `c1 = c2 = 0`.
    pub const OFDM: Self = Self { c1: 0.0, c2: 0.0 };

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.c1, self.c2]
    }
}

/// Reduces `v` to `[0, 1)`. Values that round up to 1 map to 0.
pub fn wrap_unit(v: f64) -> f64 {
    let r = v - libm::floor(v);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Shortest distance between two points on the unit torus.
pub fn torus_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = |x: f64, y: f64| {
        let t = wrap_unit(x - y);
        t.min(1.0 - t)
    };
    libm::hypot(d(a[0], b[0]), d(a[1], b[1]))
}
