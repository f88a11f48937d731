//! PML damping functions and complex stretch factors.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

/// Polynomial profile of the damping function across the layer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DampingShape {
    /// `(1 − (1 − t)²)²`: zero at the junction with the physical domain,
    /// one at the exterior boundary.
    #[default]
    ReversedQuartic,
    /// `(1 − t²)²`: one at the junction, zero at the exterior boundary.
    PaperVerbatim,
}

impl DampingShape {
    /// Value at relative depth `t ∈ [0, 1]` into the layer.
    pub fn eval(self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match self {
            Self::ReversedQuartic => {
                let s = 1.0 - (1.0 - t) * (1.0 - t);
                s * s
            }
            Self::PaperVerbatim => {
                let s = 1.0 - t * t;
                s * s
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmlRegion {
    L,
    R,
    B,
    LB,
    RB,
}

/// Junction coordinates and thickness of the five PML regions, in the
/// same length units as the mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DampingProfile {
    pub x1_left: f64,
    pub x1_right: f64,
    pub x3_bottom: f64,
    pub thickness: f64,
    pub shape: DampingShape,
}

/// `(α1, α2, α3)` with `α_k = 1 − i·d_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StretchFactors(pub [C; 3]);

impl StretchFactors {
    pub const IDENTITY: Self = Self([C::new(1.0, 0.0); 3]);

    pub fn product(&self) -> C {
        self.0[0] * self.0[1] * self.0[2]
    }
}

impl DampingProfile {
    /// A profile with no absorbing layer anywhere.
    pub fn none() -> Self {
        Self {
            x1_left: f64::NEG_INFINITY,
            x1_right: f64::INFINITY,
            x3_bottom: f64::NEG_INFINITY,
            thickness: 1.0,
            shape: DampingShape::default(),
        }
    }

    pub fn region(&self, x: [f64; 3]) -> Option<PmlRegion> {
        let left = x[0] < self.x1_left;
        let right = x[0] > self.x1_right;
        let bottom = x[2] < self.x3_bottom;
        match (left, right, bottom) {
            (true, _, true) => Some(PmlRegion::LB),
            (_, true, true) => Some(PmlRegion::RB),
            (true, _, false) => Some(PmlRegion::L),
            (_, true, false) => Some(PmlRegion::R),
            (false, false, true) => Some(PmlRegion::B),
            (false, false, false) => None,
        }
    }

    pub fn damping(&self, x: [f64; 3]) -> [f64; 3] {
        let depth = |d: f64| {
            if d > 0.0 {
                self.shape.eval(d / self.thickness)
            } else {
                0.0
            }
        };
        let d1 = depth(self.x1_left - x[0]).max(depth(x[0] - self.x1_right));
        let d3 = depth(self.x3_bottom - x[2]);
        [d1, 0.0, d3]
    }

    pub fn stretch(&self, x: [f64; 3]) -> StretchFactors {
        let d = self.damping(x);
        StretchFactors(d.map(|dk| C::new(1.0, -dk)))
    }
}

pub fn damping(x: [f64; 3], profile: &DampingProfile) -> [f64; 3] {
    profile.damping(x)
}

pub fn stretch(x: [f64; 3], profile: &DampingProfile) -> StretchFactors {
    profile.stretch(x)
}
