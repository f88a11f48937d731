//! Dimensionless scaling of material data, frequency and lengths.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use super::material::MaterialSet;
use crate::error::{Error, Result};

const CONSISTENCY_TOL: f64 = 1e-14;

/// Reference magnitudes `c1, ω1, e1, ε1, ρ1, l1` with `c1·ε1 = 1`,
/// `l1 = √(c1/(ω1²ρ1))` and `e1 = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleSet {
    pub c1: f64,
    pub omega1: f64,
    pub e1: f64,
    pub eps1: f64,
    pub rho1: f64,
    pub l1: f64,
}

impl ScaleSet {
    /// Derives `ε1`, `e1` and `l1` from the three free constants.
    pub fn new(c1: f64, omega1: f64, rho1: f64) -> Result<Self> {
        for (name, v) in [("c1", c1), ("omega1", omega1), ("rho1", rho1)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::ScaleConsistency(format!(
                    "{name} must be positive and finite"
                )));
            }
        }
        Ok(Self {
            c1,
            omega1,
            e1: 1.0,
            eps1: 1.0 / c1,
            rho1,
            l1: (c1 / (omega1 * omega1 * rho1)).sqrt(),
        })
    }

    /// Accepts all six constants and checks their mutual consistency.
    pub fn from_parts(
        c1: f64,
        omega1: f64,
        e1: f64,
        eps1: f64,
        rho1: f64,
        l1: f64,
    ) -> Result<Self> {
        let s = Self {
            c1,
            omega1,
            e1,
            eps1,
            rho1,
            l1,
        };
        s.check()?;
        Ok(s)
    }

    pub fn identity() -> Self {
        Self {
            c1: 1.0,
            omega1: 1.0,
            e1: 1.0,
            eps1: 1.0,
            rho1: 1.0,
            l1: 1.0,
        }
    }

    pub fn check(&self) -> Result<()> {
        let fields = [
            ("c1", self.c1),
            ("omega1", self.omega1),
            ("e1", self.e1),
            ("eps1", self.eps1),
            ("rho1", self.rho1),
            ("l1", self.l1),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::ScaleConsistency(format!(
                    "{name} must be positive and finite"
                )));
            }
        }
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        if rel(self.c1 * self.eps1, 1.0) > CONSISTENCY_TOL {
            return Err(Error::ScaleConsistency(format!(
                "c1·eps1 = {} but must equal 1",
                self.c1 * self.eps1
            )));
        }
        let l1 = (self.c1 / (self.omega1 * self.omega1 * self.rho1)).sqrt();
        if rel(self.l1, l1) > CONSISTENCY_TOL {
            return Err(Error::ScaleConsistency(format!(
                "l1 = {} but must equal {l1}",
                self.l1
            )));
        }
        if rel(self.e1, 1.0) > CONSISTENCY_TOL {
            return Err(Error::ScaleConsistency(format!(
                "e1 = {} but must equal 1",
                self.e1
            )));
        }
        Ok(())
    }

    /// Displacement factor `a = √c1 / l1` with `ū = a·u`.
    pub fn displacement_factor(&self) -> f64 {
        self.c1.sqrt() / self.l1
    }

    /// Potential factor `b = √ε1 / l1` with `φ̄ = b·φ`.
    pub fn potential_factor(&self) -> f64 {
        self.eps1.sqrt() / self.l1
    }

    pub fn scale_material(&self, m: &MaterialSet) -> MaterialSet {
        let mut out = m.clone();
        out.c
            .iter_mut()
            .flatten()
            .flatten()
            .flatten()
            .for_each(|v| *v /= self.c1);
        out.e
            .iter_mut()
            .flatten()
            .flatten()
            .for_each(|v| *v /= self.e1);
        if let Some(eps) = out.eps.as_mut() {
            eps.iter_mut().flatten().for_each(|v| *v /= self.eps1);
        }
        out.rho /= self.rho1;
        out
    }
}

/// Maps material data, frequency and lengths (m) to scaled quantities.
pub fn nondimensionalize(
    m: &MaterialSet,
    omega: f64,
    lengths: &[f64],
    s: &ScaleSet,
) -> Result<(MaterialSet, f64, Vec<f64>)> {
    s.check()?;
    Ok((
        s.scale_material(m),
        omega / s.omega1,
        lengths.iter().map(|x| x / s.l1).collect(),
    ))
}

/// Recovers physical displacement and potential from scaled values.
pub fn redimensionalize(u_bar: &[C], phi_bar: &[C], s: &ScaleSet) -> (Vec<C>, Vec<C>) {
    let a = s.displacement_factor();
    let b = s.potential_factor();
    (
        u_bar.iter().map(|u| u / a).collect(),
        phi_bar.iter().map(|p| p / b).collect(),
    )
}
