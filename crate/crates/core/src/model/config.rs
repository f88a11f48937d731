use serde::{Deserialize, Serialize};

use super::material::MaterialSet;
use super::scale::ScaleSet;
use crate::error::{Error, Result};
use crate::geometry::{DampingShape, GeometrySpec};

/// Stopping parameters of the matrix-equation iterations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub eps_d: f64,
    pub eps_n: f64,
    pub iter_max: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_d: 1e-10,
            eps_n: 1e-10,
            iter_max: 50,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverChoice {
    /// Banded direct solve below the size threshold, Double-Newton above.
    #[default]
    Auto,
    Dense,
    DoubleNewton,
}

impl std::str::FromStr for SolverChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "dense" => Ok(Self::Dense),
            "double-newton" => Ok(Self::DoubleNewton),
            other => Err(Error::Config(format!("unknown solver '{other}'"))),
        }
    }
}

/// Everything needed for one frequency-domain solve, in SI units
/// except geometry (µm).
#[derive(Clone, Debug)]
pub struct ProblemConfig {
    pub cells: usize,
    /// rad/s
    pub omega: f64,
    /// V, one per electrode
    pub voltages: Vec<f64>,
    pub geometry: GeometrySpec,
    pub damping: DampingShape,
    pub tolerances: Tolerances,
    pub scales: ScaleSet,
    pub substrate: MaterialSet,
    pub electrode: MaterialSet,
    pub solver: SolverChoice,
    /// Multiplier-system size up to which `Auto` uses the banded solve.
    pub dense_threshold: usize,
    /// DOF cap for the monolithic reference solve.
    pub monolithic_cap: usize,
}

impl ProblemConfig {
    pub fn new(
        cells: usize,
        omega: f64,
        voltages: Vec<f64>,
        geometry: GeometrySpec,
        substrate: MaterialSet,
        electrode: MaterialSet,
    ) -> Result<Self> {
        let cfg = Self {
            cells,
            omega,
            voltages,
            geometry,
            damping: DampingShape::default(),
            tolerances: Tolerances::default(),
            scales: ScaleSet::new(1e10, 1e7, 1.0)?,
            substrate,
            electrode,
            solver: SolverChoice::default(),
            dense_threshold: 20_000,
            monolithic_cap: 200_000,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells == 0 {
            return Err(Error::Config("cell count N must be at least 1".into()));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::Config("angular frequency must be positive".into()));
        }
        if self.voltages.len() != self.cells {
            return Err(Error::DimensionMismatch {
                context: "voltages per electrode",
                expected: self.cells,
                found: self.voltages.len(),
            });
        }
        if self.voltages.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("electrode voltage"));
        }
        let t = &self.tolerances;
        if !(t.eps_d > 0.0 && t.eps_n > 0.0) || t.iter_max == 0 {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        self.scales.check()?;
        self.substrate.validate()?;
        self.electrode.validate()?;
        if !self.substrate.is_piezoelectric() {
            return Err(Error::Config(
                "substrate material needs a permittivity".into(),
            ));
        }
        self.geometry.validate()
    }

    /// Pattern `φ_i = |i − 3| mod 2` for `i = 1..=n`.
    pub fn alternating_voltages(n: usize, amplitude: f64) -> Vec<f64> {
        (1..=n)
            .map(|i| amplitude * ((i as i64 - 3).unsigned_abs() % 2) as f64)
            .collect()
    }

    /// Number of distinct applied voltages.
    pub fn distinct_voltages(&self) -> usize {
        let mut v: Vec<u64> = self.voltages.iter().map(|x| x.to_bits()).collect();
        v.sort_unstable();
        v.dedup();
        v.len()
    }
}
