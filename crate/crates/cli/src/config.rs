//! Run configuration file: layered TOML with explicit units.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use sawfeti::geometry::{DampingShape, GeometrySpec};
use sawfeti::model::{MaterialSet, ProblemConfig, ScaleSet, SolverChoice, Tolerances};

/// A single frequency or a sweep list, in Hz.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Frequencies {
    One(f64),
    Many(Vec<f64>),
}

impl Frequencies {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Frequencies::One(f) => vec![*f],
            Frequencies::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialPaths {
    pub substrate: PathBuf,
    pub electrode: PathBuf,
}

/// Either explicit per-electrode voltages or the alternating pattern
/// `amplitude·(|i − 3| mod 2)`.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "pattern", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VoltagePattern {
    Explicit { values: Vec<f64> },
    Alternating { amplitude: f64 },
    Uniform { value: f64 },
}

impl VoltagePattern {
    pub fn expand(&self, cells: usize) -> Result<Vec<f64>> {
        Ok(match self {
            VoltagePattern::Explicit { values } => {
                if values.len() != cells {
                    bail!("{} explicit voltages given for {cells} cells", values.len());
                }
                values.clone()
            }
            VoltagePattern::Alternating { amplitude } => {
                ProblemConfig::alternating_voltages(cells, *amplitude)
            }
            VoltagePattern::Uniform { value } => vec![*value; cells],
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleInput {
    /// Pa
    pub c1: f64,
    /// rad/s
    pub omega1: f64,
    /// kg/m³
    pub rho1: f64,
}

impl Default for ScaleInput {
    fn default() -> Self {
        Self {
            c1: 1e10,
            omega1: 1e7,
            rho1: 1.0,
        }
    }
}

fn default_dense_threshold() -> usize {
    20_000
}

fn default_monolithic_cap() -> usize {
    200_000
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Drive frequency in Hz; required, no default.
    pub frequency_hz: Frequencies,
    pub cells: usize,
    pub voltages: VoltagePattern,
    pub materials: MaterialPaths,
    #[serde(default)]
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub damping: DampingShape,
    #[serde(default)]
    pub scales: ScaleInput,
    #[serde(default)]
    pub solver: SolverChoice,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_dense_threshold")]
    pub dense_threshold: usize,
    #[serde(default = "default_monolithic_cap")]
    pub monolithic_cap: usize,
    /// Thread count; 0 uses all cores.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Directory against which relative paths resolve.
    #[serde(skip)]
    pub base: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    fn validate(&self) -> Result<()> {
        let f = self.frequency_hz.values();
        if f.is_empty() || f.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            bail!("frequency_hz must hold positive values");
        }
        for p in [&self.materials.substrate, &self.materials.electrode] {
            let full = self.resolve(p);
            if !full.is_file() {
                bail!("material file {} does not exist", full.display());
            }
        }
        self.voltages.expand(self.cells)?;
        Ok(())
    }

    pub fn output_dir(&self, flag: Option<&Path>) -> PathBuf {
        match (flag, &self.output) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(p)) => self.resolve(p),
            (None, None) => PathBuf::from("sawfeti-out"),
        }
    }

    /// Solver input for each frequency of the sweep.
    pub fn problems(&self) -> Result<Vec<(f64, ProblemConfig)>> {
        let substrate = MaterialSet::load(&self.resolve(&self.materials.substrate))?;
        let electrode = MaterialSet::load(&self.resolve(&self.materials.electrode))?;
        let scales = ScaleSet::new(self.scales.c1, self.scales.omega1, self.scales.rho1)?;
        let voltages = self.voltages.expand(self.cells)?;
        self.frequency_hz
            .values()
            .into_iter()
            .map(|hz| {
                let mut p = ProblemConfig::new(
                    self.cells,
                    2.0 * std::f64::consts::PI * hz,
                    voltages.clone(),
                    self.geometry.clone(),
                    substrate.clone(),
                    electrode.clone(),
                )?;
                p.damping = self.damping;
                p.scales = scales;
                p.solver = self.solver;
                p.tolerances = self.tolerances;
                p.dense_threshold = self.dense_threshold;
                p.monolithic_cap = self.monolithic_cap;
                p.validate()?;
                Ok((hz, p))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shipped() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml")
    }

    #[test]
    fn shipped_default_config_loads() {
        let cfg = RunConfig::load(&shipped()).unwrap();
        assert_eq!(cfg.frequency_hz.values(), [1.9e9]);
        assert_eq!(cfg.geometry, GeometrySpec::default());
        assert_eq!(cfg.damping, DampingShape::ReversedQuartic);
        let problems = cfg.problems().unwrap();
        assert_eq!(problems.len(), 1);
        assert_eq!(problems[0].1.voltages.len(), cfg.cells);
    }

    #[test]
    fn voltage_patterns_expand() {
        let alt = VoltagePattern::Alternating { amplitude: 2.0 }
            .expand(5)
            .unwrap();
        assert_eq!(alt, [0.0, 2.0, 0.0, 2.0, 0.0]);
        assert_eq!(
            VoltagePattern::Uniform { value: 1.5 }.expand(2).unwrap(),
            [1.5, 1.5]
        );
        assert!(VoltagePattern::Explicit { values: vec![1.0] }
            .expand(2)
            .is_err());
    }

    #[test]
    fn missing_material_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let text = std::fs::read_to_string(shipped())
            .unwrap()
            .replace("../materials/al.toml", "nowhere.toml");
        let path = dir.path().join("c.toml");
        std::fs::write(
            &path,
            text.replace(
                "../materials/yx128ln.toml",
                &shipped()
                    .parent()
                    .unwrap()
                    .join("../materials/yx128ln.toml")
                    .display()
                    .to_string(),
            ),
        )
        .unwrap();
        let err = RunConfig::load(&path).unwrap_err().to_string();
        assert!(err.contains("nowhere.toml"), "{err}");
    }

    #[test]
    fn frequency_lists_and_unknown_keys() {
        let f: Frequencies = toml::from_str::<toml::Value>("f = [1.0, 2.0]").unwrap()["f"]
            .clone()
            .try_into()
            .unwrap();
        assert_eq!(f.values(), [1.0, 2.0]);
        let bad = std::fs::read_to_string(shipped()).unwrap() + "\nbogus = 1\n";
        assert!(toml::from_str::<RunConfig>(&bad).is_err());
    }
}
