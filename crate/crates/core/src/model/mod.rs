//! Material data, dimensionless scaling and problem configuration.

pub mod config;
pub mod material;
pub mod scale;

pub use config::{ProblemConfig, SolverChoice, Tolerances};
pub use material::{
    aluminium, euler_rotation, lithium_niobate, rotate_material, synthetic_piezoelectric,
    MaterialSet,
};
pub use scale::{nondimensionalize, redimensionalize, ScaleSet};
