//! Domain-decomposition solver for periodic piezoelectric surface acoustic
//! wave models truncated by perfectly matched layers.

pub mod assembly;
pub mod error;
pub mod feti;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod qtsolver;

pub use error::{Error, Result};
pub use num_complex::Complex64;
