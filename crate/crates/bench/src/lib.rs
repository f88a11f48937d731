//! Benchmark fixtures shared by the criterion targets.

use std::f64::consts::PI;

use sawfeti::feti::FetiModel;
use sawfeti::geometry::GeometrySpec;
use sawfeti::model::{aluminium, synthetic_piezoelectric, ProblemConfig};
use sawfeti::qtsolver::QTSystem;
use sawfeti::Result;

/// Periodic configuration on a reduced cell with alternating electrode voltages.
pub fn small_config(cells: usize) -> Result<ProblemConfig> {
    let voltages = (0..cells)
        .map(|m| if m % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    ProblemConfig::new(
        cells,
        2.0 * PI * 1.5e9,
        voltages,
        GeometrySpec::small([5, 3, 5], [3, 3, 3], 3, [2, 2, 2]),
        synthetic_piezoelectric(),
        aluminium(),
    )
}

/// Multiplier system for `cells` cells of the reduced configuration.
pub fn small_system(cells: usize) -> Result<QTSystem> {
    Ok(FetiModel::build(&small_config(cells)?)?.qt)
}
