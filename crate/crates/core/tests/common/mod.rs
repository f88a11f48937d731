#![allow(dead_code)]

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sawfeti::geometry::GeometrySpec;
use sawfeti::linalg::CMat;
use sawfeti::model::{aluminium, synthetic_piezoelectric, ProblemConfig};
use sawfeti::qtsolver::QTSystem;

pub const FREQUENCY_HZ: f64 = 1.5e9;

pub fn omega() -> f64 {
    2.0 * std::f64::consts::PI * FREQUENCY_HZ
}

pub fn config(cells: usize, voltages: Vec<f64>, g: GeometrySpec) -> ProblemConfig {
    ProblemConfig::new(
        cells,
        omega(),
        voltages,
        g,
        synthetic_piezoelectric(),
        aluminium(),
    )
    .unwrap()
}

/// Linear elements on a very coarse grid.
pub fn tiny(cells: usize, voltages: Vec<f64>) -> ProblemConfig {
    config(
        cells,
        voltages,
        GeometrySpec::small([5, 2, 3], [3, 2, 2], 2, [1, 1, 1]),
    )
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat {
    CMat::from_fn(r, c, |_, _| {
        C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let a = random_matrix(rng, n, n);
    (&a + a.transpose()) * C::new(0.5, 0.0)
}

/// Complex symmetric diagonal blocks dominating `B` so the Toeplitz part
/// is well conditioned.
pub fn dominant_system(
    rng: &mut ChaCha8Rng,
    n_m: usize,
    n_blocks: usize,
    columns: usize,
) -> QTSystem {
    let shift = C::new(4.0 * n_m as f64, 0.5 * n_m as f64);
    let mut diag = || random_symmetric(rng, n_m) + CMat::identity(n_m, n_m) * shift;
    let (m_l, m, m_r) = (diag(), diag(), diag());
    let b = random_matrix(rng, n_m, n_m);
    let rhs = random_matrix(rng, (n_blocks + 1) * n_m, columns);
    QTSystem::new(m_l, m, m_r, b, n_blocks, rhs).unwrap()
}

/// Re-uses FETI blocks with a different block count and random loads.
pub fn with_blocks(base: &QTSystem, n_blocks: usize, rng: &mut ChaCha8Rng) -> QTSystem {
    let rhs = random_matrix(rng, (n_blocks + 1) * base.block_size(), 1);
    QTSystem::new(
        base.m_l.clone(),
        base.m.clone(),
        base.m_r.clone(),
        base.b.clone(),
        n_blocks,
        rhs,
    )
    .unwrap()
}
