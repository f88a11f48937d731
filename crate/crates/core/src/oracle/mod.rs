//! Monolithic reference solve of the whole truncated device with shared
//! interface DOFs.

use std::time::Instant;

use num_complex::Complex64 as C;
use serde::Serialize;

use crate::assembly::SubregionSystem;
use crate::error::{Error, Result};
use crate::feti::{FieldSolution, ScaledProblem, SubregionSystems};
use crate::linalg::{sparse_factorize, SparseComplexMatrix, TripletBuilder};
use crate::model::ProblemConfig;

/// Iterative refinement rounds of the direct solve.
const REFINE_STEPS: usize = 3;

/// One subregion instance inside the global numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceMap {
    /// Global index of each local free DOF.
    pub global: Vec<usize>,
}

/// The coupled system of all subregions.
pub struct GlobalSystem {
    pub problem: ScaledProblem,
    pub matrix: SparseComplexMatrix,
    pub load: Vec<C>,
    pub left: InstanceMap,
    pub cells: Vec<InstanceMap>,
    pub electrodes: Vec<InstanceMap>,
    pub right: InstanceMap,
    /// Sum of free DOFs over all subregion instances before sharing.
    pub subregion_dofs: usize,
    pub assemble_seconds: f64,
}

impl GlobalSystem {
    pub fn dofs(&self) -> usize {
        self.matrix.dim()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MonolithicReport {
    pub dofs: usize,
    pub residual: f64,
    pub assemble_seconds: f64,
    pub solve_seconds: f64,
    pub total_seconds: f64,
}

struct Numbering {
    next: usize,
}

impl Numbering {
    /// Numbers `n` local DOFs, reusing `shared` pairs `(local, global)`.
    fn instance(&mut self, n: usize, shared: &[(usize, usize)]) -> InstanceMap {
        let mut global = vec![usize::MAX; n];
        for &(l, g) in shared {
            global[l] = g;
        }
        for g in global.iter_mut().filter(|g| **g == usize::MAX) {
            *g = self.next;
            self.next += 1;
        }
        InstanceMap { global }
    }
}

fn pairs(local: &[usize], from: &InstanceMap, remote: &[usize]) -> Vec<(usize, usize)> {
    local
        .iter()
        .zip(remote)
        .map(|(&l, &r)| (l, from.global[r]))
        .collect()
}

fn scatter(b: &mut TripletBuilder, sys: &SubregionSystem, map: &InstanceMap) {
    for (r, c, v) in sys.k.iter() {
        b.add(map.global[r], map.global[c], v);
    }
}

/// Assembles the device as one system; refuses more than
/// `cfg.monolithic_cap` unknowns.
pub fn assemble_monolithic(cfg: &ProblemConfig) -> Result<GlobalSystem> {
    let start = Instant::now();
    let problem = ScaledProblem::new(cfg)?;
    let m = &problem.meshes;
    let n = cfg.cells;
    let sizes = [
        m.left.dofs().n_free(),
        m.cell.dofs().n_free(),
        m.electrode.dofs().n_free(),
        m.right.dofs().n_free(),
    ];
    let subregion_dofs = sizes[0] + n * (sizes[1] + sizes[2]) + sizes[3];
    let t = m.traces()?;
    let shared = t.n_r() * (n + 1) + t.n_t() * n;
    let total = subregion_dofs - shared;
    if total > cfg.monolithic_cap {
        return Err(Error::CapExceeded {
            size: total,
            cap: cfg.monolithic_cap,
        });
    }
    let systems = SubregionSystems::assemble(&problem)?;

    let mut num = Numbering { next: 0 };
    let left = num.instance(sizes[0], &[]);
    let mut cells: Vec<InstanceMap> = Vec::with_capacity(n);
    let mut electrodes = Vec::with_capacity(n);
    for i in 0..n {
        let (prev, prev_face) = match i {
            0 => (&left, &t.left_r.indices),
            _ => (&cells[i - 1], &t.cell_r.indices),
        };
        let cell = num.instance(sizes[1], &pairs(&t.cell_l.indices, prev, prev_face));
        electrodes.push(num.instance(
            sizes[2],
            &pairs(&t.electrode_b.indices, &cell, &t.cell_t.indices),
        ));
        cells.push(cell);
    }
    let right = num.instance(
        sizes[3],
        &pairs(&t.right_l.indices, &cells[n - 1], &t.cell_r.indices),
    );
    debug_assert_eq!(num.next, total);

    let nnz = systems.left.k.nnz()
        + n * (systems.cell.k.nnz() + systems.electrode.k.nnz())
        + systems.right.k.nnz();
    let mut b = TripletBuilder::with_capacity(total, nnz);
    scatter(&mut b, &systems.left, &left);
    for i in 0..n {
        scatter(&mut b, &systems.cell, &cells[i]);
        scatter(&mut b, &systems.electrode, &electrodes[i]);
    }
    scatter(&mut b, &systems.right, &right);
    let matrix = b.build(true);

    let mut load = vec![C::new(0.0, 0.0); total];
    for (i, map) in cells.iter().enumerate() {
        let f = systems.cell.lift(problem.scaled_voltage(i))?;
        for (l, v) in f.into_iter().enumerate() {
            load[map.global[l]] += v;
        }
    }
    Ok(GlobalSystem {
        problem,
        matrix,
        load,
        left,
        cells,
        electrodes,
        right,
        subregion_dofs,
        assemble_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Direct sparse solve, scattered back to per-subregion vectors.
pub fn solve_monolithic(g: &GlobalSystem) -> Result<(FieldSolution, MonolithicReport)> {
    let start = Instant::now();
    let x = sparse_factorize(&g.matrix)?.solve_refined(&g.matrix, &g.load, REFINE_STEPS);
    let solve_seconds = start.elapsed().as_secs_f64();
    let r = g.matrix.mul_vec(&x);
    let num: f64 = r
        .iter()
        .zip(&g.load)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let den: f64 = g.load.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let residual = if den == 0.0 { num } else { num / den };
    let gather = |m: &InstanceMap| m.global.iter().map(|&i| x[i]).collect::<Vec<_>>();
    let fields = FieldSolution {
        left: gather(&g.left),
        cells: g.cells.iter().map(gather).collect(),
        electrodes: g.electrodes.iter().map(gather).collect(),
        right: gather(&g.right),
        multipliers: None,
    };
    let report = MonolithicReport {
        dofs: g.dofs(),
        residual,
        assemble_seconds: g.assemble_seconds,
        solve_seconds,
        total_seconds: g.assemble_seconds + solve_seconds,
    };
    Ok((fields, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feti::solve_saw;
    use crate::geometry::GeometrySpec;
    use crate::model::{aluminium, synthetic_piezoelectric};

    fn tiny(cells: usize, voltages: Vec<f64>) -> ProblemConfig {
        let g = GeometrySpec::small([5, 2, 3], [3, 2, 2], 2, [1, 1, 1]);
        let omega = 2.0 * std::f64::consts::PI * 1.5e9;
        ProblemConfig::new(
            cells,
            omega,
            voltages,
            g,
            synthetic_piezoelectric(),
            aluminium(),
        )
        .unwrap()
    }

    #[test]
    fn counts_symmetry_and_residual() {
        let g = assemble_monolithic(&tiny(3, vec![1.0, 0.0, 1.0])).unwrap();
        let t = g.problem.meshes.traces().unwrap();
        assert_eq!(g.dofs(), g.subregion_dofs - 4 * t.n_r() - 3 * t.n_t());
        assert!(g.matrix.symmetry_defect() <= 1e-13);
        let (_, report) = solve_monolithic(&g).unwrap();
        assert!(report.residual <= 1e-10);
    }

    #[test]
    fn linear_in_voltage_and_zero_at_rest() {
        let (a, _) =
            solve_monolithic(&assemble_monolithic(&tiny(2, vec![1.0, 0.5])).unwrap()).unwrap();
        let (b, _) =
            solve_monolithic(&assemble_monolithic(&tiny(2, vec![2.0, 1.0])).unwrap()).unwrap();
        let doubled = FieldSolution {
            left: a.left.iter().map(|z| z * 2.0).collect(),
            cells: a
                .cells
                .iter()
                .map(|v| v.iter().map(|z| z * 2.0).collect())
                .collect(),
            electrodes: a
                .electrodes
                .iter()
                .map(|v| v.iter().map(|z| z * 2.0).collect())
                .collect(),
            right: a.right.iter().map(|z| z * 2.0).collect(),
            multipliers: None,
        };
        assert!(b.relative_difference(&doubled).unwrap() <= 1e-10);
        let (z, _) =
            solve_monolithic(&assemble_monolithic(&tiny(2, vec![0.0, 0.0])).unwrap()).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn cap_is_enforced() {
        let mut cfg = tiny(2, vec![1.0, 0.0]);
        cfg.monolithic_cap = 10;
        assert!(matches!(
            assemble_monolithic(&cfg),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn agrees_with_decomposed_solve() {
        let cfg = tiny(3, vec![1.0, 0.0, 1.0]);
        let feti = solve_saw(&cfg).unwrap();
        let (mono, report) = solve_monolithic(&assemble_monolithic(&cfg).unwrap()).unwrap();
        let d = feti.fields.relative_difference(&mono).unwrap();
        assert!(d <= 1e-8, "{d}");
        assert!(feti.report.multiplier_dofs < report.dofs);
    }
}
