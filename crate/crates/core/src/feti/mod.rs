//! Dual domain decomposition: interface blocks, the padded multiplier
//! system, its solution and per-subregion field recovery.

pub mod blocks;
pub mod trace;

use std::time::{Duration, Instant};

use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::Serialize;

pub use blocks::{
    assemble_multiplier_system, assemble_unpadded, interface_blocks, rhs_blocks, InterfaceBlockSet,
    InterfaceResponses, MultiplierVector, RhsBlocks, SystemSet, Traces, VoltageResponse,
};
pub use trace::{build_trace, TraceMatrix};

use crate::assembly::{assemble_electrode, assemble_piezo, SubregionSystem};
use crate::error::{Error, Result};
use crate::geometry::{
    build_side_block, build_unit_cell, DampingProfile, Side, SubregionKind, SubregionMesh,
};
use crate::linalg::{CMat, CVec};
use crate::model::{nondimensionalize, MaterialSet, ProblemConfig, SolverChoice};
use crate::qtsolver::{
    complete_factorization, double_newton, qt_dense_oracle, smw_solve, IterationReport, QTSystem,
};

/// Largest accepted relative residual of the multiplier system.
pub const MULTIPLIER_RESIDUAL_TOL: f64 = 1e-8;

/// The four subregion meshes.
#[derive(Clone, Debug)]
pub struct MeshSet {
    pub left: SubregionMesh,
    pub cell: SubregionMesh,
    pub electrode: SubregionMesh,
    pub right: SubregionMesh,
}

impl MeshSet {
    /// Builds all meshes in scaled length units (`unit` per µm).
    pub fn build(cfg: &ProblemConfig, unit: f64) -> Result<Self> {
        let g = &cfg.geometry;
        let (cell, electrode) = build_unit_cell(g, unit)?;
        Ok(Self {
            left: build_side_block(Side::Left, g, cfg.cells, unit)?,
            cell,
            electrode,
            right: build_side_block(Side::Right, g, cfg.cells, unit)?,
        })
    }

    pub fn traces(&self) -> Result<Traces> {
        Ok(Traces {
            left_r: build_trace(&self.left, Side::Right)?,
            cell_l: build_trace(&self.cell, Side::Left)?,
            cell_t: build_trace(&self.cell, Side::Top)?,
            cell_r: build_trace(&self.cell, Side::Right)?,
            electrode_b: build_trace(&self.electrode, Side::Bottom)?,
            right_l: build_trace(&self.right, Side::Left)?,
        })
    }
}

/// Scaled problem data shared by the decomposed and monolithic solvers.
#[derive(Clone, Debug)]
pub struct ScaledProblem {
    pub config: ProblemConfig,
    /// Scaled length per µm.
    pub unit: f64,
    pub omega: f64,
    pub substrate: MaterialSet,
    pub electrode: MaterialSet,
    pub profile: DampingProfile,
    pub meshes: MeshSet,
}

impl ScaledProblem {
    pub fn new(cfg: &ProblemConfig) -> Result<Self> {
        cfg.validate()?;
        let s = &cfg.scales;
        let (substrate, omega, unit) = nondimensionalize(&cfg.substrate, cfg.omega, &[1e-6], s)?;
        let (electrode, _, _) = nondimensionalize(&cfg.electrode, cfg.omega, &[], s)?;
        let unit = unit[0];
        let g = &cfg.geometry;
        let profile = DampingProfile {
            x1_left: 0.0,
            x1_right: cfg.cells as f64 * g.pitch * unit,
            x3_bottom: -g.depth * unit,
            thickness: g.pml_thickness * unit,
            shape: cfg.damping,
        };
        let meshes = MeshSet::build(cfg, unit)?;
        Ok(Self {
            config: cfg.clone(),
            unit,
            omega,
            substrate,
            electrode,
            profile,
            meshes,
        })
    }

    /// Scaled Dirichlet potential of electrode `m`.
    pub fn scaled_voltage(&self, m: usize) -> f64 {
        self.config.voltages[m] * self.config.scales.potential_factor()
    }

    pub fn scaled_voltages(&self) -> Vec<f64> {
        (0..self.config.cells)
            .map(|m| self.scaled_voltage(m))
            .collect()
    }

    /// Mesh of a subregion type.
    pub fn mesh(&self, kind: SubregionKind) -> &SubregionMesh {
        match kind {
            SubregionKind::Left => &self.meshes.left,
            SubregionKind::Cell => &self.meshes.cell,
            SubregionKind::Electrode => &self.meshes.electrode,
            SubregionKind::Right => &self.meshes.right,
        }
    }
}

/// Assembled subregion operators of the four types.
#[derive(Debug)]
pub struct SubregionSystems {
    pub left: SubregionSystem,
    pub cell: SubregionSystem,
    pub electrode: SubregionSystem,
    pub right: SubregionSystem,
}

impl SubregionSystems {
    pub fn assemble(p: &ScaledProblem) -> Result<Self> {
        let m = &p.meshes;
        let ((left, cell), (electrode, right)) = rayon::join(
            || {
                rayon::join(
                    || assemble_piezo(&m.left, &p.substrate, p.omega, &p.profile),
                    || assemble_piezo(&m.cell, &p.substrate, p.omega, &p.profile),
                )
            },
            || {
                rayon::join(
                    || assemble_electrode(&m.electrode, &p.electrode, p.omega),
                    || assemble_piezo(&m.right, &p.substrate, p.omega, &p.profile),
                )
            },
        );
        Ok(Self {
            left: left?,
            cell: cell?,
            electrode: electrode?,
            right: right?,
        })
    }

    pub fn as_set(&self) -> SystemSet<'_> {
        SystemSet {
            left: &self.left,
            cell: &self.cell,
            electrode: &self.electrode,
            right: &self.right,
        }
    }
}

/// Scaled free-DOF vectors of every subregion instance.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSolution {
    pub left: Vec<C>,
    pub cells: Vec<Vec<C>>,
    pub electrodes: Vec<Vec<C>>,
    pub right: Vec<C>,
    pub multipliers: Option<MultiplierVector>,
}

impl FieldSolution {
    fn parts(&self) -> impl Iterator<Item = &[C]> {
        std::iter::once(self.left.as_slice())
            .chain(self.cells.iter().map(Vec::as_slice))
            .chain(self.electrodes.iter().map(Vec::as_slice))
            .chain(std::iter::once(self.right.as_slice()))
    }

    pub fn norm(&self) -> f64 {
        self.parts()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.parts().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Discrete L2 difference relative to `reference`.
    pub fn relative_difference(&self, reference: &FieldSolution) -> Result<f64> {
        let mine: Vec<&[C]> = self.parts().collect();
        let theirs: Vec<&[C]> = reference.parts().collect();
        if mine.len() != theirs.len() {
            return Err(Error::DimensionMismatch {
                context: "subregion count",
                expected: theirs.len(),
                found: mine.len(),
            });
        }
        let mut diff = 0.0;
        for (a, b) in mine.iter().zip(&theirs) {
            if a.len() != b.len() {
                return Err(Error::DimensionMismatch {
                    context: "subregion field",
                    expected: b.len(),
                    found: a.len(),
                });
            }
            diff += a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>();
        }
        let n = reference.norm();
        Ok(if n == 0.0 {
            diff.sqrt()
        } else {
            diff.sqrt() / n
        })
    }

    /// Total number of free DOFs across all subregion instances.
    pub fn dofs(&self) -> usize {
        self.parts().map(<[C]>::len).sum()
    }
}

/// Physical nodal values of one subregion instance.
#[derive(Clone, Debug, Serialize)]
pub struct NodalValue {
    /// m
    pub x: [f64; 3],
    /// m
    pub u: [C; 3],
    /// V
    pub phi: C,
}

#[derive(Clone, Debug)]
pub struct SubregionField {
    pub kind: SubregionKind,
    /// Cell index for cells and electrodes.
    pub index: usize,
    pub nodes: Vec<NodalValue>,
}

/// Which path solved the multiplier system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverPath {
    Dense,
    DoubleNewton,
}

/// Wall-clock seconds per stage.
#[derive(Clone, Debug, Default, Serialize)]
pub struct StageTimings {
    pub assemble_blocks: f64,
    pub solve_multipliers: f64,
    /// Matrix-equation factorization, Double-Newton path only.
    pub solve_matrix_equations: Option<f64>,
    /// Sherman-Morrison-Woodbury sweep, Double-Newton path only.
    pub compute_smw: Option<f64>,
    pub recover_fields: f64,
    pub total: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub path: SolverPath,
    pub timings: StageTimings,
    pub lift_solves: usize,
    pub trace_solves: usize,
    pub n_t: usize,
    pub n_r: usize,
    /// Unpadded multiplier count `n_r + N(n_t + n_r)`.
    pub multiplier_dofs: usize,
    pub padded_dofs: usize,
    /// Free DOFs summed over all subregion instances.
    pub subregion_dofs: usize,
    pub residual: f64,
    pub iteration: Option<IterationReport>,
    pub factorization_residuals: Option<[f64; 3]>,
}

/// A fully assembled decomposed model ready to solve.
pub struct FetiModel {
    pub problem: ScaledProblem,
    pub systems: SubregionSystems,
    pub traces: Traces,
    pub blocks: InterfaceBlockSet,
    pub responses: InterfaceResponses,
    pub rhs: RhsBlocks,
    pub qt: QTSystem,
    build_time: Duration,
}

impl FetiModel {
    pub fn build(cfg: &ProblemConfig) -> Result<Self> {
        let start = Instant::now();
        let problem = ScaledProblem::new(cfg)?;
        let systems = SubregionSystems::assemble(&problem)?;
        let traces = problem.meshes.traces()?;
        let ((blocks, responses), rhs) = {
            let set = systems.as_set();
            let voltages = problem.scaled_voltages();
            let (a, b) = rayon::join(
                || interface_blocks(&set, &traces),
                || rhs_blocks(&systems.cell, &traces, &voltages),
            );
            (a?, b?)
        };
        let qt = assemble_multiplier_system(&blocks, &rhs, cfg.cells)?;
        Ok(Self {
            problem,
            systems,
            traces,
            blocks,
            responses,
            rhs,
            qt,
            build_time: start.elapsed(),
        })
    }

    pub fn n_t(&self) -> usize {
        self.traces.n_t()
    }

    pub fn n_r(&self) -> usize {
        self.traces.n_r()
    }

    fn choose_path(&self) -> SolverPath {
        let cfg = &self.problem.config;
        match cfg.solver {
            SolverChoice::Dense => SolverPath::Dense,
            SolverChoice::DoubleNewton => SolverPath::DoubleNewton,
            SolverChoice::Auto => {
                if cfg.cells * (self.n_t() + self.n_r()) <= cfg.dense_threshold {
                    SolverPath::Dense
                } else {
                    SolverPath::DoubleNewton
                }
            }
        }
    }

    /// Solves the padded multiplier system and recovers all fields.
    pub fn solve(&self) -> Result<(FieldSolution, SolveReport)> {
        let path = self.choose_path();
        let tol = &self.problem.config.tolerances;
        let mut timings = StageTimings {
            assemble_blocks: self.build_time.as_secs_f64(),
            ..Default::default()
        };
        let start = Instant::now();
        let (x, iteration, factorization_residuals) = match path {
            SolverPath::Dense => (qt_dense_oracle(&self.qt, usize::MAX)?, None, None),
            SolverPath::DoubleNewton => {
                let t0 = Instant::now();
                let qt = &self.qt;
                let (lambda1, report) =
                    double_newton(&qt.m, &qt.b, tol.eps_d, tol.eps_n, tol.iter_max)?;
                let fact = complete_factorization(&lambda1, &qt.b, &qt.m_l, &qt.m_r)?
                    .with_report(report.clone());
                timings.solve_matrix_equations = Some(t0.elapsed().as_secs_f64());
                let t1 = Instant::now();
                let x = smw_solve(&fact, qt)?;
                timings.compute_smw = Some(t1.elapsed().as_secs_f64());
                (x, Some(report), Some(fact.residuals(&qt.b, &qt.m, &qt.m_r)))
            }
        };
        timings.solve_multipliers = start.elapsed().as_secs_f64();
        let residual = self.qt.relative_residual(&x);
        if !(residual <= MULTIPLIER_RESIDUAL_TOL) {
            let iterations = iteration
                .as_ref()
                .map_or(0, |r| r.double_iterations + r.newton_iterations);
            return Err(Error::NoConvergence {
                method: match path {
                    SolverPath::Dense => "banded multiplier solve",
                    SolverPath::DoubleNewton => "Double-Newton multiplier solve",
                },
                iterations,
                residual,
            });
        }
        let (n_t, n_r, n) = (self.n_t(), self.n_r(), self.problem.config.cells);
        let lambda = MultiplierVector::new(n_t, n_r, n, x.column(0).into_owned())?;
        let t2 = Instant::now();
        let fields = self.recover_fields(lambda)?;
        timings.recover_fields = t2.elapsed().as_secs_f64();
        timings.total =
            timings.assemble_blocks + timings.solve_multipliers + timings.recover_fields;
        let report = SolveReport {
            path,
            timings,
            lift_solves: self.rhs.lift_solves,
            trace_solves: self.responses.trace_solves,
            n_t,
            n_r,
            multiplier_dofs: n_r + n * (n_t + n_r),
            padded_dofs: self.qt.dim(),
            subregion_dofs: fields.dofs(),
            residual,
            iteration,
            factorization_residuals,
        };
        Ok((fields, report))
    }

    /// Decoupled subregion solves given the multipliers.
    pub fn recover_fields(&self, lambda: MultiplierVector) -> Result<FieldSolution> {
        let n = self.problem.config.cells;
        if lambda.n_cells != n || lambda.n_t != self.n_t() || lambda.n_r != self.n_r() {
            return Err(Error::DimensionMismatch {
                context: "multiplier vector",
                expected: self.qt.dim(),
                found: lambda.padded.len(),
            });
        }
        let r = &self.responses;
        let mul = |w: &CMat, v: &[C]| -> CVec { w * CVec::from_column_slice(v) };
        let cells: Vec<Vec<C>> = (0..n)
            .into_par_iter()
            .map(|m| {
                let mut x = CVec::from_column_slice(&self.rhs.for_cell(m).x);
                x -= mul(&r.w_l, lambda.lambda_r(m));
                x += mul(&r.w_t, lambda.lambda_t(m + 1));
                x += mul(&r.w_r, lambda.lambda_r(m + 1));
                x.as_slice().to_vec()
            })
            .collect();
        let electrodes: Vec<Vec<C>> = (1..=n)
            .into_par_iter()
            .map(|m| (-mul(&r.w_e, lambda.lambda_t(m))).as_slice().to_vec())
            .collect();
        let left = mul(&r.w_left, lambda.lambda_r(0)).as_slice().to_vec();
        let right = (-mul(&r.w_right, lambda.lambda_r(n))).as_slice().to_vec();
        Ok(FieldSolution {
            left,
            cells,
            electrodes,
            right,
            multipliers: Some(lambda),
        })
    }

    /// `‖B_r X_m − B_l X_{m+1}‖ / ‖B_r X_m‖` maximized over matched interfaces.
    pub fn interface_mismatch(&self, f: &FieldSolution) -> f64 {
        let t = &self.traces;
        let rel = |a: Vec<C>, b: Vec<C>| {
            let d: f64 = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let s: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if s == 0.0 {
                d
            } else {
                d / s
            }
        };
        let n = f.cells.len();
        let mut worst = rel(t.left_r.apply(&f.left), t.cell_l.apply(&f.cells[0]));
        for m in 0..n {
            let next = if m + 1 < n {
                t.cell_l.apply(&f.cells[m + 1])
            } else {
                t.right_l.apply(&f.right)
            };
            worst = worst.max(rel(t.cell_r.apply(&f.cells[m]), next));
            worst = worst.max(rel(
                t.cell_t.apply(&f.cells[m]),
                t.electrode_b.apply(&f.electrodes[m]),
            ));
        }
        worst
    }
}

/// Physical nodal fields for every subregion instance, with Dirichlet
/// values restored.
pub fn nodal_fields(p: &ScaledProblem, f: &FieldSolution) -> Vec<SubregionField> {
    let s = &p.config.scales;
    let (a, b) = (s.displacement_factor(), s.potential_factor());
    let shift = p.config.geometry.pitch * p.unit;
    let build = |kind: SubregionKind, index: usize, x: &[C], offset: f64, voltage: Option<f64>| {
        let mesh = p.mesh(kind);
        let dofs = mesh.dofs();
        let nodes = (0..mesh.n_nodes())
            .map(|node| {
                let c = mesh.coords(node);
                let get = |comp: usize| dofs.free(node, comp).map_or(C::new(0.0, 0.0), |d| x[d]);
                let phi = if !mesh.piezoelectric || mesh.is_contact(node) {
                    C::new(voltage.unwrap_or(0.0), 0.0)
                } else {
                    get(3) / b
                };
                NodalValue {
                    x: [(c[0] + offset) * s.l1, c[1] * s.l1, c[2] * s.l1],
                    u: [get(0) / a, get(1) / a, get(2) / a],
                    phi,
                }
            })
            .collect();
        SubregionField { kind, index, nodes }
    };
    let v = &p.config.voltages;
    let mut out = vec![build(SubregionKind::Left, 0, &f.left, 0.0, None)];
    for (m, x) in f.cells.iter().enumerate() {
        out.push(build(
            SubregionKind::Cell,
            m,
            x,
            m as f64 * shift,
            Some(v[m]),
        ));
        out.push(build(
            SubregionKind::Electrode,
            m,
            &f.electrodes[m],
            m as f64 * shift,
            Some(v[m]),
        ));
    }
    out.push(build(SubregionKind::Right, 0, &f.right, 0.0, None));
    out
}

/// Result of an end-to-end decomposed solve.
pub struct SawSolution {
    pub model: FetiModel,
    pub fields: FieldSolution,
    pub report: SolveReport,
}

impl SawSolution {
    pub fn nodal_fields(&self) -> Vec<SubregionField> {
        nodal_fields(&self.model.problem, &self.fields)
    }
}

/// Scaling, meshing, assembly, multiplier solve and recovery.
pub fn solve_saw(cfg: &ProblemConfig) -> Result<SawSolution> {
    let model = FetiModel::build(cfg)?;
    let (fields, report) = model.solve()?;
    Ok(SawSolution {
        model,
        fields,
        report,
    })
}
