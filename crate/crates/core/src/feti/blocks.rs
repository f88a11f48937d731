//! Interface blocks, right-hand-side blocks and the multiplier system.

use num_complex::Complex64 as C;
use rayon::prelude::*;

use super::trace::TraceMatrix;
use crate::assembly::SubregionSystem;
use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, CMat, CVec};
use crate::qtsolver::QTSystem;

/// Traces of the four subregion types.
#[derive(Clone, Debug)]
pub struct Traces {
    pub left_r: TraceMatrix,
    pub cell_l: TraceMatrix,
    pub cell_t: TraceMatrix,
    pub cell_r: TraceMatrix,
    pub electrode_b: TraceMatrix,
    pub right_l: TraceMatrix,
}

impl Traces {
    pub fn n_t(&self) -> usize {
        self.cell_t.rows()
    }

    pub fn n_r(&self) -> usize {
        self.cell_r.rows()
    }
}

/// Responses `K⁻¹ Bᵀ` of each subregion to unit interface loads.
#[derive(Clone, Debug)]
pub struct InterfaceResponses {
    pub w_l: CMat,
    pub w_t: CMat,
    pub w_r: CMat,
    pub w_e: CMat,
    pub w_left: CMat,
    pub w_right: CMat,
    /// Multi-column trace solves performed (one per response block).
    pub trace_solves: usize,
}

/// The dense interface blocks of the multiplier system.
#[derive(Clone, Debug)]
pub struct InterfaceBlockSet {
    pub a_rr_tilde: CMat,
    pub a_ll: CMat,
    pub a_lt: CMat,
    pub a_lr: CMat,
    pub a_tt: CMat,
    pub a_tr: CMat,
    pub a_rr: CMat,
    pub a_ll_tilde: CMat,
}

/// Subregion systems of the four types.
pub struct SystemSet<'a> {
    pub left: &'a SubregionSystem,
    pub cell: &'a SubregionSystem,
    pub electrode: &'a SubregionSystem,
    pub right: &'a SubregionSystem,
}

/// Computes the six response blocks concurrently and forms all interface
/// blocks from them.
pub fn interface_blocks(
    systems: &SystemSet<'_>,
    traces: &Traces,
) -> Result<(InterfaceBlockSet, InterfaceResponses)> {
    let jobs: [(&SubregionSystem, &TraceMatrix); 6] = [
        (systems.cell, &traces.cell_l),
        (systems.cell, &traces.cell_t),
        (systems.cell, &traces.cell_r),
        (systems.electrode, &traces.electrode_b),
        (systems.left, &traces.left_r),
        (systems.right, &traces.right_l),
    ];
    // factor each distinct system once before fanning out
    for s in [systems.cell, systems.electrode, systems.left, systems.right] {
        s.factorization()?;
    }
    let solved: Result<Vec<CMat>> = jobs
        .par_iter()
        .map(|(s, b)| s.solve_columns(&b.transpose_dense()))
        .collect();
    let mut solved = solved?.into_iter();
    let mut next = || solved.next().expect("six responses");
    let r = InterfaceResponses {
        w_l: next(),
        w_t: next(),
        w_r: next(),
        w_e: next(),
        w_left: next(),
        w_right: next(),
        trace_solves: jobs.len(),
    };
    let (bl, bt, br) = (&traces.cell_l, &traces.cell_t, &traces.cell_r);
    let blocks = InterfaceBlockSet {
        a_rr_tilde: traces.left_r.select_rows(&r.w_left),
        a_ll: bl.select_rows(&r.w_l),
        a_lt: -bl.select_rows(&r.w_t),
        a_lr: -bl.select_rows(&r.w_r),
        a_tt: bt.select_rows(&r.w_t) + traces.electrode_b.select_rows(&r.w_e),
        a_tr: bt.select_rows(&r.w_r),
        a_rr: br.select_rows(&r.w_r),
        a_ll_tilde: traces.right_l.select_rows(&r.w_right),
    };
    Ok((blocks, r))
}

/// Solution of `K_p x = F(φ0)` and its traces for one voltage value.
#[derive(Clone, Debug)]
pub struct VoltageResponse {
    pub voltage: f64,
    pub x: Vec<C>,
    pub b_l: Vec<C>,
    pub b_t: Vec<C>,
    pub b_r: Vec<C>,
}

#[derive(Clone, Debug)]
pub struct RhsBlocks {
    pub responses: Vec<VoltageResponse>,
    /// Index into `responses` for each cell.
    pub cell_response: Vec<usize>,
    /// Number of lift solves performed.
    pub lift_solves: usize,
}

impl RhsBlocks {
    pub fn for_cell(&self, m: usize) -> &VoltageResponse {
        &self.responses[self.cell_response[m]]
    }
}

/// `b_l = B_l K_p⁻¹ F`, `b_t = −B_t K_p⁻¹ F`, `b_r = −B_r K_p⁻¹ F`, with one
/// solve per distinct voltage.
pub fn rhs_blocks(cell: &SubregionSystem, traces: &Traces, voltages: &[f64]) -> Result<RhsBlocks> {
    let mut distinct: Vec<f64> = Vec::new();
    let mut cell_response = Vec::with_capacity(voltages.len());
    for &v in voltages {
        let idx = match distinct.iter().position(|d| d.to_bits() == v.to_bits()) {
            Some(i) => i,
            None => {
                distinct.push(v);
                distinct.len() - 1
            }
        };
        cell_response.push(idx);
    }
    let n = cell.dim();
    let mut f = CMat::zeros(n, distinct.len());
    for (j, &v) in distinct.iter().enumerate() {
        f.column_mut(j).copy_from_slice(&cell.lift(v)?);
    }
    let x = cell.solve_columns(&f)?;
    let responses = distinct
        .iter()
        .enumerate()
        .map(|(j, &voltage)| {
            let xj: Vec<C> = x.column(j).iter().copied().collect();
            let neg = |v: Vec<C>| v.into_iter().map(|z| -z).collect::<Vec<_>>();
            VoltageResponse {
                voltage,
                b_l: traces.cell_l.apply(&xj),
                b_t: neg(traces.cell_t.apply(&xj)),
                b_r: neg(traces.cell_r.apply(&xj)),
                x: xj,
            }
        })
        .collect();
    Ok(RhsBlocks {
        responses,
        cell_response,
        lift_solves: distinct.len(),
    })
}

/// Multiplier vector in padded order: `λ̃`, `λ_{0,r}`, then
/// `(λ_{m,t}, λ_{m,r})` for `m = 1..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierVector {
    pub n_t: usize,
    pub n_r: usize,
    pub n_cells: usize,
    pub padded: CVec,
}

impl MultiplierVector {
    pub fn new(n_t: usize, n_r: usize, n_cells: usize, padded: CVec) -> Result<Self> {
        let expected = n_t + n_r + n_cells * (n_t + n_r);
        if padded.len() != expected {
            return Err(Error::DimensionMismatch {
                context: "multiplier vector",
                expected,
                found: padded.len(),
            });
        }
        Ok(Self {
            n_t,
            n_r,
            n_cells,
            padded,
        })
    }

    fn block(&self, m: usize) -> usize {
        m * (self.n_t + self.n_r)
    }

    pub fn auxiliary(&self) -> &[C] {
        &self.padded.as_slice()[..self.n_t]
    }

    /// `λ_{m,r}` for `m = 0..=N`.
    pub fn lambda_r(&self, m: usize) -> &[C] {
        let s = self.block(m) + self.n_t;
        &self.padded.as_slice()[s..s + self.n_r]
    }

    /// `λ_{m,t}` for `m = 1..=N`.
    pub fn lambda_t(&self, m: usize) -> &[C] {
        let s = self.block(m);
        &self.padded.as_slice()[s..s + self.n_t]
    }

    /// Unpadded ordering `λ_{0,r}, λ_{1,t}, λ_{1,r}, …`.
    pub fn unpadded(&self) -> CVec {
        CVec::from_column_slice(&self.padded.as_slice()[self.n_t..])
    }

    pub fn unpadded_len(&self) -> usize {
        self.n_r + self.n_cells * (self.n_t + self.n_r)
    }
}

/// Assembles the padded block tridiagonal quasi-Toeplitz system.
pub fn assemble_multiplier_system(
    blocks: &InterfaceBlockSet,
    rhs: &RhsBlocks,
    n_cells: usize,
) -> Result<QTSystem> {
    let n_t = blocks.a_tt.nrows();
    let n_r = blocks.a_rr.nrows();
    let checks = [
        ("Ã_rr", &blocks.a_rr_tilde, n_r, n_r),
        ("A_ll", &blocks.a_ll, n_r, n_r),
        ("A_lt", &blocks.a_lt, n_r, n_t),
        ("A_lr", &blocks.a_lr, n_r, n_r),
        ("A_tt", &blocks.a_tt, n_t, n_t),
        ("A_tr", &blocks.a_tr, n_t, n_r),
        ("Ã_ll", &blocks.a_ll_tilde, n_r, n_r),
    ];
    for (name, a, r, c) in checks {
        if a.nrows() != r || a.ncols() != c {
            return Err(Error::DimensionMismatch {
                context: name,
                expected: r * c,
                found: a.nrows() * a.ncols(),
            });
        }
    }
    if rhs.cell_response.len() != n_cells {
        return Err(Error::DimensionMismatch {
            context: "right-hand-side cells",
            expected: n_cells,
            found: rhs.cell_response.len(),
        });
    }
    let nm = n_t + n_r;
    let corner = &blocks.a_rr_tilde + &blocks.a_ll;
    let s = frobenius_norm(&corner);
    let mut m_l = CMat::zeros(nm, nm);
    m_l.view_mut((0, 0), (n_t, n_t))
        .fill_diagonal(C::new(s, 0.0));
    m_l.view_mut((n_t, n_t), (n_r, n_r)).copy_from(&corner);
    let interior = |rr: &CMat| {
        let mut a = CMat::zeros(nm, nm);
        a.view_mut((0, 0), (n_t, n_t)).copy_from(&blocks.a_tt);
        a.view_mut((0, n_t), (n_t, n_r)).copy_from(&blocks.a_tr);
        a.view_mut((n_t, 0), (n_r, n_t))
            .copy_from(&blocks.a_tr.transpose());
        a.view_mut((n_t, n_t), (n_r, n_r)).copy_from(rr);
        a
    };
    let m = interior(&(&blocks.a_rr + &blocks.a_ll));
    let m_r = interior(&(&blocks.a_rr + &blocks.a_ll_tilde));
    let mut b = CMat::zeros(nm, nm);
    b.view_mut((0, n_t), (n_t, n_r))
        .copy_from(&blocks.a_lt.transpose());
    b.view_mut((n_t, n_t), (n_r, n_r))
        .copy_from(&blocks.a_lr.transpose());

    let mut f = CMat::zeros((n_cells + 1) * nm, 1);
    let put = |f: &mut CMat, at: usize, v: &[C]| {
        for (k, z) in v.iter().enumerate() {
            f[(at + k, 0)] += z;
        }
    };
    put(&mut f, n_t, &rhs.for_cell(0).b_l);
    for i in 1..=n_cells {
        let r = rhs.for_cell(i - 1);
        put(&mut f, i * nm, &r.b_t);
        put(&mut f, i * nm + n_t, &r.b_r);
        if i < n_cells {
            put(&mut f, i * nm + n_t, &rhs.for_cell(i).b_l);
        }
    }
    QTSystem::new(m_l, m, m_r, b, n_cells, f)
}

/// The unpadded multiplier system `A λ = b` assembled block by block.
pub fn assemble_unpadded(
    blocks: &InterfaceBlockSet,
    rhs: &RhsBlocks,
    n_cells: usize,
) -> (CMat, CVec) {
    let n_t = blocks.a_tt.nrows();
    let n_r = blocks.a_rr.nrows();
    let dim = n_r + n_cells * (n_t + n_r);
    let r_at = |m: usize| m * (n_t + n_r);
    let t_at = |m: usize| r_at(m - 1) + n_r;
    let mut a = CMat::zeros(dim, dim);
    let mut b = CVec::zeros(dim);
    let put = |a: &mut CMat, r: usize, c: usize, blk: &CMat| {
        let mut v = a.view_mut((r, c), (blk.nrows(), blk.ncols()));
        v += blk;
    };
    for m in 0..=n_cells {
        let diag = if m == 0 {
            &blocks.a_rr_tilde + &blocks.a_ll
        } else if m == n_cells {
            &blocks.a_rr + &blocks.a_ll_tilde
        } else {
            &blocks.a_rr + &blocks.a_ll
        };
        put(&mut a, r_at(m), r_at(m), &diag);
        if m >= 1 {
            put(&mut a, t_at(m), t_at(m), &blocks.a_tt);
            put(&mut a, t_at(m), r_at(m), &blocks.a_tr);
            put(&mut a, r_at(m), t_at(m), &blocks.a_tr.transpose());
        }
        if m < n_cells {
            put(&mut a, r_at(m), t_at(m + 1), &blocks.a_lt);
            put(&mut a, t_at(m + 1), r_at(m), &blocks.a_lt.transpose());
            put(&mut a, r_at(m), r_at(m + 1), &blocks.a_lr);
            put(&mut a, r_at(m + 1), r_at(m), &blocks.a_lr.transpose());
        }
    }
    for m in 1..=n_cells {
        let r = rhs.for_cell(m - 1);
        for (k, z) in r.b_l.iter().enumerate() {
            b[r_at(m - 1) + k] += z;
        }
        for (k, z) in r.b_t.iter().enumerate() {
            b[t_at(m) + k] += z;
        }
        for (k, z) in r.b_r.iter().enumerate() {
            b[r_at(m) + k] += z;
        }
    }
    (a, b)
}
