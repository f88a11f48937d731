//! 0-1 selection matrices extracting interface DOFs.

use num_complex::Complex64 as C;

use crate::error::Result;
use crate::geometry::{Side, SubregionMesh};
use crate::linalg::CMat;

/// Row `i` selects free DOF `indices[i]` of a vector of length `n_cols`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceMatrix {
    pub indices: Vec<usize>,
    pub n_cols: usize,
}

impl TraceMatrix {
    pub fn rows(&self) -> usize {
        self.indices.len()
    }

    /// `B x`.
    pub fn apply(&self, x: &[C]) -> Vec<C> {
        self.indices.iter().map(|&i| x[i]).collect()
    }

    /// `B X` for a column block `X`.
    pub fn select_rows(&self, x: &CMat) -> CMat {
        CMat::from_fn(self.rows(), x.ncols(), |r, c| x[(self.indices[r], c)])
    }

    /// `Bᵀ` as a dense matrix.
    pub fn transpose_dense(&self) -> CMat {
        let mut t = CMat::zeros(self.n_cols, self.rows());
        for (r, &i) in self.indices.iter().enumerate() {
            t[(i, r)] = C::new(1.0, 0.0);
        }
        t
    }

    /// `x += Bᵀ y`.
    pub fn scatter_add(&self, y: &[C], x: &mut [C]) {
        for (&i, v) in self.indices.iter().zip(y) {
            x[i] += v;
        }
    }
}

pub fn build_trace(mesh: &SubregionMesh, side: Side) -> Result<TraceMatrix> {
    Ok(TraceMatrix {
        indices: mesh.interface_dofs(side)?,
        n_cols: mesh.dofs().n_free(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::geometry::{build_side_block, build_unit_cell, GeometrySpec};

    fn geometry() -> GeometrySpec {
        GeometrySpec::small([5, 3, 5], [3, 3, 3], 3, [2, 2, 2])
    }

    #[test]
    fn rows_are_orthonormal() {
        let (cell, _) = build_unit_cell(&geometry(), 1.0).unwrap();
        for side in [Side::Left, Side::Top, Side::Right] {
            let b = build_trace(&cell, side).unwrap();
            let bt = b.transpose_dense();
            let bbt = bt.transpose() * &bt;
            assert_eq!(bbt, CMat::identity(b.rows(), b.rows()));
        }
        assert!(matches!(
            build_trace(&cell, Side::Bottom),
            Err(Error::InvalidSide("b"))
        ));
    }

    #[test]
    fn trace_of_coordinates_is_canonical() {
        let (cell, _) = build_unit_cell(&geometry(), 1.0).unwrap();
        let b = build_trace(&cell, Side::Left).unwrap();
        let x3: Vec<C> = cell.dof_coordinates(2).into_iter().map(C::from).collect();
        let traced = b.apply(&x3);
        assert!(traced.windows(2).all(|w| w[0].re <= w[1].re));
    }

    #[test]
    fn neighbouring_traces_match_after_translation() {
        let g = geometry();
        let (cell, electrode) = build_unit_cell(&g, 1.0).unwrap();
        let right = build_side_block(Side::Right, &g, 2, 1.0).unwrap();
        for d in 0..3 {
            let xc: Vec<C> = cell.dof_coordinates(d).into_iter().map(C::from).collect();
            let shift = if d == 0 { g.pitch } else { 0.0 };
            let r = build_trace(&cell, Side::Right).unwrap().apply(&xc);
            let l = build_trace(&cell, Side::Left).unwrap().apply(&xc);
            for (a, b) in r.iter().zip(&l) {
                assert!((a.re - (b.re + shift)).abs() < 1e-12);
            }
            let xr: Vec<C> = right.dof_coordinates(d).into_iter().map(C::from).collect();
            let rl = build_trace(&right, Side::Left).unwrap().apply(&xr);
            for (a, b) in r.iter().zip(&rl) {
                assert!((a.re + if d == 0 { g.pitch } else { 0.0 } - b.re).abs() < 1e-12);
            }
            let xe: Vec<C> = electrode
                .dof_coordinates(d)
                .into_iter()
                .map(C::from)
                .collect();
            let eb = build_trace(&electrode, Side::Bottom).unwrap().apply(&xe);
            let ct = build_trace(&cell, Side::Top).unwrap().apply(&xc);
            assert_eq!(eb.len(), ct.len());
            for (a, b) in eb.iter().zip(&ct) {
                assert!((a.re - b.re).abs() < 1e-12);
            }
        }
    }
}
