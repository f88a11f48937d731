use nalgebra::{DMatrix, DVector, LU};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, column-major.
pub type CMat = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVec = DVector<Complex64>;

/// Pivots below this magnitude are treated as exact zeros.
pub const PIVOT_FLOOR: f64 = 1e-300;

/// `sqrt(trace(A Aᴴ))`.
pub fn frobenius_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_norm_slice(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Relative Frobenius distance `‖a − b‖ / ‖b‖` (absolute when `b` vanishes).
pub fn relative_difference(a: &CMat, b: &CMat) -> f64 {
    let diff = frobenius_norm(&(a - b));
    let scale = frobenius_norm(b);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Relative asymmetry `‖A − Aᵀ‖ / ‖A‖` under the plain transpose.
pub fn symmetry_defect(a: &CMat) -> f64 {
    let n = frobenius_norm(a);
    if n == 0.0 {
        return 0.0;
    }
    frobenius_norm(&(a - a.transpose())) / n
}

/// LU factorization with partial pivoting of a square dense matrix.
#[derive(Clone, Debug)]
pub struct DenseLu {
    lu: LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    n: usize,
}

impl DenseLu {
    pub fn new(a: &CMat) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                context: "dense LU (square)",
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        let n = a.nrows();
        let lu = LU::new(a.clone());
        let u = lu.u();
        for i in 0..n {
            let m = u[(i, i)].norm();
            if !(m >= PIVOT_FLOOR) {
                return Err(Error::Singular {
                    index: i,
                    magnitude: m,
                });
            }
        }
        Ok(Self { lu, n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &CMat) -> Result<CMat> {
        if b.nrows() != self.n {
            return Err(Error::DimensionMismatch {
                context: "dense LU solve",
                expected: self.n,
                found: b.nrows(),
            });
        }
        let mut x = b.clone();
        if !self.lu.solve_mut(&mut x) {
            return Err(Error::Singular {
                index: 0,
                magnitude: 0.0,
            });
        }
        Ok(x)
    }

    pub fn solve_vec(&self, b: &CVec) -> Result<CVec> {
        let mut x = b.clone();
        if !self.lu.solve_mut(&mut x) {
            return Err(Error::Singular {
                index: 0,
                magnitude: 0.0,
            });
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMat> {
        self.solve(&CMat::identity(self.n, self.n))
    }
}

/// `X` with `X·A = B`, through the transposed system `Aᵀ Xᵀ = Bᵀ`.
pub fn dense_solve_right(a: &CMat, b: &CMat) -> Result<CMat> {
    Ok(DenseLu::new(&a.transpose())?
        .solve(&b.transpose())?
        .transpose())
}

/// Solves `A X = B` by pivoted elimination.
pub fn dense_solve(a: &CMat, b: &CMat) -> Result<CMat> {
    DenseLu::new(a)?.solve(b)
}

/// `A⁻¹` by pivoted elimination.
pub fn dense_inverse(a: &CMat) -> Result<CMat> {
    DenseLu::new(a)?.inverse()
}
