//! Block tridiagonal quasi-Toeplitz systems: Double-Newton factorization,
//! Sherman-Morrison-Woodbury sweep and a banded direct reference solve.

pub mod compare;
pub mod iterate;
pub mod smw;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

pub use compare::{compare_methods, Method, MethodResult};
pub use iterate::{
    double_method, double_newton, double_newton_with, lambda_error, newton_lambda, newton_qme,
    newton_qme_with, qme_residual, rho_d, rho_n, DoubleOutcome, IterationReport, NewtonOutcome,
    NewtonStop,
};
pub use smw::{complete_factorization, smw_solve, QTFactorization, SmwPlan};

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, BandMatrix, CMat};

/// `Ã = tridiag(B, ·, Bᵀ)` with diagonal `(M_L, M, …, M, M_R)` and `N + 1`
/// block rows of size `n_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct QTSystem {
    pub m_l: CMat,
    pub m: CMat,
    pub m_r: CMat,
    pub b: CMat,
    pub n_blocks: usize,
    /// `(N + 1)·n_m` rows, one column per right-hand side.
    pub rhs: CMat,
}

impl QTSystem {
    pub fn new(m_l: CMat, m: CMat, m_r: CMat, b: CMat, n_blocks: usize, rhs: CMat) -> Result<Self> {
        let s = Self {
            m_l,
            m,
            m_r,
            b,
            n_blocks,
            rhs,
        };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<()> {
        let n = self.m.nrows();
        for (name, a) in [
            ("M_L", &self.m_l),
            ("M", &self.m),
            ("M_R", &self.m_r),
            ("B", &self.b),
        ] {
            if a.nrows() != n || a.ncols() != n {
                return Err(Error::DimensionMismatch {
                    context: name,
                    expected: n,
                    found: if a.nrows() != n { a.nrows() } else { a.ncols() },
                });
            }
        }
        if self.n_blocks == 0 {
            return Err(Error::Config("quasi-Toeplitz system needs N ≥ 1".into()));
        }
        if self.rhs.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "quasi-Toeplitz right-hand side",
                expected: self.dim(),
                found: self.rhs.nrows(),
            });
        }
        Ok(())
    }

    pub fn block_size(&self) -> usize {
        self.m.nrows()
    }

    pub fn dim(&self) -> usize {
        (self.n_blocks + 1) * self.block_size()
    }

    fn diagonal_block(&self, i: usize) -> &CMat {
        if i == 0 {
            &self.m_l
        } else if i == self.n_blocks {
            &self.m_r
        } else {
            &self.m
        }
    }

    /// Dense assembled matrix; for tests and small systems only.
    pub fn assembled(&self) -> CMat {
        let nm = self.block_size();
        let mut a = CMat::zeros(self.dim(), self.dim());
        let bt = self.b.transpose();
        for i in 0..=self.n_blocks {
            a.view_mut((i * nm, i * nm), (nm, nm))
                .copy_from(self.diagonal_block(i));
            if i > 0 {
                a.view_mut((i * nm, (i - 1) * nm), (nm, nm))
                    .copy_from(&self.b);
                a.view_mut(((i - 1) * nm, i * nm), (nm, nm)).copy_from(&bt);
            }
        }
        a
    }

    /// `Ã·x` using the block structure.
    pub fn apply(&self, x: &CMat) -> CMat {
        let nm = self.block_size();
        let mut y = CMat::zeros(x.nrows(), x.ncols());
        let bt = self.b.transpose();
        for i in 0..=self.n_blocks {
            let mut yi = self.diagonal_block(i) * x.rows(i * nm, nm);
            if i > 0 {
                yi += &self.b * x.rows((i - 1) * nm, nm);
            }
            if i < self.n_blocks {
                yi += &bt * x.rows((i + 1) * nm, nm);
            }
            y.rows_mut(i * nm, nm).copy_from(&yi);
        }
        y
    }

    /// `‖Ã·x − F̃‖_F / ‖F̃‖_F`.
    pub fn relative_residual(&self, x: &CMat) -> f64 {
        let r = self.apply(x) - &self.rhs;
        let nb = frobenius_norm(&self.rhs);
        if nb == 0.0 {
            frobenius_norm(&r)
        } else {
            frobenius_norm(&r) / nb
        }
    }
}

/// Banded LU solve of the assembled system, refusing more than `cap`
/// unknowns.
pub fn qt_dense_oracle(sys: &QTSystem, cap: usize) -> Result<CMat> {
    sys.check()?;
    let n = sys.dim();
    if n > cap {
        return Err(Error::CapExceeded { size: n, cap });
    }
    let nm = sys.block_size();
    let bw = 2 * nm - 1;
    let mut band = BandMatrix::zeros(n, bw, bw);
    for i in 0..=sys.n_blocks {
        let d = sys.diagonal_block(i);
        for r in 0..nm {
            for c in 0..nm {
                band.add(i * nm + r, i * nm + c, d[(r, c)]);
                if i > 0 {
                    let v = sys.b[(r, c)];
                    band.add(i * nm + r, (i - 1) * nm + c, v);
                    band.add((i - 1) * nm + c, i * nm + r, v);
                }
            }
        }
    }
    let lu = band.factor()?;
    let mut x = sys.rhs.clone();
    for mut col in x.column_iter_mut() {
        lu.solve_in_place(col.as_mut_slice());
    }
    Ok(x)
}

/// Serialized form: matrices as row lists of `[re, im]` pairs.
#[derive(Debug, Serialize, Deserialize)]
struct QTSystemFile {
    n_blocks: usize,
    m_l: Vec<Vec<[f64; 2]>>,
    m: Vec<Vec<[f64; 2]>>,
    m_r: Vec<Vec<[f64; 2]>>,
    b: Vec<Vec<[f64; 2]>>,
    rhs: Vec<Vec<[f64; 2]>>,
}

fn to_rows(a: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..a.nrows())
        .map(|i| {
            (0..a.ncols())
                .map(|j| [a[(i, j)].re, a[(i, j)].im])
                .collect()
        })
        .collect()
}

fn from_rows(rows: &[Vec<[f64; 2]>], what: &str) -> Result<CMat> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != nc) {
        return Err(Error::Parse {
            path: what.into(),
            message: "ragged matrix rows".into(),
        });
    }
    Ok(CMat::from_fn(nr, nc, |i, j| {
        C::new(rows[i][j][0], rows[i][j][1])
    }))
}

impl QTSystem {
    pub fn to_json(&self) -> Result<String> {
        let file = QTSystemFile {
            n_blocks: self.n_blocks,
            m_l: to_rows(&self.m_l),
            m: to_rows(&self.m),
            m_r: to_rows(&self.m_r),
            b: to_rows(&self.b),
            rhs: to_rows(&self.rhs),
        };
        serde_json::to_string(&file).map_err(|e| Error::Parse {
            path: "quasi-Toeplitz system".into(),
            message: e.to_string(),
        })
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let f: QTSystemFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.into(),
            message: e.to_string(),
        })?;
        Self::new(
            from_rows(&f.m_l, origin)?,
            from_rows(&f.m, origin)?,
            from_rows(&f.m_r, origin)?,
            from_rows(&f.b, origin)?,
            f.n_blocks,
            from_rows(&f.rhs, origin)?,
        )
    }
}
