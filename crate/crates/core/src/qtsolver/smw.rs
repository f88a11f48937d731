//! Factorization `Ã = L Λ Lᵀ + E₁ M₁ᵀ` and the Sherman-Morrison-Woodbury
//! block sweep.

use num_complex::Complex64 as C;
use rayon::prelude::*;

use super::{IterationReport, QTSystem};
use crate::error::{Error, Result};
use crate::linalg::{dense_solve_right, frobenius_norm, CMat, DenseLu};

#[derive(Clone, Debug)]
pub struct QTFactorization {
    pub lambda1: CMat,
    pub lambda2: CMat,
    pub l1: CMat,
    /// `M_L − Λ₁`, the first-block correction.
    pub m1: CMat,
    pub report: IterationReport,
    lambda1_lu: DenseLu,
    lambda1_inv: CMat,
    lambda2_lu: DenseLu,
}

/// `L₁ = B Λ₁⁻¹`, `Λ₂ = M_R − L₁ Λ₁ L₁ᵀ`, `M₁ = M_L − Λ₁`.
pub fn complete_factorization(
    lambda1: &CMat,
    b: &CMat,
    m_l: &CMat,
    m_r: &CMat,
) -> Result<QTFactorization> {
    let lambda1_lu = DenseLu::new(lambda1)?;
    let l1 = dense_solve_right(lambda1, b)?;
    let lambda2 = m_r - &l1 * lambda1 * l1.transpose();
    let lambda2_lu = DenseLu::new(&lambda2)?;
    Ok(QTFactorization {
        lambda1: lambda1.clone(),
        lambda1_inv: lambda1_lu.inverse()?,
        lambda1_lu,
        lambda2,
        lambda2_lu,
        m1: m_l - lambda1,
        l1,
        report: IterationReport::default(),
    })
}

impl QTFactorization {
    pub fn with_report(mut self, report: IterationReport) -> Self {
        self.report = report;
        self
    }

    /// Relative residuals of `L₁Λ₁ = B`, `L₁Λ₁L₁ᵀ + Λ₁ = M` and
    /// `L₁Λ₁L₁ᵀ + Λ₂ = M_R`.
    pub fn residuals(&self, b: &CMat, m: &CMat, m_r: &CMat) -> [f64; 3] {
        let l1lam = &self.l1 * &self.lambda1;
        let lll = &l1lam * self.l1.transpose();
        let rel = |a: CMat, r: &CMat| frobenius_norm(&(a - r)) / frobenius_norm(r);
        [
            rel(l1lam, b),
            rel(&lll + &self.lambda1, m),
            rel(&lll + &self.lambda2, m_r),
        ]
    }

    /// `Λ₁⁻¹ X`: explicit inverse once the column count reaches `n_m`,
    /// per-column solves otherwise.
    fn apply_lambda1_inv(&self, x: &CMat) -> Result<CMat> {
        if x.ncols() >= self.lambda1.nrows() {
            Ok(&self.lambda1_inv * x)
        } else {
            self.lambda1_lu.solve(x)
        }
    }
}

/// Correction columns `L₁ⁱ E₁` below this fraction of `‖E₁‖` are dropped;
/// they decay geometrically and would otherwise sink into subnormals.
const CORRECTION_FLOOR: f64 = 1e-200;

/// Refinement stops once the relative residual falls below this value.
const REFINE_TARGET: f64 = 1e-13;

/// Refinement steps taken at most by [`smw_solve`].
pub const REFINE_STEPS: usize = 3;

/// The right-hand-side independent part of the sweep: the processed
/// correction columns `[E₁]` and `Z = (I + M₁ᵀ F₁,₂:end)⁻¹ M₁ᵀ`.
pub struct SmwPlan<'a> {
    fact: &'a QTFactorization,
    n_blocks: usize,
    /// Nonzero leading block rows of the swept correction columns.
    aux: Vec<CMat>,
    z: CMat,
}

impl<'a> SmwPlan<'a> {
    pub fn new(fact: &'a QTFactorization, n_blocks: usize) -> Result<Self> {
        let nm = fact.lambda1.nrows();
        let n = n_blocks;
        let one = C::new(1.0, 0.0);
        let floor = CORRECTION_FLOOR * (nm as f64).sqrt();
        let mut aux: Vec<CMat> = vec![CMat::identity(nm, nm)];
        while aux.len() <= n {
            let next = -(&fact.l1 * aux.last().expect("nonempty"));
            if frobenius_norm(&next) <= floor {
                break;
            }
            aux.push(next);
        }
        let scaled: Result<Vec<CMat>> = aux
            .par_iter()
            .enumerate()
            .map(|(i, a)| {
                if i < n {
                    fact.apply_lambda1_inv(a)
                } else {
                    fact.lambda2_lu.solve(a)
                }
            })
            .collect();
        let mut aux = scaled?;
        let l1t = fact.l1.transpose();
        for i in (0..aux.len().saturating_sub(1)).rev() {
            let (cur, next) = aux.split_at_mut(i + 1);
            cur[i].gemm(-one, &l1t, &next[0], one);
        }
        let corr = CMat::identity(nm, nm) + fact.m1.transpose() * &aux[0];
        let z = DenseLu::new(&corr)?.solve(&fact.m1.transpose())?;
        Ok(Self {
            fact,
            n_blocks,
            aux,
            z,
        })
    }

    /// One pass of the sweep for the load block `rhs`.
    pub fn sweep(&self, rhs: &CMat) -> Result<CMat> {
        let fact = self.fact;
        let nm = fact.lambda1.nrows();
        let n = self.n_blocks;
        if rhs.nrows() != (n + 1) * nm {
            return Err(Error::DimensionMismatch {
                context: "sweep right-hand side",
                expected: (n + 1) * nm,
                found: rhs.nrows(),
            });
        }
        let k = rhs.ncols();
        let one = C::new(1.0, 0.0);
        let mut f: Vec<CMat> = (0..=n).map(|i| rhs.rows(i * nm, nm).into_owned()).collect();
        for i in 1..=n {
            let (prev, cur) = f.split_at_mut(i);
            cur[0].gemm(-one, &fact.l1, &prev[i - 1], one);
        }
        // Λ₁⁻¹ on blocks 0..N-1 applied to all their columns at once
        let wide = CMat::from_fn(nm, n * k, |r, c| f[c / k][(r, c % k)]);
        let wide = fact.apply_lambda1_inv(&wide)?;
        for (i, blk) in f.iter_mut().take(n).enumerate() {
            blk.copy_from(&wide.columns(i * k, k));
        }
        f[n] = fact.lambda2_lu.solve(&f[n])?;
        let l1t = fact.l1.transpose();
        for i in (0..n).rev() {
            let (cur, next) = f.split_at_mut(i + 1);
            cur[i].gemm(-one, &l1t, &next[0], one);
        }
        let zf = &self.z * &f[0];
        let mut x = CMat::zeros(rhs.nrows(), k);
        for (i, blk) in f.into_iter().enumerate() {
            let mut rows = x.rows_mut(i * nm, nm);
            rows.copy_from(&blk);
            if let Some(a) = self.aux.get(i) {
                rows.gemm(-one, a, &zf, one);
            }
        }
        Ok(x)
    }
}

/// Solves `Ã λ̃ = F̃` for every right-hand-side column of `sys`, refining
/// against the assembled operator because `Λ₁` is only as accurate as the
/// iteration that produced it.
pub fn smw_solve(fact: &QTFactorization, sys: &QTSystem) -> Result<CMat> {
    sys.check()?;
    let nm = sys.block_size();
    if fact.lambda1.nrows() != nm {
        return Err(Error::DimensionMismatch {
            context: "factorization block size",
            expected: nm,
            found: fact.lambda1.nrows(),
        });
    }
    let plan = SmwPlan::new(fact, sys.n_blocks)?;
    let mut x = plan.sweep(&sys.rhs)?;
    let norm = frobenius_norm(&sys.rhs);
    for _ in 0..REFINE_STEPS {
        let r = &sys.rhs - sys.apply(&x);
        if frobenius_norm(&r) <= REFINE_TARGET * norm {
            break;
        }
        x += plan.sweep(&r)?;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qtsolver::{double_newton, qt_dense_oracle};
    use num_complex::Complex64 as C;

    fn s(v: f64) -> CMat {
        CMat::from_element(1, 1, C::new(v, 0.0))
    }

    #[test]
    fn scalar_chain_factorization() {
        let f = complete_factorization(&s(1.0), &s(-1.0), &s(2.0), &s(2.0)).unwrap();
        assert_eq!(f.l1, s(-1.0));
        assert_eq!(f.lambda2, s(1.0));
        assert_eq!(f.m1, s(1.0));
    }

    #[test]
    fn scalar_chain_solve() {
        let rhs = CMat::from_column_slice(
            3,
            1,
            &[C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)],
        );
        let sys = QTSystem::new(s(2.0), s(2.0), s(2.0), s(-1.0), 2, rhs).unwrap();
        let f = complete_factorization(&s(1.0), &s(-1.0), &s(2.0), &s(2.0)).unwrap();
        let x = smw_solve(&f, &sys).unwrap();
        for (got, want) in x.iter().zip([0.75, 0.5, 0.25]) {
            assert!((got - C::new(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn decoupled_blocks() {
        let nm = 3;
        let m = CMat::from_fn(nm, nm, |i, j| {
            C::new(if i == j { 3.0 } else { 0.2 }, 0.1 * (i + j) as f64)
        });
        let m_l = &m * C::new(2.0, 0.0);
        let m_r = &m * C::new(0.5, 0.5);
        let rhs = CMat::from_fn(4 * nm, 1, |i, _| C::new(1.0 + i as f64, -(i as f64)));
        let b = CMat::zeros(nm, nm);
        let sys = QTSystem::new(
            m_l.clone(),
            m.clone(),
            m_r.clone(),
            b.clone(),
            3,
            rhs.clone(),
        )
        .unwrap();
        let f = complete_factorization(&m, &b, &m_l, &m_r).unwrap();
        assert_eq!(f.l1, CMat::zeros(nm, nm));
        assert_eq!(f.lambda2, m_r);
        let x = smw_solve(&f, &sys).unwrap();
        let blocks = [&m_l, &m, &m, &m_r];
        for (i, a) in blocks.iter().enumerate() {
            let want = crate::linalg::dense_solve(a, &rhs.rows(i * nm, nm).into_owned()).unwrap();
            assert!((x.rows(i * nm, nm) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn matches_banded_oracle_on_dominant_blocks() {
        let nm = 4;
        let m = CMat::from_fn(nm, nm, |i, j| {
            if i == j {
                C::new(6.0, 0.5)
            } else {
                C::new(0.3 / (1.0 + (i + j) as f64), 0.05)
            }
        });
        let b = CMat::from_fn(nm, nm, |i, j| {
            C::new(0.4 * ((i * 3 + j) % 5) as f64 / 5.0, -0.1)
        });
        let m_l = &m + CMat::identity(nm, nm) * C::new(1.0, 0.0);
        let m_r = &m * C::new(1.1, 0.0);
        let n = 4;
        let rhs = CMat::from_fn((n + 1) * nm, 2, |i, j| {
            C::new((i as f64).sin(), (j as f64 + i as f64).cos())
        });
        let sys = QTSystem::new(m_l.clone(), m.clone(), m_r.clone(), b.clone(), n, rhs).unwrap();
        let (lambda1, rep) = double_newton(&m, &b, 1e-10, 1e-13, 50).unwrap();
        let f = complete_factorization(&lambda1, &b, &m_l, &m_r)
            .unwrap()
            .with_report(rep);
        for r in f.residuals(&b, &m, &m_r) {
            assert!(r < 1e-9, "{r}");
        }
        let x = smw_solve(&f, &sys).unwrap();
        assert!(sys.relative_residual(&x) < 1e-10);
        let xo = qt_dense_oracle(&sys, 10_000).unwrap();
        assert!((&x - &xo).norm() / xo.norm() < 1e-10);
        // L Λ Lᵀ + E₁ M₁ᵀ reconstructs Ã
        let dim = sys.dim();
        let mut l = CMat::identity(dim, dim);
        let mut lam = CMat::zeros(dim, dim);
        for i in 0..=n {
            let d = if i == n { &f.lambda2 } else { &f.lambda1 };
            lam.view_mut((i * nm, i * nm), (nm, nm)).copy_from(d);
            if i > 0 {
                l.view_mut((i * nm, (i - 1) * nm), (nm, nm))
                    .copy_from(&f.l1);
            }
        }
        let mut rebuilt = &l * lam * l.transpose();
        let mut top = rebuilt.view_mut((0, 0), (nm, nm));
        top += &f.m1;
        let a = sys.assembled();
        assert!((rebuilt - &a).norm() / a.norm() < 1e-9);
    }
}
