use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::dense::{frobenius_norm, CMat};
use crate::linalg::schur::{hessenberg_triangular, schur};

/// Coefficients below this fraction of the pencil scale are treated as zero.
pub const ILL_POSED_RATIO: f64 = 1e-14;

/// Solves `A1·E + A2·E·Y = C` for `E`.
///
/// `(A1, A2)` is reduced to Hessenberg-triangular form and `Y` to complex
/// Schur form; each column of the transformed unknown then needs one upper
/// Hessenberg solve with the shifted matrix `H + t_jj·R`.
pub fn sylvester_generalized_solve(a1: &CMat, a2: &CMat, y: &CMat, c: &CMat) -> Result<CMat> {
    let n = a1.nrows();
    let m = y.nrows();
    if a1.ncols() != n || a2.nrows() != n || a2.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "Sylvester pencil",
            expected: n,
            found: a2.nrows(),
        });
    }
    if y.ncols() != m {
        return Err(Error::DimensionMismatch {
            context: "Sylvester right factor (square)",
            expected: m,
            found: y.ncols(),
        });
    }
    if c.nrows() != n || c.ncols() != m {
        return Err(Error::DimensionMismatch {
            context: "Sylvester right-hand side",
            expected: n * m,
            found: c.nrows() * c.ncols(),
        });
    }
    if n == 0 || m == 0 {
        return Ok(CMat::zeros(n, m));
    }

    let ht = hessenberg_triangular(a1, a2)?;
    let sy = schur(y)?;
    let d = ht.q.adjoint() * c * &sy.q;
    let h_norm = frobenius_norm(&ht.h);
    let r_norm = frobenius_norm(&ht.r);

    let mut f = CMat::zeros(n, m);
    let mut shifted = CMat::zeros(n, n);
    for j in 0..m {
        let tjj = sy.t[(j, j)];
        let mut rhs = d.column(j).clone_owned();
        if j > 0 {
            let mut acc = nalgebra::DVector::<Complex64>::zeros(n);
            for k in 0..j {
                let t = sy.t[(k, j)];
                if t != Complex64::new(0.0, 0.0) {
                    acc.axpy(t, &f.column(k), Complex64::new(1.0, 0.0));
                }
            }
            rhs -= &ht.r * acc;
        }
        shifted.copy_from(&ht.h);
        shifted.zip_apply(&ht.r, |s, r| *s += tjj * r);
        let threshold = ILL_POSED_RATIO * (h_norm + tjj.norm() * r_norm);
        solve_hessenberg(&mut shifted, rhs.as_mut_slice(), threshold).map_err(
            |(magnitude, threshold)| Error::IllPosed {
                column: j,
                magnitude,
                threshold,
            },
        )?;
        f.set_column(j, &rhs);
    }
    Ok(&ht.z * f * sy.q.adjoint())
}

/// In-place solve of an upper Hessenberg system by elimination with
/// adjacent-row pivoting. On failure returns `(pivot, threshold)`.
fn solve_hessenberg(
    h: &mut CMat,
    b: &mut [Complex64],
    threshold: f64,
) -> std::result::Result<(), (f64, f64)> {
    let n = h.nrows();
    for k in 0..n {
        if k + 1 < n && h[(k + 1, k)].norm() > h[(k, k)].norm() {
            for j in k..n {
                h.swap((k, j), (k + 1, j));
            }
            b.swap(k, k + 1);
        }
        let piv = h[(k, k)];
        if !(piv.norm() > threshold) {
            return Err((piv.norm(), threshold));
        }
        if k + 1 < n {
            let f = h[(k + 1, k)] / piv;
            if f != Complex64::new(0.0, 0.0) {
                for j in k + 1..n {
                    let v = h[(k, j)];
                    h[(k + 1, j)] -= f * v;
                }
                let bk = b[k];
                b[k + 1] -= f * bk;
            }
        }
    }
    for k in (0..n).rev() {
        let mut s = b[k];
        for j in k + 1..n {
            s -= h[(k, j)] * b[j];
        }
        b[k] = s / h[(k, k)];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{dense_solve, relative_difference};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random(r: usize, k: usize, rng: &mut ChaCha8Rng) -> CMat {
        CMat::from_fn(r, k, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn scalar_case() {
        let (a1, a2, y, rhs) = (c(2.0, 1.0), c(0.5, -0.3), c(1.5, 2.0), c(-1.0, 4.0));
        let e = sylvester_generalized_solve(
            &CMat::from_element(1, 1, a1),
            &CMat::from_element(1, 1, a2),
            &CMat::from_element(1, 1, y),
            &CMat::from_element(1, 1, rhs),
        )
        .unwrap();
        assert!((e[(0, 0)] - rhs / (a1 + a2 * y)).norm() < 1e-15);
    }

    #[test]
    fn zero_a2_is_plain_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a1 = random(5, 5, &mut rng) + CMat::identity(5, 5) * c(3.0, 0.0);
        let y = random(3, 3, &mut rng);
        let rhs = random(5, 3, &mut rng);
        let e = sylvester_generalized_solve(&a1, &CMat::zeros(5, 5), &y, &rhs).unwrap();
        let expected = dense_solve(&a1, &rhs).unwrap();
        assert!(relative_difference(&e, &expected) < 1e-13);
    }

    #[test]
    fn singular_a2_with_zero_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 9;
        let a1 = random(n, n, &mut rng);
        let mut a2 = random(n, n, &mut rng);
        for i in 0..n {
            a2[(i, 0)] = c(0.0, 0.0);
            a2[(i, 1)] = c(0.0, 0.0);
        }
        let y = random(n, n, &mut rng);
        let rhs = random(n, n, &mut rng);
        let e = sylvester_generalized_solve(&a1, &a2, &y, &rhs).unwrap();
        let res = &a1 * &e + &a2 * &e * &y - &rhs;
        assert!(frobenius_norm(&res) / frobenius_norm(&rhs) < 1e-11);
    }

    #[test]
    fn ill_posed_pairing_is_reported() {
        // a1 + a2·y = 0 for the single eigenvalue pairing
        let one = CMat::from_element(1, 1, c(1.0, 0.0));
        let err =
            sylvester_generalized_solve(&one, &one, &CMat::from_element(1, 1, c(-1.0, 0.0)), &one);
        assert!(matches!(err, Err(Error::IllPosed { .. })));
    }
}
