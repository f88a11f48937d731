//! Unitary reductions: complex Schur form and Hessenberg-triangular pencils.

use nalgebra::linalg::{Hessenberg, QR};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::dense::{frobenius_norm, CMat};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Complex plane rotation `G = [[c, s], [-conj(s), c]]` with real `c`,
/// chosen so that `G·[f; g] = [r; 0]`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Givens {
    c: f64,
    s: Complex64,
}

impl Givens {
    pub(crate) fn zeroing(f: Complex64, g: Complex64) -> Self {
        if g == ZERO {
            return Self { c: 1.0, s: ZERO };
        }
        let fa = f.norm();
        if fa == 0.0 {
            return Self {
                c: 0.0,
                s: g.conj() / g.norm(),
            };
        }
        let rho = fa.hypot(g.norm());
        Self {
            c: fa / rho,
            s: (f / fa) * g.conj() / rho,
        }
    }

    /// Rows `(p, q)` of `m`, columns `cols`: `m ← G·m`.
    pub(crate) fn rotate_rows(
        &self,
        m: &mut CMat,
        p: usize,
        q: usize,
        cols: std::ops::Range<usize>,
    ) {
        for j in cols {
            let x = m[(p, j)];
            let y = m[(q, j)];
            m[(p, j)] = x * self.c + self.s * y;
            m[(q, j)] = -self.s.conj() * x + y * self.c;
        }
    }

    /// Columns `(p, q)` of `m`, rows `rows`: `m ← m·Gᴴ`.
    pub(crate) fn rotate_cols_adjoint(
        &self,
        m: &mut CMat,
        p: usize,
        q: usize,
        rows: std::ops::Range<usize>,
    ) {
        for i in rows {
            let x = m[(i, p)];
            let y = m[(i, q)];
            m[(i, p)] = x * self.c + self.s.conj() * y;
            m[(i, q)] = -self.s * x + y * self.c;
        }
    }
}

/// `A = Q·T·Qᴴ` with `Q` unitary and `T` upper triangular.
#[derive(Clone, Debug)]
pub struct ComplexSchur {
    pub q: CMat,
    pub t: CMat,
}

/// Complex Schur decomposition by shifted QR iteration on the Hessenberg form.
pub fn schur(a: &CMat) -> Result<ComplexSchur> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            context: "Schur decomposition (square)",
            expected: n,
            found: a.ncols(),
        });
    }
    if n == 0 {
        return Ok(ComplexSchur {
            q: CMat::zeros(0, 0),
            t: CMat::zeros(0, 0),
        });
    }
    let (mut q, mut h) = Hessenberg::new(a.clone()).unpack();
    let norm = frobenius_norm(&h);
    let max_sweeps = 60 * n;
    let mut sweeps = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;

    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let mut scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if scale == 0.0 {
                scale = norm;
            }
            if h[(lo, lo - 1)].norm() <= f64::EPSILON * scale {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }

        sweeps += 1;
        since_deflation += 1;
        if sweeps > max_sweeps {
            return Err(Error::NoConvergence {
                method: "Schur QR iteration",
                iterations: sweeps,
                residual: h[(hi, hi - 1)].norm(),
            });
        }

        let shift = if since_deflation % 11 == 10 {
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for k in lo..hi {
            let rot = if k == lo {
                Givens::zeroing(h[(lo, lo)] - shift, h[(lo + 1, lo)])
            } else {
                Givens::zeroing(h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let first = if k == lo { lo } else { k - 1 };
            rot.rotate_rows(&mut h, k, k + 1, first..n);
            if k > lo {
                h[(k + 1, k - 1)] = ZERO;
            }
            let last = (k + 2).min(hi);
            rot.rotate_cols_adjoint(&mut h, k, k + 1, 0..last + 1);
            rot.rotate_cols_adjoint(&mut q, k, k + 1, 0..n);
        }
    }

    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = ZERO;
        }
    }
    Ok(ComplexSchur { q, t: h })
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let m1 = mid + disc;
    let m2 = mid - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// `Qᴴ·A·Z = H` (upper Hessenberg) and `Qᴴ·B·Z = R` (upper triangular).
#[derive(Clone, Debug)]
pub struct HessenbergTriangular {
    pub q: CMat,
    pub z: CMat,
    pub h: CMat,
    pub r: CMat,
}

/// Hessenberg-triangular reduction of the pencil `(A, B)`.
pub fn hessenberg_triangular(a: &CMat, b: &CMat) -> Result<HessenbergTriangular> {
    let n = a.nrows();
    for (m, ctx) in [(a, "pencil A"), (b, "pencil B")] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: ctx,
                expected: n,
                found: m.ncols(),
            });
        }
    }
    let qr = QR::new(b.clone());
    let mut q = qr.q();
    let mut r = qr.r();
    let mut h = q.adjoint() * a;
    let mut z = CMat::identity(n, n);

    for j in 0..n.saturating_sub(2) {
        for i in (j + 2..n).rev() {
            let rot = Givens::zeroing(h[(i - 1, j)], h[(i, j)]);
            rot.rotate_rows(&mut h, i - 1, i, j..n);
            h[(i, j)] = ZERO;
            rot.rotate_rows(&mut r, i - 1, i, i - 1..n);
            rot.rotate_cols_adjoint(&mut q, i - 1, i, 0..n);

            let col = Givens::zeroing(r[(i, i)], r[(i, i - 1)]);
            col.rotate_cols_swapped(&mut r, i - 1, i, 0..i + 1);
            r[(i, i - 1)] = ZERO;
            col.rotate_cols_swapped(&mut h, i - 1, i, 0..n);
            col.rotate_cols_swapped(&mut z, i - 1, i, 0..n);
        }
    }
    Ok(HessenbergTriangular { q, z, h, r })
}

impl Givens {
    /// Column pair `(p, q)` mixed so that a row holding `[g, f]` in those
    /// columns becomes `[0, r]`, where the rotation was built from `(f, g)`.
    fn rotate_cols_swapped(&self, m: &mut CMat, p: usize, q: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let y = m[(i, p)];
            let x = m[(i, q)];
            m[(i, p)] = y * self.c - self.s.conj() * x;
            m[(i, q)] = self.s * y + x * self.c;
        }
    }
}
