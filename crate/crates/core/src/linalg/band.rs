//! Banded LU with partial pivoting (LAPACK `gbtf2` layout).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::dense::PIVOT_FLOOR;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Band storage of an `n × n` matrix with `kl` sub- and `ku` super-diagonals,
/// reserving `kl` extra super-diagonals for fill from row interchanges.
#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            ab: vec![ZERO; ldab * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab + self.kl + self.ku + i - j
    }

    /// Adds `v` at `(i, j)`; the position must lie inside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        debug_assert!(
            i <= j + self.kl && j <= i + self.ku,
            "({i},{j}) outside band"
        );
        let k = self.idx(i, j);
        self.ab[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i > j + self.kl || j > i + self.ku {
            return ZERO;
        }
        self.ab[self.idx(i, j)]
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.n];
        for j in 0..self.n {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for (i, yi) in y.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *yi += self.ab[self.idx(i, j)] * x[j];
            }
        }
        y
    }

    /// Factors in place. Returns the failing elimination step on a vanishing pivot.
    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let (kl, ku, ldab) = (self.kl, self.ku, self.ldab);
        let kv = kl + ku;
        let mut ipiv = vec![0usize; n];
        let mut ju = 0usize;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = j * ldab + kv;
            let mut p = 0;
            let mut best = self.ab[col].norm();
            for i in 1..=km {
                let m = self.ab[col + i].norm();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            ipiv[j] = j + p;
            if !(best >= PIVOT_FLOOR) {
                return Err(Error::Singular {
                    index: j,
                    magnitude: best,
                });
            }
            ju = ju.max((j + ku + p).min(n - 1));
            if p != 0 {
                for c in j..=ju {
                    let a = c * ldab + kv + j - c;
                    self.ab.swap(a, a + p);
                }
            }
            if km == 0 {
                continue;
            }
            let inv = Complex64::new(1.0, 0.0) / self.ab[col];
            for v in &mut self.ab[col + 1..=col + km] {
                *v *= inv;
            }
            for c in j + 1..=ju {
                let top = c * ldab + kv + j - c;
                let f = self.ab[top];
                if f == ZERO {
                    continue;
                }
                let (head, tail) = self.ab.split_at_mut(top + 1);
                let mult = &head[col + 1..=col + km];
                for (t, &m) in tail[..km].iter_mut().zip(mult) {
                    *t -= m * f;
                }
            }
        }
        Ok(BandLu { band: self, ipiv })
    }
}

/// Output of [`BandMatrix::factor`].
#[derive(Clone, Debug)]
pub struct BandLu {
    band: BandMatrix,
    ipiv: Vec<usize>,
}

impl BandLu {
    pub fn dim(&self) -> usize {
        self.band.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.band.kl, self.band.ku)
    }

    /// Overwrites `b` with the solution of `A x = b`.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let BandMatrix {
            n,
            kl,
            ku,
            ldab,
            ref ab,
            ..
        } = self.band;
        let kv = kl + ku;
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = kl.min(n - 1 - j);
            let bj = b[j];
            if bj == ZERO {
                continue;
            }
            let col = j * ldab + kv;
            for i in 1..=km {
                b[j + i] -= ab[col + i] * bj;
            }
        }
        for j in (0..n).rev() {
            let col = j * ldab + kv;
            b[j] /= ab[col];
            let bj = b[j];
            if bj == ZERO {
                continue;
            }
            let lo = j.saturating_sub(kv);
            for i in lo..j {
                b[i] -= ab[col - (j - i)] * bj;
            }
        }
    }
}
