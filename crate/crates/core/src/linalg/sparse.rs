//! Sparse complex matrices and reusable direct factorizations.

use num_complex::Complex64;
use rayon::prelude::*;
use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};
use crate::linalg::band::{BandLu, BandMatrix};
use crate::linalg::dense::{CMat, PIVOT_FLOOR};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square sparse complex matrix in CSR form.
#[derive(Clone, Debug)]
pub struct SparseComplexMatrix {
    mat: CsMat<Complex64>,
    symmetric: bool,
}

/// Accumulates `(row, col, value)` contributions; duplicates are summed in
/// insertion order so assembly is deterministic.
#[derive(Debug)]
pub struct TripletBuilder {
    tri: TriMat<Complex64>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            tri: TriMat::new((n, n)),
        }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        Self {
            tri: TriMat::with_capacity((n, n), cap),
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        self.tri.add_triplet(i, j, v);
    }

    pub fn build(self, symmetric: bool) -> SparseComplexMatrix {
        SparseComplexMatrix {
            mat: self.tri.to_csr(),
            symmetric,
        }
    }
}

impl SparseComplexMatrix {
    pub fn from_csr(mat: CsMat<Complex64>, symmetric: bool) -> Self {
        assert_eq!(mat.rows(), mat.cols(), "sparse operator must be square");
        Self { mat, symmetric }
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut b = TripletBuilder::new(values.len());
        for (i, &v) in values.iter().enumerate() {
            b.add(i, i, v);
        }
        b.build(true)
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn nnz(&self) -> usize {
        self.mat.nnz()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn csr(&self) -> &CsMat<Complex64> {
        &self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.mat.get(i, j).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.mat
            .outer_iterator()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(j, &v)| (i, j, v)).collect::<Vec<_>>())
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim());
        self.mat
            .outer_iterator()
            .map(|row| row.iter().map(|(j, &v)| v * x[j]).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat
            .data()
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖A − Aᵀ‖_F / ‖A‖_F` under the plain (non-conjugating) transpose.
    pub fn symmetry_defect(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let mut acc = 0.0;
        for (i, row) in self.mat.outer_iterator().enumerate() {
            for (j, &v) in row.iter() {
                acc += (v - self.get(j, i)).norm_sqr();
            }
        }
        acc.sqrt() / norm
    }

    pub fn to_dense(&self) -> CMat {
        let n = self.dim();
        let mut d = CMat::zeros(n, n);
        for (i, row) in self.mat.outer_iterator().enumerate() {
            for (j, &v) in row.iter() {
                d[(i, j)] += v;
            }
        }
        d
    }

    pub fn all_finite(&self) -> bool {
        self.mat
            .data()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Reusable direct factorization of a sparse matrix.
///
/// The equilibrated matrix is reordered with reverse Cuthill-McKee and
/// factored as a band with partial pivoting.
#[derive(Clone, Debug)]
pub struct FactorizationHandle {
    /// `perm[new] = old`
    perm: Vec<usize>,
    scale: Vec<f64>,
    lu: BandLu,
}

/// Factors `a`, reporting the original column index of a vanishing pivot.
pub fn sparse_factorize(a: &SparseComplexMatrix) -> Result<FactorizationHandle> {
    let n = a.dim();
    if n == 0 {
        return Ok(FactorizationHandle {
            perm: Vec::new(),
            scale: Vec::new(),
            lu: BandMatrix::zeros(0, 0, 0).factor()?,
        });
    }
    let csr = a.csr();

    let mut scale = vec![0.0f64; n];
    for (i, row) in csr.outer_iterator().enumerate() {
        for (j, v) in row.iter() {
            let m = v.norm();
            scale[i] = scale[i].max(m);
            scale[j] = scale[j].max(m);
        }
    }
    for (i, s) in scale.iter_mut().enumerate() {
        if !(*s >= PIVOT_FLOOR) {
            return Err(Error::Singular {
                index: i,
                magnitude: *s,
            });
        }
        *s = 1.0 / s.sqrt();
    }

    let perm = bandwidth_ordering(csr);
    let mut inv = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }

    let (mut kl, mut ku) = (0usize, 0usize);
    for (i, row) in csr.outer_iterator().enumerate() {
        for (j, _) in row.iter() {
            let (ni, nj) = (inv[i], inv[j]);
            if ni > nj {
                kl = kl.max(ni - nj);
            } else {
                ku = ku.max(nj - ni);
            }
        }
    }

    let mut band = BandMatrix::zeros(n, kl, ku);
    for (i, row) in csr.outer_iterator().enumerate() {
        for (j, &v) in row.iter() {
            band.add(inv[i], inv[j], v * (scale[i] * scale[j]));
        }
    }
    let lu = band.factor().map_err(|e| match e {
        Error::Singular { index, magnitude } => Error::Singular {
            index: perm[index],
            magnitude,
        },
        other => other,
    })?;
    Ok(FactorizationHandle { perm, scale, lu })
}

/// Reverse Cuthill-McKee on the symmetrized pattern; `result[new] = old`.
fn bandwidth_ordering(csr: &CsMat<Complex64>) -> Vec<usize> {
    let n = csr.rows();
    let mut tri = TriMat::<u8>::new((n, n));
    for (i, row) in csr.outer_iterator().enumerate() {
        for (j, _) in row.iter() {
            tri.add_triplet(i, j, 1);
            tri.add_triplet(j, i, 1);
        }
    }
    let pattern: CsMat<u8> = tri.to_csr();
    let order = sprs::linalg::reverse_cuthill_mckee(pattern.view());
    order.perm.vec()
}

impl FactorizationHandle {
    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Bandwidths `(kl, ku)` after reordering.
    pub fn bandwidths(&self) -> (usize, usize) {
        self.lu.bandwidths()
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.dim();
        assert_eq!(b.len(), n, "right-hand side length");
        let mut work: Vec<Complex64> = self
            .perm
            .iter()
            .map(|&old| b[old] * self.scale[old])
            .collect();
        self.lu.solve_in_place(&mut work);
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = work[new] * self.scale[old];
        }
    }

    /// Solve followed by up to `steps` rounds of iterative refinement
    /// against `a`, stopping once the residual no longer shrinks.
    pub fn solve_refined(
        &self,
        a: &SparseComplexMatrix,
        b: &[Complex64],
        steps: usize,
    ) -> Vec<Complex64> {
        let mut x = self.solve(b);
        let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let residual = |x: &[Complex64]| -> Vec<Complex64> {
            a.mul_vec(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect()
        };
        let mut r = residual(&x);
        let mut rn = norm(&r);
        for _ in 0..steps {
            if rn == 0.0 {
                break;
            }
            let dx = self.solve(&r);
            let candidate: Vec<Complex64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
            let r_new = residual(&candidate);
            let rn_new = norm(&r_new);
            if !(rn_new < rn) {
                break;
            }
            x = candidate;
            r = r_new;
            rn = rn_new;
        }
        x
    }

    /// Solves for every column of `b` independently.
    pub fn solve_columns(&self, b: &CMat) -> CMat {
        let n = self.dim();
        assert_eq!(b.nrows(), n, "right-hand side rows");
        let mut x = b.clone();
        if n == 0 {
            return x;
        }
        x.as_mut_slice()
            .par_chunks_mut(n)
            .for_each(|col| self.solve_in_place(col));
        x
    }
}
