//! Dense and sparse complex kernels.

pub mod band;
pub mod dense;
pub mod schur;
pub mod sparse;
pub mod sylvester;

pub use band::{BandLu, BandMatrix};
pub use dense::{
    dense_inverse, dense_solve, dense_solve_right, frobenius_norm, relative_difference,
    symmetry_defect, CMat, CVec, DenseLu,
};
pub use schur::{hessenberg_triangular, schur, ComplexSchur, HessenbergTriangular};
pub use sparse::{sparse_factorize, FactorizationHandle, SparseComplexMatrix, TripletBuilder};
pub use sylvester::sylvester_generalized_solve;
