//! Dense complex linear algebra on small composite spaces.
//!
//! Composite indices follow one convention everywhere: the system index is
//! slow and the environment index fast, so `|i, α⟩` sits at flat position
//! `i·dE + α`.

mod density;
mod matrix;
mod ops;

pub use density::{trace_distance, von_neumann_entropy, DensityMatrix, PSD_FLOOR, TRACE_TOL};
pub use matrix::{commutator, ComplexMatrix, HERMITIAN_TOL};
pub use ops::{
    expm_pade, hermitian_eigenvalues, hermitian_operator_norm, mat_exp, partial_trace_env,
    partial_trace_sys, tensor_product, tensor_product_with_limit, HermitianEigen,
    MAX_COMPOSITE_DIM,
};
