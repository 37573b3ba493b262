use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HERMITIAN_TOL};
use super::ops::hermitian_eigenvalues;
use crate::error::{Error, Result};

/// Unit-trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-PSD_FLOOR, 0)` are treated as roundoff.
pub const PSD_FLOOR: f64 = 1e-10;

/// A validated density matrix: Hermitian, unit trace and positive
/// semidefinite up to [`PSD_FLOOR`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_defect();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix not Hermitian (defect {herm:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        let min = hermitian_eigenvalues(&matrix)?
            .first()
            .copied()
            .unwrap_or(0.0);
        if min < -PSD_FLOOR {
            return Err(Error::Positivity {
                eigenvalue: min,
                floor: PSD_FLOOR,
            });
        }
        Ok(Self { matrix })
    }

    /// Validates after replacing the input by its Hermitian part; used on
    /// results of exact unitary evolution where only roundoff breaks the
    /// symmetry.
    pub fn from_evolved(matrix: ComplexMatrix) -> Result<Self> {
        Self::new(matrix.hermitian_part())
    }

    /// Image of an already validated state under a unitary; only the
    /// Hermitian part is taken, positivity is inherited.
    pub(crate) fn from_unitary_image(matrix: ComplexMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    /// Pure state |ψ⟩⟨ψ| from a normalized amplitude vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "amplitudes not normalized: Σ|c|² = {norm}"
            )));
        }
        Self::new(ComplexMatrix::outer(amplitudes, amplitudes))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// Basis projector |k⟩⟨k|.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Tr ρ², within roundoff.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

/// Von Neumann entropy −Σ λ log λ in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let mut s = 0.0;
    for lam in rho.eigenvalues()? {
        if lam < -PSD_FLOOR {
            return Err(Error::Positivity {
                eigenvalue: lam,
                floor: PSD_FLOOR,
            });
        }
        if lam > 0.0 {
            s -= lam * lam.ln();
        }
    }
    Ok(s)
}

/// Trace distance ½‖a − b‖₁.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!(
            "trace distance between dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let diff = a.matrix() - b.matrix();
    let sum: f64 = hermitian_eigenvalues(&diff)?.iter().map(|l| l.abs()).sum();
    Ok(0.5 * sum)
}
