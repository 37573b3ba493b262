use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    partial_trace_sys, tensor_product, ComplexMatrix, DensityMatrix, HERMITIAN_TOL, MAX_COMPOSITE_DIM,
    TRACE_TOL,
};

/// Initial state of the composite system at the preparation time.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// Uncorrelated `ρ_S ⊗ ρ_E`.
    Product {
        system: DensityMatrix,
        environment: DensityMatrix,
    },
    /// Pure correlated state `Σ a[i,α] |i,α⟩`; `amplitudes` is `dS × dE`.
    Entangled { amplitudes: ComplexMatrix },
}

impl InitialState {
    /// `|ψ_S⟩⟨ψ_S| ⊗ ρ_E` with `ψ_S = Σ c_i |i⟩`.
    pub fn product_pure(c: &[Complex64], environment: DensityMatrix) -> Result<Self> {
        Ok(Self::Product {
            system: DensityMatrix::pure(c)?,
            environment,
        })
    }

    pub fn entangled(amplitudes: ComplexMatrix) -> Result<Self> {
        let norm: f64 = amplitudes.to_row_major().iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "entangled amplitudes not normalized: Σ|a|² = {norm}"
            )));
        }
        Ok(Self::Entangled { amplitudes })
    }

    fn dims(&self) -> (usize, usize) {
        match self {
            Self::Product {
                system,
                environment,
            } => (system.dim(), environment.dim()),
            Self::Entangled { amplitudes } => (amplitudes.rows(), amplitudes.cols()),
        }
    }

    /// Full composite density matrix.
    pub fn composite(&self) -> Result<ComplexMatrix> {
        match self {
            Self::Product {
                system,
                environment,
            } => tensor_product(system.matrix(), environment.matrix()),
            Self::Entangled { amplitudes } => {
                let psi = amplitudes.to_row_major();
                Ok(ComplexMatrix::outer(&psi, &psi))
            }
        }
    }

    /// Environment statistics `d_{α1α2}` seen at preparation time.
    pub fn environment_weights(&self) -> Result<DensityMatrix> {
        match self {
            Self::Product { environment, .. } => Ok(environment.clone()),
            Self::Entangled { .. } => {
                let (ds, de) = self.dims();
                let rho = self.composite()?;
                DensityMatrix::from_evolved(partial_trace_sys(&rho, ds, de)?)
            }
        }
    }

    /// Whether ρ_E at preparation time is pure (Tr ρ_E² = 1).
    pub fn environment_is_pure(&self) -> Result<bool> {
        Ok((self.environment_weights()?.purity() - 1.0).abs() < 1e-10)
    }
}

/// System, environment and coupling Hamiltonians plus the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSpec {
    pub d_s: usize,
    pub d_e: usize,
    pub h_s: ComplexMatrix,
    pub h_e: ComplexMatrix,
    pub h_se: ComplexMatrix,
    /// Multiplier |V| applied to `h_se`.
    pub coupling_strength: f64,
    pub initial: InitialState,
}

fn check_hermitian(name: &str, m: &ComplexMatrix, dim: usize) -> Result<()> {
    if m.rows() != dim || m.cols() != dim {
        return Err(Error::Shape(format!(
            "{name} must be {dim}x{dim}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::InvalidState(format!(
            "{name} is not Hermitian (defect {defect:e})"
        )));
    }
    Ok(())
}

impl CompositeSpec {
    pub fn new(
        d_s: usize,
        d_e: usize,
        h_s: ComplexMatrix,
        h_e: ComplexMatrix,
        h_se: ComplexMatrix,
        coupling_strength: f64,
        initial: InitialState,
    ) -> Result<Self> {
        if d_s == 0 || d_e == 0 {
            return Err(Error::Shape("dimensions must be positive".into()));
        }
        let dim = d_s * d_e;
        if dim > MAX_COMPOSITE_DIM {
            return Err(Error::Sizing {
                dim,
                max: MAX_COMPOSITE_DIM,
            });
        }
        check_hermitian("hS", &h_s, d_s)?;
        check_hermitian("hE", &h_e, d_e)?;
        check_hermitian("hSE", &h_se, dim)?;
        if !coupling_strength.is_finite() {
            return Err(Error::InvalidParameter {
                name: "coupling_strength",
                reason: "must be finite".into(),
            });
        }
        if initial.dims() != (d_s, d_e) {
            return Err(Error::Shape(format!(
                "initial state has dimensions {:?}, spec has ({d_s}, {d_e})",
                initial.dims()
            )));
        }
        Ok(Self {
            d_s,
            d_e,
            h_s,
            h_e,
            h_se,
            coupling_strength,
            initial,
        })
    }

    pub fn dim(&self) -> usize {
        self.d_s * self.d_e
    }

    /// Same Hamiltonians with a different initial state.
    pub fn with_initial(&self, initial: InitialState) -> Result<Self> {
        Self::new(
            self.d_s,
            self.d_e,
            self.h_s.clone(),
            self.h_e.clone(),
            self.h_se.clone(),
            self.coupling_strength,
            initial,
        )
    }

    pub fn with_coupling(&self, coupling_strength: f64) -> Self {
        Self {
            coupling_strength,
            ..self.clone()
        }
    }

    /// Scaled interaction `|V|·hSE`.
    pub fn interaction(&self) -> ComplexMatrix {
        self.h_se.scale_real(self.coupling_strength)
    }

    /// `hS ⊗ I_E + I_S ⊗ hE` on the composite space.
    pub fn free_hamiltonian(&self) -> Result<ComplexMatrix> {
        let hs = tensor_product(&self.h_s, &ComplexMatrix::identity(self.d_e))?;
        let he = tensor_product(&ComplexMatrix::identity(self.d_s), &self.h_e)?;
        Ok(&hs + &he)
    }
}

/// `hS ⊗ I_E + I_S ⊗ hE + |V|·hSE`.
pub fn build_total_hamiltonian(spec: &CompositeSpec) -> Result<ComplexMatrix> {
    Ok(&spec.free_hamiltonian()? + &spec.interaction())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigenvalues;
    use crate::random::{random_hermitian, random_product_spec, rng_from_seed};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn uncoupled(h_s: ComplexMatrix, d_e: usize) -> CompositeSpec {
        let d_s = h_s.rows();
        let c0: Vec<Complex64> = (0..d_s).map(|k| c(if k == 0 { 1.0 } else { 0.0 }, 0.0)).collect();
        CompositeSpec::new(
            d_s,
            d_e,
            h_s,
            ComplexMatrix::zeros(d_e, d_e),
            ComplexMatrix::zeros(d_s * d_e, d_s * d_e),
            1.0,
            InitialState::product_pure(&c0, DensityMatrix::basis(d_e, 0)).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn uncoupled_spectrum_is_degenerate_copy() {
        let spec = uncoupled(ComplexMatrix::from_real_diagonal(&[0.5, 2.0]), 3);
        let h = build_total_hamiltonian(&spec).unwrap();
        let ev = hermitian_eigenvalues(&h).unwrap();
        let expected = [0.5, 0.5, 0.5, 2.0, 2.0, 2.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_coupling_reproduces_free_sum() {
        let mut rng = rng_from_seed(5);
        let spec = random_product_spec(&mut rng, 2, 2, 0.0);
        let h = build_total_hamiltonian(&spec).unwrap();
        assert_eq!(h, spec.free_hamiltonian().unwrap());
    }

    #[test]
    fn total_hamiltonian_is_hermitian() {
        let mut rng = rng_from_seed(6);
        let spec = random_product_spec(&mut rng, 2, 2, 1.0);
        let h = build_total_hamiltonian(&spec).unwrap();
        assert!(h.hermiticity_defect() < 1e-14);
    }

    #[test]
    fn spec_validation() {
        let mut rng = rng_from_seed(1);
        let spec = random_product_spec(&mut rng, 2, 2, 1.0);
        let mut bad = spec.h_s.clone();
        bad[(0, 1)] += c(0.5, 0.0);
        let err = CompositeSpec::new(2, 2, bad, spec.h_e.clone(), spec.h_se.clone(), 1.0, spec.initial.clone());
        assert!(matches!(err, Err(Error::InvalidState(_))));
        let big = random_hermitian(&mut rng, 65);
        let err = CompositeSpec::new(13, 5, spec.h_s.clone(), spec.h_e.clone(), big, 1.0, spec.initial.clone());
        assert!(matches!(err, Err(Error::Sizing { dim: 65, .. })));
        let wrong_dims = spec.with_initial(InitialState::product_pure(&[c(1.0, 0.0)], DensityMatrix::basis(2, 0)).unwrap());
        assert!(matches!(wrong_dims, Err(Error::Shape(_))));
    }

    #[test]
    fn entangled_normalization_and_weights() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = ComplexMatrix::from_real_rows(&[vec![s, 0.0], vec![0.0, s]]).unwrap();
        let init = InitialState::entangled(a).unwrap();
        let w = init.environment_weights().unwrap();
        assert!(w.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
        assert!(!init.environment_is_pure().unwrap());
        let bad = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0]]).unwrap();
        assert!(InitialState::entangled(bad).is_err());
    }
}
