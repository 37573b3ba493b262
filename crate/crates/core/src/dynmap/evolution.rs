use num_complex::Complex64;

use super::spec::{build_total_hamiltonian, CompositeSpec};
use crate::error::{Error, Result};
use crate::linalg::{
    partial_trace_env, partial_trace_sys, ComplexMatrix, DensityMatrix, HermitianEigen,
};

/// Cached spectral decomposition of the total Hamiltonian; hands out
/// `U(Δt) = exp(−iHΔt)` for any elapsed time.
#[derive(Debug, Clone)]
pub struct Propagator {
    hamiltonian: ComplexMatrix,
    eigen: HermitianEigen,
}

impl Propagator {
    pub fn new(spec: &CompositeSpec) -> Result<Self> {
        let hamiltonian = build_total_hamiltonian(spec)?;
        let eigen = HermitianEigen::new(&hamiltonian)?;
        Ok(Self { hamiltonian, eigen })
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    /// `exp(−iHΔt)`; exactly the identity at `Δt = 0`.
    pub fn unitary(&self, dt: f64) -> ComplexMatrix {
        if dt == 0.0 {
            return ComplexMatrix::identity(self.hamiltonian.rows());
        }
        self.eigen.apply(|l| Complex64::new(0.0, -l * dt).exp())
    }
}

/// Reduced and full states at one instant.
#[derive(Debug, Clone)]
pub struct EvolvedState {
    pub rho_s: DensityMatrix,
    pub rho_e: DensityMatrix,
    pub rho_full: DensityMatrix,
}

pub(crate) fn reduced_state(m: ComplexMatrix) -> Result<DensityMatrix> {
    if m.rows() == 1 {
        // a one-dimensional factor is the number 1, with no roundoff
        return DensityMatrix::new(ComplexMatrix::identity(1));
    }
    DensityMatrix::from_evolved(m)
}

/// Evolves composite states of one spec; the preparation time is `t = 0`.
#[derive(Debug, Clone)]
pub struct Evolver<'a> {
    spec: &'a CompositeSpec,
    propagator: Propagator,
    initial: ComplexMatrix,
}

impl<'a> Evolver<'a> {
    pub fn new(spec: &'a CompositeSpec) -> Result<Self> {
        Ok(Self {
            spec,
            propagator: Propagator::new(spec)?,
            initial: spec.initial.composite()?,
        })
    }

    pub fn spec(&self) -> &CompositeSpec {
        self.spec
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    /// Full composite state at elapsed time `t`.
    pub fn full_state(&self, t: f64) -> Result<ComplexMatrix> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: format!("evolution time {t} precedes the preparation time 0"),
            });
        }
        Ok(self.propagator.unitary(t).conjugate(&self.initial))
    }

    pub fn state(&self, t: f64) -> Result<EvolvedState> {
        let full = self.full_state(t)?;
        let (ds, de) = (self.spec.d_s, self.spec.d_e);
        let rho_s = reduced_state(partial_trace_env(&full, ds, de)?)?;
        let rho_e = reduced_state(partial_trace_sys(&full, ds, de)?)?;
        Ok(EvolvedState {
            rho_s,
            rho_e,
            rho_full: DensityMatrix::from_unitary_image(full),
        })
    }

    pub fn system_state(&self, t: f64) -> Result<DensityMatrix> {
        let full = self.full_state(t)?;
        reduced_state(partial_trace_env(&full, self.spec.d_s, self.spec.d_e)?)
    }
}

/// `ρ(t) = U ρ(0) U†` with `U = exp(−iHt)` and its two marginals.
pub fn evolve(spec: &CompositeSpec, t: f64) -> Result<EvolvedState> {
    Evolver::new(spec)?.state(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynmap::InitialState;
    use crate::linalg::{mat_exp, von_neumann_entropy, HERMITIAN_TOL};
    use crate::random::{random_amplitudes, random_hermitian, random_product_spec, rng_from_seed};

    #[test]
    fn initial_time_gives_product_marginal() {
        let mut rng = rng_from_seed(21);
        let spec = random_product_spec(&mut rng, 3, 2, 1.0);
        let st = evolve(&spec, 0.0).unwrap();
        let InitialState::Product { system, .. } = &spec.initial else {
            unreachable!()
        };
        assert!(st.rho_s.matrix().max_abs_diff(system.matrix()) < 1e-15);
    }

    #[test]
    fn uncoupled_evolution_is_unitary_on_system() {
        let mut rng = rng_from_seed(22);
        let spec = random_product_spec(&mut rng, 3, 2, 0.0);
        let t = 1.7;
        let st = evolve(&spec, t).unwrap();
        let us = mat_exp(&spec.h_s, Complex64::new(0.0, -t)).unwrap();
        let InitialState::Product { system, .. } = &spec.initial else {
            unreachable!()
        };
        let expected = us.conjugate(system.matrix());
        assert!(st.rho_s.matrix().max_abs_diff(&expected) < 1e-12);
        assert!(von_neumann_entropy(&st.rho_s).unwrap() < 1e-9);
    }

    #[test]
    fn single_environment_state_matches_block_formula() {
        // dE = 1: ρ_S(t)_{j1j2} = Σ c_{i1}c*_{i2} ⟨j1η|U|i1η⟩⟨i2η|U†|j2η⟩
        let mut rng = rng_from_seed(23);
        let h_s = random_hermitian(&mut rng, 3);
        let h_se = random_hermitian(&mut rng, 3);
        let c = random_amplitudes(&mut rng, 3);
        let spec = CompositeSpec::new(
            3,
            1,
            h_s,
            ComplexMatrix::from_real_diagonal(&[0.4]),
            h_se,
            2.5,
            InitialState::product_pure(&c, DensityMatrix::basis(1, 0)).unwrap(),
        )
        .unwrap();
        let t = 0.9;
        let h = build_total_hamiltonian(&spec).unwrap();
        let u = mat_exp(&h, Complex64::new(0.0, -t)).unwrap();
        let mut expected = ComplexMatrix::zeros(3, 3);
        for j1 in 0..3 {
            for j2 in 0..3 {
                let mut acc = Complex64::new(0.0, 0.0);
                for i1 in 0..3 {
                    for i2 in 0..3 {
                        acc += c[i1] * c[i2].conj() * u[(j1, i1)] * u[(j2, i2)].conj();
                    }
                }
                expected[(j1, j2)] = acc;
            }
        }
        let st = evolve(&spec, t).unwrap();
        assert!(st.rho_s.matrix().max_abs_diff(&expected) < 1e-12);
        assert_eq!(st.rho_e.matrix()[(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn reduced_states_stay_valid() {
        let mut rng = rng_from_seed(24);
        for _ in 0..5 {
            let spec = random_product_spec(&mut rng, 3, 4, 3.0);
            let ev = Evolver::new(&spec).unwrap();
            for k in 0..10 {
                let st = ev.state(0.37 * k as f64).unwrap();
                assert!(st.rho_s.matrix().hermiticity_defect() <= HERMITIAN_TOL);
                assert!((st.rho_s.matrix().trace().re - 1.0).abs() < 1e-12);
                assert!(st.rho_s.eigenvalues().unwrap()[0] > -1e-10);
            }
        }
    }

    #[test]
    fn negative_time_rejected() {
        let mut rng = rng_from_seed(25);
        let spec = random_product_spec(&mut rng, 2, 2, 1.0);
        assert!(matches!(evolve(&spec, -0.1), Err(Error::InvalidParameter { .. })));
    }
}
