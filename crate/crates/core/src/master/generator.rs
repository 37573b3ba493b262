use num_complex::Complex64;

use crate::dynmap::{CompositeSpec, Evolver};
use crate::error::{Error, Result};
use crate::linalg::{
    commutator, partial_trace_env, tensor_product, ComplexMatrix, DensityMatrix, HermitianEigen,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tolerance for `[I⊗hE, |V|·hSE] = 0` and for the maximally mixed start.
pub const CONDITION_TOL: f64 = 1e-12;

/// `dρ_S/dt = Tr_E(−i[H, ρ(t)])` at elapsed time `t`.
pub fn exact_rho_dot(spec: &CompositeSpec, t: f64) -> Result<ComplexMatrix> {
    let evolver = Evolver::new(spec)?;
    rho_dot_with(&evolver, t)
}

pub(crate) fn rho_dot_with(evolver: &Evolver<'_>, t: f64) -> Result<ComplexMatrix> {
    let spec = evolver.spec();
    let rho = evolver.full_state(t)?;
    let flow = commutator(evolver.propagator().hamiltonian(), &rho).scale(-I);
    partial_trace_env(&flow, spec.d_s, spec.d_e)
}

/// Which of the known sufficient conditions for a time-local,
/// decoherence-free reduced generator hold for a spec.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientConditions {
    pub unique_env_state: bool,
    pub commuting_he_hse: bool,
    pub maximally_mixed_case: bool,
    pub none_hold: bool,
    /// Max entry of `[I⊗hE, |V|·hSE]`.
    pub commutator_norm: f64,
    /// Max entry of `ρ(0) − I/(dS·dE)`.
    pub mixed_deviation: f64,
}

pub(crate) fn env_commutator_norm(spec: &CompositeSpec) -> Result<f64> {
    let he = tensor_product(&ComplexMatrix::identity(spec.d_s), &spec.h_e)?;
    Ok(commutator(&he, &spec.interaction()).max_abs())
}

pub(crate) fn mixed_deviation(spec: &CompositeSpec) -> Result<f64> {
    let n = spec.dim();
    let rho0 = spec.initial.composite()?;
    Ok(rho0.max_abs_diff(&ComplexMatrix::identity(n).scale_real(1.0 / n as f64)))
}

pub fn classify_sufficient_conditions(spec: &CompositeSpec) -> Result<SufficientConditions> {
    let commutator_norm = env_commutator_norm(spec)?;
    let mixed_deviation = mixed_deviation(spec)?;
    let unique_env_state = spec.d_e == 1;
    let commuting_he_hse = commutator_norm < CONDITION_TOL;
    let maximally_mixed_case = mixed_deviation < CONDITION_TOL;
    Ok(SufficientConditions {
        unique_env_state,
        commuting_he_hse,
        maximally_mixed_case,
        none_hold: !(unique_env_state || commuting_he_hse || maximally_mixed_case),
        commutator_norm,
        mixed_deviation,
    })
}

/// `dS × dS` block `⟨α|M|α⟩` of a composite operator.
pub(crate) fn env_block(m: &ComplexMatrix, d_s: usize, d_e: usize, alpha: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d_s, d_s, |i, j| m[(i * d_e + alpha, j * d_e + alpha)])
}

/// Splitting of the system generator in the eigenbasis of `hS`.
///
/// `o_op = −i(dS_part + dSE_part + nSE_part)` satisfies `Ô + Ô† = 0`, and
/// `Σ_n L_n ρ R_n† = [Ô, ρ]` with `(L, R) = (Ô, I), (I, Ô)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterOperators {
    /// Columns are the `hS` eigenvectors; all other fields are expressed
    /// in this basis.
    pub basis: ComplexMatrix,
    pub o_op: ComplexMatrix,
    pub ds_part: ComplexMatrix,
    pub dse_part: ComplexMatrix,
    pub nse_part: ComplexMatrix,
    pub left_factors: Vec<ComplexMatrix>,
    pub right_factors: Vec<ComplexMatrix>,
}

impl MasterOperators {
    fn new(h_s: &ComplexMatrix, h_eff: &ComplexMatrix) -> Result<Self> {
        let eig = HermitianEigen::new(h_s)?;
        let basis = eig.vectors.clone();
        let rotated = basis.adjoint() * h_eff * &basis;
        let rotated = rotated.hermitian_part();
        let n = h_s.rows();
        let ds_part = ComplexMatrix::from_real_diagonal(&eig.values);
        let dse_part = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(rotated[(i, i)].re - eig.values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let nse_part = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(0.0, 0.0)
            } else {
                rotated[(i, j)]
            }
        });
        // the diagonal is assembled from the eigenvalues, so take it from
        // the sum to keep Ô exactly anti-Hermitian
        let generator = &(&ds_part + &dse_part) + &nse_part;
        let o_op = generator.hermitian_part().scale(-I);
        let id = ComplexMatrix::identity(n);
        Ok(Self {
            basis,
            left_factors: vec![o_op.clone(), id.clone()],
            right_factors: vec![id, o_op.clone()],
            o_op,
            ds_part,
            dse_part,
            nse_part,
        })
    }

    /// Max entry of `Ô + Ô†`.
    pub fn anti_hermiticity_defect(&self) -> f64 {
        (&self.o_op + &self.o_op.adjoint()).max_abs()
    }

    /// `Σ_n L_n ρ R_n†` for `ρ` given in the original basis; the result is
    /// returned in the original basis.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let local = self.basis.adjoint() * rho * &self.basis;
        let mut out = ComplexMatrix::zeros(rho.rows(), rho.cols());
        for (l, r) in self.left_factors.iter().zip(&self.right_factors) {
            out = &out + &(l * &local * r.adjoint());
        }
        self.basis.conjugate(&out)
    }
}

/// Commutator-form right-hand side and its agreement with the exact
/// derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveRhs {
    pub h_eff: ComplexMatrix,
    pub rhs: ComplexMatrix,
    /// Max entry of `exact_rho_dot − rhs`.
    pub residual: f64,
    pub operators: MasterOperators,
}

/// `hS + |V| Σ_α d_αα ⟨α|hSE|α⟩`: for a single environment state this is
/// the exact effective system Hamiltonian.
pub fn effective_hamiltonian(spec: &CompositeSpec) -> Result<ComplexMatrix> {
    let weights: DensityMatrix = spec.initial.environment_weights()?;
    let coupling = spec.interaction();
    let mut h = spec.h_s.clone();
    for alpha in 0..spec.d_e {
        let w = weights.matrix()[(alpha, alpha)].re;
        h = &h + &env_block(&coupling, spec.d_s, spec.d_e, alpha).scale_real(w);
    }
    Ok(h.hermitian_part())
}

/// `−i[H_eff, ρ_S(t)]` together with its residual against the exact
/// derivative. Only a one-state environment admits this form exactly; in
/// any other case the residual is returned inside a precondition error.
pub fn effective_commutator_rhs(spec: &CompositeSpec, t: f64) -> Result<EffectiveRhs> {
    let evolver = Evolver::new(spec)?;
    let h_eff = effective_hamiltonian(spec)?;
    let rho_s = evolver.system_state(t)?;
    let rhs = commutator(&h_eff, rho_s.matrix()).scale(-I);
    let residual = rho_dot_with(&evolver, t)?.max_abs_diff(&rhs);
    if spec.d_e != 1 {
        return Err(Error::Precondition {
            condition: "single environment state",
            measured: residual,
        });
    }
    let operators = MasterOperators::new(&spec.h_s, &h_eff)?;
    Ok(EffectiveRhs {
        h_eff,
        rhs,
        residual,
        operators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynmap::{evolve, InitialState};
    use crate::random::{random_amplitudes, random_hermitian, random_product_spec, rng_from_seed};

    #[test]
    fn derivative_at_start_without_coupling() {
        let mut rng = rng_from_seed(5);
        let spec = random_product_spec(&mut rng, 3, 2, 0.0);
        let rho0 = evolve(&spec, 0.0).unwrap().rho_s;
        let expect = commutator(&spec.h_s, rho0.matrix()).scale(-I);
        assert!(exact_rho_dot(&spec, 0.0).unwrap().max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let mut rng = rng_from_seed(6);
        for (ds, de) in [(2, 1), (2, 3), (3, 2)] {
            let spec = random_product_spec(&mut rng, ds, de, 1.0);
            let t = 0.8;
            let h = 1e-6;
            let plus = evolve(&spec, t + h).unwrap().rho_s.into_matrix();
            let minus = evolve(&spec, t - h).unwrap().rho_s.into_matrix();
            let fd = (&plus - &minus).scale_real(0.5 / h);
            let exact = exact_rho_dot(&spec, t).unwrap();
            assert!(exact.max_abs_diff(&fd) < 1e-8);
            assert!(exact.trace().norm() < 1e-12);
            assert!(exact.hermiticity_defect() < 1e-10);
        }
    }

    #[test]
    fn classification_cases() {
        let mut rng = rng_from_seed(7);
        let single = random_product_spec(&mut rng, 2, 1, 1.0);
        assert!(classify_sufficient_conditions(&single).unwrap().unique_env_state);

        let generic = random_product_spec(&mut rng, 2, 2, 1.0);
        let c = classify_sufficient_conditions(&generic).unwrap();
        assert!(c.none_hold && c.commutator_norm > 1e-3);

        let a = random_hermitian(&mut rng, 2);
        let blocks = ComplexMatrix::from_real_diagonal(&[0.3, -1.1]);
        let spec = CompositeSpec::new(
            2,
            2,
            random_hermitian(&mut rng, 2),
            ComplexMatrix::from_real_diagonal(&[0.5, 2.0]),
            tensor_product(&a, &blocks).unwrap(),
            1.0,
            generic.initial.clone(),
        )
        .unwrap();
        let c = classify_sufficient_conditions(&spec).unwrap();
        assert!(c.commuting_he_hse && !c.unique_env_state && !c.none_hold);

        let mixed = generic
            .with_initial(InitialState::Product {
                system: DensityMatrix::maximally_mixed(2),
                environment: DensityMatrix::maximally_mixed(2),
            })
            .unwrap();
        assert!(classify_sufficient_conditions(&mixed).unwrap().maximally_mixed_case);
    }

    #[test]
    fn single_environment_state_has_commutator_form() {
        let mut rng = rng_from_seed(8);
        for _ in 0..5 {
            let spec = random_product_spec(&mut rng, 3, 1, 2.0);
            let out = effective_commutator_rhs(&spec, 0.9).unwrap();
            assert!(out.residual < 1e-10, "{}", out.residual);
            assert_eq!(out.operators.anti_hermiticity_defect(), 0.0);
            let rho = evolve(&spec, 0.9).unwrap().rho_s.into_matrix();
            assert!(out.operators.apply(&rho).max_abs_diff(&out.rhs) < 1e-12);
            for k in 0..3 {
                assert_eq!(out.operators.dse_part[(k, (k + 1) % 3)], Complex64::new(0.0, 0.0));
                assert_eq!(out.operators.nse_part[(k, k)], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn uncoupled_rhs_is_free_commutator() {
        let mut rng = rng_from_seed(9);
        let spec = random_product_spec(&mut rng, 2, 1, 0.0);
        let out = effective_commutator_rhs(&spec, 1.7).unwrap();
        assert!(out.residual < 1e-12);
        assert!(out.h_eff.max_abs_diff(&spec.h_s) < 1e-15);
    }

    #[test]
    fn larger_environment_fails_precondition() {
        let mut rng = rng_from_seed(10);
        let base = random_product_spec(&mut rng, 2, 2, 1.0);
        let c = random_amplitudes(&mut rng, 2);
        let spec = base
            .with_initial(InitialState::product_pure(&c, DensityMatrix::maximally_mixed(2)).unwrap())
            .unwrap();
        match effective_commutator_rhs(&spec, 0.9) {
            Err(Error::Precondition { measured, .. }) => assert!(measured > 1e-3, "{measured}"),
            other => panic!("expected precondition error, got {other:?}"),
        }
    }
}
