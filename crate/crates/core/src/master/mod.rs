//! Time-local master-equation structure of the reduced dynamics: exact
//! derivative, the sufficient conditions for a commutator generator, and
//! oracles for the commuting and maximally mixed cases.

mod generator;
mod oracles;

pub use generator::{
    classify_sufficient_conditions, effective_commutator_rhs, effective_hamiltonian, exact_rho_dot,
    EffectiveRhs, MasterOperators, SufficientConditions, CONDITION_TOL,
};
pub use oracles::{
    commuting_block_evolution, maximally_mixed_invariance, BlockEvolution, MixedInvariance,
    BLOCK_TOL,
};
