//! Exact composite evolution and the divisibility structure of the reduced
//! dynamics.
//!
//! All specs are prepared at `t = 0`; maps depend only on elapsed time since
//! the Hamiltonian is static.

mod diagnostics;
mod evolution;
mod spec;
mod supermap;

pub use diagnostics::{
    distinguishability_witness, entropy_sie_check, environment_stationarity,
    factorization_degeneracy_check, EntropyReport, FactorizationReport, MarkovDiagnostics,
    WitnessPoint, WitnessTrace, BACKFLOW_TOL, COMMUTATOR_TOL, DEGENERACY_TOL, ENTROPY_FLATNESS_TOL,
    PROBE_TIMES,
};
pub use evolution::{evolve, EvolvedState, Evolver, Propagator};
pub use spec::{build_total_hamiltonian, CompositeSpec, InitialState};
pub use supermap::{
    divisibility_defect, divisibility_state_defect, entangled_divisibility, supermatrix, SuperMap,
    SuperMapBuilder,
};
