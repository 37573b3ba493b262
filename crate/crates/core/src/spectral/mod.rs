//! A set of levels coupled to a continuum: spectral densities, memory
//! kernels, numerical and closed-form Green's functions, and the
//! amplitude/phase decomposition of the Lorentzian solution.

mod analytic;
mod crossover;
mod density;
mod kernel;
pub mod quadrature;
mod volterra;

pub use analytic::{
    analytic_green1_lorentzian, analytic_green_const, lorentzian_gamma_zero_limit,
    half_rate_gamma_zero_limit,
};
pub use crossover::{
    amplitude_phase, critical_j1, crossover_sweep, logspace, AmplitudePhase, CrossoverRow,
};
pub use density::{spectral_eval, SpectralDensity};
pub use kernel::{lorentzian_kernel_amplitude, memory_kernel, KernelValue};
pub use volterra::{
    solve_green, GreenProblem, GreenSolution, LesserSource, StepGuard, CONVENTION_NOTE,
    STEP_GUARD_LIMIT,
};
