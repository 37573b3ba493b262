use super::evolution::Evolver;
use super::spec::{CompositeSpec, InitialState};
use super::supermap::divisibility_defect;
use crate::error::{Error, Result};
use crate::grid::{finite_difference, TimeGrid};
use crate::linalg::{
    commutator, hermitian_eigenvalues, hermitian_operator_norm, trace_distance,
    von_neumann_entropy, DensityMatrix,
};

/// Energies closer than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Commutator norm below which `[H0, HSE]` counts as vanishing.
pub const COMMUTATOR_TOL: f64 = 1e-12;
/// Entropy drift allowed when the smaller factor is one-dimensional.
pub const ENTROPY_FLATNESS_TOL: f64 = 1e-9;
/// Growth rate of the trace distance above which non-Markovian backflow is
/// reported.
pub const BACKFLOW_TOL: f64 = 1e-8;
/// Generic time triple used to cross-check predictions.
pub const PROBE_TIMES: (f64, f64, f64) = (0.0, 0.7, 1.3);

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationReport {
    /// Max entry of `[hS⊗I + I⊗hE, |V|·hSE]`.
    pub commutator_norm: f64,
    /// Index pairs `(j, k)`, `j < k`, of degenerate hS eigenvalues.
    pub degenerate_pairs: Vec<(usize, usize)>,
    /// `None` when the environment has more than one state.
    pub predicted_divisible: Option<bool>,
    /// Divisibility defect at [`PROBE_TIMES`].
    pub measured_defect: f64,
}

/// Checks the commuting-factorization route to divisibility and lists the
/// degenerate system levels.
pub fn factorization_degeneracy_check(spec: &CompositeSpec) -> Result<FactorizationReport> {
    let h0 = spec.free_hamiltonian()?;
    let commutator_norm = commutator(&h0, &spec.interaction()).max_abs();
    let eps = hermitian_eigenvalues(&spec.h_s)?;
    let mut degenerate_pairs = Vec::new();
    for j in 0..eps.len() {
        for k in j + 1..eps.len() {
            if (eps[j] - eps[k]).abs() < DEGENERACY_TOL {
                degenerate_pairs.push((j, k));
            }
        }
    }
    let predicted_divisible = (spec.d_e == 1).then_some(commutator_norm < COMMUTATOR_TOL);
    let (t0, ts, t) = PROBE_TIMES;
    Ok(FactorizationReport {
        commutator_norm,
        degenerate_pairs,
        predicted_divisible,
        measured_defect: divisibility_defect(spec, t0, ts, t)?,
    })
}

/// Characteristic times and environment drift.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovDiagnostics {
    /// Spread of the hE spectrum.
    pub delta_e: f64,
    /// `1/Δ_E`, infinite for a flat spectrum.
    pub tau_c: f64,
    /// `1/(|V|² τ_c)`, infinite without coupling.
    pub tau_s: f64,
    /// `max_t D(ρ_E(t), ρ_E(t0))` over the grid.
    pub stationarity_defect: f64,
}

pub fn environment_stationarity(spec: &CompositeSpec, grid: &TimeGrid) -> Result<MarkovDiagnostics> {
    let ev = hermitian_eigenvalues(&spec.h_e)?;
    let delta_e = ev.last().copied().unwrap_or(0.0) - ev.first().copied().unwrap_or(0.0);
    let tau_c = if delta_e > 0.0 { 1.0 / delta_e } else { f64::INFINITY };
    let v2 = spec.coupling_strength * spec.coupling_strength;
    let tau_s = if v2 == 0.0 { f64::INFINITY } else { 1.0 / (v2 * tau_c) };
    let evolver = Evolver::new(spec)?;
    let reference = evolver.state(grid.t0())?.rho_e;
    let mut stationarity_defect: f64 = 0.0;
    for t in grid.times() {
        let rho_e = evolver.state(t)?.rho_e;
        stationarity_defect = stationarity_defect.max(trace_distance(&rho_e, &reference)?);
    }
    Ok(MarkovDiagnostics {
        delta_e,
        tau_c,
        tau_s,
        stationarity_defect,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessPoint {
    pub t: f64,
    pub distance: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessTrace {
    pub points: Vec<WitnessPoint>,
    /// Largest `dD/dt` on the grid.
    pub max_rate: f64,
    /// `max_rate > BACKFLOW_TOL`.
    pub backflow: bool,
}

/// Trace distance between the reduced evolutions of two system states that
/// share the spec's Hamiltonians and environment.
pub fn distinguishability_witness(
    state_a: &DensityMatrix,
    state_b: &DensityMatrix,
    spec: &CompositeSpec,
    grid: &TimeGrid,
) -> Result<WitnessTrace> {
    let InitialState::Product { environment, .. } = &spec.initial else {
        return Err(Error::InvalidState(
            "distinguishability witness needs a product initial state".into(),
        ));
    };
    let make = |s: &DensityMatrix| {
        spec.with_initial(InitialState::Product {
            system: s.clone(),
            environment: environment.clone(),
        })
    };
    let (spec_a, spec_b) = (make(state_a)?, make(state_b)?);
    let (ev_a, ev_b) = (Evolver::new(&spec_a)?, Evolver::new(&spec_b)?);
    let times: Vec<f64> = grid.times().collect();
    let distances = times
        .iter()
        .map(|&t| trace_distance(&ev_a.system_state(t)?, &ev_b.system_state(t)?))
        .collect::<Result<Vec<f64>>>()?;
    let rates = finite_difference(&distances, grid.step());
    let max_rate = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let points = times
        .into_iter()
        .zip(distances)
        .zip(rates)
        .map(|((t, distance), rate)| WitnessPoint { t, distance, rate })
        .collect();
    Ok(WitnessTrace {
        points,
        max_rate,
        backflow: max_rate > BACKFLOW_TOL,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    pub grid: TimeGrid,
    /// Σ_S(t) in nats.
    pub entropy: Vec<f64>,
    /// Finite-difference dΣ_S/dt at each grid point.
    pub rate: Vec<f64>,
    /// Largest |dΣ_S/dt| on the grid.
    pub max_rate: f64,
    /// `max_rate / (‖H‖ log δ)`; `None` when δ = 1.
    pub bound_ratio: Option<f64>,
    /// min(dS, dE).
    pub delta: usize,
    /// Operator norm of the total Hamiltonian.
    pub h_norm: f64,
    /// Reported constant in the rate bound.
    pub c_const: f64,
    /// `max_t |Σ_S(t) − Σ_S(t0)|`.
    pub flatness_defect: f64,
    /// Set when δ = 1; the entropy must then be constant.
    pub flat: Option<bool>,
}

pub fn entropy_sie_check(spec: &CompositeSpec, grid: &TimeGrid) -> Result<EntropyReport> {
    let evolver = Evolver::new(spec)?;
    let entropy = grid
        .times()
        .map(|t| von_neumann_entropy(&evolver.system_state(t)?))
        .collect::<Result<Vec<f64>>>()?;
    let rate = finite_difference(&entropy, grid.step());
    let max_rate = rate.iter().map(|r| r.abs()).fold(0.0, f64::max);
    let delta = spec.d_s.min(spec.d_e);
    let h_norm = hermitian_operator_norm(evolver.propagator().hamiltonian())?;
    let bound_ratio = (delta > 1).then(|| max_rate / (h_norm * (delta as f64).ln()));
    let flatness_defect = entropy
        .iter()
        .map(|s| (s - entropy[0]).abs())
        .fold(0.0, f64::max);
    Ok(EntropyReport {
        grid: *grid,
        entropy,
        rate,
        max_rate,
        bound_ratio,
        delta,
        h_norm,
        c_const: 1.0,
        flatness_defect,
        flat: (delta == 1).then_some(flatness_defect < ENTROPY_FLATNESS_TOL),
    })
}
