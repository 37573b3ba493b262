use num_complex::Complex64;

use super::crossover::amplitude_phase;
use super::volterra::{GreenSolution, CONVENTION_NOTE};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::ComplexMatrix;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn check_levels(es: &[f64]) -> Result<()> {
    if es.is_empty() || es.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "es",
            reason: "level energies must be a nonempty list of finite numbers".into(),
        });
    }
    Ok(())
}

fn check_j0(j0: f64) -> Result<()> {
    if !(j0.is_finite() && j0 >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "j0",
            reason: format!("must be finite and >= 0, got {j0}"),
        });
    }
    Ok(())
}

// Diagonal Green's matrices with G(t0) = I exactly.
fn diagonal_series(es: &[f64], grid: &TimeGrid, f: impl Fn(f64, f64) -> Complex64) -> Vec<ComplexMatrix> {
    let t0 = grid.t0();
    grid.times()
        .enumerate()
        .map(|(k, t)| {
            if k == 0 {
                ComplexMatrix::identity(es.len())
            } else {
                let diag: Vec<Complex64> = es.iter().map(|&e| f(e, t - t0)).collect();
                ComplexMatrix::from_diagonal(&diag)
            }
        })
        .collect()
}

/// Markovian solution for a flat spectral density: exponential decay at
/// rate `J₀`, with the lesser function `J₀s·e^{−i(e−iJ₀)s}`.
pub fn analytic_green_const(es: &[f64], j0: f64, grid: &TimeGrid) -> Result<GreenSolution> {
    check_levels(es)?;
    check_j0(j0)?;
    let decay = |e: f64, s: f64| (-I * Complex64::new(e, -j0) * s).exp();
    let g1 = diagonal_series(es, grid, decay);
    let mut g2 = diagonal_series(es, grid, |e, s| j0 * s * decay(e, s));
    g2[0] = ComplexMatrix::zeros(es.len(), es.len());
    Ok(GreenSolution {
        grid: *grid,
        g1,
        g2: Some(g2),
        convention_note: CONVENTION_NOTE,
        step_guard: None,
    })
}

/// Closed-form retarded function for a Lorentzian resonance on a flat
/// background with unbounded band.
pub fn analytic_green1_lorentzian(
    es: &[f64],
    j0: f64,
    j1: f64,
    e0: f64,
    gamma: f64,
    grid: &TimeGrid,
) -> Result<GreenSolution> {
    check_levels(es)?;
    check_j0(j0)?;
    let decomp = es
        .iter()
        .map(|&e| amplitude_phase(e, j0, j1, e0, gamma))
        .collect::<Result<Vec<_>>>()?;
    let t0 = grid.t0();
    let g1 = grid
        .times()
        .enumerate()
        .map(|(k, t)| {
            if k == 0 {
                ComplexMatrix::identity(es.len())
            } else {
                let diag: Vec<Complex64> = decomp.iter().map(|ap| ap.green(t - t0)).collect();
                ComplexMatrix::from_diagonal(&diag)
            }
        })
        .collect();
    Ok(GreenSolution {
        grid: *grid,
        g1,
        g2: None,
        convention_note: CONVENTION_NOTE,
        step_guard: None,
    })
}

/// Narrow-resonance limit of the Lorentzian solution: the resonance
/// decouples and the Markovian form `e^{−i(e−iJ₀)s}` remains.
pub fn lorentzian_gamma_zero_limit(es: &[f64], j0: f64, grid: &TimeGrid) -> Result<GreenSolution> {
    check_levels(es)?;
    check_j0(j0)?;
    let g1 = diagonal_series(es, grid, |e, s| (-I * Complex64::new(e, -j0) * s).exp());
    Ok(GreenSolution {
        grid: *grid,
        g1,
        g2: None,
        convention_note: CONVENTION_NOTE,
        step_guard: None,
    })
}

/// The half-rate form `e^{−(i/2)(e−iJ₀)s}` sometimes quoted for the narrow
/// resonance limit. Kept for comparison; the closed form does not reduce
/// to it.
pub fn half_rate_gamma_zero_limit(es: &[f64], j0: f64, grid: &TimeGrid) -> Result<GreenSolution> {
    check_levels(es)?;
    check_j0(j0)?;
    let g1 = diagonal_series(es, grid, |e, s| (-0.5 * I * Complex64::new(e, -j0) * s).exp());
    Ok(GreenSolution {
        grid: *grid,
        g1,
        g2: None,
        convention_note: CONVENTION_NOTE,
        step_guard: None,
    })
}
