use std::f64::consts::PI;

use num_complex::Complex64;

use super::density::SpectralDensity;
use super::quadrature::{integrate, QuadratureOptions};
use crate::error::{Error, Result};

/// Memory kernel `v(Δt) = ∫ dω/2π J(ω) e^{−iωΔt}` split into a smooth part
/// and the weight of the `δ(Δt)` contribution from a flat background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub smooth: Complex64,
    pub delta_weight: f64,
}

/// Amplitude `κ` of the smooth Lorentzian kernel `κ·e^{−(iE₀+Γ)Δt}` for an
/// unbounded band: `∫ dω/2π J₁Γ²/((ω−E₀)²+Γ²) = J₁Γ/2`.
pub fn lorentzian_kernel_amplitude(j1: f64, gamma: f64) -> f64 {
    0.5 * j1 * gamma
}

const MAX_PANELS: usize = 100_000;

fn oscillation_panels(width: f64, dt: f64) -> usize {
    ((width * dt / PI).ceil() as usize).clamp(8, MAX_PANELS)
}

/// Evaluates the memory kernel at lag `dt ≥ 0`.
///
/// For a Lorentzian with infinite cut-off the closed form is used; finite
/// cut-offs and tabulated densities are integrated numerically.
pub fn memory_kernel(d: &SpectralDensity, dt: f64) -> Result<KernelValue> {
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("kernel lag must be finite and >= 0, got {dt}"),
        });
    }
    match d {
        SpectralDensity::Constant { j0 } => Ok(KernelValue {
            smooth: Complex64::new(0.0, 0.0),
            delta_weight: *j0,
        }),
        SpectralDensity::LorentzianPlusConstant {
            j0,
            j1,
            e0,
            gamma,
            omega_cut,
        } => {
            let phase = Complex64::new(0.0, -e0 * dt).exp();
            let smooth = if omega_cut.is_infinite() {
                phase * lorentzian_kernel_amplitude(*j1, *gamma) * (-gamma * dt).exp()
            } else {
                // the sine part is odd in ω−E₀ and drops out
                let g2 = gamma * gamma;
                let opts = QuadratureOptions {
                    abs_tol: 1e-13 * (j1 * gamma).max(f64::MIN_POSITIVE),
                    rel_tol: 1e-11,
                    max_intervals: 4 * MAX_PANELS,
                };
                let half = integrate(
                    |x| Complex64::new((x * dt).cos() / (x * x + g2), 0.0),
                    0.0,
                    *omega_cut,
                    oscillation_panels(*omega_cut, dt),
                    opts,
                )?;
                phase * (j1 * g2 / PI) * half.re
            };
            Ok(KernelValue {
                smooth,
                delta_weight: *j0,
            })
        }
        SpectralDensity::Tabulated { omega, values } => {
            let peak = values.iter().copied().fold(0.0, f64::max);
            let span = omega[omega.len() - 1] - omega[0];
            let opts = QuadratureOptions {
                abs_tol: 1e-13 * (peak * span).max(f64::MIN_POSITIVE),
                rel_tol: 1e-11,
                max_intervals: 4 * MAX_PANELS,
            };
            let mut total = Complex64::new(0.0, 0.0);
            for k in 0..omega.len() - 1 {
                let (w0, w1) = (omega[k], omega[k + 1]);
                let (v0, v1) = (values[k], values[k + 1]);
                let slope = (v1 - v0) / (w1 - w0);
                total += integrate(
                    |w| Complex64::new(0.0, -w * dt).exp() * (v0 + slope * (w - w0)),
                    w0,
                    w1,
                    oscillation_panels(w1 - w0, dt).min(1 + ((w1 - w0) * dt / PI) as usize),
                    opts,
                )?;
            }
            Ok(KernelValue {
                smooth: total / (2.0 * PI),
                delta_weight: 0.0,
            })
        }
    }
}
