use crate::error::{Error, Result};

/// Environment spectral function `J(ω)`, diagonal and equal for every
/// system level.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralDensity {
    /// Flat background `J₀` over the whole real line.
    Constant { j0: f64 },
    /// `J₀ + J₁Γ²/((ω−E₀)²+Γ²)` for `|ω−E₀| ≤ Ω`, `J₀` elsewhere.
    /// `omega_cut` may be `f64::INFINITY`.
    LorentzianPlusConstant {
        j0: f64,
        j1: f64,
        e0: f64,
        gamma: f64,
        omega_cut: f64,
    },
    /// Piecewise-linear samples; zero outside the sampled range.
    Tabulated { omega: Vec<f64>, values: Vec<f64> },
}

fn nonneg(name: &'static str, x: f64) -> Result<()> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and >= 0, got {x}"),
        });
    }
    Ok(())
}

impl SpectralDensity {
    pub fn constant(j0: f64) -> Result<Self> {
        nonneg("j0", j0)?;
        Ok(Self::Constant { j0 })
    }

    pub fn lorentzian(j0: f64, j1: f64, e0: f64, gamma: f64, omega_cut: f64) -> Result<Self> {
        nonneg("j0", j0)?;
        nonneg("j1", j1)?;
        if !e0.is_finite() {
            return Err(Error::InvalidParameter {
                name: "e0",
                reason: format!("must be finite, got {e0}"),
            });
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("must be finite and > 0, got {gamma}"),
            });
        }
        if omega_cut.is_nan() || omega_cut <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "omega_cut",
                reason: format!("must be > 0 (possibly infinite), got {omega_cut}"),
            });
        }
        Ok(Self::LorentzianPlusConstant {
            j0,
            j1,
            e0,
            gamma,
            omega_cut,
        })
    }

    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "table",
                reason: "need at least two samples".into(),
            });
        }
        for &(om, j) in points {
            if !om.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "table",
                    reason: "non-finite frequency".into(),
                });
            }
            nonneg("table", j)?;
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidParameter {
                    name: "table",
                    reason: format!("frequencies not strictly increasing at {}", w[1].0),
                });
            }
        }
        Ok(Self::Tabulated {
            omega: points.iter().map(|p| p.0).collect(),
            values: points.iter().map(|p| p.1).collect(),
        })
    }

    /// Flat background that acts as an instantaneous (delta) kernel.
    pub fn background(&self) -> f64 {
        match self {
            Self::Constant { j0 } | Self::LorentzianPlusConstant { j0, .. } => *j0,
            Self::Tabulated { .. } => 0.0,
        }
    }

    /// Peak of the structured part, used by the step-size guard.
    pub fn structured_peak(&self) -> f64 {
        match self {
            Self::Constant { .. } => 0.0,
            Self::LorentzianPlusConstant { j1, .. } => *j1,
            Self::Tabulated { values, .. } => values.iter().copied().fold(0.0, f64::max),
        }
    }
}

/// Evaluates `J(ω)`.
pub fn spectral_eval(d: &SpectralDensity, omega: f64) -> f64 {
    match d {
        SpectralDensity::Constant { j0 } => *j0,
        SpectralDensity::LorentzianPlusConstant {
            j0,
            j1,
            e0,
            gamma,
            omega_cut,
        } => {
            let x = omega - e0;
            if x.abs() <= *omega_cut {
                j0 + j1 * gamma * gamma / (x * x + gamma * gamma)
            } else {
                *j0
            }
        }
        SpectralDensity::Tabulated { omega: om, values } => {
            let n = om.len();
            if omega < om[0] || omega > om[n - 1] {
                return 0.0;
            }
            let k = om.partition_point(|&w| w <= omega).clamp(1, n - 1);
            let (w0, w1) = (om[k - 1], om[k]);
            let frac = (omega - w0) / (w1 - w0);
            values[k - 1] + frac * (values[k] - values[k - 1])
        }
    }
}
